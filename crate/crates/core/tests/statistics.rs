//! Statistical oracles for the prior sampler and the filters' innovation consistency.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use ins_eqf::eqf::FilterConfig;
use ins_eqf::sim::{run_monte_carlo, sample_prior, stream_rng, NoiseSpec, PriorSpec, Stream, TrajectorySpec};
use ins_eqf::symmetry::SymmetryKind;

/// Asymptotic p-value of the one-sample Kolmogorov-Smirnov statistic `d` over `n` draws.
fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    p.clamp(0.0, 1.0)
}

#[test]
fn attitude_draws_match_the_per_axis_prior() {
    let prior = PriorSpec::default();
    let sigma = prior.attitude_deg.to_radians();
    let mut rng = stream_rng(11, 0, Stream::Prior);
    // ‖φ‖²/σ² is chi-square with three degrees of freedom.
    let mut z: Vec<f64> = (0..4000)
        .map(|_| {
            let phi = sample_prior(&prior, &mut rng).rot.log().unwrap();
            phi.norm_squared() / (sigma * sigma)
        })
        .collect();
    z.sort_by(f64::total_cmp);
    let chi = ChiSquared::new(3.0).unwrap();
    let n = z.len() as f64;
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = chi.cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    let p = ks_p_value(d, z.len());
    assert!(p > 0.01, "KS statistic {d}, p = {p}");
}

#[test]
fn ks_p_value_rejects_a_wrong_scale() {
    let mut rng = stream_rng(12, 0, Stream::Prior);
    let prior = PriorSpec::default();
    let wrong = (prior.attitude_deg * 1.2).to_radians();
    let mut z: Vec<f64> = (0..4000).map(|_| sample_prior(&prior, &mut rng).rot.log().unwrap().norm_squared() / (wrong * wrong)).collect();
    z.sort_by(f64::total_cmp);
    let chi = ChiSquared::new(3.0).unwrap();
    let n = z.len() as f64;
    let d = z.iter().enumerate().map(|(i, &x)| (chi.cdf(x) - (i + 1) as f64 / n).abs()).fold(0.0, f64::max);
    assert!(ks_p_value(d, z.len()) < 0.01);
}

#[test]
fn innovations_are_consistent() {
    let spec = TrajectorySpec { duration: 30.0, seed: 4, ..Default::default() };
    let art = run_monte_carlo(&spec, &NoiseSpec::default(), &SymmetryKind::ALL, 8, &FilterConfig::default());
    for (ki, kind) in art.kinds.iter().enumerate() {
        // Second half of every run, past the initial transient.
        let nis: Vec<f64> =
            art.runs.iter().flat_map(|r| r.filters[ki].epochs.iter().filter(|e| e.t > spec.duration / 2.0).filter_map(|e| e.nis)).collect();
        assert!(nis.len() >= 500, "{kind}: {} updates", nis.len());
        let mean = nis.iter().sum::<f64>() / nis.len() as f64;
        assert!((mean - 1.0).abs() <= 0.3, "{kind}: mean NIS {mean}");
    }
}
