//! Synthetic trajectories, sensor logs, prior sampling and the Monte-Carlo runner.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eqf::{self, FilterConfig, FilterState, NoiseConfig, PositionMeasurement};
use crate::ins::{Gravity, InsInput, InsState};
use crate::lie::{so3, So3, Vec3};
use crate::symmetry::{chart, error, SymmetryElement, SymmetryKind};

/// Sum-of-sinusoids motion: each axis follows `amp (1 − cos(2π f t))`, for position and
/// for the attitude rotation vector, so the nominal trajectory starts at rest at the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotionSpec {
    pub pos_amp: [f64; 3],
    pub pos_freq: [f64; 3],
    pub att_amp: [f64; 3],
    pub att_freq: [f64; 3],
}

impl Default for MotionSpec {
    fn default() -> Self {
        Self { pos_amp: [2.0, 1.5, 0.5], pos_freq: [0.1, 0.15, 0.2], att_amp: [0.5, 0.5, 1.5], att_freq: [0.3, 0.25, 0.05] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySpec {
    /// Seconds.
    pub duration: f64,
    /// Hz.
    pub imu_rate: f64,
    /// Hz; must divide `imu_rate`.
    pub gnss_rate: f64,
    pub motion: MotionSpec,
    pub seed: u64,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self { duration: 30.0, imu_rate: 200.0, gnss_rate: 10.0, motion: MotionSpec::default(), seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("imu_rate ({imu}) must be an integer multiple of gnss_rate ({gnss})")]
    RateRatio { imu: f64, gnss: f64 },
    #[error("{0} must be non-negative and finite")]
    Negative(&'static str),
}

impl TrajectorySpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        for (v, name) in [(self.duration, "duration"), (self.imu_rate, "imu_rate"), (self.gnss_rate, "gnss_rate")] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SpecError::NonPositive(name));
            }
        }
        let ratio = self.imu_rate / self.gnss_rate;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(SpecError::RateRatio { imu: self.imu_rate, gnss: self.gnss_rate });
        }
        Ok(())
    }

    /// IMU samples per position fix.
    pub fn decimation(&self) -> usize {
        (self.imu_rate / self.gnss_rate).round() as usize
    }

    pub fn imu_steps(&self) -> usize {
        (self.duration * self.imu_rate).round() as usize
    }
}

/// Prior spread of the true initial state around the identity the filters start from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorSpec {
    /// Degrees per axis.
    pub attitude_deg: f64,
    /// m/s per axis.
    pub velocity: f64,
    /// m per axis.
    pub position: f64,
    /// rad/s per axis.
    pub gyro_bias: f64,
    /// m/s² per axis.
    pub acc_bias: f64,
    /// m/s per axis; belief only, the true virtual bias is zero.
    pub virtual_bias: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self { attitude_deg: 20.0, velocity: 0.5, position: 1.0, gyro_bias: 0.01, acc_bias: 0.1, virtual_bias: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// rad/s/√Hz.
    pub gyro_noise: f64,
    /// m/s²/√Hz.
    pub acc_noise: f64,
    /// rad/s·√s.
    pub gyro_walk: f64,
    /// m/s²·√s.
    pub acc_walk: f64,
    /// Virtual velocity input density of the tangent-group filter, m/s/√Hz.
    pub vel_noise: f64,
    /// Virtual bias random walk of the tangent-group filter, m/s·√s.
    pub vel_walk: f64,
    /// Position fix standard deviation per axis, m.
    pub position: f64,
    /// Standard deviation of the `b_ν = 0` pseudo-measurement, m/s.
    pub virtual_bias_meas: f64,
    pub prior: PriorSpec,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            gyro_noise: 2e-3,
            acc_noise: 2e-2,
            gyro_walk: 0.01,
            acc_walk: 0.01,
            vel_noise: 0.01,
            vel_walk: 0.01,
            position: 0.2,
            virtual_bias_meas: 0.1,
            prior: PriorSpec::default(),
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let p = &self.prior;
        let all = [
            (self.gyro_noise, "gyro_noise"),
            (self.acc_noise, "acc_noise"),
            (self.gyro_walk, "gyro_walk"),
            (self.acc_walk, "acc_walk"),
            (self.vel_noise, "vel_noise"),
            (self.vel_walk, "vel_walk"),
            (self.position, "position"),
            (self.virtual_bias_meas, "virtual_bias_meas"),
            (p.attitude_deg, "prior.attitude_deg"),
            (p.velocity, "prior.velocity"),
            (p.position, "prior.position"),
            (p.gyro_bias, "prior.gyro_bias"),
            (p.acc_bias, "prior.acc_bias"),
            (p.virtual_bias, "prior.virtual_bias"),
        ];
        for (v, name) in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SpecError::Negative(name));
            }
        }
        Ok(())
    }

    /// Filter-side noise model.
    pub fn filter_noise(&self) -> NoiseConfig {
        let mut n = NoiseConfig::from_densities(
            self.gyro_noise,
            self.acc_noise,
            self.vel_noise,
            self.gyro_walk,
            self.acc_walk,
            self.vel_walk,
            self.position,
        );
        n.r_bias_vel = nalgebra::Matrix3::identity() * self.virtual_bias_meas.powi(2);
        n
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    pub gyro: Vec3,
    pub acc: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnssSample {
    pub t: f64,
    pub pos: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthSample {
    pub t: f64,
    pub state: InsState,
}

/// IMU, position fixes and (optionally) ground truth at the IMU timestamps.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SensorLog {
    pub imu: Vec<ImuSample>,
    pub gnss: Vec<GnssSample>,
    pub truth: Vec<TruthSample>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LogError {
    #[error("{stream} timestamps not strictly increasing at row {row}")]
    Disorder { stream: &'static str, row: usize },
    #[error("the log needs at least two IMU samples")]
    TooShort,
    #[error("truth has {truth} rows but imu has {imu}")]
    TruthMismatch { truth: usize, imu: usize },
}

impl SensorLog {
    pub fn validate(&self) -> Result<(), LogError> {
        fn increasing(ts: impl Iterator<Item = f64>, stream: &'static str) -> Result<(), LogError> {
            let mut prev = f64::NEG_INFINITY;
            for (row, t) in ts.enumerate() {
                if t.is_nan() || t <= prev {
                    return Err(LogError::Disorder { stream, row });
                }
                prev = t;
            }
            Ok(())
        }
        increasing(self.imu.iter().map(|s| s.t), "imu")?;
        increasing(self.gnss.iter().map(|s| s.t), "gnss")?;
        increasing(self.truth.iter().map(|s| s.t), "truth")?;
        if self.imu.len() < 2 {
            return Err(LogError::TooShort);
        }
        if !self.truth.is_empty() && self.truth.len() != self.imu.len() {
            return Err(LogError::TruthMismatch { truth: self.truth.len(), imu: self.imu.len() });
        }
        Ok(())
    }

    /// Cubic Lagrange interpolation of the IMU stream at time `t`, on the four samples
    /// around `t` (shifted inwards at the ends).
    pub fn input_at(&self, t: f64) -> InsInput {
        let n = self.imu.len();
        let (t0, t1) = (self.imu[0].t, self.imu[n - 1].t);
        let h = (t1 - t0) / (n - 1) as f64;
        let s = ((t - t0) / h).clamp(0.0, (n - 1) as f64);
        if n < 4 {
            let i = (s.floor() as usize).min(n - 2);
            let (a, b, x) = (self.imu[i], self.imu[i + 1], s - i as f64);
            return InsInput::imu(a.gyro + (b.gyro - a.gyro) * x, a.acc + (b.acc - a.acc) * x);
        }
        let first = (s.floor() as usize).saturating_sub(1).min(n - 4);
        let x = s - first as f64;
        let w = [
            -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
            x * (x - 2.0) * (x - 3.0) / 2.0,
            -x * (x - 1.0) * (x - 3.0) / 2.0,
            x * (x - 1.0) * (x - 2.0) / 6.0,
        ];
        let (mut gyro, mut acc) = (Vec3::zeros(), Vec3::zeros());
        for (k, wk) in w.iter().enumerate() {
            gyro += self.imu[first + k].gyro * *wk;
            acc += self.imu[first + k].acc * *wk;
        }
        InsInput::imu(gyro, acc)
    }
}

/// Independent random streams of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Imu = 0,
    Gnss = 1,
    Prior = 2,
    Bias = 3,
}

/// Counter-based generator for `(seed, run, stream)`; streams never share state.
pub fn stream_rng(seed: u64, run: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(run.wrapping_mul(16).wrapping_add(stream as u64));
    r
}

fn gauss3(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
    let mut d = || -> f64 { StandardNormal.sample(rng) };
    Vec3::new(d(), d(), d()) * s
}

/// Nominal pose, velocity, acceleration and body rate at time `t`.
struct Nominal {
    rot: So3,
    vel: Vec3,
    pos: Vec3,
    acc: Vec3,
    rate: Vec3,
}

fn nominal(m: &MotionSpec, t: f64) -> Nominal {
    let tau = 2.0 * std::f64::consts::PI;
    let (mut pos, mut vel, mut acc, mut th, mut thd) = (Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
    for i in 0..3 {
        let w = tau * m.pos_freq[i];
        pos[i] = m.pos_amp[i] * (1.0 - (w * t).cos());
        vel[i] = m.pos_amp[i] * w * (w * t).sin();
        acc[i] = m.pos_amp[i] * w * w * (w * t).cos();
        let w = tau * m.att_freq[i];
        th[i] = m.att_amp[i] * (1.0 - (w * t).cos());
        thd[i] = m.att_amp[i] * w * (w * t).sin();
    }
    // Body rate of R = exp(θ): ω = J_r(θ) θ̇ with J_r(θ) = J_l(−θ).
    Nominal { rot: So3::exp(&th), vel, pos, acc, rate: so3::left_jacobian(&(-th)) * thd }
}

/// Initial truth drawn around the identity from the prior.
pub fn sample_prior(prior: &PriorSpec, rng: &mut ChaCha8Rng) -> InsState {
    InsState {
        rot: So3::exp(&gauss3(rng, prior.attitude_deg.to_radians())),
        vel: gauss3(rng, prior.velocity),
        pos: gauss3(rng, prior.position),
        bias_gyro: gauss3(rng, prior.gyro_bias),
        bias_acc: gauss3(rng, prior.acc_bias),
        bias_vel: Vec3::zeros(),
    }
}

/// Number of draws behind [`prior_covariance`].
pub const PRIOR_MOMENT_DRAWS: usize = 20_000;

/// Second moment of the initial error coordinates `ϑ(ξ₀)` of a filter started at the
/// identity, estimated from a fixed-seed sample of the prior. For the tangent group the
/// virtual bias is given its prior spread in the sample.
pub fn prior_covariance(kind: SymmetryKind, prior: &PriorSpec) -> DMatrix<f64> {
    let n = kind.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_0001);
    let mut m = DMatrix::zeros(n, n);
    let mut count = 0usize;
    for _ in 0..PRIOR_MOMENT_DRAWS {
        let mut x = sample_prior(prior, &mut rng);
        if kind == SymmetryKind::Tg {
            x.bias_vel = gauss3(&mut rng, prior.virtual_bias);
        }
        if let Ok(e) = chart(kind, &x) {
            m.ger(1.0, &e, &e, 1.0);
            count += 1;
        }
    }
    let mut m = m / count.max(1) as f64;
    // Keep the matrix positive definite when some prior spreads are zero.
    for i in 0..n {
        m[(i, i)] += 1e-12;
    }
    m
}

/// Synthesizes a log along the trajectory through `initial` (the truth at `t = 0`), with
/// random-walk biases and noisy sensors drawn from the run's streams.
pub fn generate_from(spec: &TrajectorySpec, noise: &NoiseSpec, initial: &InsState, g: &Gravity, run: u64) -> SensorLog {
    let mut imu_rng = stream_rng(spec.seed, run, Stream::Imu);
    let mut gnss_rng = stream_rng(spec.seed, run, Stream::Gnss);
    let mut bias_rng = stream_rng(spec.seed, run, Stream::Bias);
    let steps = spec.imu_steps();
    let dt = 1.0 / spec.imu_rate;
    let dec = spec.decimation();
    let imu_sd = 1.0 / dt.sqrt();
    let (r0, v0, p0) = (initial.rot, initial.vel, initial.pos);
    let (mut bg, mut ba) = (initial.bias_gyro, initial.bias_acc);
    let mut log = SensorLog { imu: Vec::with_capacity(steps + 1), gnss: Vec::new(), truth: Vec::with_capacity(steps + 1) };
    for k in 0..=steps {
        let t = k as f64 * dt;
        let nm = nominal(&spec.motion, t);
        let rot = r0.compose(&nm.rot);
        let state =
            InsState { rot, vel: r0 * nm.vel + v0, pos: r0 * nm.pos + v0 * t + p0, bias_gyro: bg, bias_acc: ba, bias_vel: Vec3::zeros() };
        let acc_world = r0 * nm.acc;
        let gyro = nm.rate + bg + gauss3(&mut imu_rng, noise.gyro_noise * imu_sd);
        let acc = rot.inverse() * (acc_world - g.0) + ba + gauss3(&mut imu_rng, noise.acc_noise * imu_sd);
        log.imu.push(ImuSample { t, gyro, acc });
        log.truth.push(TruthSample { t, state });
        if k > 0 && k % dec == 0 {
            log.gnss.push(GnssSample { t, pos: state.pos + gauss3(&mut gnss_rng, noise.position) });
        }
        bg += gauss3(&mut bias_rng, noise.gyro_walk * dt.sqrt());
        ba += gauss3(&mut bias_rng, noise.acc_walk * dt.sqrt());
    }
    log
}

/// Log of run 0 with the truth starting at the identity.
pub fn generate(spec: &TrajectorySpec, noise: &NoiseSpec) -> SensorLog {
    generate_from(spec, noise, &InsState::origin(), &Gravity::default(), 0)
}

/// Filter state at one record epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct Epoch {
    pub t: f64,
    pub estimate: InsState,
    pub sigma_diag: DVector<f64>,
    /// Error coordinates against the truth, when truth is known.
    pub eps: Option<DVector<f64>>,
    /// `εᵀ Σ⁻¹ ε`.
    pub nees: Option<f64>,
    /// Normalized innovation squared of the update at this epoch.
    pub nis: Option<f64>,
}

/// One filter over one log; the trajectory stops at the first filter failure.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterRun {
    pub kind: SymmetryKind,
    pub epochs: Vec<Epoch>,
    pub failure: Option<String>,
}

fn nees(eps: &DVector<f64>, sigma: &DMatrix<f64>) -> Option<f64> {
    let c = sigma.clone().cholesky()?;
    Some(eps.dot(&c.solve(eps)))
}

fn epoch(fs: &FilterState, truth: Option<&InsState>, nis: Option<f64>) -> Epoch {
    let eps = truth.and_then(|x| chart(fs.kind(), &error(&fs.x_hat, x)).ok());
    let nees = eps.as_ref().and_then(|e| nees(e, &fs.sigma));
    Epoch { t: fs.t, estimate: fs.estimate(), sigma_diag: fs.sigma.diagonal(), eps, nees, nis }
}

/// Runs one filter over a log. IMU samples are averaged pairwise over each interval; the
/// state is recorded at the start and after every position update.
pub fn run_filter(kind: SymmetryKind, log: &SensorLog, sigma0: &DMatrix<f64>, noise: &NoiseConfig, cfg: &FilterConfig) -> FilterRun {
    let mut fs = FilterState::new(SymmetryElement::identity(kind), sigma0.clone(), log.imu[0].t);
    let truth = |k: usize| log.truth.get(k).map(|s| &s.state);
    let mut out = FilterRun { kind, epochs: vec![epoch(&fs, truth(0), None)], failure: None };
    let mut next_fix = log.gnss.iter().peekable();
    while next_fix.peek().is_some_and(|m| m.t < fs.t - 1e-9) {
        next_fix.next();
    }
    for k in 0..log.imu.len() - 1 {
        let (a, b) = (log.imu[k], log.imu[k + 1]);
        let u = InsInput::imu((a.gyro + b.gyro) * 0.5, (a.acc + b.acc) * 0.5);
        fs = match eqf::propagate(&fs, &u, b.t - a.t, noise, cfg) {
            Ok(f) => f,
            Err(e) => {
                out.failure = Some(format!("t={:.3}: {e}", b.t));
                return out;
            }
        };
        fs.t = b.t;
        while let Some(m) = next_fix.next_if(|m| m.t <= b.t + 1e-9) {
            match eqf::update_position(&fs, &PositionMeasurement { t: m.t, pos: m.pos }, noise, cfg) {
                Ok((f, info)) => {
                    fs = f;
                    out.epochs.push(epoch(&fs, truth(k + 1), Some(info.nis)));
                }
                Err(e) => {
                    out.failure = Some(format!("t={:.3}: {e}", m.t));
                    return out;
                }
            }
        }
    }
    out
}

/// Everything one Monte-Carlo run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run: u64,
    /// Truth at the record epochs (start and every position fix).
    pub truth: Vec<InsState>,
    pub filters: Vec<FilterRun>,
}

/// Batch output, ordered by run index regardless of scheduling.
#[derive(Clone, Debug, PartialEq)]
pub struct RunArtifacts {
    pub kinds: Vec<SymmetryKind>,
    pub runs: Vec<RunResult>,
}

/// Runs `m` independent Monte-Carlo runs; every kind sees the same log and prior draw.
pub fn run_monte_carlo(spec: &TrajectorySpec, noise: &NoiseSpec, kinds: &[SymmetryKind], m: usize, cfg: &FilterConfig) -> RunArtifacts {
    assert!(m >= 1, "at least one run");
    let sigma0: Vec<DMatrix<f64>> = kinds.iter().map(|&k| prior_covariance(k, &noise.prior)).collect();
    let fnoise = noise.filter_noise();
    let runs = (0..m as u64)
        .into_par_iter()
        .map(|run| {
            let x0 = sample_prior(&noise.prior, &mut stream_rng(spec.seed, run, Stream::Prior));
            let log = generate_from(spec, noise, &x0, &cfg.gravity, run);
            let dec = spec.decimation();
            let truth = log.truth.iter().enumerate().filter(|(k, _)| k % dec == 0).map(|(_, s)| s.state).collect();
            let filters = kinds.iter().zip(&sigma0).map(|(&k, s0)| run_filter(k, &log, s0, &fnoise, cfg)).collect();
            RunResult { run, truth, filters }
        })
        .collect();
    RunArtifacts { kinds: kinds.to_vec(), runs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> NoiseSpec {
        NoiseSpec {
            gyro_noise: 0.0,
            acc_noise: 0.0,
            gyro_walk: 0.0,
            acc_walk: 0.0,
            position: 0.0,
            prior: PriorSpec { attitude_deg: 0.0, velocity: 0.0, position: 0.0, gyro_bias: 0.0, acc_bias: 0.0, virtual_bias: 0.0 },
            ..Default::default()
        }
    }

    #[test]
    fn noise_free_log_is_consistent_with_dynamics() {
        let spec = TrajectorySpec { duration: 10.0, ..Default::default() };
        let log = generate(&spec, &quiet());
        let g = Gravity::default();
        let dt = 1.0 / spec.imu_rate;
        let x = crate::ins::integrate_truth(&log.truth[0].state, 0.0, |t| log.input_at(t), &g, dt, spec.imu_steps());
        let end = x.last().unwrap();
        let want = &log.truth.last().unwrap().state;
        assert!(end.distance(want) < 1e-6, "{}", end.distance(want));
    }

    #[test]
    fn logs_are_deterministic_and_sized() {
        let spec = TrajectorySpec { duration: 3.0, ..Default::default() };
        let a = generate(&spec, &NoiseSpec::default());
        let b = generate(&spec, &NoiseSpec::default());
        assert_eq!(a, b);
        assert_eq!(a.gnss.len(), 30);
        assert_eq!(a.imu.len(), 601);
        assert!(a.validate().is_ok());
        let c = generate(&TrajectorySpec { seed: 2, ..spec }, &NoiseSpec::default());
        assert_ne!(a.imu, c.imu);
    }

    #[test]
    fn zero_prior_spread_gives_zero_error() {
        let mut rng = stream_rng(1, 0, Stream::Prior);
        let x = sample_prior(&quiet().prior, &mut rng);
        for kind in SymmetryKind::ALL {
            assert_eq!(chart(kind, &x).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn prior_nees_is_unity() {
        let prior = PriorSpec::default();
        for kind in [SymmetryKind::So3R12, SymmetryKind::Dp, SymmetryKind::Sd] {
            let s = prior_covariance(kind, &prior).cholesky().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let draws = 10_000;
            let total: f64 = (0..draws)
                .map(|_| {
                    let e = chart(kind, &sample_prior(&prior, &mut rng)).unwrap();
                    e.dot(&s.solve(&e))
                })
                .sum();
            let mean = total / draws as f64 / kind.dim() as f64;
            assert!((0.9..=1.1).contains(&mean), "{kind}: {mean}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(TrajectorySpec { gnss_rate: 7.0, ..Default::default() }.validate().is_err());
        assert!(TrajectorySpec { duration: 0.0, ..Default::default() }.validate().is_err());
        assert!(NoiseSpec { position: -1.0, ..Default::default() }.validate().is_err());
        let mut log = generate(&TrajectorySpec { duration: 1.0, ..Default::default() }, &NoiseSpec::default());
        log.gnss.swap(0, 1);
        assert_eq!(log.validate(), Err(LogError::Disorder { stream: "gnss", row: 1 }));
    }

    #[test]
    fn noise_free_filters_converge() {
        let spec = TrajectorySpec { duration: 120.0, ..Default::default() };
        let prior = PriorSpec { velocity: 0.1, ..Default::default() };
        let x0 = sample_prior(&prior, &mut stream_rng(3, 0, Stream::Prior));
        let log = generate_from(&spec, &quiet(), &x0, &Gravity::default(), 0);
        let noise = NoiseSpec { position: 0.01, gyro_walk: 1e-3, acc_walk: 1e-3, ..Default::default() }.filter_noise();
        for kind in SymmetryKind::ALL {
            let f = run_filter(kind, &log, &prior_covariance(kind, &prior), &noise, &FilterConfig::default());
            assert!(f.failure.is_none(), "{kind}: {:?}", f.failure);
            let last = f.epochs.last().unwrap();
            let err = last.eps.as_ref().unwrap().norm();
            assert!(err < 1e-3, "{kind}: {err} {}", last.eps.as_ref().unwrap());
            assert!((last.estimate.pos - log.truth.last().unwrap().state.pos).norm() < 1e-3);
        }
    }
}
