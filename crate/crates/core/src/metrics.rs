//! RMSE, ANEES and NIS aggregation over Monte-Carlo runs, and the position
//! linearization-error sweep.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eqf::{oracle, state_matrix};
use crate::ins::{Gravity, InsInput, InsState};
use crate::lie::{So3, Vec3};
use crate::sim::RunArtifacts;
use crate::symmetry::{act_state, chart, chart_inv, origin_lift, SymmetryError, SymmetryKind};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("covariance {0} is not positive definite")]
    SingularCovariance(usize),
    #[error("series are misaligned: {0}")]
    Misaligned(String),
    #[error("no samples")]
    Empty,
}

/// `(1/nM) Σ εᵢᵀ Σᵢ⁻¹ εᵢ` over the `M` pairs, `n` the error dimension.
pub fn anees(errors: &[DVector<f64>], covariances: &[DMatrix<f64>]) -> Result<f64, MetricsError> {
    if errors.len() != covariances.len() {
        return Err(MetricsError::Misaligned(format!("{} errors, {} covariances", errors.len(), covariances.len())));
    }
    let n = errors.first().ok_or(MetricsError::Empty)?.len();
    let mut total = 0.0;
    for (i, (e, s)) in errors.iter().zip(covariances).enumerate() {
        let c = s.clone().cholesky().ok_or(MetricsError::SingularCovariance(i))?;
        total += e.dot(&c.solve(e));
    }
    Ok(total / (n * errors.len()) as f64)
}

/// Geodesic attitude error `‖log(R R̂ᵀ)‖` in degrees.
pub fn attitude_error_deg(truth: &So3, est: &So3) -> f64 {
    truth.compose(&est.inverse()).angle().to_degrees()
}

/// Root-mean-square errors of one epoch, averaged across runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rmse {
    pub attitude_deg: f64,
    pub velocity: f64,
    pub position: f64,
    pub gyro_bias: f64,
    pub acc_bias: f64,
}

/// RMSE across runs: `truth[run]` and `estimates[run]` are equal-length aligned series.
pub fn rmse_blocks(truth: &[Vec<InsState>], estimates: &[Vec<InsState>]) -> Result<Vec<Rmse>, MetricsError> {
    if truth.len() != estimates.len() || truth.is_empty() {
        return Err(MetricsError::Misaligned(format!("{} truth runs, {} estimate runs", truth.len(), estimates.len())));
    }
    let len = truth[0].len();
    if truth.iter().chain(estimates).any(|s| s.len() != len) {
        return Err(MetricsError::Misaligned("runs differ in length".into()));
    }
    let m = truth.len() as f64;
    Ok((0..len)
        .map(|k| {
            let mut acc = [0.0; 5];
            for (t, e) in truth.iter().zip(estimates) {
                let (t, e) = (&t[k], &e[k]);
                let d = [
                    attitude_error_deg(&t.rot, &e.rot),
                    (t.vel - e.vel).norm(),
                    (t.pos - e.pos).norm(),
                    (t.bias_gyro - e.bias_gyro).norm(),
                    (t.bias_acc - e.bias_acc).norm(),
                ];
                for (a, v) in acc.iter_mut().zip(d) {
                    *a += v * v;
                }
            }
            let r = acc.map(|a| (a / m).sqrt());
            Rmse { attitude_deg: r[0], velocity: r[1], position: r[2], gyro_bias: r[3], acc_bias: r[4] }
        })
        .collect())
}

/// One epoch of the aggregated series of one filter.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPoint {
    pub t: f64,
    pub rmse: Rmse,
    /// Mean of `εᵀΣ⁻¹ε / n` over the runs that reached this epoch.
    pub anees: Option<f64>,
    pub nis: Option<f64>,
    /// Runs contributing to this epoch.
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSeries {
    pub kind: SymmetryKind,
    pub points: Vec<MetricPoint>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Per-kind time series over a batch. Runs that stopped early contribute up to their last epoch.
pub fn series(art: &RunArtifacts) -> Vec<MetricSeries> {
    art.kinds
        .iter()
        .enumerate()
        .map(|(ki, &kind)| {
            let len = art.runs.iter().map(|r| r.truth.len()).max().unwrap_or(0);
            let n = kind.dim() as f64;
            let points = (0..len)
                .filter_map(|k| {
                    let alive: Vec<_> = art.runs.iter().filter_map(|r| r.filters[ki].epochs.get(k).map(|e| (r, e))).collect();
                    let (_, first) = alive.first()?;
                    let truth: Vec<Vec<InsState>> = alive.iter().map(|(r, _)| vec![r.truth[k]]).collect();
                    let est: Vec<Vec<InsState>> = alive.iter().map(|(_, e)| vec![e.estimate]).collect();
                    let rmse = rmse_blocks(&truth, &est).ok()?[0];
                    let neeses: Vec<f64> = alive.iter().filter_map(|(_, e)| e.nees).collect();
                    let anees = (neeses.len() == alive.len()).then(|| mean(neeses.into_iter()).map(|v| v / n)).flatten();
                    let nis = mean(alive.iter().filter_map(|(_, e)| e.nis));
                    Some(MetricPoint { t: first.t, rmse, anees, nis, runs: alive.len() })
                })
                .collect();
            MetricSeries { kind, points }
        })
        .collect()
}

/// Mean ANEES over the first and the second half of the run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AneesSummary {
    pub kind: SymmetryKind,
    pub transient: f64,
    pub asymptotic: f64,
}

pub fn anees_summary(s: &MetricSeries) -> Option<AneesSummary> {
    let end = s.points.last()?.t;
    let start = s.points.first()?.t;
    let mid = start + 0.5 * (end - start);
    let half = |first: bool| mean(s.points.iter().filter(|p| (p.t <= mid) == first).filter_map(|p| p.anees));
    Some(AneesSummary { kind: s.kind, transient: half(true)?, asymptotic: half(false)? })
}

/// Which error block the second sweep axis scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Gyro and accelerometer bias errors together.
    Bias,
    Position,
    Velocity,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 3] = [SweepAxis::Bias, SweepAxis::Position, SweepAxis::Velocity];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Bias => "bias",
            SweepAxis::Position => "position",
            SweepAxis::Velocity => "velocity",
        }
    }
}

/// Grid and fixed directions of a sweep panel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub cells: usize,
    pub attitude_min: f64,
    pub attitude_max: f64,
    pub axis_min: f64,
    pub axis_max: f64,
    pub attitude_dir: [f64; 3],
    pub axis_dir: [f64; 3],
    /// Gyro and accelerometer readings the error dynamics are evaluated at.
    pub gyro: [f64; 3],
    pub acc: [f64; 3],
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            cells: 64,
            attitude_min: 1e-3,
            attitude_max: std::f64::consts::PI - 0.1,
            axis_min: 1e-3,
            axis_max: 10.0,
            attitude_dir: [1.0, -2.0, 2.0],
            axis_dir: [2.0, 1.0, -2.0],
            gyro: [0.1, -0.2, 0.3],
            acc: [0.5, -0.3, 9.81],
        }
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Error state with attitude error `att` along `att_dir` and the axis block of norm `mag`.
pub fn sweep_error(axis: SweepAxis, att: f64, mag: f64, att_dir: &Vec3, axis_dir: &Vec3) -> InsState {
    let d = axis_dir.normalize() * mag;
    let mut e = InsState { rot: So3::exp(&(att_dir.normalize() * att)), ..InsState::origin() };
    match axis {
        SweepAxis::Bias => {
            e.bias_gyro = d;
            e.bias_acc = d;
        }
        SweepAxis::Position => e.pos = d,
        SweepAxis::Velocity => e.vel = d,
    }
    e
}

/// Five-point derivative step of the chart-to-position differential.
const DIFF_STEP: f64 = 1e-4;

/// `‖dφ_X̂ dϑ⁻¹ (ε̇ − Aε)‖` restricted to position, for truth at the origin and state error
/// `e`: the position part of the linearization residual, mapped to physical units so that
/// different charts compare.
pub fn position_linearization_error(kind: SymmetryKind, e: &InsState, u: &InsInput, g: &Gravity) -> Result<f64, SymmetryError> {
    let x_hat = origin_lift(kind, e).inverse();
    let eps = chart(kind, e)?;
    let resid = oracle::error_rate(&x_hat, &eps, u, g)? - state_matrix(&x_hat, u, g) * &eps;
    let pos = |d: &DVector<f64>| -> Result<Vec3, SymmetryError> { Ok(act_state(&x_hat, &chart_inv(kind, &(&eps + d))?).pos) };
    let mut dp = Vec3::zeros();
    for k in 0..kind.dim() {
        if resid[k] == 0.0 {
            continue;
        }
        let mut d = DVector::zeros(kind.dim());
        d[k] = DIFF_STEP;
        let col = (pos(&(&d * -2.0))? - pos(&(&d * 2.0))? + (pos(&d)? - pos(&(-&d))?) * 8.0) / (12.0 * DIFF_STEP);
        dp += col * resid[k];
    }
    Ok(dp.norm())
}

/// `L` values of two kinds on one panel; `None` marks cells outside a chart's domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub kind_a: SymmetryKind,
    pub kind_b: SymmetryKind,
    pub axis: SweepAxis,
    pub attitude: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// Indexed `[attitude][magnitude]`.
    pub l_a: Vec<Vec<Option<f64>>>,
    pub l_b: Vec<Vec<Option<f64>>>,
}

impl SweepGrid {
    /// `L_A − L_B` where both are defined.
    pub fn difference(&self, i: usize, j: usize) -> Option<f64> {
        Some(self.l_a[i][j]? - self.l_b[i][j]?)
    }
}

/// Evaluates `L` for both kinds on the log-spaced grid of one panel.
pub fn linearization_sweep(kind_a: SymmetryKind, kind_b: SymmetryKind, axis: SweepAxis, spec: &SweepSpec, g: &Gravity) -> SweepGrid {
    let attitude = log_space(spec.attitude_min, spec.attitude_max, spec.cells);
    let magnitude = log_space(spec.axis_min, spec.axis_max, spec.cells);
    let (ad, xd) = (Vec3::from(spec.attitude_dir), Vec3::from(spec.axis_dir));
    let u = InsInput::imu(Vec3::from(spec.gyro), Vec3::from(spec.acc));
    let panel = |kind: SymmetryKind| -> Vec<Vec<Option<f64>>> {
        attitude
            .par_iter()
            .map(|&a| {
                magnitude.iter().map(|&m| position_linearization_error(kind, &sweep_error(axis, a, m, &ad, &xd), &u, g).ok()).collect()
            })
            .collect()
    };
    let (l_a, l_b) = (panel(kind_a), panel(kind_b));
    SweepGrid { kind_a, kind_b, axis, attitude, magnitude, l_a, l_b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn anees_of_zero_errors_is_zero() {
        let e = vec![DVector::zeros(3); 4];
        let s = vec![DMatrix::identity(3, 3); 4];
        assert_eq!(anees(&e, &s).unwrap(), 0.0);
    }

    #[test]
    fn anees_of_matched_gaussians_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut es, mut ss) = (Vec::new(), Vec::new());
        for i in 0..10_000 {
            let l = DMatrix::from_fn(4, 4, |r, c| if r >= c { 0.3 + ((r * 7 + c * 3 + i) % 5) as f64 * 0.1 } else { 0.0 });
            let z = DVector::from_fn(4, |_, _| StandardNormal.sample(&mut rng));
            es.push(&l * z);
            ss.push(&l * l.transpose());
        }
        let a = anees(&es, &ss).unwrap();
        assert!((a - 1.0).abs() < 0.05, "{a}");
        let doubled: Vec<_> = es.iter().map(|e| e * 2.0).collect();
        assert!((anees(&doubled, &ss).unwrap() - 4.0 * a).abs() < 1e-9);
    }

    #[test]
    fn anees_rejects_singular_covariance() {
        let e = vec![DVector::from_element(2, 1.0)];
        let s = vec![DMatrix::from_element(2, 2, 1.0)];
        assert_eq!(anees(&e, &s), Err(MetricsError::SingularCovariance(0)));
    }

    #[test]
    fn rmse_of_constant_yaw_offset() {
        let t = vec![vec![InsState::origin(); 3]];
        let e = vec![vec![InsState { rot: So3::exp(&Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2)), ..InsState::origin() }; 3]];
        let r = rmse_blocks(&t, &e).unwrap();
        assert!((r[1].attitude_deg - 90.0).abs() < 1e-9);
        assert_eq!(rmse_blocks(&t, &t).unwrap()[0], Rmse::default());
        assert!(rmse_blocks(&t, &[vec![InsState::origin(); 2]]).is_err());
    }

    #[test]
    fn rmse_ignores_run_order() {
        let a = InsState { pos: Vec3::new(1.0, 0.0, 0.0), ..InsState::origin() };
        let b = InsState { vel: Vec3::new(0.0, 2.0, 0.0), ..InsState::origin() };
        let t = vec![vec![InsState::origin()]; 2];
        let x = rmse_blocks(&t, &[vec![a], vec![b]]).unwrap();
        let y = rmse_blocks(&t, &[vec![b], vec![a]]).unwrap();
        assert_eq!(x, y);
    }

    fn input() -> InsInput {
        let s = SweepSpec::default();
        InsInput::imu(Vec3::from(s.gyro), Vec3::from(s.acc))
    }

    #[test]
    fn linearization_is_exact_at_zero_error() {
        for kind in SymmetryKind::ALL {
            let l = position_linearization_error(kind, &InsState::origin(), &input(), &Gravity::default()).unwrap();
            assert!(l <= 1e-9, "{kind}: {l}");
        }
    }

    #[test]
    fn tangent_group_position_row_is_exact() {
        let (ad, xd) = (Vec3::new(1.0, -2.0, 2.0), Vec3::new(2.0, 1.0, -2.0));
        for axis in SweepAxis::ALL {
            for (a, m) in [(0.3, 0.5), (2.5, 5.0), (1.0, 10.0)] {
                let e = sweep_error(axis, a, m, &ad, &xd);
                let l = position_linearization_error(SymmetryKind::Tg, &e, &input(), &Gravity::default()).unwrap();
                assert!(l <= 1e-9, "{axis:?} {a} {m}: {l}");
            }
        }
    }

    #[test]
    fn small_sweep_has_expected_shape() {
        let spec = SweepSpec { cells: 4, ..Default::default() };
        let g = linearization_sweep(SymmetryKind::Dp, SymmetryKind::Tg, SweepAxis::Velocity, &spec, &Gravity::default());
        assert_eq!((g.l_a.len(), g.l_a[0].len()), (4, 4));
        assert!(g.attitude.windows(2).all(|w| w[0] < w[1]));
        assert!(g.magnitude.windows(2).all(|w| w[0] < w[1]));
        for row in &g.l_b {
            for l in row {
                assert!(l.unwrap() <= 1e-9, "{l:?}");
            }
        }
        assert!(g.l_a[3][3].unwrap() > 1e-3, "{:?}", g.l_a);
        assert!(g.difference(3, 3).unwrap() > 0.0);
    }
}
