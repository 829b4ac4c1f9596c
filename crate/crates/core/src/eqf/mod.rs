//! Equivariant filter: lifted observer propagation, Riccati covariance and position updates.

mod matrices;
pub mod oracle;
pub mod reference;

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ins::{flow, Gravity, InsInput};
use crate::lie::Vec3;
use crate::symmetry::{estimate, lift, origin_lift, SymmetryElement, SymmetryError, SymmetryKind};

pub use matrices::{
    input_dim, input_matrix, origin_input, position_output, state_matrix, tfg_iekf_state_matrix, virtual_bias_output, OutputModel,
};

/// Innovation covariances with a condition number above this are rejected.
pub const MAX_INNOVATION_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("innovation covariance is ill-conditioned (condition number {0:e})")]
    SingularInnovation(f64),
    #[error("operation requires the tangent group, got {0}")]
    WrongKind(SymmetryKind),
    #[error("non-finite value in filter state")]
    NonFinite,
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

/// White-noise densities shared by all filters; each filter maps them through its own `B_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig {
    /// Input noise covariance density over `(ω, a, ν, τ_ω, τ_a, τ_ν)`.
    pub q: DMatrix<f64>,
    /// Position measurement covariance, m².
    pub r_pos: Matrix3<f64>,
    /// Covariance of the `b_ν = 0` pseudo-measurement.
    pub r_bias_vel: Matrix3<f64>,
}

impl NoiseConfig {
    /// Diagonal densities: gyro (rad/s/√Hz), accel (m/s²/√Hz), virtual velocity (m/s/√Hz), the
    /// three bias random walks, and the position standard deviation in metres.
    pub fn from_densities(gyro: f64, acc: f64, vel: f64, gyro_walk: f64, acc_walk: f64, vel_walk: f64, pos_sigma: f64) -> Self {
        let d = [gyro, acc, vel, gyro_walk, acc_walk, vel_walk];
        let q = DMatrix::from_diagonal(&DVector::from_iterator(18, d.iter().flat_map(|s| [s * s; 3])));
        Self { q, r_pos: Matrix3::identity() * pos_sigma * pos_sigma, r_bias_vel: Matrix3::identity() * 1e-4 }
    }

    /// Input covariance in the channel layout of [`input_dim`].
    pub fn input_covariance(&self, kind: SymmetryKind) -> DMatrix<f64> {
        if kind == SymmetryKind::Tg {
            return self.q.clone();
        }
        let idx = [0, 1, 2, 3, 4, 5, 9, 10, 11, 12, 13, 14];
        DMatrix::from_fn(12, 12, |i, j| self.q[(idx[i], idx[j])])
    }
}

/// How the group estimate moves between IMU samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    /// `X̂⁺` is the group element of the exact constant-input INS flow of `ξ̂`; first order
    /// it agrees with the lifted step and leaves no discretization drift.
    #[default]
    ExactFlow,
    /// `X̂⁺ = X̂ exp(dt Λ(ξ̂, u))`.
    LiftExponential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    pub gravity: Gravity,
    pub propagation: Propagation,
    pub output: OutputModel,
    /// Applies the `b_ν = 0` pseudo-measurement after each position update (tangent group only).
    pub virtual_bias_update: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { gravity: Gravity::default(), propagation: Propagation::default(), output: OutputModel::default(), virtual_bias_update: true }
    }
}

/// Group estimate, covariance in chart coordinates and time.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterState {
    pub x_hat: SymmetryElement,
    pub sigma: DMatrix<f64>,
    pub t: f64,
}

/// Position fix at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionMeasurement {
    pub t: f64,
    pub pos: Vec3,
}

/// Diagnostics of one update.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateInfo {
    pub residual: DVector<f64>,
    /// Normalized innovation squared per measurement dimension.
    pub nis: f64,
}

impl FilterState {
    pub fn new(x_hat: SymmetryElement, sigma: DMatrix<f64>, t: f64) -> Self {
        assert_eq!(sigma.nrows(), x_hat.dim(), "covariance dimension must match the symmetry");
        Self { x_hat, sigma, t }
    }

    pub fn kind(&self) -> SymmetryKind {
        self.x_hat.kind
    }

    pub fn estimate(&self) -> crate::ins::InsState {
        estimate(&self.x_hat)
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `I + M + M²/2 + M³/6`.
fn transition(a: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    let m = a * dt;
    let m2 = &m * &m;
    let m3 = &m2 * &m;
    DMatrix::identity(a.nrows(), a.ncols()) + &m + m2 * 0.5 + m3 * (1.0 / 6.0)
}

/// One IMU step of length `dt`.
pub fn propagate(fs: &FilterState, u: &InsInput, dt: f64, noise: &NoiseConfig, cfg: &FilterConfig) -> Result<FilterState, FilterError> {
    assert!(dt >= 0.0, "dt must be non-negative");
    if dt == 0.0 {
        return Ok(fs.clone());
    }
    let kind = fs.kind();
    let g = &cfg.gravity;
    let a = state_matrix(&fs.x_hat, u, g);
    let b = input_matrix(&fs.x_hat, u, g);
    let phi = transition(&a, dt);
    let sigma = symmetrize(&(&phi * &fs.sigma * phi.transpose() + &b * noise.input_covariance(kind) * b.transpose() * dt));
    let x_hat = match cfg.propagation {
        Propagation::ExactFlow => origin_lift(kind, &flow(&fs.estimate(), u, g, dt)),
        Propagation::LiftExponential => {
            let l = lift(kind, &fs.estimate(), u, g);
            fs.x_hat.compose(&SymmetryElement::exp(kind, &(l * dt))?)?
        }
    };
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(FilterError::NonFinite);
    }
    Ok(FilterState { x_hat, sigma, t: fs.t + dt })
}

/// Kalman update with output matrix `c`, residual `r ≈ c ε` and measurement covariance `rm`;
/// the correction is applied on the left, `X̂⁺ = exp(K r) X̂`.
pub fn update_with(
    fs: &FilterState,
    c: &DMatrix<f64>,
    r: &DVector<f64>,
    rm: &DMatrix<f64>,
) -> Result<(FilterState, UpdateInfo), FilterError> {
    let pct = &fs.sigma * c.transpose();
    let s = symmetrize(&(c * &pct + rm));
    let sv = s.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond.is_nan() || cond > MAX_INNOVATION_CONDITION {
        return Err(FilterError::SingularInnovation(cond));
    }
    let chol = s.cholesky().ok_or(FilterError::SingularInnovation(cond))?;
    let k = chol.solve(&pct.transpose()).transpose();
    let gamma = &k * r;
    let x_hat = SymmetryElement::exp(fs.kind(), &gamma)?.compose(&fs.x_hat)?;
    let n = fs.sigma.nrows();
    let sigma = symmetrize(&((DMatrix::identity(n, n) - &k * c) * &fs.sigma));
    let nis = r.dot(&chol.solve(r)) / r.len() as f64;
    if !nis.is_finite() || sigma.iter().any(|v| !v.is_finite()) {
        return Err(FilterError::NonFinite);
    }
    Ok((FilterState { x_hat, sigma, t: fs.t }, UpdateInfo { residual: r.clone(), nis }))
}

/// Position update, followed by the virtual-bias pseudo-measurement when enabled.
pub fn update_position(
    fs: &FilterState,
    m: &PositionMeasurement,
    noise: &NoiseConfig,
    cfg: &FilterConfig,
) -> Result<(FilterState, UpdateInfo), FilterError> {
    let (c, r) = position_output(&fs.x_hat, &m.pos, cfg.output);
    let rm = DMatrix::from_column_slice(3, 3, noise.r_pos.as_slice());
    let (out, info) = update_with(fs, &c, &r, &rm)?;
    if cfg.virtual_bias_update && fs.kind() == SymmetryKind::Tg {
        let (out, _) = update_virtual_bias(&out, noise)?;
        return Ok((out, info));
    }
    Ok((out, info))
}

/// Pseudo-measurement `b_ν = 0` of the tangent group.
pub fn update_virtual_bias(fs: &FilterState, noise: &NoiseConfig) -> Result<(FilterState, UpdateInfo), FilterError> {
    if fs.kind() != SymmetryKind::Tg {
        return Err(FilterError::WrongKind(fs.kind()));
    }
    let (c, r) = virtual_bias_output(&fs.x_hat);
    let rm = DMatrix::from_column_slice(3, 3, noise.r_bias_vel.as_slice());
    update_with(fs, &c, &r, &rm)
}
