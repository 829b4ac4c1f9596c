//! Numerical error-flow oracle: `ε̇` from the exact INS flow and the observer, without
//! any linearization. Used to validate `Aₜ⁰` and `B_t` and by the linearization sweep.

use nalgebra::{DMatrix, DVector};

use crate::ins::{flow, Gravity, InsInput, InsState};
use crate::symmetry::{act_state, chart, chart_inv, error, estimate, lift, SymmetryElement, SymmetryError};

/// Time step of the five-point stencil.
const TIME_STEP: f64 = 1e-3;

/// Noise-free evolution of `ε` over time `t`: the truth follows the exact flow under
/// `truth_input`, the observer moves along `exp(tΛ(ξ̂, filter_input))`.
fn error_at(
    x_hat: &SymmetryElement,
    xi: &InsState,
    filter_input: &InsInput,
    truth_input: &InsInput,
    g: &Gravity,
    t: f64,
) -> Result<DVector<f64>, SymmetryError> {
    let kind = x_hat.kind;
    let l = lift(kind, &estimate(x_hat), filter_input, g);
    let xh = x_hat.compose(&SymmetryElement::exp(kind, &(l * t))?)?;
    chart(kind, &error(&xh, &flow(xi, truth_input, g, t)))
}

fn stencil(f: impl Fn(f64) -> Result<DVector<f64>, SymmetryError>, h: f64) -> Result<DVector<f64>, SymmetryError> {
    let (m2, m1, p1, p2) = (f(-2.0 * h)?, f(-h)?, f(h)?, f(2.0 * h)?);
    Ok((m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h))
}

/// `ε̇` at error coordinates `eps` for the observer at `x_hat` driven by `u`.
pub fn error_rate(x_hat: &SymmetryElement, eps: &DVector<f64>, u: &InsInput, g: &Gravity) -> Result<DVector<f64>, SymmetryError> {
    let xi = act_state(x_hat, &chart_inv(x_hat.kind, eps)?);
    stencil(|t| error_at(x_hat, &xi, u, u, g, t), TIME_STEP)
}

/// Central-difference Jacobian of [`error_rate`] at `ε = 0`.
pub fn error_jacobian(x_hat: &SymmetryElement, u: &InsInput, g: &Gravity, step: f64) -> Result<DMatrix<f64>, SymmetryError> {
    let n = x_hat.kind.dim();
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = DVector::zeros(n);
        e[k] = step;
        let d = error_rate(x_hat, &e, u, g)? - error_rate(x_hat, &(-&e), u, g)?;
        j.set_column(k, &(d / (2.0 * step)));
    }
    Ok(j)
}

/// Central-difference response of `ε̇` at `ε = 0` to additive noise on each input channel,
/// in the layout of [`super::input_dim`]. Measurement noise enters the observer's input,
/// bias drift enters the truth.
pub fn input_jacobian(x_hat: &SymmetryElement, u: &InsInput, g: &Gravity, step: f64) -> Result<DMatrix<f64>, SymmetryError> {
    let kind = x_hat.kind;
    let xi = estimate(x_hat);
    let m = super::input_dim(kind);
    let mut j = DMatrix::zeros(kind.dim(), m);
    for c in 0..m {
        let rate = |s: f64| {
            let (p, drift) = super::matrices::perturb(kind, u, c, s);
            let (fi, ti) = if drift { (*u, p) } else { (p, *u) };
            stencil(|t| error_at(x_hat, &xi, &fi, &ti, g, t), TIME_STEP)
        };
        j.set_column(c, &((rate(step)? - rate(-step)?) / (2.0 * step)));
    }
    Ok(j)
}
