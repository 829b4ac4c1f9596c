//! Linearized error-state, input and output matrices in each kind's chart.

use nalgebra::{DMatrix, DVector, SVector};

use crate::ins::{Gravity, InsInput};
use crate::lie::{hat, maps, Hg3, Mat3, Se23, Vec3};
use crate::symmetry::{act_input, estimate, lift, SymmetryElement, SymmetryKind};

pub(crate) fn put(m: &mut DMatrix<f64>, r: usize, c: usize, b: &Mat3) {
    m.view_mut((r, c), (3, 3)).copy_from(b);
}

fn put_dyn(m: &mut DMatrix<f64>, r: usize, c: usize, b: &DMatrix<f64>) {
    m.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
}

fn to_dyn<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> DMatrix<f64> {
    DMatrix::from_column_slice(N, N, m.as_slice())
}

fn gamma3(x: &SymmetryElement, i: usize) -> Vec3 {
    Vec3::from_column_slice(&x.gamma().as_slice()[i..i + 3])
}

/// The shared 9×9 navigation block with `g^` under the attitude column.
fn nav_block(g: &Gravity) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(9, 9);
    put(&mut a, 3, 0, &hat(&g.0));
    put(&mut a, 6, 3, &Mat3::identity());
    a
}

/// Origin input `ů = ψ(X̂⁻¹, u)`.
pub fn origin_input(x_hat: &SymmetryElement, u: &InsInput) -> Option<InsInput> {
    act_input(&x_hat.inverse(), u).ok()
}

/// Linearized error-state matrix `Aₜ⁰` with `ε̇ ≈ Aₜ⁰ ε`.
pub fn state_matrix(x_hat: &SymmetryElement, u: &InsInput, g: &Gravity) -> DMatrix<f64> {
    let kind = x_hat.kind;
    let n = kind.dim();
    let mut a = DMatrix::zeros(n, n);
    let i3 = Mat3::identity();
    match kind {
        SymmetryKind::So3R12 => {
            let ah = *x_hat.rot().matrix();
            let beta = gamma3(x_hat, 9);
            put(&mut a, 3, 0, &(-hat(&(ah * (u.acc - beta)))));
            put(&mut a, 6, 3, &i3);
            put(&mut a, 0, 9, &-ah);
            put(&mut a, 3, 12, &-ah);
        }
        SymmetryKind::Se23R6 => {
            let c = x_hat.se23().expect("SE23 base");
            let ah = *c.rot.matrix();
            put_dyn(&mut a, 0, 0, &nav_block(g));
            put(&mut a, 0, 9, &-ah);
            put(&mut a, 3, 9, &(-hat(&c.vel()) * ah));
            put(&mut a, 6, 9, &(-hat(&c.pos()) * ah));
            put(&mut a, 3, 12, &-ah);
        }
        SymmetryKind::Tfg => {
            let c = x_hat.se23().expect("SE23 base");
            put_dyn(&mut a, 0, 0, &nav_block(g));
            put(&mut a, 0, 9, &i3);
            put(&mut a, 3, 9, &hat(&c.vel()));
            put(&mut a, 6, 9, &hat(&c.pos()));
            put(&mut a, 3, 12, &i3);
            let w = hat(&(c.rot * u.gyro + gamma3(x_hat, 0)));
            put(&mut a, 9, 9, &w);
            put(&mut a, 12, 12, &w);
        }
        SymmetryKind::Tg => {
            let uo = origin_input(x_hat, u).expect("tangent group has an input action");
            put_dyn(&mut a, 0, 0, &nav_block(g));
            put_dyn(&mut a, 0, 9, &DMatrix::identity(9, 9));
            let w = uo.w9() + maps::gravity_twist(&g.0);
            put_dyn(&mut a, 9, 9, &to_dyn(&Se23::ad(&w)));
        }
        SymmetryKind::Dp => {
            let uo = origin_input(x_hat, u).expect("direct position group has an input action");
            put(&mut a, 3, 0, &hat(&g.0));
            put_dyn(&mut a, 0, 6, &DMatrix::identity(6, 6));
            let w = uo.w6() + crate::ins::stack2(&Vec3::zeros(), &g.0);
            put_dyn(&mut a, 6, 6, &to_dyn(&Hg3::ad(&w)));
            put(&mut a, 12, 0, &-hat(&uo.vel));
            put(&mut a, 12, 3, &i3);
        }
        SymmetryKind::Sd => {
            let c = x_hat.se23().expect("SE23 base");
            put_dyn(&mut a, 0, 0, &nav_block(g));
            put_dyn(&mut a, 0, 9, &DMatrix::identity(6, 6));
            put(&mut a, 6, 9, &hat(&c.pos()));
            let gam = SVector::<f64, 6>::from_column_slice(x_hat.gamma().as_slice());
            let w = c.hg().adjoint() * u.w6() + gam + crate::ins::stack2(&Vec3::zeros(), &g.0);
            put_dyn(&mut a, 9, 9, &to_dyn(&Hg3::ad(&w)));
        }
    }
    a
}

/// Linearized error-state matrix of the right-invariant two-frame IEKF, written in
/// terms of the estimate `ξ̂` instead of the group element.
pub fn tfg_iekf_state_matrix(x_hat: &SymmetryElement, u: &InsInput, g: &Gravity) -> DMatrix<f64> {
    let xi = estimate(x_hat);
    let mut a = DMatrix::zeros(15, 15);
    let i3 = Mat3::identity();
    put_dyn(&mut a, 0, 0, &nav_block(g));
    put(&mut a, 0, 9, &i3);
    put(&mut a, 3, 9, &hat(&xi.vel));
    put(&mut a, 6, 9, &hat(&xi.pos));
    put(&mut a, 3, 12, &i3);
    let w = hat(&(xi.rot * (u.gyro - xi.bias_gyro)));
    put(&mut a, 9, 9, &w);
    put(&mut a, 12, 12, &w);
    a
}

/// Number of input-noise channels: `(ω, a, τ_ω, τ_a)`, plus `ν` and `τ_ν` for the tangent group.
pub fn input_dim(kind: SymmetryKind) -> usize {
    if kind == SymmetryKind::Tg {
        18
    } else {
        12
    }
}

/// Adds `s` to input channel `j` in the layout of [`input_dim`]; the flag marks drift channels.
pub(crate) fn perturb(kind: SymmetryKind, u: &InsInput, j: usize, s: f64) -> (InsInput, bool) {
    let mut p = *u;
    let slots: &[usize] = if kind == SymmetryKind::Tg { &[0, 1, 2, 3, 4, 5] } else { &[0, 1, 3, 4] };
    let (slot, axis) = (slots[j / 3], j % 3);
    let target = match slot {
        0 => &mut p.gyro,
        1 => &mut p.acc,
        2 => &mut p.vel,
        3 => &mut p.tau_gyro,
        4 => &mut p.tau_acc,
        _ => &mut p.tau_vel,
    };
    target[axis] += s;
    (p, slot >= 3)
}

/// Input matrix `B_t`: response of `ε̇` at `ε = 0` to additive noise on each input channel.
///
/// Measurement channels perturb the filter's input; drift channels perturb the true bias rate.
/// The lift is affine in the input, so unit differences of `Λ` are exact, and the chart
/// turns `X̂ exp(tΛ₁) exp(−tΛ₂) X̂⁻¹` into `t Ad_X̂ (Λ₁ − Λ₂)` to first order.
pub fn input_matrix(x_hat: &SymmetryElement, u: &InsInput, g: &Gravity) -> DMatrix<f64> {
    let kind = x_hat.kind;
    let xi = estimate(x_hat);
    let base = lift(kind, &xi, u, g);
    let m = input_dim(kind);
    let mut d = DMatrix::zeros(kind.dim(), m);
    for j in 0..m {
        let (p, drift) = perturb(kind, u, j, 1.0);
        let dl = lift(kind, &xi, &p, g) - &base;
        d.set_column(j, &if drift { dl } else { -dl });
    }
    x_hat.adjoint() * d
}

/// Output model for the position measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputModel {
    /// `C⋆` with third-order output error where the kind has an equivariant output,
    /// the exact linear `C⁰` otherwise.
    #[default]
    Equivariant,
    /// First-order linearization of the position for every kind.
    Linear,
}

/// Output matrix and residual `(C, r)` for a position measurement `y`, with `r ≈ C ε`.
pub fn position_output(x_hat: &SymmetryElement, y: &Vec3, model: OutputModel) -> (DMatrix<f64>, DVector<f64>) {
    let kind = x_hat.kind;
    let n = kind.dim();
    let p_hat = estimate(x_hat).pos;
    let mut c = DMatrix::zeros(3, n);
    let i3 = Mat3::identity();
    if !kind.has_equivariant_output() {
        put(&mut c, 0, kind.position_offset(), &i3);
        let r = y - p_hat;
        return (c, DVector::from_column_slice(r.as_slice()));
    }
    let att = match model {
        OutputModel::Equivariant => hat(&((y + p_hat) * 0.5)),
        OutputModel::Linear => hat(&p_hat),
    };
    put(&mut c, 0, 0, &att);
    put(&mut c, 0, 6, &-i3);
    let r = p_hat - y;
    (c, DVector::from_column_slice(r.as_slice()))
}

/// Output matrix and residual for the pseudo-measurement `b_ν = 0` of the tangent group.
pub fn virtual_bias_output(x_hat: &SymmetryElement) -> (DMatrix<f64>, DVector<f64>) {
    let xi = estimate(x_hat);
    let at = *xi.rot.inverse().matrix();
    let mut c = DMatrix::zeros(3, 18);
    put(&mut c, 0, 9, &(at * hat(&xi.pos)));
    put(&mut c, 0, 15, &-at);
    (c, DVector::from_column_slice((-xi.bias_vel).as_slice()))
}
