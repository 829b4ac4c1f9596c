//! Textbook error-state filters, written without the symmetry machinery. They serve as
//! independent references for the equivariant filters on the SO(3)×R¹² and SE₂(3)×R⁶ groups.

use nalgebra::{DMatrix, DVector, Matrix3, SVector};

use super::matrices::put;
use crate::ins::{flow, Gravity, InsInput, InsState};
use crate::lie::{hat, Mat3, Se23, So3, Vec3};

fn propagate_cov(p: &DMatrix<f64>, f: &DMatrix<f64>, gm: &DMatrix<f64>, q: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    let m = f * dt;
    let m2 = &m * &m;
    let phi = DMatrix::identity(15, 15) + &m + &m2 * 0.5 + &m2 * &m * (1.0 / 6.0);
    let out = &phi * p * phi.transpose() + gm * q * gm.transpose() * dt;
    (&out + out.transpose()) * 0.5
}

fn kalman(p: &DMatrix<f64>, h: &DMatrix<f64>, r: &Vec3, rm: &Matrix3<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let rm = DMatrix::from_column_slice(3, 3, rm.as_slice());
    let s = h * p * h.transpose() + rm;
    let s = (&s + s.transpose()) * 0.5;
    let k = p * h.transpose() * s.try_inverse().expect("innovation covariance is invertible");
    let dx = &k * DVector::from_column_slice(r.as_slice());
    let post = (DMatrix::identity(15, 15) - &k * h) * p;
    (dx, (&post + post.transpose()) * 0.5)
}

fn block(v: &DVector<f64>, i: usize) -> Vec3 {
    Vec3::new(v[i], v[i + 1], v[i + 2])
}

/// Multiplicative EKF with global attitude error `R = exp(δθ) R̂` and additive errors
/// `(δv, δp, δb_ω, δb_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mekf {
    pub x: InsState,
    pub p: DMatrix<f64>,
}

impl Mekf {
    /// `q` is the 12×12 density over `(ω, a, τ_ω, τ_a)`.
    pub fn propagate(&mut self, u: &InsInput, dt: f64, q: &DMatrix<f64>, g: &Gravity) {
        let r = *self.x.rot.matrix();
        let mut f = DMatrix::zeros(15, 15);
        put(&mut f, 0, 9, &-r);
        put(&mut f, 3, 0, &-hat(&(r * (u.acc - self.x.bias_acc))));
        put(&mut f, 3, 12, &-r);
        put(&mut f, 6, 3, &Mat3::identity());
        let mut gm = DMatrix::zeros(15, 12);
        put(&mut gm, 0, 0, &-r);
        put(&mut gm, 3, 3, &-r);
        put(&mut gm, 9, 6, &Mat3::identity());
        put(&mut gm, 12, 9, &Mat3::identity());
        self.p = propagate_cov(&self.p, &f, &gm, q, dt);
        self.x = flow(&self.x, u, g, dt);
    }

    pub fn update_position(&mut self, y: &Vec3, rm: &Matrix3<f64>) {
        let mut h = DMatrix::zeros(3, 15);
        put(&mut h, 0, 6, &Mat3::identity());
        let (dx, p) = kalman(&self.p, &h, &(y - self.x.pos), rm);
        self.p = p;
        self.x.rot = So3::exp(&block(&dx, 0)).compose(&self.x.rot);
        self.x.vel += block(&dx, 3);
        self.x.pos += block(&dx, 6);
        self.x.bias_gyro += block(&dx, 9);
        self.x.bias_acc += block(&dx, 12);
    }
}

/// Imperfect IEKF: right-invariant error `T = exp(δ) T̂` on SE₂(3) with additive bias errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Iekf {
    pub x: InsState,
    pub p: DMatrix<f64>,
}

impl Iekf {
    pub fn propagate(&mut self, u: &InsInput, dt: f64, q: &DMatrix<f64>, g: &Gravity) {
        let r = *self.x.rot.matrix();
        let (vx, px) = (hat(&self.x.vel), hat(&self.x.pos));
        let mut f = DMatrix::zeros(15, 15);
        put(&mut f, 0, 9, &-r);
        put(&mut f, 3, 0, &hat(&g.0));
        put(&mut f, 3, 9, &(-vx * r));
        put(&mut f, 3, 12, &-r);
        put(&mut f, 6, 3, &Mat3::identity());
        put(&mut f, 6, 9, &(-px * r));
        let mut gm = DMatrix::zeros(15, 12);
        put(&mut gm, 0, 0, &-r);
        put(&mut gm, 3, 0, &(-vx * r));
        put(&mut gm, 6, 0, &(-px * r));
        put(&mut gm, 3, 3, &-r);
        put(&mut gm, 9, 6, &Mat3::identity());
        put(&mut gm, 12, 9, &Mat3::identity());
        self.p = propagate_cov(&self.p, &f, &gm, q, dt);
        self.x = flow(&self.x, u, g, dt);
    }

    /// Output matrix of the right-invariant position measurement, with residual `y − p̂`.
    pub fn output_matrix(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(3, 15);
        put(&mut h, 0, 0, &-hat(&self.x.pos));
        put(&mut h, 0, 6, &Mat3::identity());
        h
    }

    pub fn update_position(&mut self, y: &Vec3, rm: &Matrix3<f64>) {
        let (dx, p) = kalman(&self.p, &self.output_matrix(), &(y - self.x.pos), rm);
        self.p = p;
        let d = SVector::<f64, 9>::from_column_slice(&dx.as_slice()[0..9]);
        let t = Se23::exp(&d).compose(&self.x.nav());
        self.x = self.x.with_nav(&t);
        self.x.bias_gyro += block(&dx, 9);
        self.x.bias_acc += block(&dx, 12);
    }
}
