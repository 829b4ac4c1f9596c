//! Biased inertial navigation model on a flat, non-rotating earth.

use nalgebra::{Matrix5, SVector};

use crate::lie::so3;
use crate::lie::{Se23, So3, Vec3};

pub const STANDARD_GRAVITY: f64 = 9.80665;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gravity(pub Vec3);

impl Default for Gravity {
    fn default() -> Self {
        Gravity(Vec3::new(0.0, 0.0, -STANDARD_GRAVITY))
    }
}

/// Attitude, velocity, position and sensor biases.
///
/// `bias_vel` is the virtual velocity bias; it is only a state under the tangent-group
/// symmetry and stays zero elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct InsState {
    pub rot: So3,
    pub vel: Vec3,
    pub pos: Vec3,
    pub bias_gyro: Vec3,
    pub bias_acc: Vec3,
    pub bias_vel: Vec3,
}

impl InsState {
    /// The origin `(I, 0, 0, 0, 0, 0)`.
    pub fn origin() -> Self {
        Self::default()
    }

    pub fn new(rot: So3, vel: Vec3, pos: Vec3, bias_gyro: Vec3, bias_acc: Vec3) -> Self {
        Self { rot, vel, pos, bias_gyro, bias_acc, bias_vel: Vec3::zeros() }
    }

    /// Navigation part as an extended pose.
    pub fn nav(&self) -> Se23 {
        Se23::from_parts(self.rot, self.vel, self.pos)
    }

    pub fn with_nav(&self, t: &Se23) -> Self {
        Self { rot: t.rot, vel: t.vel(), pos: t.pos(), ..*self }
    }

    /// `(b_ω, b_a)`.
    pub fn bias6(&self) -> SVector<f64, 6> {
        stack2(&self.bias_gyro, &self.bias_acc)
    }

    /// `(b_ω, b_a, b_ν)`.
    pub fn bias9(&self) -> SVector<f64, 9> {
        stack3(&self.bias_gyro, &self.bias_acc, &self.bias_vel)
    }

    pub fn with_bias6(&self, b: &SVector<f64, 6>) -> Self {
        Self { bias_gyro: b.fixed_rows::<3>(0).into_owned(), bias_acc: b.fixed_rows::<3>(3).into_owned(), ..*self }
    }

    /// Largest per-component distance to `o`, with rotations compared as matrices.
    pub fn distance(&self, o: &Self) -> f64 {
        [
            (self.rot.matrix() - o.rot.matrix()).norm(),
            (self.vel - o.vel).norm(),
            (self.pos - o.pos).norm(),
            (self.bias_gyro - o.bias_gyro).norm(),
            (self.bias_acc - o.bias_acc).norm(),
            (self.bias_vel - o.bias_vel).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn with_bias9(&self, b: &SVector<f64, 9>) -> Self {
        Self {
            bias_gyro: b.fixed_rows::<3>(0).into_owned(),
            bias_acc: b.fixed_rows::<3>(3).into_owned(),
            bias_vel: b.fixed_rows::<3>(6).into_owned(),
            ..*self
        }
    }
}

/// IMU readings `(ω, a)`, the virtual velocity input `ν` and bias drift inputs `τ`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct InsInput {
    pub gyro: Vec3,
    pub acc: Vec3,
    pub vel: Vec3,
    pub tau_gyro: Vec3,
    pub tau_acc: Vec3,
    pub tau_vel: Vec3,
}

impl InsInput {
    /// IMU reading with zero virtual input and zero bias drift.
    pub fn imu(gyro: Vec3, acc: Vec3) -> Self {
        Self { gyro, acc, ..Default::default() }
    }

    /// `w = (ω, a, ν)`.
    pub fn w9(&self) -> SVector<f64, 9> {
        stack3(&self.gyro, &self.acc, &self.vel)
    }

    pub fn w6(&self) -> SVector<f64, 6> {
        stack2(&self.gyro, &self.acc)
    }

    pub fn tau6(&self) -> SVector<f64, 6> {
        stack2(&self.tau_gyro, &self.tau_acc)
    }

    pub fn tau9(&self) -> SVector<f64, 9> {
        stack3(&self.tau_gyro, &self.tau_acc, &self.tau_vel)
    }

    pub fn from_w9_tau9(w: &SVector<f64, 9>, tau: &SVector<f64, 9>) -> Self {
        Self {
            gyro: w.fixed_rows::<3>(0).into_owned(),
            acc: w.fixed_rows::<3>(3).into_owned(),
            vel: w.fixed_rows::<3>(6).into_owned(),
            tau_gyro: tau.fixed_rows::<3>(0).into_owned(),
            tau_acc: tau.fixed_rows::<3>(3).into_owned(),
            tau_vel: tau.fixed_rows::<3>(6).into_owned(),
        }
    }
}

pub(crate) fn stack2(a: &Vec3, b: &Vec3) -> SVector<f64, 6> {
    SVector::<f64, 6>::from_column_slice(&[a.x, a.y, a.z, b.x, b.y, b.z])
}

pub(crate) fn stack3(a: &Vec3, b: &Vec3, c: &Vec3) -> SVector<f64, 9> {
    SVector::<f64, 9>::from_column_slice(&[a.x, a.y, a.z, b.x, b.y, b.z, c.x, c.y, c.z])
}

/// Time derivative of an [`InsState`]; `rot` is the body rate with `Ṙ = R rot^`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StateDerivative {
    pub rot: Vec3,
    pub vel: Vec3,
    pub pos: Vec3,
    pub bias_gyro: Vec3,
    pub bias_acc: Vec3,
    pub bias_vel: Vec3,
}

/// `Ṙ = R(ω−b_ω)^`, `v̇ = R(a−b_a)+g`, `ṗ = v + R(ν−b_ν)`, `ḃ = τ`.
pub fn dynamics(x: &InsState, u: &InsInput, g: &Gravity) -> StateDerivative {
    let r = x.rot.matrix();
    StateDerivative {
        rot: u.gyro - x.bias_gyro,
        vel: r * (u.acc - x.bias_acc) + g.0,
        pos: x.vel + r * (u.vel - x.bias_vel),
        bias_gyro: u.tau_gyro,
        bias_acc: u.tau_acc,
        bias_vel: u.tau_vel,
    }
}

/// Moves along a derivative for time `h`, rotation by the exponential.
pub fn retract(x: &InsState, d: &StateDerivative, h: f64) -> InsState {
    InsState {
        rot: x.rot.compose(&So3::exp(&(d.rot * h))),
        vel: x.vel + d.vel * h,
        pos: x.pos + d.pos * h,
        bias_gyro: x.bias_gyro + d.bias_gyro * h,
        bias_acc: x.bias_acc + d.bias_acc * h,
        bias_vel: x.bias_vel + d.bias_vel * h,
    }
}

/// Matrices of the compact form `Ṫ = T(W − B + D) + (G − D)T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompactMatrices {
    pub g: Matrix5<f64>,
    pub d: Matrix5<f64>,
    pub b: Matrix5<f64>,
    pub w: Matrix5<f64>,
}

fn wedge5(v: &SVector<f64, 9>) -> Matrix5<f64> {
    let m = Se23::wedge(v);
    Matrix5::from_column_slice(m.as_slice())
}

pub fn compact_matrices(x: &InsState, u: &InsInput, g: &Gravity) -> CompactMatrices {
    let mut d = Matrix5::zeros();
    d[(3, 4)] = 1.0;
    CompactMatrices { g: wedge5(&crate::lie::maps::gravity_twist(&g.0)), d, b: wedge5(&x.bias9()), w: wedge5(&u.w9()) }
}

/// `T(W − B + D) + (G − D)T` as a 5×5 matrix.
pub fn compact_rate(x: &InsState, u: &InsInput, g: &Gravity) -> Matrix5<f64> {
    let c = compact_matrices(x, u, g);
    let t = Matrix5::from_column_slice(x.nav().matrix().as_slice());
    t * (c.w - c.b + c.d) + (c.g - c.d) * t
}

/// Exact solution over `dt` for inputs held constant; biases drift linearly with `τ`
/// while the navigation states use the biases at the start of the interval.
pub fn flow(x: &InsState, u: &InsInput, g: &Gravity, dt: f64) -> InsState {
    let w = (u.gyro - x.bias_gyro) * dt;
    let a = u.acc - x.bias_acc;
    let n = u.vel - x.bias_vel;
    let r = x.rot.matrix();
    let j = so3::left_jacobian(&w);
    let j2 = so3::second_jacobian(&w);
    InsState {
        rot: x.rot.compose(&So3::exp(&w)),
        vel: x.vel + r * (j * a) * dt + g.0 * dt,
        pos: x.pos + x.vel * dt + r * (j * n * dt + j2 * a * (dt * dt)) + g.0 * (0.5 * dt * dt),
        bias_gyro: x.bias_gyro + u.tau_gyro * dt,
        bias_acc: x.bias_acc + u.tau_acc * dt,
        bias_vel: x.bias_vel + u.tau_vel * dt,
    }
}

type Local = SVector<f64, 18>;

fn local_point(x: &InsState, z: &Local) -> InsState {
    let th = Vec3::new(z[0], z[1], z[2]);
    let b = |i: usize| Vec3::new(z[i], z[i + 1], z[i + 2]);
    InsState {
        rot: x.rot.compose(&So3::exp(&th)),
        vel: x.vel + b(3),
        pos: x.pos + b(6),
        bias_gyro: x.bias_gyro + b(9),
        bias_acc: x.bias_acc + b(12),
        bias_vel: x.bias_vel + b(15),
    }
}

fn local_rate(x: &InsState, z: &Local, u: &InsInput, g: &Gravity) -> Local {
    let y = local_point(x, z);
    let d = dynamics(&y, u, g);
    let th = Vec3::new(z[0], z[1], z[2]);
    // θ̇ = J_r(θ)⁻¹ ω̄ with J_r(θ) = J_l(−θ).
    let thd = so3::left_jacobian_inv(&(-th)) * d.rot;
    let mut out = Local::zeros();
    for (i, v) in [thd, d.vel, d.pos, d.bias_gyro, d.bias_acc, d.bias_vel].iter().enumerate() {
        out.fixed_rows_mut::<3>(3 * i).copy_from(v);
    }
    out
}

/// One classical Runge-Kutta step in exponential coordinates centred at `x`.
pub fn rk4_step(x: &InsState, t: f64, dt: f64, input: &impl Fn(f64) -> InsInput, g: &Gravity) -> InsState {
    let z0 = Local::zeros();
    let (u0, um, u1) = (input(t), input(t + 0.5 * dt), input(t + dt));
    let k1 = local_rate(x, &z0, &u0, g);
    let k2 = local_rate(x, &(k1 * (0.5 * dt)), &um, g);
    let k3 = local_rate(x, &(k2 * (0.5 * dt)), &um, g);
    let k4 = local_rate(x, &(k3 * dt), &u1, g);
    let z = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    local_point(x, &z)
}

/// Integrates the dynamics from `x0` at time `t0`; returns `steps + 1` states.
pub fn integrate_truth(x0: &InsState, t0: f64, input: impl Fn(f64) -> InsInput, g: &Gravity, dt: f64, steps: usize) -> Vec<InsState> {
    assert!(dt > 0.0, "dt must be positive");
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = *x0;
    out.push(x);
    for k in 0..steps {
        x = rk4_step(&x, t0 + k as f64 * dt, dt, &input, g);
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::hat;
    use approx::assert_relative_eq;

    fn sample_state() -> InsState {
        InsState {
            rot: So3::exp(&Vec3::new(0.3, -0.5, 1.1)),
            vel: Vec3::new(1.0, -2.0, 0.5),
            pos: Vec3::new(3.0, 4.0, -1.0),
            bias_gyro: Vec3::new(0.01, -0.02, 0.03),
            bias_acc: Vec3::new(0.1, 0.2, -0.1),
            bias_vel: Vec3::new(0.05, 0.0, -0.02),
        }
    }

    fn sample_input() -> InsInput {
        InsInput {
            gyro: Vec3::new(0.2, 0.1, -0.3),
            acc: Vec3::new(0.5, -0.2, 9.7),
            vel: Vec3::new(0.1, 0.3, 0.0),
            tau_gyro: Vec3::new(0.001, 0.0, 0.002),
            tau_acc: Vec3::new(0.0, 0.01, 0.0),
            tau_vel: Vec3::zeros(),
        }
    }

    #[test]
    fn rest_case() {
        let g = Gravity::default();
        let d = dynamics(&InsState::origin(), &InsInput::default(), &g);
        assert_eq!(d.vel, g.0);
        assert_eq!(d.rot, Vec3::zeros());
        assert_eq!(d.pos, Vec3::zeros());
    }

    #[test]
    fn compact_form_matches_componentwise() {
        let (x, u, g) = (sample_state(), sample_input(), Gravity::default());
        let m = compact_rate(&x, &u, &g);
        let d = dynamics(&x, &u, &g);
        let rdot = x.rot.matrix() * hat(&d.rot);
        assert_relative_eq!(m.fixed_view::<3, 3>(0, 0).into_owned(), rdot, epsilon = 1e-12);
        assert_relative_eq!(m.fixed_view::<3, 1>(0, 3).into_owned(), d.vel, epsilon = 1e-12);
        assert_relative_eq!(m.fixed_view::<3, 1>(0, 4).into_owned(), d.pos, epsilon = 1e-12);
        assert_eq!(m.fixed_view::<2, 5>(3, 0).into_owned(), nalgebra::SMatrix::<f64, 2, 5>::zeros());
        let c = compact_matrices(&x, &u, &g);
        assert_eq!(c.d * c.d, Matrix5::zeros());
        assert_eq!(c.g.fixed_view::<3, 1>(0, 3).into_owned(), g.0);
    }

    #[test]
    fn flow_matches_fine_integration() {
        let (x, g) = (sample_state(), Gravity::default());
        let u = InsInput { tau_gyro: Vec3::zeros(), tau_acc: Vec3::zeros(), ..sample_input() };
        let exact = flow(&x, &u, &g, 0.5);
        let num = *integrate_truth(&x, 0.0, |_| u, &g, 0.5 / 400.0, 400).last().unwrap();
        assert_relative_eq!(*exact.rot.matrix(), *num.rot.matrix(), epsilon = 1e-11);
        assert_relative_eq!(exact.vel, num.vel, epsilon = 1e-10);
        assert_relative_eq!(exact.pos, num.pos, epsilon = 1e-10);
    }

    #[test]
    fn constant_rotation_returns_to_start() {
        let u = InsInput::imu(Vec3::new(0.0, 0.0, 1.0), Vec3::zeros());
        let g = Gravity(Vec3::zeros());
        let n = 2000;
        let traj = integrate_truth(&InsState::origin(), 0.0, |_| u, &g, 2.0 * std::f64::consts::PI / n as f64, n);
        let end = traj.last().unwrap();
        assert!((end.rot.matrix() - crate::lie::Mat3::identity()).norm() < 1e-6);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let (x, g) = (sample_state(), Gravity::default());
        let input = |t: f64| InsInput {
            gyro: Vec3::new(0.5 * t.sin(), 0.3 * (2.0 * t).cos(), -0.2),
            acc: Vec3::new(t.cos(), 0.5, 9.0 + 0.3 * t.sin()),
            ..Default::default()
        };
        let end = |n: usize| *integrate_truth(&x, 0.0, input, &g, 2.0 / n as f64, n).last().unwrap();
        let reference = end(4096);
        let err = |s: &InsState| (s.pos - reference.pos).norm() + (s.rot.matrix() - reference.rot.matrix()).norm();
        let ratio = err(&end(32)) / err(&end(64));
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }
}
