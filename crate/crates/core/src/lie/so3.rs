//! Rotation group SO(3) with closed-form exp, log and Jacobians.

use nalgebra::{Matrix3, Vector3};

use super::{LieError, Numerics};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Skew-symmetric matrix of `v`, so that `hat(v) * w == v.cross(w)`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]; reads the off-diagonal entries below/above the diagonal.
pub fn vee(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

const SMALL_ANGLE: f64 = 1e-4;

/// sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3 and (t^2/2+cos t-1)/t^4 as functions of t.
fn coefficients(t: f64) -> (f64, f64, f64, f64) {
    if t < SMALL_ANGLE {
        let t2 = t * t;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
            1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0,
        )
    } else {
        let (s, c) = t.sin_cos();
        let t2 = t * t;
        (s / t, (1.0 - c) / t2, (t - s) / (t2 * t), (0.5 * t2 + c - 1.0) / (t2 * t2))
    }
}

/// Left Jacobian of SO(3): `sum_k hat(phi)^k / (k+1)!`.
pub fn left_jacobian(phi: &Vec3) -> Mat3 {
    let (_, b, c, _) = coefficients(phi.norm());
    let k = hat(phi);
    Mat3::identity() + k * b + k * k * c
}

/// Inverse of [`left_jacobian`].
pub fn left_jacobian_inv(phi: &Vec3) -> Mat3 {
    let t = phi.norm();
    let d = if t < SMALL_ANGLE {
        let t2 = t * t;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let (s, c) = t.sin_cos();
        1.0 / (t * t) - (1.0 + c) / (2.0 * t * s)
    };
    let k = hat(phi);
    Mat3::identity() - k * 0.5 + k * k * d
}

/// Second integral of the rotation, `sum_k hat(phi)^k / (k+2)!`, used by
/// constant-input position updates.
pub fn second_jacobian(phi: &Vec3) -> Mat3 {
    let (_, _, c, d) = coefficients(phi.norm());
    let k = hat(phi);
    Mat3::identity() * 0.5 + k * c + k * k * d
}

/// A rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct So3 {
    m: Mat3,
}

impl Default for So3 {
    fn default() -> Self {
        Self::identity()
    }
}

impl So3 {
    pub fn identity() -> Self {
        Self { m: Mat3::identity() }
    }

    /// Wraps a matrix assumed to be orthonormal with unit determinant.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Self { m }
    }

    /// Projects an arbitrary matrix to the closest rotation (SVD).
    pub fn from_matrix_orthonormalized(m: &Mat3) -> Self {
        let svd = m.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut d = Mat3::identity();
        if (u * vt).determinant() < 0.0 {
            d[(2, 2)] = -1.0;
        }
        Self { m: u * d * vt }
    }

    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z));
        Self { m: *q.to_rotation_matrix().matrix() }
    }

    /// Unit quaternion `(w, x, y, z)` with `w >= 0`.
    pub fn to_quaternion(&self) -> [f64; 4] {
        let r = nalgebra::Rotation3::from_matrix_unchecked(self.m);
        let q = nalgebra::UnitQuaternion::from_rotation_matrix(&r);
        let s = if q.w < 0.0 { -1.0 } else { 1.0 };
        [s * q.w, s * q.i, s * q.j, s * q.k]
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn exp(phi: &Vec3) -> Self {
        let (a, b, _, _) = coefficients(phi.norm());
        let k = hat(phi);
        Self { m: Mat3::identity() + k * a + k * k * b }
    }

    pub fn log(&self) -> Result<Vec3, LieError> {
        self.log_with(&Numerics::default())
    }

    /// Rotation vector of `self`; fails inside the guard band around angle pi.
    pub fn log_with(&self, num: &Numerics) -> Result<Vec3, LieError> {
        let m = &self.m;
        let c = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
        let w = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5;
        let s = w.norm();
        let t = s.atan2(c);
        if std::f64::consts::PI - t < num.pi_guard {
            return Err(LieError::AngleNearPi { angle: t });
        }
        if t < SMALL_ANGLE {
            let t2 = t * t;
            return Ok(w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0));
        }
        if c > -0.5 {
            return Ok(w * (t / s));
        }
        // Large angles: recover the axis from the symmetric part, sign from w.
        let b = (m + m.transpose()) * 0.5 - Mat3::identity() * c;
        let k = (0..3).max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)])).unwrap();
        let mut n = b.column(k).into_owned();
        n /= n.norm();
        if n.dot(&w) < 0.0 {
            n = -n;
        }
        Ok(n * t)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m * other.m }
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    pub fn act(&self, v: &Vec3) -> Vec3 {
        self.m * v
    }

    pub fn adjoint(&self) -> Mat3 {
        self.m
    }

    /// Geodesic angle in radians.
    pub fn angle(&self) -> f64 {
        let c = ((self.m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
        let m = &self.m;
        let w = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5;
        w.norm().atan2(c)
    }
}

impl std::ops::Mul for So3 {
    type Output = So3;
    fn mul(self, rhs: So3) -> So3 {
        self.compose(&rhs)
    }
}

impl std::ops::Mul<Vec3> for So3 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.m * rhs
    }
}
