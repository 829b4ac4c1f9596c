//! Groups of the form SO(3) ⋉ (R³)ᴷ: HG(3) ≅ SE(3) for K = 1 and SE₂(3) for K = 2.
//!
//! Tangent coordinates are `(ω, x₁, …, x_K)` and the matrix realization is
//! `[[R, t₁ … t_K], [0, I_K]]`.

use nalgebra::{DMatrix, SMatrix, SVector};

use super::so3::{self, hat, Mat3, So3, Vec3};
use super::{series, LieError, Numerics};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeK<const K: usize, const N: usize> {
    pub rot: So3,
    pub t: [Vec3; K],
}

/// Homogeneous Galilean group HG(3) = (A, a); structurally identical to SE(3).
pub type Hg3 = SeK<1, 6>;
/// Extended pose group SE₂(3) = (A, a, b) with velocity slot `a` and position slot `b`.
pub type Se23 = SeK<2, 9>;

fn block3<const N: usize>(v: &SVector<f64, N>, i: usize) -> Vec3 {
    Vec3::new(v[3 * i], v[3 * i + 1], v[3 * i + 2])
}

fn set_block<const N: usize>(m: &mut SMatrix<f64, N, N>, i: usize, j: usize, b: &Mat3) {
    m.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(b);
}

impl<const K: usize, const N: usize> Default for SeK<K, N> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<const K: usize, const N: usize> SeK<K, N> {
    const SHAPE_OK: () = assert!(N == 3 * (K + 1));
    pub const DIM: usize = N;

    pub fn new(rot: So3, t: [Vec3; K]) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::SHAPE_OK;
        Self { rot, t }
    }

    pub fn identity() -> Self {
        Self::new(So3::identity(), [Vec3::zeros(); K])
    }

    pub fn compose(&self, o: &Self) -> Self {
        let r = self.rot.matrix();
        let mut t = self.t;
        for (ti, oi) in t.iter_mut().zip(o.t.iter()) {
            *ti += r * oi;
        }
        Self::new(self.rot.compose(&o.rot), t)
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rot.matrix().transpose();
        let mut t = self.t;
        for ti in t.iter_mut() {
            *ti = -(rt * *ti);
        }
        Self::new(self.rot.inverse(), t)
    }

    pub fn exp(v: &SVector<f64, N>) -> Self {
        let w = block3(v, 0);
        let j = so3::left_jacobian(&w);
        let mut t = [Vec3::zeros(); K];
        for (i, ti) in t.iter_mut().enumerate() {
            *ti = j * block3(v, i + 1);
        }
        Self::new(So3::exp(&w), t)
    }

    pub fn log(&self) -> Result<SVector<f64, N>, LieError> {
        self.log_with(&Numerics::default())
    }

    pub fn log_with(&self, num: &Numerics) -> Result<SVector<f64, N>, LieError> {
        let w = self.rot.log_with(num)?;
        let ji = so3::left_jacobian_inv(&w);
        let mut v = SVector::<f64, N>::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&w);
        for (i, ti) in self.t.iter().enumerate() {
            v.fixed_rows_mut::<3>(3 * (i + 1)).copy_from(&(ji * ti));
        }
        Ok(v)
    }

    /// `Ad_X`: `[[R, 0], [t_i^ R, R]]` blockwise.
    pub fn adjoint(&self) -> SMatrix<f64, N, N> {
        let r = *self.rot.matrix();
        let mut m = SMatrix::<f64, N, N>::zeros();
        set_block(&mut m, 0, 0, &r);
        for (i, ti) in self.t.iter().enumerate() {
            set_block(&mut m, i + 1, 0, &(hat(ti) * r));
            set_block(&mut m, i + 1, i + 1, &r);
        }
        m
    }

    /// `ad_v`: `[[ω^, 0], [x_i^, ω^]]` blockwise.
    pub fn ad(v: &SVector<f64, N>) -> SMatrix<f64, N, N> {
        let wh = hat(&block3(v, 0));
        let mut m = SMatrix::<f64, N, N>::zeros();
        set_block(&mut m, 0, 0, &wh);
        for i in 1..=K {
            set_block(&mut m, i, 0, &hat(&block3(v, i)));
            set_block(&mut m, i, i, &wh);
        }
        m
    }

    /// Left Jacobian `sum_k ad_v^k / (k+1)!`.
    pub fn left_jacobian(v: &SVector<f64, N>) -> SMatrix<f64, N, N> {
        let ad = DMatrix::from_column_slice(N, N, Self::ad(v).as_slice());
        let j = series::phi1(&ad, &Numerics::default());
        SMatrix::<f64, N, N>::from_column_slice(j.as_slice())
    }

    pub fn left_jacobian_inv(v: &SVector<f64, N>) -> SMatrix<f64, N, N> {
        Self::left_jacobian(v).try_inverse().expect("left Jacobian is invertible inside the injectivity radius")
    }

    /// `(K+3)`-square matrix realization.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::identity(K + 3, K + 3);
        m.view_mut((0, 0), (3, 3)).copy_from(self.rot.matrix());
        for (i, ti) in self.t.iter().enumerate() {
            m.view_mut((0, 3 + i), (3, 1)).copy_from(ti);
        }
        m
    }

    /// Reads the realization back, re-projecting the rotation block.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let r: Mat3 = m.fixed_view::<3, 3>(0, 0).into_owned();
        let mut t = [Vec3::zeros(); K];
        for (i, ti) in t.iter_mut().enumerate() {
            *ti = m.fixed_view::<3, 1>(0, 3 + i).into_owned();
        }
        Self::new(So3::from_matrix_orthonormalized(&r), t)
    }

    pub fn wedge(v: &SVector<f64, N>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(K + 3, K + 3);
        m.view_mut((0, 0), (3, 3)).copy_from(&hat(&block3(v, 0)));
        for i in 0..K {
            m.view_mut((0, 3 + i), (3, 1)).copy_from(&block3(v, i + 1));
        }
        m
    }

    pub fn vee(m: &DMatrix<f64>) -> SVector<f64, N> {
        let w: Mat3 = m.fixed_view::<3, 3>(0, 0).into_owned();
        let mut v = SVector::<f64, N>::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&so3::vee(&w));
        for i in 0..K {
            v.fixed_rows_mut::<3>(3 * (i + 1)).copy_from(&m.fixed_view::<3, 1>(0, 3 + i));
        }
        v
    }
}

impl Se23 {
    pub fn from_parts(rot: So3, vel: Vec3, pos: Vec3) -> Self {
        Self::new(rot, [vel, pos])
    }
    pub fn vel(&self) -> Vec3 {
        self.t[0]
    }
    pub fn pos(&self) -> Vec3 {
        self.t[1]
    }
    /// The HG(3) part `(A, a)`.
    pub fn hg(&self) -> Hg3 {
        Hg3::new(self.rot, [self.t[0]])
    }
}

impl Hg3 {
    pub fn from_parts(rot: So3, vel: Vec3) -> Self {
        Self::new(rot, [vel])
    }
    pub fn vel(&self) -> Vec3 {
        self.t[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v9() -> SVector<f64, 9> {
        SVector::<f64, 9>::from_column_slice(&[0.4, -0.3, 0.8, 1.0, -2.0, 0.5, 3.0, 0.2, -1.1])
    }

    #[test]
    fn exp_matches_realization_series() {
        let v = v9();
        let e = Se23::exp(&v).matrix();
        let w = Se23::wedge(&v);
        let mut term = DMatrix::identity(5, 5);
        let mut sum = DMatrix::identity(5, 5);
        for k in 1..30 {
            term = &term * &w / k as f64;
            sum += &term;
        }
        assert_relative_eq!(e, sum, epsilon = 1e-10);
    }

    #[test]
    fn adjoint_is_conjugation() {
        let x = Se23::exp(&v9());
        let u = v9() * 0.3 + SVector::<f64, 9>::repeat(0.1);
        let lhs = Se23::wedge(&(x.adjoint() * u));
        let xm = x.matrix();
        let rhs = &xm * Se23::wedge(&u) * x.inverse().matrix();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn ad_is_bracket() {
        let u = v9();
        let v = SVector::<f64, 9>::from_fn(|i, _| (i as f64 * 0.37).sin());
        let (a, b) = (Se23::wedge(&u), Se23::wedge(&v));
        let br = &a * &b - &b * &a;
        assert_relative_eq!(Se23::wedge(&(Se23::ad(&u) * v)), br, epsilon = 1e-12);
    }

    #[test]
    fn log_roundtrip_and_jacobian() {
        let v = v9();
        assert_relative_eq!(Se23::exp(&v).log().unwrap(), v, epsilon = 1e-12);
        let j = Se23::left_jacobian(&v);
        assert_relative_eq!(j * Se23::left_jacobian_inv(&v), SMatrix::<f64, 9, 9>::identity(), epsilon = 1e-10);
        let h = Hg3::exp(&v.fixed_rows::<6>(0).into_owned());
        assert_relative_eq!(h.log().unwrap(), v.fixed_rows::<6>(0).into_owned(), epsilon = 1e-12);
    }
}
