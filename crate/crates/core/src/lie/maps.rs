//! Small coordinate maps between the algebras.

use nalgebra::{DVector, SVector};

use super::{Se23, Vec3};

/// `(0₃, x)`: prefixes three zeros.
pub fn ubar(x: &DVector<f64>) -> DVector<f64> {
    let mut v = DVector::zeros(x.len() + 3);
    v.rows_mut(3, x.len()).copy_from(x);
    v
}

/// `(x, 0₃)`: appends three zeros.
pub fn lbar(x: &DVector<f64>) -> DVector<f64> {
    let mut v = DVector::zeros(x.len() + 3);
    v.rows_mut(0, x.len()).copy_from(x);
    v
}

/// Velocity column of an SE₂(3) element as the 𝔰𝔢₂(3) vector `(0, 0, a)`.
pub fn omega(x: &Se23) -> SVector<f64, 9> {
    let mut v = SVector::<f64, 9>::zeros();
    v.fixed_rows_mut::<3>(6).copy_from(&x.vel());
    v
}

/// Drops the last 3-block of an 𝔰𝔢₂(3) vector, landing in 𝔰𝔢(3) ≅ 𝔥𝔤(3).
pub fn pi(v: &SVector<f64, 9>) -> SVector<f64, 6> {
    v.fixed_rows::<6>(0).into_owned()
}

/// `ubar(lbar(g))`: gravity in the velocity slot of 𝔰𝔢₂(3).
pub fn gravity_twist(g: &Vec3) -> SVector<f64, 9> {
    let mut v = SVector::<f64, 9>::zeros();
    v.fixed_rows_mut::<3>(3).copy_from(g);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::So3;

    #[test]
    fn bars_and_projections() {
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(ubar(&x).rows(3, 3), x.rows(0, 3));
        assert_eq!(lbar(&x).rows(0, 3), x.rows(0, 3));
        let g = Vec3::new(0.0, 0.0, -9.8);
        assert_eq!(DVector::from_column_slice(gravity_twist(&g).as_slice()), ubar(&lbar(&DVector::from_column_slice(g.as_slice()))));
        assert_eq!(omega(&Se23::identity()), SVector::<f64, 9>::zeros());
        let c = Se23::from_parts(So3::identity(), Vec3::new(1.0, 2.0, 3.0), Vec3::zeros());
        assert_eq!(omega(&c).fixed_rows::<3>(6).into_owned(), Vec3::new(1.0, 2.0, 3.0));
        let v = SVector::<f64, 9>::from_fn(|i, _| i as f64);
        assert_eq!(pi(&v).as_slice(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }
}
