//! Matrix Lie groups used by the navigation symmetries.

pub mod maps;
pub mod sek;
pub mod semidirect;
pub mod series;
pub mod so3;

use nalgebra::{DMatrix, DVector, SVector};
use thiserror::Error;

pub use sek::{Hg3, Se23, SeK};
pub use semidirect::{Representation, SemiDirect};
pub use so3::{hat, vee, Mat3, So3, Vec3};

/// Tolerances for logs and series; `Default` gives the library-wide values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Numerics {
    /// Rotation logs fail when the angle is within this distance of pi.
    pub pi_guard: f64,
    /// Series stop once a term's Frobenius norm drops below this.
    pub series_tol: f64,
    /// Hard cap on series terms.
    pub series_cap: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { pi_guard: 1e-6, series_tol: 1e-14, series_cap: 40 }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LieError {
    #[error("rotation angle {angle} is within the guard band of pi")]
    AngleNearPi { angle: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group kind mismatch")]
    KindMismatch,
}

/// Base groups; the algebra of each is identified with its kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    So3,
    /// HG(3), also serving as SE(3).
    Hg3,
    Se23,
}

pub type AlgebraKind = GroupKind;

impl GroupKind {
    pub fn dim(self) -> usize {
        match self {
            GroupKind::So3 => 3,
            GroupKind::Hg3 => 6,
            GroupKind::Se23 => 9,
        }
    }

    pub fn matrix_size(self) -> usize {
        match self {
            GroupKind::So3 => 3,
            GroupKind::Hg3 => 4,
            GroupKind::Se23 => 5,
        }
    }
}

fn check_dim(v: &DVector<f64>, n: usize) -> Result<(), LieError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(LieError::DimensionMismatch { expected: n, got: v.len() })
    }
}

fn to_s<const N: usize>(v: &DVector<f64>) -> SVector<f64, N> {
    SVector::<f64, N>::from_column_slice(v.as_slice())
}

fn to_d<const R: usize, const C: usize>(m: &nalgebra::SMatrix<f64, R, C>) -> DMatrix<f64> {
    DMatrix::from_column_slice(R, C, m.as_slice())
}

/// Matrix form of an algebra vector.
pub fn wedge(v: &DVector<f64>, kind: AlgebraKind) -> Result<DMatrix<f64>, LieError> {
    check_dim(v, kind.dim())?;
    Ok(match kind {
        GroupKind::So3 => to_d(&hat(&Vec3::from_column_slice(v.as_slice()))),
        GroupKind::Hg3 => Hg3::wedge(&to_s(v)),
        GroupKind::Se23 => Se23::wedge(&to_s(v)),
    })
}

/// Inverse of [`wedge`].
pub fn vee_algebra(m: &DMatrix<f64>, kind: AlgebraKind) -> Result<DVector<f64>, LieError> {
    let s = kind.matrix_size();
    if m.nrows() != s || m.ncols() != s {
        return Err(LieError::DimensionMismatch { expected: s, got: m.nrows() });
    }
    Ok(match kind {
        GroupKind::So3 => DVector::from_column_slice(vee(&m.fixed_view::<3, 3>(0, 0).into_owned()).as_slice()),
        GroupKind::Hg3 => DVector::from_column_slice(Hg3::vee(m).as_slice()),
        GroupKind::Se23 => DVector::from_column_slice(Se23::vee(m).as_slice()),
    })
}

/// A value of one of the base groups.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupElement {
    So3(So3),
    Hg3(Hg3),
    Se23(Se23),
}

impl GroupElement {
    pub fn identity(kind: GroupKind) -> Self {
        match kind {
            GroupKind::So3 => GroupElement::So3(So3::identity()),
            GroupKind::Hg3 => GroupElement::Hg3(Hg3::identity()),
            GroupKind::Se23 => GroupElement::Se23(Se23::identity()),
        }
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::So3(_) => GroupKind::So3,
            GroupElement::Hg3(_) => GroupKind::Hg3,
            GroupElement::Se23(_) => GroupKind::Se23,
        }
    }

    pub fn dim(&self) -> usize {
        self.kind().dim()
    }

    pub fn rot(&self) -> So3 {
        match self {
            GroupElement::So3(r) => *r,
            GroupElement::Hg3(x) => x.rot,
            GroupElement::Se23(x) => x.rot,
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self, LieError> {
        Ok(match (self, other) {
            (GroupElement::So3(a), GroupElement::So3(b)) => GroupElement::So3(a.compose(b)),
            (GroupElement::Hg3(a), GroupElement::Hg3(b)) => GroupElement::Hg3(a.compose(b)),
            (GroupElement::Se23(a), GroupElement::Se23(b)) => GroupElement::Se23(a.compose(b)),
            _ => return Err(LieError::KindMismatch),
        })
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::So3(a) => GroupElement::So3(a.inverse()),
            GroupElement::Hg3(a) => GroupElement::Hg3(a.inverse()),
            GroupElement::Se23(a) => GroupElement::Se23(a.inverse()),
        }
    }

    pub fn exp(v: &DVector<f64>, kind: GroupKind) -> Result<Self, LieError> {
        check_dim(v, kind.dim())?;
        Ok(match kind {
            GroupKind::So3 => GroupElement::So3(So3::exp(&Vec3::from_column_slice(v.as_slice()))),
            GroupKind::Hg3 => GroupElement::Hg3(Hg3::exp(&to_s(v))),
            GroupKind::Se23 => GroupElement::Se23(Se23::exp(&to_s(v))),
        })
    }

    pub fn log(&self) -> Result<DVector<f64>, LieError> {
        self.log_with(&Numerics::default())
    }

    pub fn log_with(&self, num: &Numerics) -> Result<DVector<f64>, LieError> {
        Ok(match self {
            GroupElement::So3(a) => DVector::from_column_slice(a.log_with(num)?.as_slice()),
            GroupElement::Hg3(a) => DVector::from_column_slice(a.log_with(num)?.as_slice()),
            GroupElement::Se23(a) => DVector::from_column_slice(a.log_with(num)?.as_slice()),
        })
    }

    pub fn adjoint(&self) -> DMatrix<f64> {
        match self {
            GroupElement::So3(a) => to_d(&a.adjoint()),
            GroupElement::Hg3(a) => to_d(&a.adjoint()),
            GroupElement::Se23(a) => to_d(&a.adjoint()),
        }
    }

    /// `ad_v` for `v` in the algebra of `kind`.
    pub fn ad(v: &DVector<f64>, kind: AlgebraKind) -> Result<DMatrix<f64>, LieError> {
        check_dim(v, kind.dim())?;
        Ok(match kind {
            GroupKind::So3 => to_d(&hat(&Vec3::from_column_slice(v.as_slice()))),
            GroupKind::Hg3 => to_d(&Hg3::ad(&to_s(v))),
            GroupKind::Se23 => to_d(&Se23::ad(&to_s(v))),
        })
    }

    /// Left Jacobian `sum_k ad_v^k / (k+1)!`.
    pub fn left_jacobian(v: &DVector<f64>, kind: AlgebraKind) -> Result<DMatrix<f64>, LieError> {
        check_dim(v, kind.dim())?;
        Ok(match kind {
            GroupKind::So3 => to_d(&so3::left_jacobian(&Vec3::from_column_slice(v.as_slice()))),
            _ => series::phi1(&Self::ad(v, kind)?, &Numerics::default()),
        })
    }

    pub fn left_jacobian_inv(v: &DVector<f64>, kind: AlgebraKind) -> Result<DMatrix<f64>, LieError> {
        let j = Self::left_jacobian(v, kind)?;
        Ok(j.lu().try_inverse().expect("left Jacobian is invertible inside the injectivity radius"))
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            GroupElement::So3(a) => to_d(a.matrix()),
            GroupElement::Hg3(a) => a.matrix(),
            GroupElement::Se23(a) => a.matrix(),
        }
    }
}
