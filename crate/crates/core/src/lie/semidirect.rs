//! Semi-direct products `G ⋉_ρ V` of a base group with a vector space it acts on linearly.
//!
//! Product `(C_X, γ_X)(C_Y, γ_Y) = (C_X C_Y, γ_X + ρ(C_X) γ_Y)`. Direct products are the
//! special case of a trivial representation. The realization
//! `diag(M(C), [[ρ(C), γ], [0, 1]])` is a faithful matrix form used for testing.

use nalgebra::{DMatrix, DVector};

use super::so3::{self, hat, Vec3};
use super::{series, GroupElement, GroupKind, Hg3, LieError, Numerics};

/// How the base group acts on the vector part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// `ρ = I` on `R^n` (direct product).
    Trivial(usize),
    /// Adjoint action on the base algebra (tangent group).
    Adjoint,
    /// SE₂(3) acting on 𝔥𝔤(3) through the Adjoint of its HG(3) part.
    HgAdjoint,
    /// Rotation part acting on `R⁶` blockwise, `A * (x, y) = (A x, A y)`.
    Star,
    /// Adjoint on the base algebra plus a trivial `R^n` tail.
    AdjointPlusTrivial(usize),
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

fn rot_pair(r: &so3::Mat3) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, 6);
    m.view_mut((0, 0), (3, 3)).copy_from(r);
    m.view_mut((3, 3), (3, 3)).copy_from(r);
    m
}

impl Representation {
    pub fn dim(&self, base: GroupKind) -> usize {
        match *self {
            Representation::Trivial(n) => n,
            Representation::Adjoint => base.dim(),
            Representation::HgAdjoint => 6,
            Representation::Star => 6,
            Representation::AdjointPlusTrivial(n) => base.dim() + n,
        }
    }

    fn check_base(&self, base: GroupKind) -> Result<(), LieError> {
        match self {
            Representation::HgAdjoint if base != GroupKind::Se23 => Err(LieError::KindMismatch),
            _ => Ok(()),
        }
    }

    /// `ρ(C)`.
    pub fn rho(&self, c: &GroupElement) -> DMatrix<f64> {
        match *self {
            Representation::Trivial(n) => DMatrix::identity(n, n),
            Representation::Adjoint => c.adjoint(),
            Representation::HgAdjoint => match c {
                GroupElement::Se23(x) => GroupElement::Hg3(x.hg()).adjoint(),
                _ => unreachable!("HgAdjoint acts through SE23"),
            },
            Representation::Star => rot_pair(c.rot().matrix()),
            Representation::AdjointPlusTrivial(n) => block_diag(&c.adjoint(), &DMatrix::identity(n, n)),
        }
    }

    /// Differential `dρ(ξ)` at the identity.
    pub fn drho(&self, base: GroupKind, xi: &DVector<f64>) -> DMatrix<f64> {
        match *self {
            Representation::Trivial(n) => DMatrix::zeros(n, n),
            Representation::Adjoint => GroupElement::ad(xi, base).expect("dimension checked by caller"),
            Representation::HgAdjoint => GroupElement::ad(&xi.rows(0, 6).into_owned(), GroupKind::Hg3).expect("six coordinates"),
            Representation::Star => rot_pair(&hat(&Vec3::new(xi[0], xi[1], xi[2]))),
            Representation::AdjointPlusTrivial(n) => {
                block_diag(&GroupElement::ad(xi, base).expect("dimension checked by caller"), &DMatrix::zeros(n, n))
            }
        }
    }

    /// Matrix of `ζ ↦ dρ(ζ) γ`.
    pub fn drho_applied(&self, base: GroupKind, gamma: &DVector<f64>) -> DMatrix<f64> {
        let nb = base.dim();
        let mut m = DMatrix::zeros(gamma.len(), nb);
        for j in 0..nb {
            let mut e = DVector::zeros(nb);
            e[j] = 1.0;
            m.set_column(j, &(self.drho(base, &e) * gamma));
        }
        m
    }

    /// `J_ρ(ξ) = sum_k dρ(ξ)^k / (k+1)!`.
    pub fn jacobian(&self, base: GroupKind, xi: &DVector<f64>, num: &Numerics) -> DMatrix<f64> {
        match *self {
            Representation::Trivial(n) => DMatrix::identity(n, n),
            Representation::Star => rot_pair(&so3::left_jacobian(&Vec3::new(xi[0], xi[1], xi[2]))),
            _ => series::phi1(&self.drho(base, xi), num),
        }
    }
}

/// Element `(C, γ)` of a semi-direct product.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiDirect {
    pub base: GroupElement,
    pub gamma: DVector<f64>,
    pub rep: Representation,
}

impl SemiDirect {
    pub fn new(base: GroupElement, gamma: DVector<f64>, rep: Representation) -> Result<Self, LieError> {
        rep.check_base(base.kind())?;
        let n = rep.dim(base.kind());
        if gamma.len() != n {
            return Err(LieError::DimensionMismatch { expected: n, got: gamma.len() });
        }
        Ok(Self { base, gamma, rep })
    }

    pub fn identity(base: GroupKind, rep: Representation) -> Self {
        Self { base: GroupElement::identity(base), gamma: DVector::zeros(rep.dim(base)), rep }
    }

    pub fn base_kind(&self) -> GroupKind {
        self.base.kind()
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        self.base.dim() + self.gamma.len()
    }

    fn same_shape(&self, o: &Self) -> Result<(), LieError> {
        if self.rep == o.rep && self.base_kind() == o.base_kind() {
            Ok(())
        } else {
            Err(LieError::KindMismatch)
        }
    }

    pub fn compose(&self, o: &Self) -> Result<Self, LieError> {
        self.same_shape(o)?;
        let gamma = &self.gamma + self.rep.rho(&self.base) * &o.gamma;
        Ok(Self { base: self.base.compose(&o.base)?, gamma, rep: self.rep })
    }

    pub fn inverse(&self) -> Self {
        let inv = self.base.inverse();
        let gamma = -(self.rep.rho(&inv) * &self.gamma);
        Self { base: inv, gamma, rep: self.rep }
    }

    fn split(v: &DVector<f64>, base: GroupKind) -> (DVector<f64>, DVector<f64>) {
        let nb = base.dim();
        (v.rows(0, nb).into_owned(), v.rows(nb, v.len() - nb).into_owned())
    }

    fn check_algebra(v: &DVector<f64>, base: GroupKind, rep: Representation) -> Result<(), LieError> {
        rep.check_base(base)?;
        let n = base.dim() + rep.dim(base);
        if v.len() != n {
            return Err(LieError::DimensionMismatch { expected: n, got: v.len() });
        }
        Ok(())
    }

    /// `exp(ξ, η) = (exp ξ, J_ρ(ξ) η)`.
    pub fn exp(v: &DVector<f64>, base: GroupKind, rep: Representation) -> Result<Self, LieError> {
        Self::check_algebra(v, base, rep)?;
        let (xi, eta) = Self::split(v, base);
        let j = rep.jacobian(base, &xi, &Numerics::default());
        Ok(Self { base: GroupElement::exp(&xi, base)?, gamma: j * eta, rep })
    }

    pub fn log(&self) -> Result<DVector<f64>, LieError> {
        self.log_with(&Numerics::default())
    }

    /// `(log C, J_ρ(log C)⁻¹ γ)`.
    pub fn log_with(&self, num: &Numerics) -> Result<DVector<f64>, LieError> {
        let xi = self.base.log_with(num)?;
        let j = self.rep.jacobian(self.base_kind(), &xi, num);
        let eta = j.lu().solve(&self.gamma).expect("J_rho is invertible inside the injectivity radius");
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(0, xi.len()).copy_from(&xi);
        v.rows_mut(xi.len(), eta.len()).copy_from(&eta);
        Ok(v)
    }

    /// `[[Ad_C, 0], [-M_γ Ad_C, ρ(C)]]` where `M_γ ζ = dρ(ζ) γ`.
    pub fn adjoint(&self) -> DMatrix<f64> {
        let (nb, nv) = (self.base.dim(), self.gamma.len());
        let ad_c = self.base.adjoint();
        let m = self.rep.drho_applied(self.base_kind(), &self.gamma);
        let mut out = DMatrix::zeros(nb + nv, nb + nv);
        out.view_mut((0, 0), (nb, nb)).copy_from(&ad_c);
        out.view_mut((nb, 0), (nv, nb)).copy_from(&(-(m * &ad_c)));
        out.view_mut((nb, nb), (nv, nv)).copy_from(&self.rep.rho(&self.base));
        out
    }

    /// `ad_(ξ,η) = [[ad_ξ, 0], [-M_η, dρ(ξ)]]`.
    pub fn ad(v: &DVector<f64>, base: GroupKind, rep: Representation) -> Result<DMatrix<f64>, LieError> {
        Self::check_algebra(v, base, rep)?;
        let (xi, eta) = Self::split(v, base);
        let (nb, nv) = (xi.len(), eta.len());
        let mut out = DMatrix::zeros(nb + nv, nb + nv);
        out.view_mut((0, 0), (nb, nb)).copy_from(&GroupElement::ad(&xi, base)?);
        out.view_mut((nb, 0), (nv, nb)).copy_from(&(-rep.drho_applied(base, &eta)));
        out.view_mut((nb, nb), (nv, nv)).copy_from(&rep.drho(base, &xi));
        Ok(out)
    }

    /// Left Jacobian of the composite group, `sum_k ad_v^k / (k+1)!`.
    pub fn left_jacobian(v: &DVector<f64>, base: GroupKind, rep: Representation) -> Result<DMatrix<f64>, LieError> {
        Ok(series::phi1(&Self::ad(v, base, rep)?, &Numerics::default()))
    }

    /// Faithful block-diagonal matrix realization.
    pub fn matrix(&self) -> DMatrix<f64> {
        let nv = self.gamma.len();
        let mut v = DMatrix::identity(nv + 1, nv + 1);
        v.view_mut((0, 0), (nv, nv)).copy_from(&self.rep.rho(&self.base));
        v.view_mut((0, nv), (nv, 1)).copy_from(&self.gamma);
        block_diag(&self.base.matrix(), &v)
    }

    /// Realization of an algebra vector, consistent with [`SemiDirect::matrix`].
    pub fn algebra_matrix(v: &DVector<f64>, base: GroupKind, rep: Representation) -> Result<DMatrix<f64>, LieError> {
        Self::check_algebra(v, base, rep)?;
        let (xi, eta) = Self::split(v, base);
        let nv = eta.len();
        let mut m = DMatrix::zeros(nv + 1, nv + 1);
        m.view_mut((0, 0), (nv, nv)).copy_from(&rep.drho(base, &xi));
        m.view_mut((0, nv), (nv, 1)).copy_from(&eta);
        Ok(block_diag(&super::wedge(&xi, base)?, &m))
    }

    /// The HG(3) part of an SE₂(3) base, if any.
    pub fn base_hg(&self) -> Option<Hg3> {
        match self.base {
            GroupElement::Se23(x) => Some(x.hg()),
            GroupElement::Hg3(x) => Some(x),
            GroupElement::So3(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SHAPES: [(GroupKind, Representation); 6] = [
        (GroupKind::So3, Representation::Trivial(12)),
        (GroupKind::Se23, Representation::Trivial(6)),
        (GroupKind::Se23, Representation::Star),
        (GroupKind::Se23, Representation::Adjoint),
        (GroupKind::Hg3, Representation::AdjointPlusTrivial(3)),
        (GroupKind::Se23, Representation::HgAdjoint),
    ];

    fn vec_for(base: GroupKind, rep: Representation, seed: f64) -> DVector<f64> {
        let n = base.dim() + rep.dim(base);
        DVector::from_fn(n, |i, _| 0.4 * ((i as f64 + 1.0) * seed).sin())
    }

    #[test]
    fn exp_matches_realization_series() {
        for (base, rep) in SHAPES {
            let v = vec_for(base, rep, 0.77);
            let x = SemiDirect::exp(&v, base, rep).unwrap();
            let a = SemiDirect::algebra_matrix(&v, base, rep).unwrap();
            let n = a.nrows();
            let mut term = DMatrix::identity(n, n);
            let mut sum = DMatrix::identity(n, n);
            for k in 1..30 {
                term = &term * &a / k as f64;
                sum += &term;
            }
            assert_relative_eq!(x.matrix(), sum, epsilon = 1e-10);
        }
    }

    #[test]
    fn realization_is_homomorphism() {
        for (base, rep) in SHAPES {
            let x = SemiDirect::exp(&vec_for(base, rep, 0.31), base, rep).unwrap();
            let y = SemiDirect::exp(&vec_for(base, rep, 1.7), base, rep).unwrap();
            let xy = x.compose(&y).unwrap();
            assert_relative_eq!(xy.matrix(), x.matrix() * y.matrix(), epsilon = 1e-12);
            let e = x.compose(&x.inverse()).unwrap();
            assert_relative_eq!(e.matrix(), DMatrix::identity(e.matrix().nrows(), e.matrix().nrows()), epsilon = 1e-12);
        }
    }

    #[test]
    fn adjoint_is_conjugation_in_realization() {
        for (base, rep) in SHAPES {
            let x = SemiDirect::exp(&vec_for(base, rep, 0.53), base, rep).unwrap();
            let u = vec_for(base, rep, 2.1);
            let lhs = SemiDirect::algebra_matrix(&(x.adjoint() * &u), base, rep).unwrap();
            let rhs = x.matrix() * SemiDirect::algebra_matrix(&u, base, rep).unwrap() * x.inverse().matrix();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
            let w = vec_for(base, rep, 1.1);
            let (a, b) = (SemiDirect::algebra_matrix(&u, base, rep).unwrap(), SemiDirect::algebra_matrix(&w, base, rep).unwrap());
            let br = SemiDirect::algebra_matrix(&(SemiDirect::ad(&u, base, rep).unwrap() * &w), base, rep).unwrap();
            assert_relative_eq!(br, &a * &b - &b * &a, epsilon = 1e-12);
        }
    }

    #[test]
    fn log_roundtrip() {
        for (base, rep) in SHAPES {
            let v = vec_for(base, rep, 0.91);
            let x = SemiDirect::exp(&v, base, rep).unwrap();
            assert_relative_eq!(x.log().unwrap(), v, epsilon = 1e-11);
            let id = SemiDirect::identity(base, rep);
            assert_eq!(id.log().unwrap(), DVector::zeros(v.len()));
        }
    }
}
