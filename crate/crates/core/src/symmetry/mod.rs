//! The six symmetry groups of the biased INS behind one interface.
//!
//! Every group is realized as a semi-direct product `base ⋉_ρ V`:
//!
//! | kind | base | V | ρ |
//! |------|------|---|---|
//! | `So3R12` | SO(3) | R¹² | trivial |
//! | `Se23R6` | SE₂(3) | R⁶ | trivial |
//! | `Tfg` | SE₂(3) | R⁶ | rotation on each 3-block |
//! | `Tg` | SE₂(3) | 𝔰𝔢₂(3) | Adjoint |
//! | `Dp` | HG(3) | 𝔥𝔤(3) × R³ | Adjoint ⊕ trivial |
//! | `Sd` | SE₂(3) | 𝔥𝔤(3) | Adjoint of the HG(3) part |
//!
//! Error coordinates follow the log of this realization, which gives the orderings
//! `(R, v, p, b_ω, b_a)`, `(R, v, p, b_ω, b_a, b_ν)` for `Tg` and `(R, v, b_ω, b_a, p)` for `Dp`.

mod action;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::{GroupElement, GroupKind, Hg3, LieError, Representation, Se23, SemiDirect, So3};

pub use action::{act_input, act_state, chart, chart_inv, error, estimate, lift, origin_lift, transfer};

/// Serialized by its short name (`mekf`, `iekf`, `tfg`, `tg`, `dp`, `sd`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SymmetryKind {
    /// SO(3) × R¹²; the filter is the multiplicative EKF.
    So3R12,
    /// SE₂(3) × R⁶; the filter is the imperfect invariant EKF.
    Se23R6,
    /// Two-frame group.
    Tfg,
    /// Tangent group of SE₂(3).
    Tg,
    /// Direct position group HG(3) ⋉ 𝔥𝔤(3) × R³.
    Dp,
    /// Semi-direct bias group SE₂(3) ⋉ 𝔰𝔢(3).
    Sd,
}

impl SymmetryKind {
    pub const ALL: [SymmetryKind; 6] =
        [SymmetryKind::So3R12, SymmetryKind::Se23R6, SymmetryKind::Tfg, SymmetryKind::Tg, SymmetryKind::Dp, SymmetryKind::Sd];

    /// Dimension of the group and of the error coordinates.
    pub fn dim(self) -> usize {
        match self {
            SymmetryKind::Tg => 18,
            _ => 15,
        }
    }

    pub fn base_kind(self) -> GroupKind {
        match self {
            SymmetryKind::So3R12 => GroupKind::So3,
            SymmetryKind::Dp => GroupKind::Hg3,
            _ => GroupKind::Se23,
        }
    }

    pub fn representation(self) -> Representation {
        match self {
            SymmetryKind::So3R12 => Representation::Trivial(12),
            SymmetryKind::Se23R6 => Representation::Trivial(6),
            SymmetryKind::Tfg => Representation::Star,
            SymmetryKind::Tg => Representation::Adjoint,
            SymmetryKind::Dp => Representation::AdjointPlusTrivial(3),
            SymmetryKind::Sd => Representation::HgAdjoint,
        }
    }

    /// Short command-line name.
    pub fn name(self) -> &'static str {
        match self {
            SymmetryKind::So3R12 => "mekf",
            SymmetryKind::Se23R6 => "iekf",
            SymmetryKind::Tfg => "tfg",
            SymmetryKind::Tg => "tg",
            SymmetryKind::Dp => "dp",
            SymmetryKind::Sd => "sd",
        }
    }

    /// Filter label for reports.
    pub fn label(self) -> &'static str {
        match self {
            SymmetryKind::So3R12 => "MEKF",
            SymmetryKind::Se23R6 => "IEKF",
            SymmetryKind::Tfg => "TFG-IEKF",
            SymmetryKind::Tg => "TG-EqF",
            SymmetryKind::Dp => "DP-EqF",
            SymmetryKind::Sd => "SD-EqF",
        }
    }

    /// Offset of the position block in error coordinates.
    pub fn position_offset(self) -> usize {
        match self {
            SymmetryKind::Dp => 12,
            _ => 6,
        }
    }

    /// Whether position is measured through the equivariant output model.
    pub fn has_equivariant_output(self) -> bool {
        !matches!(self, SymmetryKind::So3R12 | SymmetryKind::Dp)
    }

    /// Whether the kind carries an input action.
    pub fn has_input_action(self) -> bool {
        matches!(self, SymmetryKind::Tg | SymmetryKind::Dp)
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("unknown symmetry kind '{0}'; valid kinds: mekf, iekf, tfg, tg, dp, sd")]
pub struct UnknownKind(pub String);

impl FromStr for SymmetryKind {
    type Err = UnknownKind;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mekf" | "so3xr12" | "e" => SymmetryKind::So3R12,
            "iekf" | "se23xr6" | "es_se23xr6" | "f" => SymmetryKind::Se23R6,
            "tfg" | "tfg-iekf" => SymmetryKind::Tfg,
            "tg" | "tg-eqf" => SymmetryKind::Tg,
            "dp" | "dp-eqf" => SymmetryKind::Dp,
            "sd" | "sd-eqf" => SymmetryKind::Sd,
            _ => return Err(UnknownKind(s.to_string())),
        })
    }
}

impl TryFrom<String> for SymmetryKind {
    type Error = UnknownKind;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SymmetryKind> for String {
    fn from(k: SymmetryKind) -> String {
        k.name().to_string()
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SymmetryError {
    #[error("operation not defined for symmetry kind {0}")]
    UnsupportedKind(SymmetryKind),
    #[error("symmetry kinds differ: {0} vs {1}")]
    KindMismatch(SymmetryKind, SymmetryKind),
    #[error("outside the chart domain: {0}")]
    ChartDomain(LieError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Element of one of the six symmetry groups.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryElement {
    pub kind: SymmetryKind,
    pub g: SemiDirect,
}

impl SymmetryElement {
    pub fn identity(kind: SymmetryKind) -> Self {
        Self { kind, g: SemiDirect::identity(kind.base_kind(), kind.representation()) }
    }

    pub fn from_parts(kind: SymmetryKind, base: GroupElement, gamma: DVector<f64>) -> Result<Self, SymmetryError> {
        if base.kind() != kind.base_kind() {
            return Err(LieError::KindMismatch.into());
        }
        Ok(Self { kind, g: SemiDirect::new(base, gamma, kind.representation())? })
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    fn same_kind(&self, o: &Self) -> Result<(), SymmetryError> {
        if self.kind == o.kind {
            Ok(())
        } else {
            Err(SymmetryError::KindMismatch(self.kind, o.kind))
        }
    }

    pub fn compose(&self, o: &Self) -> Result<Self, SymmetryError> {
        self.same_kind(o)?;
        Ok(Self { kind: self.kind, g: self.g.compose(&o.g)? })
    }

    pub fn inverse(&self) -> Self {
        Self { kind: self.kind, g: self.g.inverse() }
    }

    pub fn exp(kind: SymmetryKind, v: &DVector<f64>) -> Result<Self, SymmetryError> {
        Ok(Self { kind, g: SemiDirect::exp(v, kind.base_kind(), kind.representation())? })
    }

    pub fn log(&self) -> Result<DVector<f64>, SymmetryError> {
        self.g.log().map_err(SymmetryError::ChartDomain)
    }

    pub fn adjoint(&self) -> DMatrix<f64> {
        self.g.adjoint()
    }

    pub fn ad(kind: SymmetryKind, v: &DVector<f64>) -> Result<DMatrix<f64>, SymmetryError> {
        Ok(SemiDirect::ad(v, kind.base_kind(), kind.representation())?)
    }

    /// Left Jacobian `sum_k ad_v^k/(k+1)!` of the group.
    pub fn left_jacobian(kind: SymmetryKind, v: &DVector<f64>) -> Result<DMatrix<f64>, SymmetryError> {
        Ok(SemiDirect::left_jacobian(v, kind.base_kind(), kind.representation())?)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.g.matrix()
    }

    pub fn gamma(&self) -> &DVector<f64> {
        &self.g.gamma
    }

    pub fn se23(&self) -> Option<Se23> {
        match self.g.base {
            GroupElement::Se23(x) => Some(x),
            _ => None,
        }
    }

    pub fn hg3(&self) -> Option<Hg3> {
        match self.g.base {
            GroupElement::Hg3(x) => Some(x),
            _ => None,
        }
    }

    pub fn rot(&self) -> So3 {
        self.g.base.rot()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for k in SymmetryKind::ALL {
            assert_eq!(k.name().parse::<SymmetryKind>().unwrap(), k);
        }
        let err = "xyz".parse::<SymmetryKind>().unwrap_err().to_string();
        for k in SymmetryKind::ALL {
            assert!(err.contains(k.name()));
        }
    }

    #[test]
    fn dims_match_realization() {
        for k in SymmetryKind::ALL {
            assert_eq!(SymmetryElement::identity(k).g.dim(), k.dim());
        }
    }
}
