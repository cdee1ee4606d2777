//! The group `(LPMₙ, ⊡)` gluing together every sign pattern, and its
//! trailing-minor twin.
//!
//! `A = L D_ε Lᵀ` corresponds to the pair `(L, ε)`; `⊡` multiplies factors by `⊙`
//! and patterns coordinatewise, so the group is `PDₙ × {±1}ⁿ` with identity `Idₙ`.
//! Unlike the per-cone `⊛` in [`crate::geometry`], the identity here does not
//! depend on `ε`.

use crate::cholesky::{canonical_compose, canonical_factor};
use crate::cone::{Cone, ConePoint, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::geometry::{distance, group_inv, group_op};
use crate::matrix::LowerTriangular;
use crate::pattern::SignPattern;

/// A cone point together with its canonical factor.
#[derive(Clone, Debug, PartialEq)]
pub struct BigGroupElement {
    point: ConePoint,
    factor: LowerTriangular,
}

impl BigGroupElement {
    pub fn new(point: ConePoint) -> Result<Self> {
        let factor = canonical_factor(&point)?;
        Ok(BigGroupElement { point, factor })
    }

    pub fn from_factor(factor: LowerTriangular, pattern: &SignPattern, cone: Cone) -> Result<Self> {
        let point = canonical_compose(&factor, pattern, cone)?;
        Ok(BigGroupElement { point, factor })
    }

    pub fn identity(n: usize, cone: Cone) -> Self {
        BigGroupElement {
            point: ConePoint::canonical(&SignPattern::ones(n), cone),
            factor: LowerTriangular::identity(n),
        }
    }

    pub fn point(&self) -> &ConePoint {
        &self.point
    }

    pub fn factor(&self) -> &LowerTriangular {
        &self.factor
    }

    pub fn pattern(&self) -> &SignPattern {
        self.point.pattern()
    }

    pub fn cone(&self) -> Cone {
        self.point.cone()
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// Reversal, an isometric isomorphism onto the other cone family.
    pub fn reverse(&self) -> Self {
        BigGroupElement {
            point: self.point.reverse(),
            factor: self.factor.reverse(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.cone() != other.cone() {
            return Err(Error::ConeKindMismatch);
        }
        Ok(())
    }
}

/// `A ⊡ A′ = (L ⊙ L′) D_{ε∘ε′} (L ⊙ L′)ᵀ`.
pub fn box_op(a: &BigGroupElement, b: &BigGroupElement) -> Result<BigGroupElement> {
    a.check_compatible(b)?;
    let factor = group_op(&a.factor, &b.factor)?;
    let pattern = a.pattern().schur(b.pattern())?;
    BigGroupElement::from_factor(factor, &pattern, a.cone())
}

/// `(L D_ε Lᵀ)⁻¹ = L_⊙⁻¹ D_ε L_⊙⁻ᵀ`.
pub fn box_inv(a: &BigGroupElement) -> Result<BigGroupElement> {
    BigGroupElement::from_factor(group_inv(&a.factor), a.pattern(), a.cone())
}

/// `d_p(A, B) = ‖(d(L, K), 1 − δ_{ε,ε′})‖_p` for `p ∈ [1, ∞]`.
pub fn dp_distance(a: &BigGroupElement, b: &BigGroupElement, p: f64) -> Result<f64> {
    a.check_compatible(b)?;
    if !(p >= 1.0) {
        return Err(Error::DegenerateParameters(format!("p = {p} is below 1")));
    }
    let d = distance(&a.factor, &b.factor)?;
    let jump = if a.pattern() == b.pattern() { 0.0 } else { 1.0 };
    Ok(if p.is_infinite() {
        d.max(jump)
    } else if jump == 0.0 {
        d
    } else {
        (d.powf(p) + 1.0).powf(1.0 / p)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionOrder {
    Finite(u32),
    Infinite,
}

/// `Idₙ` has order 1, the other canonical diagonals `D_ε` order 2, and everything
/// else is of infinite order.
pub fn torsion_order(a: &BigGroupElement) -> TorsionOrder {
    let n = a.dim();
    let scale = a.factor.as_matrix().amax().max(1.0);
    if a.factor.max_abs_diff(&LowerTriangular::identity(n)) > DEFAULT_TOL * scale {
        TorsionOrder::Infinite
    } else if a.pattern().is_all_plus() {
        TorsionOrder::Finite(1)
    } else {
        TorsionOrder::Finite(2)
    }
}
