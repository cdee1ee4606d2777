//! Leading/trailing principal-minor cones: classification, canonical diagonals,
//! reversal, inversion and inertia.
//!
//! A self-adjoint matrix lies in `LPMₙ(ε)` when its `k`-th leading principal minor
//! is nonzero with sign `εₖ` for every `k`; `TPMₙ(ε)` is the same with trailing
//! minors. Minors are read off an unpivoted `U D U*` factorization, so all `n` of
//! them cost one `O(n³)` pass.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Ldl, Scalar, SymmetricMatrix};
use crate::pattern::SignPattern;

/// Default relative tolerance for deciding that a minor is zero.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cone {
    /// Leading principal minors.
    #[default]
    Lpm,
    /// Trailing principal minors.
    Tpm,
}

impl Cone {
    pub fn flipped(self) -> Cone {
        match self {
            Cone::Lpm => Cone::Tpm,
            Cone::Tpm => Cone::Lpm,
        }
    }
}

impl std::str::FromStr for Cone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lpm" => Ok(Cone::Lpm),
            "tpm" => Ok(Cone::Tpm),
            other => Err(Error::SpecInvalid(format!("unknown cone {other:?}"))),
        }
    }
}

impl std::fmt::Display for Cone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Cone::Lpm => "lpm",
            Cone::Tpm => "tpm",
        })
    }
}

/// A matrix together with the cone it was certified to lie in.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint<T: Scalar = f64> {
    matrix: SymmetricMatrix<T>,
    cone: Cone,
    pattern: SignPattern,
    tolerance: f64,
}

impl<T: Scalar> ConePoint<T> {
    /// Wraps a matrix whose membership is known by construction (e.g. `L B L*`).
    pub(crate) fn trusted(matrix: SymmetricMatrix<T>, cone: Cone, pattern: SignPattern) -> Self {
        debug_assert_eq!(matrix.dim(), pattern.len());
        ConePoint {
            matrix,
            cone,
            pattern,
            tolerance: 0.0,
        }
    }

    /// The unit-modulus diagonal element of the cone: `D_ε` for LPM and its
    /// reversal `Pₙ D_ε Pₙ` for TPM.
    pub fn canonical(pattern: &SignPattern, cone: Cone) -> Self {
        let d = canonical_diagonal::<T>(pattern);
        let matrix = match cone {
            Cone::Lpm => d,
            Cone::Tpm => d.reverse(),
        };
        ConePoint::trusted(matrix, cone, pattern.clone())
    }

    pub fn matrix(&self) -> &SymmetricMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymmetricMatrix<T> {
        self.matrix
    }

    pub fn cone(&self) -> Cone {
        self.cone
    }

    pub fn pattern(&self) -> &SignPattern {
        &self.pattern
    }

    pub fn tolerance_used(&self) -> f64 {
        self.tolerance
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Reversal: `LPMₙ(ε) ↔ TPMₙ(ε)`, pattern unchanged.
    pub fn reverse(&self) -> Self {
        ConePoint {
            matrix: self.matrix.reverse(),
            cone: self.cone.flipped(),
            pattern: self.pattern.clone(),
            tolerance: self.tolerance,
        }
    }

    /// Errors unless both points share cone kind and sign pattern.
    pub fn check_same_cone(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.cone != other.cone {
            return Err(Error::ConeKindMismatch);
        }
        if self.pattern != other.pattern {
            return Err(self.pattern.mismatch(&other.pattern));
        }
        Ok(())
    }
}

/// `D_ε = diag(ε₁, ε₁ε₂, …, εₙ₋₁εₙ)`.
pub fn canonical_diagonal<T: Scalar>(pattern: &SignPattern) -> SymmetricMatrix<T> {
    let diag: Vec<f64> = pattern.diagonal_signs().iter().map(|&d| d as f64).collect();
    SymmetricMatrix::from_real_diagonal(&diag)
}

/// Leading principal minors `det A_[k][k]`, `k = 1..n` (real parts).
pub fn leading_minors<T: Scalar>(a: &SymmetricMatrix<T>) -> Vec<f64> {
    let n = a.dim();
    let ldl = Ldl::compute(a.as_matrix());
    let mut minors = Vec::with_capacity(n);
    let mut acc = 1.0;
    for p in &ldl.pivots {
        acc *= p.real();
        minors.push(acc);
    }
    // Past a zero pivot the factorization is gone; fall back to direct determinants.
    for k in minors.len()..n {
        let block = a.as_matrix().view((0, 0), (k + 1, k + 1)).into_owned();
        minors.push(block.determinant().real());
    }
    minors
}

/// Trailing principal minors: the `k×k` bottom-right blocks, `k = 1..n`.
pub fn trailing_minors<T: Scalar>(a: &SymmetricMatrix<T>) -> Vec<f64> {
    leading_minors(&a.reverse())
}

/// Determines the sign pattern of the leading (LPM) or trailing (TPM) minors.
///
/// The `k`-th minor counts as zero when `|minor| ≤ tol · max(1, ‖A‖_max)^k`.
pub fn classify<T: Scalar>(a: &SymmetricMatrix<T>, cone: Cone, tol: f64) -> Result<ConePoint<T>> {
    let oriented;
    let m = match cone {
        Cone::Lpm => a,
        Cone::Tpm => {
            oriented = a.reverse();
            &oriented
        }
    };
    let n = m.dim();
    let scale = a.scale().max(1.0);
    let ldl = Ldl::compute(m.as_matrix());
    let mut signs = Vec::with_capacity(n);
    let mut minor = 1.0;
    let mut bound = 1.0;
    for k in 0..n {
        let pivot = ldl.pivots.get(k).ok_or(Error::MinorNearZero(k + 1))?;
        debug_assert!(
            pivot.imaginary().abs() <= tol.max(1e-8) * pivot.modulus().max(1.0),
            "Hermitian pivot with imaginary part"
        );
        minor *= pivot.real();
        bound *= scale;
        if !(minor.abs() > tol * bound) {
            return Err(Error::MinorNearZero(k + 1));
        }
        signs.push(if minor > 0.0 { 1 } else { -1 });
    }
    Ok(ConePoint {
        matrix: a.clone(),
        cone,
        pattern: SignPattern::new(signs)?,
        tolerance: tol,
    })
}

/// `A ↦ A⁻¹`, sending `LPMₙ(ε)` to `TPMₙ(reverse(ε))` and vice versa.
pub fn invert_cone_point<T: Scalar>(a: &ConePoint<T>) -> Result<ConePoint<T>> {
    let inv = a
        .matrix
        .as_matrix()
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix)?;
    if inv.iter().any(|x| !x.modulus().is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(ConePoint {
        matrix: SymmetricMatrix::from_lower(inv)?,
        cone: a.cone.flipped(),
        pattern: a.pattern.reverse(),
        tolerance: a.tolerance,
    })
}

/// `t_A = min{|λ| : λ ≠ 0 an eigenvalue of a leading principal submatrix}` and the
/// pattern `ε` with `A + t·Id ∈ LPMₙ(ε)` for all `t ∈ (0, t_A)`.
///
/// The zero matrix gets `(1, 𝟏ₙ)`.
pub fn lpm_perturbation(a: &SymmetricMatrix<f64>) -> Result<(f64, SignPattern)> {
    let n = a.dim();
    let zero = DEFAULT_TOL * a.scale().max(1.0);
    let mut t = f64::INFINITY;
    for k in 1..=n {
        let block: DMatrix<f64> = a.as_matrix().view((0, 0), (k, k)).into_owned();
        let eig = SymmetricEigen::new(block);
        for &lambda in eig.eigenvalues.iter() {
            if lambda.abs() > zero {
                t = t.min(lambda.abs());
            }
        }
    }
    if !t.is_finite() {
        return Ok((1.0, SignPattern::ones(n)));
    }
    let point = classify(&a.shifted(t / 2.0), Cone::Lpm, DEFAULT_TOL)?;
    Ok((t, point.pattern))
}

/// Number of sign changes in `1, ε₁, …, εₙ`.
pub fn negative_inertia(pattern: &SignPattern) -> usize {
    pattern.negative_inertia()
}

/// Every `ε` of length `n` with exactly `k` sign changes.
pub fn cones_with_inertia(n: usize, k: usize) -> Vec<SignPattern> {
    SignPattern::with_inertia(n, k)
}

/// Eigenvalue count `(negative, positive)` of a real symmetric matrix.
pub fn eigen_inertia(a: &SymmetricMatrix<f64>) -> (usize, usize) {
    let eig = SymmetricEigen::new(a.as_matrix().clone());
    let neg = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    (neg, a.dim() - neg)
}
