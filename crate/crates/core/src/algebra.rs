//! Direct sums and Kronecker products of sign patterns, cone points and
//! Cholesky factors.

use nalgebra::DMatrix;

use crate::cone::{Cone, ConePoint};
use crate::error::{Error, Result};
use crate::matrix::{LowerTriangular, Scalar, SymmetricMatrix};
use crate::pattern::SignPattern;

/// `ε ⊕ ε′ = (ε₁, …, εₙ, εₙε′₁, …, εₙε′ₙ′)`, so that `D_ε ⊕ D_ε′ = D_{ε⊕ε′}`.
pub fn dsum_pattern(e: &SignPattern, f: &SignPattern) -> SignPattern {
    let last = e.signs().last().copied().unwrap_or(1);
    let signs = e
        .signs()
        .iter()
        .copied()
        .chain(f.signs().iter().map(|&s| last * s))
        .collect();
    SignPattern::new(signs).expect("signs are ±1")
}

/// Pattern `ε ⊗ ε′` with `D_{ε⊗ε′} = D_ε ⊗ D_ε′`, recovered from the diagonal by
/// cumulative products.
pub fn tensor_pattern(e: &SignPattern, f: &SignPattern) -> SignPattern {
    let (de, df) = (e.diagonal_signs(), f.diagonal_signs());
    let diag = de.iter().flat_map(|&a| df.iter().map(move |&b| a * b));
    SignPattern::from_diagonal_signs(diag).expect("signs are ±1")
}

fn block_diag<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// Block-diagonal `A ⊕ A′`.
///
/// For leading cones the pattern is `ε ⊕ ε′`; for trailing cones the blocks swap
/// roles and the pattern is `ε′ ⊕ ε`.
pub fn dsum_matrix<T: Scalar>(a: &ConePoint<T>, b: &ConePoint<T>) -> Result<ConePoint<T>> {
    if a.cone() != b.cone() {
        return Err(Error::ConeKindMismatch);
    }
    let m = SymmetricMatrix::from_lower(block_diag(a.matrix().as_matrix(), b.matrix().as_matrix()))?;
    let pattern = match a.cone() {
        Cone::Lpm => dsum_pattern(a.pattern(), b.pattern()),
        Cone::Tpm => dsum_pattern(b.pattern(), a.pattern()),
    };
    Ok(ConePoint::trusted(m, a.cone(), pattern))
}

/// Block-diagonal `L ⊕ L′`.
pub fn dsum_lower<T: Scalar>(l: &LowerTriangular<T>, k: &LowerTriangular<T>) -> LowerTriangular<T> {
    LowerTriangular::from_raw(block_diag(l.as_matrix(), k.as_matrix()))
}

/// Kronecker product `A ⊗ A′`, lying in the cone of the same kind with pattern
/// `ε ⊗ ε′`.
pub fn tensor_matrix<T: Scalar>(a: &ConePoint<T>, b: &ConePoint<T>) -> Result<ConePoint<T>> {
    if a.cone() != b.cone() {
        return Err(Error::ConeKindMismatch);
    }
    let m = SymmetricMatrix::from_lower(a.matrix().as_matrix().kronecker(b.matrix().as_matrix()))?;
    Ok(ConePoint::trusted(
        m,
        a.cone(),
        tensor_pattern(a.pattern(), b.pattern()),
    ))
}

/// Kronecker product `L ⊗ L′`, again lower triangular with positive diagonal.
pub fn tensor_lower<T: Scalar>(l: &LowerTriangular<T>, k: &LowerTriangular<T>) -> LowerTriangular<T> {
    LowerTriangular::from_raw(l.as_matrix().kronecker(k.as_matrix()))
}
