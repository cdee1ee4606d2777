//! Dense self-adjoint and Cholesky-space matrix types.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Scalar field of a matrix: real or complex double precision.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    const IS_COMPLEX: bool;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
}

/// Field tag carried by matrices for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// Anti-diagonal conjugation `P A P`: reverses row and column order.
pub fn flip<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    let (r, c) = a.shape();
    DMatrix::from_fn(r, c, |i, j| a[(r - 1 - i, c - 1 - j)])
}

/// Max-modulus entry, `max(1, ·)` applied by callers where needed.
pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.modulus()))
}

/// Max entrywise modulus of `a − b`.
pub fn max_abs_diff<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |m, (x, y)| m.max((*x - *y).modulus()))
}

/// A dense Hermitian (real symmetric when `T = f64`) matrix.
///
/// Storage is full, but the upper triangle is always the conjugate mirror of the
/// lower one and the diagonal is real, so the matrix is self-adjoint exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T: Scalar = f64> {
    data: DMatrix<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    /// Builds from the lower triangle of `m`; the strict upper triangle is ignored.
    pub fn from_lower(mut m: DMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare);
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        let n = m.nrows();
        for j in 0..n {
            m[(j, j)] = T::from_real(m[(j, j)].real());
            for i in j + 1..n {
                m[(j, i)] = m[(i, j)].conjugate();
            }
        }
        Ok(SymmetricMatrix { data: m })
    }

    /// Checks self-adjointness to `tol · max(1, ‖m‖_max)` and then mirrors the lower triangle.
    pub fn new(m: DMatrix<T>, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare);
        }
        let bound = tol * max_abs(&m).max(1.0);
        let n = m.nrows();
        for i in 0..n {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)].conjugate()).modulus() > bound {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Self::from_lower(m)
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&d| T::from_real(d)));
        SymmetricMatrix {
            data: DMatrix::from_diagonal(&v),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn field(&self) -> Field {
        if T::IS_COMPLEX {
            Field::Complex
        } else {
            Field::Real
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[(i, j)]
    }

    /// `max |aᵢⱼ|`.
    pub fn scale(&self) -> f64 {
        max_abs(&self.data)
    }

    /// The reversal `(Pₙ A Pₙ)*`, which equals `Pₙ A Pₙ` for self-adjoint `A`.
    pub fn reverse(&self) -> Self {
        SymmetricMatrix {
            data: flip(&self.data),
        }
    }

    pub fn shifted(&self, t: f64) -> Self {
        let mut data = self.data.clone();
        for j in 0..self.dim() {
            data[(j, j)] += T::from_real(t);
        }
        SymmetricMatrix { data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

impl SymmetricMatrix<f64> {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m, 1e-12)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// JSON form shared by matrix files: `{"dim": n, "rows": [[…], …]}`.
#[derive(Serialize, Deserialize)]
struct RowsRepr {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl RowsRepr {
    fn check(&self) -> Result<()> {
        if self.rows.len() != self.dim || self.rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::DimensionMismatch(self.dim, self.rows.len()));
        }
        Ok(())
    }
}

impl Serialize for SymmetricMatrix<f64> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RowsRepr {
            dim: self.dim(),
            rows: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricMatrix<f64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RowsRepr::deserialize(deserializer)?;
        repr.check().map_err(serde::de::Error::custom)?;
        SymmetricMatrix::from_rows(&repr.rows).map_err(serde::de::Error::custom)
    }
}

/// An element of Cholesky space: lower triangular with strictly positive real diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular<T: Scalar = f64> {
    data: DMatrix<T>,
}

impl<T: Scalar> LowerTriangular<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare);
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        let n = m.nrows();
        for i in 0..n {
            let d = m[(i, i)];
            if !(d.real() > 0.0) || d.imaginary() != 0.0 || !d.real().is_finite() {
                return Err(Error::NotCholeskyFactor);
            }
            for j in i + 1..n {
                if m[(i, j)] != T::zero() {
                    return Err(Error::NotCholeskyFactor);
                }
            }
        }
        Ok(LowerTriangular { data: m })
    }

    /// Caller guarantees the invariants; used by routines that construct the
    /// factor entry by entry.
    pub(crate) fn from_raw(data: DMatrix<T>) -> Self {
        debug_assert!(Self::new(data.clone()).is_ok(), "invalid Cholesky factor");
        LowerTriangular { data }
    }

    pub fn identity(n: usize) -> Self {
        LowerTriangular {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[(i, j)]
    }

    /// Diagonal entry `lⱼⱼ` (a positive real).
    pub fn diag(&self, j: usize) -> f64 {
        self.data[(j, j)].real()
    }

    /// `(Pₙ L Pₙ)*`, again an element of Cholesky space.
    pub fn reverse(&self) -> Self {
        LowerTriangular {
            data: flip(&self.data).adjoint(),
        }
    }

    /// Matrix inverse (not the group inverse), itself lower triangular.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let inv = self
            .data
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("positive diagonal");
        let mut inv = inv;
        for j in 0..n {
            inv[(j, j)] = T::from_real(inv[(j, j)].real());
            for i in 0..j {
                inv[(i, j)] = T::zero();
            }
        }
        LowerTriangular { data: inv }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

impl LowerTriangular<f64> {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

impl Serialize for LowerTriangular<f64> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RowsRepr {
            dim: self.dim(),
            rows: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LowerTriangular<f64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RowsRepr::deserialize(deserializer)?;
        repr.check().map_err(serde::de::Error::custom)?;
        LowerTriangular::from_rows(&repr.rows).map_err(serde::de::Error::custom)
    }
}

/// Unpivoted `A = U D U*` with `U` unit lower triangular.
///
/// `pivots[k]` is the ratio of the `(k+1)`-th to the `k`-th leading principal
/// minor. The factorization stops at the first zero or non-finite pivot, which
/// is still pushed, so `pivots.len() < n` signals breakdown.
#[derive(Clone, Debug)]
pub(crate) struct Ldl<T: Scalar> {
    pub unit: DMatrix<T>,
    pub pivots: Vec<T>,
}

impl<T: Scalar> Ldl<T> {
    pub fn compute(a: &DMatrix<T>) -> Self {
        let n = a.nrows();
        let mut work = a.clone();
        let mut unit = DMatrix::<T>::identity(n, n);
        let mut pivots = Vec::with_capacity(n);
        for j in 0..n {
            let d = work[(j, j)];
            pivots.push(d);
            if d.modulus() == 0.0 || !d.modulus().is_finite() {
                break;
            }
            for i in j + 1..n {
                unit[(i, j)] = work[(i, j)] / d;
            }
            for i in j + 1..n {
                let lid = unit[(i, j)] * d;
                for k in j + 1..=i {
                    let upd = lid * unit[(k, j)].conjugate();
                    work[(i, k)] -= upd;
                }
            }
        }
        Ldl { unit, pivots }
    }

    pub fn is_complete(&self, n: usize) -> bool {
        self.pivots.len() == n && self.pivots.iter().all(|p| p.modulus() != 0.0)
    }

    /// Solves `M x = b` where `M` is the leading `k×k` block of the factored
    /// matrix, using the first `k` rows of the factors.
    pub fn solve_leading(&self, k: usize, b: &DVector<T>) -> DVector<T> {
        let mut x = b.clone();
        for i in 0..k {
            let mut s = x[i];
            for j in 0..i {
                s -= self.unit[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in 0..k {
            x[i] /= self.pivots[i];
        }
        for i in (0..k).rev() {
            let mut s = x[i];
            for j in i + 1..k {
                s -= self.unit[(j, i)].conjugate() * x[j];
            }
            x[i] = s;
        }
        x
    }
}
