//! Log-Cholesky geometry on lower-triangular matrices with positive diagonal,
//! transferred to each cone through its canonical factorization.
//!
//! Writing `⌊L⌋` for the strictly lower part and `𝔻(L)` for the diagonal, the
//! group law is `L ⊙ K = ⌊L⌋ + ⌊K⌋ + 𝔻(L)𝔻(K)` and `η(L) = (log 𝔻(L); ⌊L⌋)` is a
//! linear isometry onto Euclidean space. Everything here is real.

use nalgebra::{DMatrix, DVector};

use crate::cholesky::{canonical_compose, canonical_factor};
use crate::cone::ConePoint;
use crate::error::{Error, Result};
use crate::matrix::{LowerTriangular, SymmetricMatrix};
use crate::pattern::SignPattern;

/// Tangent vector at a point of the Cholesky space: any real lower-triangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector(DMatrix<f64>);

impl TangentVector {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare);
        }
        let n = m.nrows();
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != 0.0 {
                    return Err(Error::NotCholeskyFactor);
                }
            }
        }
        Ok(TangentVector(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `η`-coordinates: `n` log-diagonal entries, then the strict lower part row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaVector(DVector<f64>);

impl EtaVector {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        dim_from_len(v.len())?;
        Ok(EtaVector(v))
    }

    pub fn zeros(n: usize) -> Self {
        EtaVector(DVector::zeros(n * (n + 1) / 2))
    }

    /// Matrix dimension `n` with `n(n+1)/2 = len`.
    pub fn dim(&self) -> usize {
        dim_from_len(self.0.len()).expect("validated on construction")
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

fn dim_from_len(len: usize) -> Result<usize> {
    let n = (((8 * len + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
    if n == 0 || n * (n + 1) / 2 != len {
        return Err(Error::SpecInvalid(format!(
            "length {len} is not a triangular number"
        )));
    }
    Ok(n)
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(Error::DimensionMismatch(n, m));
    }
    Ok(())
}

/// `L ⊙ K = ⌊L⌋ + ⌊K⌋ + 𝔻(L)𝔻(K)`.
pub fn group_op(l: &LowerTriangular, k: &LowerTriangular) -> Result<LowerTriangular> {
    check_dims(l.dim(), k.dim())?;
    let (lm, km) = (l.as_matrix(), k.as_matrix());
    let n = l.dim();
    Ok(LowerTriangular::from_raw(DMatrix::from_fn(n, n, |i, j| {
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => lm[(i, j)] + km[(i, j)],
            std::cmp::Ordering::Equal => lm[(i, i)] * km[(i, i)],
            std::cmp::Ordering::Less => 0.0,
        }
    })))
}

/// `L_⊙⁻¹ = −⌊L⌋ + 𝔻(L)⁻¹`.
pub fn group_inv(l: &LowerTriangular) -> LowerTriangular {
    scalar_mul(-1.0, l)
}

/// `α · L = α⌊L⌋ + 𝔻(L)^α`.
pub fn scalar_mul(alpha: f64, l: &LowerTriangular) -> LowerTriangular {
    let lm = l.as_matrix();
    let n = l.dim();
    LowerTriangular::from_raw(DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => alpha * lm[(i, j)],
        std::cmp::Ordering::Equal => lm[(i, i)].powf(alpha),
        std::cmp::Ordering::Less => 0.0,
    }))
}

pub fn eta(l: &LowerTriangular) -> EtaVector {
    let n = l.dim();
    let lm = l.as_matrix();
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    v.extend((0..n).map(|j| lm[(j, j)].ln()));
    for i in 1..n {
        v.extend((0..i).map(|j| lm[(i, j)]));
    }
    EtaVector(DVector::from_vec(v))
}

pub fn eta_inv(v: &EtaVector) -> LowerTriangular {
    let n = v.dim();
    let x = &v.0;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = x[j].exp();
    }
    let mut idx = n;
    for i in 1..n {
        for j in 0..i {
            m[(i, j)] = x[idx];
            idx += 1;
        }
    }
    LowerTriangular::from_raw(m)
}

/// `d(L, K) = ‖η(L) − η(K)‖₂`.
pub fn distance(l: &LowerTriangular, k: &LowerTriangular) -> Result<f64> {
    check_dims(l.dim(), k.dim())?;
    Ok((eta(l).0 - eta(k).0).norm())
}

/// `g_L(X, Y) = Σ_{i>j} x_ij y_ij + Σ_j x_jj y_jj / l_jj²`.
pub fn metric_tensor(l: &LowerTriangular, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    check_dims(l.dim(), x.dim())?;
    check_dims(l.dim(), y.dim())?;
    let n = l.dim();
    let (xm, ym) = (x.as_matrix(), y.as_matrix());
    let mut g = 0.0;
    for i in 0..n {
        for j in 0..i {
            g += xm[(i, j)] * ym[(i, j)];
        }
        g += xm[(i, i)] * ym[(i, i)] / l.diag(i).powi(2);
    }
    Ok(g)
}

/// `γ(t) = ⌊L⌋ + t⌊X⌋ + 𝔻(L) exp(t 𝔻(X) 𝔻(L)⁻¹)`.
pub fn geodesic(l: &LowerTriangular, x: &TangentVector, t: f64) -> Result<LowerTriangular> {
    check_dims(l.dim(), x.dim())?;
    let n = l.dim();
    let (lm, xm) = (l.as_matrix(), x.as_matrix());
    Ok(LowerTriangular::from_raw(DMatrix::from_fn(n, n, |i, j| {
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => lm[(i, j)] + t * xm[(i, j)],
            std::cmp::Ordering::Equal => lm[(i, i)] * (t * xm[(i, i)] / lm[(i, i)]).exp(),
            std::cmp::Ordering::Less => 0.0,
        }
    })))
}

/// Initial velocity of the unit-time geodesic from `L` to `K`:
/// `⌊K⌋ − ⌊L⌋ + (log 𝔻(K) − log 𝔻(L)) 𝔻(L)`.
pub fn log_direction(l: &LowerTriangular, k: &LowerTriangular) -> Result<TangentVector> {
    check_dims(l.dim(), k.dim())?;
    let n = l.dim();
    let (lm, km) = (l.as_matrix(), k.as_matrix());
    Ok(TangentVector(DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => km[(i, j)] - lm[(i, j)],
        std::cmp::Ordering::Equal => (km[(i, i)].ln() - lm[(i, i)].ln()) * lm[(i, i)],
        std::cmp::Ordering::Less => 0.0,
    })))
}

pub fn geodesic_between(l: &LowerTriangular, k: &LowerTriangular, t: f64) -> Result<LowerTriangular> {
    geodesic(l, &log_direction(l, k)?, t)
}

fn half(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => a[(i, j)],
        std::cmp::Ordering::Equal => 0.5 * a[(i, i)],
        std::cmp::Ordering::Less => 0.0,
    })
}

fn diag_signs(pattern: &SignPattern) -> DMatrix<f64> {
    let d: Vec<f64> = pattern.diagonal_signs().iter().map(|&s| s as f64).collect();
    DMatrix::from_diagonal(&DVector::from_vec(d))
}

/// Differential of `L ↦ L D_ε Lᵀ`: `X ↦ L D_ε Xᵀ + X D_ε Lᵀ`.
pub fn differential(
    l: &LowerTriangular,
    x: &TangentVector,
    pattern: &SignPattern,
) -> Result<SymmetricMatrix> {
    check_dims(l.dim(), x.dim())?;
    check_dims(l.dim(), pattern.len())?;
    let d = diag_signs(pattern);
    let ldx = l.as_matrix() * &d * x.as_matrix().transpose();
    let sum = &ldx + ldx.transpose();
    SymmetricMatrix::from_lower(sum)
}

/// Inverse of [`differential`]: `W ↦ L · half(L⁻¹ W L⁻ᵀ) · D_ε`.
pub fn differential_inv(
    l: &LowerTriangular,
    w: &SymmetricMatrix,
    pattern: &SignPattern,
) -> Result<TangentVector> {
    check_dims(l.dim(), w.dim())?;
    check_dims(l.dim(), pattern.len())?;
    let linv = l.inverse();
    let s = linv.as_matrix() * w.as_matrix() * linv.as_matrix().transpose();
    let x = l.as_matrix() * half(&s) * diag_signs(pattern);
    // Products of lower-triangular matrices: clear rounding above the diagonal.
    Ok(TangentVector(x.lower_triangle()))
}

/// Distance in a cone, pulled back from the canonical factors.
pub fn lpm_distance(a: &ConePoint, b: &ConePoint) -> Result<f64> {
    a.check_same_cone(b)?;
    distance(&canonical_factor(a)?, &canonical_factor(b)?)
}

pub fn lpm_geodesic(a: &ConePoint, b: &ConePoint, t: f64) -> Result<ConePoint> {
    a.check_same_cone(b)?;
    let l = geodesic_between(&canonical_factor(a)?, &canonical_factor(b)?, t)?;
    canonical_compose(&l, a.pattern(), a.cone())
}

/// `A ⊛ B`; the canonical diagonal of the cone is the identity.
pub fn star_op(a: &ConePoint, b: &ConePoint) -> Result<ConePoint> {
    a.check_same_cone(b)?;
    let l = group_op(&canonical_factor(a)?, &canonical_factor(b)?)?;
    canonical_compose(&l, a.pattern(), a.cone())
}

pub fn star_inv(a: &ConePoint) -> Result<ConePoint> {
    canonical_compose(&group_inv(&canonical_factor(a)?), a.pattern(), a.cone())
}

/// `α · A` in the cone's vector-space structure.
pub fn star_scalar(alpha: f64, a: &ConePoint) -> Result<ConePoint> {
    canonical_compose(&scalar_mul(alpha, &canonical_factor(a)?), a.pattern(), a.cone())
}

/// Barycentre of cone points: the average of their `η`-coordinates.
pub fn log_cholesky_mean(points: &[ConePoint]) -> Result<ConePoint> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let mut acc = DVector::zeros(first.dim() * (first.dim() + 1) / 2);
    for p in points {
        first.check_same_cone(p)?;
        acc += eta(&canonical_factor(p)?).0;
    }
    acc /= points.len() as f64;
    canonical_compose(&eta_inv(&EtaVector(acc)), first.pattern(), first.cone())
}

/// The four commuting involutions generated by `⊙`-inversion and reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Klein {
    Id,
    Inv,
    Rev,
    RevInv,
}

impl Klein {
    pub const ALL: [Klein; 4] = [Klein::Id, Klein::Inv, Klein::Rev, Klein::RevInv];

    pub fn compose(self, other: Klein) -> Klein {
        let bits = |k: Klein| match k {
            Klein::Id => 0u8,
            Klein::Inv => 1,
            Klein::Rev => 2,
            Klein::RevInv => 3,
        };
        match bits(self) ^ bits(other) {
            0 => Klein::Id,
            1 => Klein::Inv,
            2 => Klein::Rev,
            _ => Klein::RevInv,
        }
    }
}

pub fn klein_apply(sigma: Klein, l: &LowerTriangular) -> LowerTriangular {
    match sigma {
        Klein::Id => l.clone(),
        Klein::Inv => group_inv(l),
        Klein::Rev => l.reverse(),
        Klein::RevInv => group_inv(l).reverse(),
    }
}
