//! Sign-regular principal minors: matrices all of whose `k×k` principal minors
//! (not only the leading ones) are nonzero with a common sign `ε_k`.

use crate::error::{Error, Result};
use crate::exec::{par_map, Execution};
use crate::matrix::SymmetricMatrix;
use crate::pattern::SignPattern;

/// Largest dimension [`is_ssrpm`] accepts by default; the work grows like `2ⁿ n²`.
pub const DEFAULT_CAP: usize = 14;

/// Sign pattern of the principal minors of `a`, or `None` if two minors of the
/// same size disagree in sign or one of them is numerically zero
/// (`|minor| ≤ tol · max(1, ‖A‖_max)^k`).
pub fn is_ssrpm(a: &SymmetricMatrix, tol: f64) -> Result<Option<SignPattern>> {
    is_ssrpm_with(a, tol, DEFAULT_CAP, Execution::default())
}

/// [`is_ssrpm`] with an explicit dimension cap and execution mode.
///
/// Subsets are enumerated depth-first in increasing index order, each extending
/// its parent's `LDLᵀ` factorization by one bordered row; the search is split by
/// smallest index across workers.
pub fn is_ssrpm_with(a: &SymmetricMatrix, tol: f64, cap: usize, exec: Execution) -> Result<Option<SignPattern>> {
    let n = a.dim();
    if n > cap {
        return Err(Error::DimensionCap { n, cap });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let m = a.as_matrix();
    let scale = a.scale().max(1.0);
    let bounds: Vec<f64> = (1..=n).map(|k| tol * scale.powi(k as i32)).collect();
    let shards = par_map(exec, (0..n).collect(), |root| {
        let mut search = Search {
            a: m,
            bounds: &bounds,
            signs: vec![0; n],
            idx: Vec::with_capacity(n),
            rows: Vec::with_capacity(n),
            pivots: Vec::with_capacity(n),
        };
        search.extend(root, 1.0).then_some(search.signs)
    });
    let mut signs = vec![0i8; n];
    for shard in shards {
        let Some(shard) = shard else { return Ok(None) };
        for (s, t) in signs.iter_mut().zip(shard) {
            if t == 0 {
                continue;
            }
            if *s != 0 && *s != t {
                return Ok(None);
            }
            *s = t;
        }
    }
    Ok(Some(SignPattern::new(signs)?))
}

struct Search<'a> {
    a: &'a nalgebra::DMatrix<f64>,
    bounds: &'a [f64],
    /// Sign seen so far for each minor size, 0 when none yet.
    signs: Vec<i8>,
    idx: Vec<usize>,
    /// Row `i` holds the strict-lower part of row `i` of the unit factor.
    rows: Vec<Vec<f64>>,
    pivots: Vec<f64>,
}

impl Search<'_> {
    /// Adds index `j` to the current subset and recurses; `false` on a violation.
    fn extend(&mut self, j: usize, det: f64) -> bool {
        let k = self.idx.len();
        // Forward-solve the new row against the unit factor, then scale by pivots.
        let mut y = Vec::with_capacity(k);
        for i in 0..k {
            let s: f64 = (0..i).map(|t| self.rows[i][t] * y[t]).sum();
            y.push(self.a[(self.idx[i], j)] - s);
        }
        let row: Vec<f64> = y.iter().zip(&self.pivots).map(|(yi, d)| yi / d).collect();
        let pivot = self.a[(j, j)] - y.iter().zip(&row).map(|(yi, li)| yi * li).sum::<f64>();
        let det = det * pivot;
        if !(det.abs() > self.bounds[k]) {
            return false;
        }
        let sign = if det > 0.0 { 1 } else { -1 };
        if self.signs[k] == 0 {
            self.signs[k] = sign;
        } else if self.signs[k] != sign {
            return false;
        }
        self.idx.push(j);
        self.rows.push(row);
        self.pivots.push(pivot);
        let ok = (j + 1..self.a.nrows()).all(|next| self.extend(next, det));
        self.idx.pop();
        self.rows.pop();
        self.pivots.pop();
        ok
    }
}

/// `k×k` principal minor of `M(a, b, n)`: `(a + (k−1)b)(a − b)^{k−1}`.
pub fn toeplitz_minor(a: f64, b: f64, k: usize) -> f64 {
    (a + (k as f64 - 1.0) * b) * (a - b).powi(k as i32 - 1)
}

/// The matrix with `a` on the diagonal and `b` elsewhere, with the sign pattern
/// predicted by [`toeplitz_minor`].
pub fn toeplitz_example(a: f64, b: f64, n: usize) -> Result<(SymmetricMatrix, SignPattern)> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if a == b && n > 1 {
        return Err(Error::DegenerateParameters(format!("a = b = {a} makes every minor of size ≥ 2 vanish")));
    }
    let mut signs = Vec::with_capacity(n);
    for k in 1..=n {
        let minor = toeplitz_minor(a, b, k);
        if minor == 0.0 {
            return Err(Error::DegenerateParameters(format!("a + {}·b = 0", k - 1)));
        }
        signs.push(if minor > 0.0 { 1 } else { -1 });
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| if i == j { a } else { b });
    Ok((SymmetricMatrix::from_lower(m)?, SignPattern::new(signs)?))
}

/// Principal minor of size `k` of `M(a, b, c, k)`, i.e. one that contains the
/// last index: `(a − b)^{k−2} [ca − b² + (k−2) b (c − b)]`.
pub fn almost_n_minor(a: f64, b: f64, c: f64, k: usize) -> f64 {
    assert!(k >= 2, "the closed form needs k ≥ 2");
    (a - b).powi(k as i32 - 2) * (c * a - b * b + (k as f64 - 2.0) * b * (c - b))
}

/// `M(a, b, n)` with its last diagonal entry replaced by `c`: an almost
/// N-matrix, whose proper principal minors are all negative while the
/// determinant is positive.
///
/// Requires `n ≥ 3`, `0 > a > b` and
/// `(n−2)b²/(a+(n−3)b) < c < (n−1)b²/(a+(n−2)b)`.
pub fn almost_n_example(a: f64, b: f64, c: f64, n: usize) -> Result<SymmetricMatrix> {
    let violated = |what: String| Err(Error::ConstraintViolation(what));
    if n < 3 {
        return violated(format!("n ≥ 3 (got n = {n})"));
    }
    if !(a < 0.0) {
        return violated(format!("0 > a (got a = {a})"));
    }
    if !(b < a) {
        return violated(format!("a > b (got a = {a}, b = {b})"));
    }
    let nf = n as f64;
    let lo = (nf - 2.0) * b * b / (a + (nf - 3.0) * b);
    let hi = (nf - 1.0) * b * b / (a + (nf - 2.0) * b);
    if !(lo < c) {
        return violated(format!("(n−2)b²/(a+(n−3)b) = {lo} < c (got c = {c})"));
    }
    if !(c < hi) {
        return violated(format!("c < (n−1)b²/(a+(n−2)b) = {hi} (got c = {c})"));
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| match (i == j, i == n - 1) {
        (true, true) => c,
        (true, false) => a,
        _ => b,
    });
    SymmetricMatrix::from_lower(m)
}
