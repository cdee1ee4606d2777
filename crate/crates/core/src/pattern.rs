//! Sign patterns labelling the leading/trailing principal-minor cones.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A tuple `(ε₁, …, εₙ)` over `{+1, −1}`.
///
/// Entry `k` (0-based here, `k + 1` in minor order) is the sign required of the
/// `(k+1)`-th leading (or trailing) principal minor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern(Vec<i8>);

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidPattern("empty pattern".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidPattern(format!("entry {bad} is not ±1")));
        }
        Ok(SignPattern(signs))
    }

    /// The all-plus pattern `𝟏ₙ` (positive definite cone).
    pub fn ones(n: usize) -> Self {
        assert!(n >= 1, "sign patterns have length at least 1");
        SignPattern(vec![1; n])
    }

    /// `(−1, 1, −1, …)`: the negative definite cone.
    pub fn negative_definite(n: usize) -> Self {
        assert!(n >= 1, "sign patterns have length at least 1");
        SignPattern((1..=n).map(|k| if k % 2 == 1 { -1 } else { 1 }).collect())
    }

    /// Builds the pattern from the signs of the canonical diagonal, via
    /// `εₖ = εₖ₋₁ · dₖ` with `ε₀ = 1`.
    pub fn from_diagonal_signs<I: IntoIterator<Item = i8>>(diag: I) -> Result<Self> {
        let mut prev = 1i8;
        let signs = diag
            .into_iter()
            .map(|d| {
                prev *= d.signum();
                prev
            })
            .collect();
        SignPattern::new(signs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// Sign at 0-based position `i`.
    pub fn sign(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn is_all_plus(&self) -> bool {
        self.0.iter().all(|&s| s == 1)
    }

    /// Diagonal of `D_ε`: `(ε₁, ε₁ε₂, …, εₙ₋₁εₙ)`.
    pub fn diagonal_signs(&self) -> Vec<i8> {
        let mut prev = 1i8;
        self.0
            .iter()
            .map(|&s| {
                let d = prev * s;
                prev = s;
                d
            })
            .collect()
    }

    /// `(εₙεₙ₋₁, …, εₙε₁, εₙ)`; the identity for `n = 1`.
    ///
    /// `A ↦ A⁻¹` sends `LPMₙ(ε)` onto `TPMₙ(reverse(ε))`.
    pub fn reverse(&self) -> Self {
        let n = self.len();
        let last = self.0[n - 1];
        let mut out: Vec<i8> = (0..n - 1).rev().map(|i| last * self.0[i]).collect();
        out.push(last);
        SignPattern(out)
    }

    /// Coordinatewise (Schur) product `ε ∘ ε′`.
    pub fn schur(&self, other: &SignPattern) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(self.len(), other.len()));
        }
        Ok(SignPattern(
            self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect(),
        ))
    }

    /// Number of sign changes in `1, ε₁, …, εₙ`, i.e. the number of negative
    /// eigenvalues shared by every matrix in `LPMₙ(ε)`.
    pub fn negative_inertia(&self) -> usize {
        self.diagonal_signs().iter().filter(|&&d| d < 0).count()
    }

    /// All `2ⁿ` patterns of length `n`, in lexicographic order with `−` before `+`.
    pub fn all(n: usize) -> impl Iterator<Item = SignPattern> {
        (0..(1u64 << n)).map(move |mask| {
            SignPattern(
                (0..n)
                    .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
                    .collect(),
            )
        })
    }

    /// Patterns whose cones consist of matrices with exactly `k` negative
    /// eigenvalues. There are `C(n, k)` of them.
    pub fn with_inertia(n: usize, k: usize) -> Vec<SignPattern> {
        assert!(k <= n, "inertia {k} exceeds dimension {n}");
        (0..n)
            .combinations(k)
            .map(|neg| {
                let mut diag = vec![1i8; n];
                for i in neg {
                    diag[i] = -1;
                }
                SignPattern::from_diagonal_signs(diag).expect("nonempty")
            })
            .collect()
    }

    pub fn mismatch(&self, other: &SignPattern) -> Error {
        Error::PatternMismatch {
            left: self.to_string(),
            right: other.to_string(),
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignPattern({self})")
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidPattern(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        SignPattern::new(signs)
    }
}

impl Serialize for SignPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignPattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
