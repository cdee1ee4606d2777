//! Signed Cholesky factorization on principal-minor cones.
//!
//! ```
//! use lpmch::cholesky::{canonical_factor, compose};
//! use lpmch::geometry::distance;
//! use lpmch::{classify, Cone, ConePoint, SymmetricMatrix, DEFAULT_TOL};
//! use nalgebra::dmatrix;
//!
//! let a = SymmetricMatrix::new(dmatrix![1.0, 2.0; 2.0, 1.0], 1e-12)?;
//! let a = classify(&a, Cone::Lpm, DEFAULT_TOL)?;
//! assert_eq!(a.pattern().to_string(), "+-");
//!
//! let l = canonical_factor(&a)?;
//! assert!((l.as_matrix()[(1, 1)] - 3f64.sqrt()).abs() < 1e-15);
//!
//! let d = ConePoint::canonical(a.pattern(), Cone::Lpm);
//! let back = compose(&l, &d)?;
//! assert!((back.matrix().as_matrix() - a.matrix().as_matrix()).abs().max() < 1e-14);
//!
//! let b = classify(&SymmetricMatrix::new(dmatrix![4.0, 2.0; 2.0, -1.0], 1e-12)?, Cone::Lpm, DEFAULT_TOL)?;
//! println!("{}", distance(&l, &canonical_factor(&b)?)?);
//! # Ok::<(), lpmch::Error>(())
//! ```

// Negated float comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod biggroup;
pub mod cholesky;
pub mod cli;
pub mod cone;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod matrix;
pub mod pattern;
pub mod random;
pub mod ssrpm;

#[cfg(test)]
pub(crate) mod testutil;

pub use cone::{classify, Cone, ConePoint, DEFAULT_TOL};
pub use error::{Error, Result};
pub use matrix::{LowerTriangular, Scalar, SymmetricMatrix};
pub use pattern::SignPattern;
