//! Random fixtures shared by unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cholesky::canonical_compose;
use crate::cone::{Cone, ConePoint};
use crate::matrix::LowerTriangular;
use crate::pattern::SignPattern;

pub fn random_lower(rng: &mut impl Rng, n: usize) -> LowerTriangular {
    LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| {
        let z: f64 = rng.sample(StandardNormal);
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => z,
            std::cmp::Ordering::Equal => (0.5 * z).exp(),
            std::cmp::Ordering::Less => 0.0,
        }
    }))
    .unwrap()
}

pub fn random_lower_c(rng: &mut impl Rng, n: usize) -> LowerTriangular<Complex64> {
    LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => Complex64::new(re, im),
            std::cmp::Ordering::Equal => Complex64::new((0.5 * re).exp(), 0.0),
            std::cmp::Ordering::Less => Complex64::new(0.0, 0.0),
        }
    }))
    .unwrap()
}

/// Lower-triangular matrix with unconstrained diagonal.
pub fn random_tangent(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i >= j { rng.sample(StandardNormal) } else { 0.0 })
}

pub fn random_point(rng: &mut impl Rng, pattern: &SignPattern, cone: Cone) -> ConePoint {
    canonical_compose(&random_lower(rng, pattern.len()), pattern, cone).unwrap()
}
