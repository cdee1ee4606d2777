#![allow(dead_code)]

use lpmch::cholesky::canonical_compose;
use lpmch::{Cone, ConePoint, LowerTriangular, SignPattern};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_lower(rng: &mut impl Rng, n: usize) -> LowerTriangular {
    LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| {
        let z: f64 = rng.sample(StandardNormal);
        if i > j {
            z
        } else if i == j {
            (0.5 * z).exp()
        } else {
            0.0
        }
    }))
    .unwrap()
}

pub fn random_lower_c(rng: &mut impl Rng, n: usize) -> LowerTriangular<Complex64> {
    LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        if i > j {
            Complex64::new(re, im)
        } else if i == j {
            Complex64::new((0.5 * re).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
    .unwrap()
}

pub fn random_point(rng: &mut impl Rng, pattern: &SignPattern, cone: Cone) -> ConePoint {
    canonical_compose(&random_lower(rng, pattern.len()), pattern, cone).unwrap()
}

pub fn random_pattern(rng: &mut impl Rng, n: usize) -> SignPattern {
    SignPattern::new((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()).unwrap()
}

/// `log |det|` of the central-difference Jacobian of `L ↦ L D_ε Lᵀ` in
/// lexicographic lower-triangular coordinates.
pub fn fd_jacobian_logdet(l: &LowerTriangular, pattern: &SignPattern, h: f64) -> f64 {
    let n = l.dim();
    let coords: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        pattern.diagonal_signs().iter().map(|&s| s as f64),
    ));
    let phi = |m: &DMatrix<f64>| m * &d * m.transpose();
    let mut jac = DMatrix::zeros(coords.len(), coords.len());
    for (c, &(i, j)) in coords.iter().enumerate() {
        let mut plus = l.as_matrix().clone();
        let mut minus = l.as_matrix().clone();
        plus[(i, j)] += h;
        minus[(i, j)] -= h;
        let diff = (phi(&plus) - phi(&minus)) / (2.0 * h);
        for (r, &(a, b)) in coords.iter().enumerate() {
            jac[(r, c)] = diff[(a, b)];
        }
    }
    jac.determinant().abs().ln()
}

/// Diagonal uniform on `[0.5, 2]`, strict lower part uniform on `[−1, 1]`
/// (real and imaginary parts separately for complex entries).
pub fn bounded_lower(rng: &mut impl Rng, n: usize) -> LowerTriangular {
    LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| {
        if i > j {
            rng.random_range(-1.0..1.0)
        } else if i == j {
            rng.random_range(0.5..2.0)
        } else {
            0.0
        }
    }))
    .unwrap()
}

pub fn bounded_lower_c(rng: &mut impl Rng, n: usize) -> LowerTriangular<Complex64> {
    LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| {
        if i > j {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else if i == j {
            Complex64::new(rng.random_range(0.5..2.0), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
    .unwrap()
}
