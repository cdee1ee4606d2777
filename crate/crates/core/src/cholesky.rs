//! Generalized Cholesky factorization `A = L B L*` over a fixed base point `B`
//! of a leading-minor cone, its reverse (trailing-minor) dual `A = L* C L`, and
//! re-signing between cones sharing a factor.

use nalgebra::{DMatrix, DVector};

use crate::cone::{Cone, ConePoint, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::{Ldl, LowerTriangular, Scalar, SymmetricMatrix};
use crate::pattern::SignPattern;

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(Error::DimensionMismatch(n, m));
    }
    Ok(())
}

fn expect_cone<T: Scalar>(a: &ConePoint<T>, cone: Cone) -> Result<()> {
    if a.cone() != cone {
        return Err(Error::ConeKindMismatch);
    }
    Ok(())
}

/// `L B L*`; leading minors pick up the factor `|det L_[k][k]|²` so the pattern of
/// `B` is kept.
pub fn compose<T: Scalar>(l: &LowerTriangular<T>, b: &ConePoint<T>) -> Result<ConePoint<T>> {
    check_dims(l.dim(), b.dim())?;
    expect_cone(b, Cone::Lpm)?;
    let lm = l.as_matrix();
    let m = lm * b.matrix().as_matrix() * lm.adjoint();
    Ok(ConePoint::trusted(
        SymmetricMatrix::from_lower(m)?,
        Cone::Lpm,
        b.pattern().clone(),
    ))
}

/// `L* C L` for `C` in a trailing-minor cone.
pub fn compose_tpm<T: Scalar>(l: &LowerTriangular<T>, c: &ConePoint<T>) -> Result<ConePoint<T>> {
    check_dims(l.dim(), c.dim())?;
    expect_cone(c, Cone::Tpm)?;
    let lm = l.as_matrix();
    let m = lm.adjoint() * c.matrix().as_matrix() * lm;
    Ok(ConePoint::trusted(
        SymmetricMatrix::from_lower(m)?,
        Cone::Tpm,
        c.pattern().clone(),
    ))
}

/// The unique `L` with positive diagonal such that `L B L* = A`.
pub fn factor<T: Scalar>(a: &ConePoint<T>, b: &ConePoint<T>) -> Result<LowerTriangular<T>> {
    expect_cone(a, Cone::Lpm)?;
    expect_cone(b, Cone::Lpm)?;
    a.check_same_cone(b)?;
    factor_matrices(a.matrix().as_matrix(), b.matrix().as_matrix(), DEFAULT_TOL)
}

/// Row-by-row factorization. For row `j`, with `M'` the leading `j×j` block of
/// `B` and `L_j` the rows already found,
/// `l_jj² = (det A_[j+1] / det A_[j]) / (det B_[j+1] / det B_[j])` and the strict
/// row is `p*` where `M' p = L_j⁻¹ A[..j, j] − l_jj B[..j, j]`.
pub(crate) fn factor_matrices<T: Scalar>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    tol: f64,
) -> Result<LowerTriangular<T>> {
    let n = a.nrows();
    check_dims(n, b.nrows())?;
    let la = Ldl::compute(a);
    let lb = Ldl::compute(b);
    if !la.is_complete(n) {
        return Err(Error::MinorNearZero(la.pivots.len()));
    }
    if !lb.is_complete(n) {
        return Err(Error::MinorNearZero(lb.pivots.len()));
    }
    let mut l = DMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let radicand = (la.pivots[j] / lb.pivots[j]).real();
        if !(radicand > tol * tol) {
            return Err(Error::NegativeRadicand(j + 1));
        }
        let ljj = radicand.sqrt();
        l[(j, j)] = T::from_real(ljj);
        if j == 0 {
            continue;
        }
        // y = L_j⁻¹ A[..j, j] by forward substitution.
        let mut y = DVector::<T>::zeros(j);
        for i in 0..j {
            let mut s = a[(i, j)];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        let w = DVector::from_fn(j, |i, _| y[i] - b[(i, j)].scale(ljj));
        let p = lb.solve_leading(j, &w);
        for k in 0..j {
            l[(j, k)] = p[k].conjugate();
        }
    }
    if l.iter().any(|x| !x.modulus().is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(LowerTriangular::from_raw(l))
}

/// The unique `L` with positive diagonal such that `L* C L = A`, computed by
/// reversing both inputs, factoring in the leading-minor cone and reversing back.
pub fn factor_tpm<T: Scalar>(a: &ConePoint<T>, c: &ConePoint<T>) -> Result<LowerTriangular<T>> {
    expect_cone(a, Cone::Tpm)?;
    expect_cone(c, Cone::Tpm)?;
    a.check_same_cone(c)?;
    Ok(factor(&a.reverse(), &c.reverse())?.reverse())
}

/// Factor of `A` over its cone's canonical diagonal: `A = L D_ε L*` (LPM) or
/// `A = L* P D_ε P L` (TPM).
pub fn canonical_factor<T: Scalar>(a: &ConePoint<T>) -> Result<LowerTriangular<T>> {
    let base = ConePoint::canonical(a.pattern(), a.cone());
    match a.cone() {
        Cone::Lpm => factor(a, &base),
        Cone::Tpm => factor_tpm(a, &base),
    }
}

/// Inverse of [`canonical_factor`].
pub fn canonical_compose<T: Scalar>(
    l: &LowerTriangular<T>,
    pattern: &SignPattern,
    cone: Cone,
) -> Result<ConePoint<T>> {
    check_dims(l.dim(), pattern.len())?;
    let base = ConePoint::canonical(pattern, cone);
    match cone {
        Cone::Lpm => compose(l, &base),
        Cone::Tpm => compose_tpm(l, &base),
    }
}

/// Moves `A = L D_ε L*` to `L D_δ L*` without forming `L`, via the recursion
/// `α_j^(k) = a_jk − Σ_{i<k} α_j^(i) conj(α_k^(i)) e_i / l_ii²`, where
/// `e_i = ε_{i−1}ε_i` and `l_kk² = e_k α_k^(k)`.
///
/// Trailing-minor inputs are handled by reversal.
pub fn resign<T: Scalar>(a: &ConePoint<T>, delta: &SignPattern) -> Result<ConePoint<T>> {
    check_dims(a.dim(), delta.len())?;
    match a.cone() {
        Cone::Lpm => resign_lpm(a, delta, DEFAULT_TOL),
        Cone::Tpm => Ok(resign_lpm(&a.reverse(), delta, DEFAULT_TOL)?.reverse()),
    }
}

fn resign_lpm<T: Scalar>(a: &ConePoint<T>, delta: &SignPattern, tol: f64) -> Result<ConePoint<T>> {
    let n = a.dim();
    let am = a.matrix().as_matrix();
    let e: Vec<f64> = a.pattern().diagonal_signs().iter().map(|&s| s as f64).collect();
    let d: Vec<f64> = delta.diagonal_signs().iter().map(|&s| s as f64).collect();
    // alpha[(j, i)] = α_j^(i), j ≥ i.
    let mut alpha = DMatrix::<T>::zeros(n, n);
    let mut lsq = vec![0.0; n];
    for k in 0..n {
        for j in k..n {
            let mut s = am[(j, k)];
            for i in 0..k {
                s -= (alpha[(j, i)] * alpha[(k, i)].conjugate()).scale(e[i] / lsq[i]);
            }
            alpha[(j, k)] = s;
        }
        lsq[k] = e[k] * alpha[(k, k)].real();
        if !(lsq[k] > tol * tol) {
            return Err(Error::NegativeRadicand(k + 1));
        }
    }
    let mut out = DMatrix::<T>::zeros(n, n);
    for k in 0..n {
        for j in k..n {
            let mut s = T::zero();
            for i in 0..=k {
                s += (alpha[(j, i)] * alpha[(k, i)].conjugate()).scale(d[i] / lsq[i]);
            }
            out[(j, k)] = s;
        }
    }
    Ok(ConePoint::trusted(
        SymmetricMatrix::from_lower(out)?,
        Cone::Lpm,
        delta.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{classify, leading_minors};
    use proptest::prelude::*;
    use crate::testutil::{random_lower, random_lower_c};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn lpm(rows: &[&[f64]]) -> ConePoint {
        classify(&sym(rows), Cone::Lpm, DEFAULT_TOL).unwrap()
    }

    fn lower(rows: &[&[f64]]) -> LowerTriangular {
        let n = rows.len();
        LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    fn p(s: &str) -> SignPattern {
        s.parse().unwrap()
    }

    fn random_point<T: Scalar>(k: &LowerTriangular<T>, e: &SignPattern) -> ConePoint<T> {
        compose(k, &ConePoint::canonical(e, Cone::Lpm)).unwrap()
    }

    #[test]
    fn compose_examples() {
        let e = p("++-");
        let d = ConePoint::<f64>::canonical(&e, Cone::Lpm);
        assert_eq!(compose(&LowerTriangular::identity(3), &d).unwrap(), d);
        let l = lower(&[&[1.0, 0.0], &[2.0, 3f64.sqrt()]]);
        let b = ConePoint::canonical(&p("+-"), Cone::Lpm);
        let a = compose(&l, &b).unwrap();
        assert!(a.matrix().max_abs_diff(&sym(&[&[1.0, 2.0], &[2.0, 1.0]])) < 1e-14);
    }

    #[test]
    fn compose_preserves_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for e in SignPattern::all(4) {
            for _ in 0..100 {
                let a = random_point(&random_lower(&mut rng, 4), &e);
                assert_eq!(classify(a.matrix(), Cone::Lpm, 0.0).unwrap().pattern(), &e);
            }
        }
    }

    #[test]
    fn factor_examples() {
        let a = lpm(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let id = factor(&a, &a).unwrap();
        assert!(id.max_abs_diff(&LowerTriangular::identity(2)) < 1e-14);

        let d = ConePoint::canonical(&p("+-"), Cone::Lpm);
        let l = factor(&a, &d).unwrap();
        assert!(l.max_abs_diff(&lower(&[&[1.0, 0.0], &[2.0, 3f64.sqrt()]])) < 1e-14);
        assert!(compose(&l, &d).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);

        let b = lpm(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let l = factor(&a, &b).unwrap();
        let q = 1.5f64.sqrt();
        assert!(l.max_abs_diff(&lower(&[&[1.0, 0.0], &[2.0 - q, q]])) < 1e-14);
        assert!(compose(&l, &b).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn factor_rejects_mismatches() {
        let a = lpm(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let b = ConePoint::canonical(&p("++"), Cone::Lpm);
        assert!(matches!(factor(&a, &b), Err(Error::PatternMismatch { .. })));
        assert_eq!(factor(&a, &a.reverse()), Err(Error::ConeKindMismatch));
        // A misclassified input surfaces as a bad radicand.
        let fake = ConePoint::trusted(sym(&[&[1.0, 2.0], &[2.0, 1.0]]), Cone::Lpm, p("++"));
        assert_eq!(factor(&fake, &b), Err(Error::NegativeRadicand(2)));
    }

    fn roundtrip_real(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..=6 {
            for e in SignPattern::all(n) {
                for _ in 0..200 / (1 << n).min(200) + 1 {
                    let l = random_lower(&mut rng, n);
                    let b = random_point(&random_lower(&mut rng, n), &e);
                    let a = compose(&l, &b).unwrap();
                    let back = factor(&a, &b).unwrap();
                    let scale = l.as_matrix().amax().max(1.0);
                    assert!(back.max_abs_diff(&l) < 1e-8 * scale, "n={n} e={e}");
                }
            }
        }
    }

    #[test]
    fn roundtrip_real_all_patterns() {
        roundtrip_real(2);
    }

    #[test]
    fn roundtrip_complex_all_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for e in SignPattern::all(n) {
                for _ in 0..10 {
                    let l = random_lower_c(&mut rng, n);
                    let b = random_point(&random_lower_c(&mut rng, n), &e);
                    let a = compose(&l, &b).unwrap();
                    assert_eq!(
                        classify(a.matrix(), Cone::Lpm, 0.0).unwrap().pattern(),
                        &e
                    );
                    let back = factor(&a, &b).unwrap();
                    let scale = l.as_matrix().camax().max(1.0);
                    assert!(back.max_abs_diff(&l) < 1e-8 * scale, "n={n} e={e}");
                }
            }
        }
    }

    #[test]
    fn diagonal_is_minor_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=5 {
            for e in SignPattern::all(n) {
                let a = random_point(&random_lower(&mut rng, n), &e);
                let l = canonical_factor(&a).unwrap();
                let minors = leading_minors(a.matrix());
                for j in 0..n {
                    let prev_sign = if j == 0 { 1.0 } else { e.sign(j - 1) as f64 };
                    let prev_minor = if j == 0 { 1.0 } else { minors[j - 1] };
                    let expected = prev_sign * e.sign(j) as f64 * minors[j] / prev_minor;
                    assert!((l.diag(j).powi(2) - expected).abs() < 1e-9 * expected.max(1.0));
                }
            }
        }
    }

    #[test]
    fn positive_definite_case_is_classical_cholesky() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            let a = random_point(&random_lower(&mut rng, n), &SignPattern::ones(n));
            let l = factor(&a, &ConePoint::canonical(&SignPattern::ones(n), Cone::Lpm)).unwrap();
            let classical = a.matrix().as_matrix().clone().cholesky().unwrap().l();
            assert!((l.as_matrix() - classical).amax() < 1e-10);
        }
    }

    #[test]
    fn tpm_examples() {
        let c = ConePoint::<f64>::canonical(&p("+-"), Cone::Tpm);
        assert_eq!(compose_tpm(&LowerTriangular::identity(2), &c).unwrap(), c);

        let a = lpm(&[&[1.0, 2.0], &[2.0, 1.0]]).reverse();
        let c = ConePoint::canonical(&p("+-"), Cone::Lpm).reverse();
        assert_eq!(c.matrix(), &SymmetricMatrix::from_real_diagonal(&[-1.0, 1.0]));
        let l = factor_tpm(&a, &c).unwrap();
        assert!(l.max_abs_diff(&lower(&[&[3f64.sqrt(), 0.0], &[2.0, 1.0]])) < 1e-14);
        assert!(compose_tpm(&l, &c).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn tpm_roundtrip_and_commuting_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for e in SignPattern::all(4) {
            for _ in 0..100 / 16 + 1 {
                let l = random_lower(&mut rng, 4);
                let b = random_point(&random_lower(&mut rng, 4), &e);
                let c = b.reverse();
                let a = compose_tpm(&l, &c).unwrap();
                assert!(factor_tpm(&a, &c).unwrap().max_abs_diff(&l) < 1e-8);
                let lhs = compose(&l, &b).unwrap().reverse();
                let rhs = compose_tpm(&l.reverse(), &c).unwrap();
                assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-10);
                assert_eq!(classify(a.matrix(), Cone::Tpm, 0.0).unwrap().pattern(), &e);
            }
        }
    }

    #[test]
    fn resign_examples() {
        let a = lpm(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let same = resign(&a, a.pattern()).unwrap();
        assert!(same.matrix().max_abs_diff(a.matrix()) < 1e-14);
        let pd = resign(&a, &p("++")).unwrap();
        assert!(pd.matrix().max_abs_diff(&sym(&[&[1.0, 2.0], &[2.0, 7.0]])) < 1e-12);
        assert_eq!(pd.pattern(), &p("++"));
    }

    #[test]
    fn resign_matches_factor_then_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for e in SignPattern::all(3) {
            for d in SignPattern::all(3) {
                let a = random_point(&random_lower(&mut rng, 3), &e);
                let fast = resign(&a, &d).unwrap();
                let oracle = canonical_compose(&canonical_factor(&a).unwrap(), &d, Cone::Lpm).unwrap();
                assert!(fast.matrix().max_abs_diff(oracle.matrix()) < 1e-10);
                let back = resign(&fast, &e).unwrap();
                assert!(back.matrix().max_abs_diff(a.matrix()) < 1e-10);
                let t = resign(&a.reverse(), &d).unwrap();
                assert!(t.matrix().max_abs_diff(fast.reverse().matrix()) < 1e-10);
                assert_eq!(t.cone(), Cone::Tpm);
            }
        }
    }

    #[test]
    fn resign_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = p("+-+");
        let d = p("--+");
        let a = random_point(&random_lower_c(&mut rng, 3), &e);
        let fast = resign(&a, &d).unwrap();
        let oracle = canonical_compose(&canonical_factor(&a).unwrap(), &d, Cone::Lpm).unwrap();
        assert!(fast.matrix().max_abs_diff(oracle.matrix()) < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn factor_inverts_compose(
            entries in proptest::collection::vec(-2.0f64..2.0, 10),
            diag in proptest::collection::vec(-1.0f64..1.0, 4),
            mask in 0u8..16,
        ) {
            let mut it = entries.into_iter();
            let l = LowerTriangular::new(DMatrix::from_fn(4, 4, |i, j| {
                if i > j { it.next().unwrap() } else if i == j { diag[i].exp() } else { 0.0 }
            })).unwrap();
            let e = SignPattern::new((0..4).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()).unwrap();
            let a = canonical_compose(&l, &e, Cone::Lpm).unwrap();
            let back = canonical_factor(&a).unwrap();
            prop_assert!(back.max_abs_diff(&l) < 1e-9);
        }
    }
}
