//! Distribution specifications, prepared samplers and log-densities.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::wishart::{
    bartlett_sample, factor_logdet, inverse_wishart_log_pdf, jacobian_logdet, wishart_log_pdf,
};
use crate::cholesky::{canonical_compose, canonical_factor, factor_tpm};
use crate::cone::{classify, Cone, ConePoint, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::geometry::{eta, eta_inv, EtaVector};
use crate::matrix::{LowerTriangular, SymmetricMatrix};
use crate::pattern::SignPattern;

/// Parameters of a law on one cone (or, for clones, on a union of cones).
///
/// Wishart-type laws are transferred from `Wₙ(Σ, N)` on the positive definite
/// cone through the signed Bartlett decomposition. For `InverseWishart` the
/// parameters are those of the Wishart law being inverted, so draws land in the
/// opposite cone kind with the reversed pattern.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Wishart {
        sigma: SymmetricMatrix,
        dof: usize,
        pattern: SignPattern,
        #[serde(default)]
        cone: Cone,
    },
    InverseWishart {
        sigma: SymmetricMatrix,
        dof: usize,
        pattern: SignPattern,
        #[serde(default)]
        cone: Cone,
    },
    /// `η` of the canonical factor is `N(η(factor(center)), cov)`.
    CholeskyNormal {
        center: SymmetricMatrix,
        cov: SymmetricMatrix,
        pattern: SignPattern,
        #[serde(default)]
        cone: Cone,
    },
    /// Draws from a positive definite `base` and moves the factor into a cone
    /// chosen uniformly among those with `inertia` negative eigenvalues (or among
    /// all `2ⁿ` cones when `inertia` is absent).
    InertialClone {
        base: Box<DistributionSpec>,
        #[serde(default)]
        inertia: Option<usize>,
    },
    /// Always returns `point`.
    PointMass {
        point: SymmetricMatrix,
        pattern: SignPattern,
        #[serde(default)]
        cone: Cone,
    },
}

/// Reference measure for Cholesky-normal densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Measure {
    /// Lebesgue measure on `η`-coordinates.
    #[default]
    Eta,
    /// Lebesgue measure on the independent entries of the symmetric matrix.
    Symmetric,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::SpecInvalid(msg.into())
}

impl DistributionSpec {
    pub fn wishart(sigma: SymmetricMatrix, dof: usize, pattern: SignPattern, cone: Cone) -> Self {
        DistributionSpec::Wishart {
            sigma,
            dof,
            pattern,
            cone,
        }
    }

    pub fn cholesky_normal(
        center: SymmetricMatrix,
        cov: SymmetricMatrix,
        pattern: SignPattern,
        cone: Cone,
    ) -> Self {
        DistributionSpec::CholeskyNormal {
            center,
            cov,
            pattern,
            cone,
        }
    }

    pub fn point_mass(point: &ConePoint) -> Self {
        DistributionSpec::PointMass {
            point: point.matrix().clone(),
            pattern: point.pattern().clone(),
            cone: point.cone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::Wishart { sigma, .. } | DistributionSpec::InverseWishart { sigma, .. } => {
                sigma.dim()
            }
            DistributionSpec::CholeskyNormal { center, .. } => center.dim(),
            DistributionSpec::InertialClone { base, .. } => base.dim(),
            DistributionSpec::PointMass { point, .. } => point.dim(),
        }
    }

    /// Cone kind of every draw.
    pub fn cone(&self) -> Cone {
        match self {
            DistributionSpec::Wishart { cone, .. }
            | DistributionSpec::CholeskyNormal { cone, .. }
            | DistributionSpec::PointMass { cone, .. } => *cone,
            DistributionSpec::InverseWishart { cone, .. } => cone.flipped(),
            DistributionSpec::InertialClone { base, .. } => base.cone(),
        }
    }

    /// Sign pattern of every draw, or `None` when it is random.
    pub fn pattern(&self) -> Option<SignPattern> {
        match self {
            DistributionSpec::Wishart { pattern, .. }
            | DistributionSpec::CholeskyNormal { pattern, .. }
            | DistributionSpec::PointMass { pattern, .. } => Some(pattern.clone()),
            DistributionSpec::InverseWishart { pattern, .. } => Some(pattern.reverse()),
            DistributionSpec::InertialClone { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Sampler::new(self).map(|_| ())
    }
}

fn check_pattern_len(pattern: &SignPattern, n: usize) -> Result<()> {
    if pattern.len() != n {
        return Err(invalid(format!(
            "pattern {pattern} has length {} but the matrices are {n}×{n}",
            pattern.len()
        )));
    }
    Ok(())
}

fn pd_cholesky(m: &SymmetricMatrix, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(m.as_matrix().clone()).ok_or_else(|| invalid(format!("{what} is not positive definite")))
}

/// The Wishart pieces shared by sampling and density evaluation.
#[derive(Clone, Debug)]
struct WishartParams {
    /// `L∘` with `Σ = L∘L∘ᵀ` (LPM) or `R` with `Σ = RᵀR` (TPM).
    root: LowerTriangular,
    sigma_inv: DMatrix<f64>,
    sigma_logdet: f64,
    dof: usize,
    pattern: SignPattern,
    cone: Cone,
}

impl WishartParams {
    fn new(sigma: &SymmetricMatrix, dof: usize, pattern: &SignPattern, cone: Cone) -> Result<Self> {
        let n = sigma.dim();
        check_pattern_len(pattern, n)?;
        if dof < n {
            return Err(invalid(format!("degrees of freedom {dof} below dimension {n}")));
        }
        let chol = pd_cholesky(sigma, "sigma")?;
        let lower = LowerTriangular::new(chol.l()).map_err(|_| invalid("sigma is not positive definite"))?;
        let root = match cone {
            Cone::Lpm => lower.clone(),
            Cone::Tpm => {
                let pd = ConePoint::canonical(&SignPattern::ones(n), Cone::Tpm);
                let s = classify(sigma.as_matrix_ref(), Cone::Tpm, 0.0)
                    .map_err(|_| invalid("sigma is not positive definite"))?;
                factor_tpm(&s, &pd)?
            }
        };
        Ok(WishartParams {
            root,
            sigma_inv: chol.inverse(),
            sigma_logdet: factor_logdet(&lower),
            dof,
            pattern: pattern.clone(),
            cone,
        })
    }

    /// Canonical factor of `L∘K₁D_εK₁ᵀL∘ᵀ` (LPM) or `Rᵀ K₁′ᵀ D_ε⃖ K₁′ R` with
    /// `K₁′ = rev(K₁)` (TPM).
    fn draw_factor(&self, rng: &mut impl Rng) -> LowerTriangular {
        let k1 = bartlett_sample(rng, self.root.dim(), self.dof);
        let m = match self.cone {
            Cone::Lpm => self.root.as_matrix() * k1.as_matrix(),
            Cone::Tpm => k1.reverse().as_matrix() * self.root.as_matrix(),
        };
        LowerTriangular::new(m.lower_triangle()).expect("product of Cholesky factors")
    }

    fn log_pdf_factor(&self, l: &LowerTriangular) -> f64 {
        let x = pd_image(l, self.cone);
        wishart_log_pdf(&x, factor_logdet(l), &self.sigma_inv, self.sigma_logdet, self.dof)
    }
}

impl SymmetricMatrix {
    fn as_matrix_ref(&self) -> &SymmetricMatrix {
        self
    }
}

/// The positive definite matrix sharing the canonical factor: `LLᵀ` or `LᵀL`.
pub fn pd_image(l: &LowerTriangular, cone: Cone) -> DMatrix<f64> {
    let m = l.as_matrix();
    match cone {
        Cone::Lpm => m * m.transpose(),
        Cone::Tpm => m.transpose() * m,
    }
}

#[derive(Clone, Debug)]
enum Prepared {
    Wishart(WishartParams),
    InverseWishart(WishartParams),
    CholeskyNormal {
        mean: DVector<f64>,
        cov_root: DMatrix<f64>,
        cov_logdet: f64,
        pattern: SignPattern,
        cone: Cone,
    },
    Clone {
        base: Box<Prepared>,
        patterns: Vec<SignPattern>,
        cone: Cone,
    },
    PointMass {
        factor: LowerTriangular,
        pattern: SignPattern,
        cone: Cone,
    },
}

/// A single draw, kept in factored form: the point is
/// `canonical_compose(factor, pattern, cone)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub factor: LowerTriangular,
    pub pattern: SignPattern,
    pub cone: Cone,
}

impl Draw {
    pub fn point(&self) -> ConePoint {
        canonical_compose(&self.factor, &self.pattern, self.cone).expect("dimensions agree")
    }
}

/// A validated spec with its matrix roots precomputed.
#[derive(Clone, Debug)]
pub struct Sampler {
    spec: DistributionSpec,
    prepared: Prepared,
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        Ok(Sampler {
            spec: spec.clone(),
            prepared: prepare(spec)?,
        })
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn draw(&self, rng: &mut impl Rng) -> Draw {
        draw(&self.prepared, rng)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> ConePoint {
        self.draw(rng).point()
    }

    /// Log-density of `point`; `−∞` off the support of clone mixtures.
    pub fn log_density(&self, point: &ConePoint, measure: Measure) -> Result<f64> {
        log_density(&self.prepared, point, measure)
    }
}

fn prepare(spec: &DistributionSpec) -> Result<Prepared> {
    Ok(match spec {
        DistributionSpec::Wishart {
            sigma,
            dof,
            pattern,
            cone,
        } => Prepared::Wishart(WishartParams::new(sigma, *dof, pattern, *cone)?),
        DistributionSpec::InverseWishart {
            sigma,
            dof,
            pattern,
            cone,
        } => Prepared::InverseWishart(WishartParams::new(sigma, *dof, pattern, *cone)?),
        DistributionSpec::CholeskyNormal {
            center,
            cov,
            pattern,
            cone,
        } => {
            let n = center.dim();
            check_pattern_len(pattern, n)?;
            let m = n * (n + 1) / 2;
            if cov.dim() != m {
                return Err(invalid(format!("cov must be {m}×{m} for {n}×{n} matrices")));
            }
            let point = classify(center, *cone, DEFAULT_TOL)
                .map_err(|e| invalid(format!("center is not in the {cone} cone: {e}")))?;
            if point.pattern() != pattern {
                return Err(invalid(format!(
                    "center has pattern {} but the spec asks for {pattern}",
                    point.pattern()
                )));
            }
            let chol = pd_cholesky(cov, "cov")?;
            let cov_root = chol.l();
            let cov_logdet = cov_root.diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            Prepared::CholeskyNormal {
                mean: eta(&canonical_factor(&point)?).into_vector(),
                cov_root,
                cov_logdet,
                pattern: pattern.clone(),
                cone: *cone,
            }
        }
        DistributionSpec::InertialClone { base, inertia } => {
            let n = base.dim();
            if base.pattern().as_ref().is_none_or(|p| !p.is_all_plus()) {
                return Err(invalid("clone base must be supported on positive definite matrices"));
            }
            let patterns = match inertia {
                Some(k) if *k > n => {
                    return Err(invalid(format!("inertia {k} exceeds dimension {n}")));
                }
                Some(k) => SignPattern::with_inertia(n, *k),
                None => SignPattern::all(n).collect(),
            };
            Prepared::Clone {
                base: Box::new(prepare(base)?),
                patterns,
                cone: base.cone(),
            }
        }
        DistributionSpec::PointMass {
            point,
            pattern,
            cone,
        } => {
            check_pattern_len(pattern, point.dim())?;
            let p = classify(point, *cone, DEFAULT_TOL)
                .map_err(|e| invalid(format!("point is not in the {cone} cone: {e}")))?;
            if p.pattern() != pattern {
                return Err(invalid(format!(
                    "point has pattern {} but the spec asks for {pattern}",
                    p.pattern()
                )));
            }
            Prepared::PointMass {
                factor: canonical_factor(&p)?,
                pattern: pattern.clone(),
                cone: *cone,
            }
        }
    })
}

fn draw(prepared: &Prepared, rng: &mut impl Rng) -> Draw {
    match prepared {
        Prepared::Wishart(w) => Draw {
            factor: w.draw_factor(rng),
            pattern: w.pattern.clone(),
            cone: w.cone,
        },
        // M = L D_ε Lᵀ has M⁻¹ = L⁻ᵀ D_ε L⁻¹, whose trailing-cone factor is L⁻¹;
        // the TPM case is symmetric.
        Prepared::InverseWishart(w) => Draw {
            factor: w.draw_factor(rng).inverse(),
            pattern: w.pattern.reverse(),
            cone: w.cone.flipped(),
        },
        Prepared::CholeskyNormal {
            mean,
            cov_root,
            pattern,
            cone,
            ..
        } => {
            let z = DVector::from_fn(mean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let v = mean + cov_root * z;
            Draw {
                factor: eta_inv(&EtaVector::new(v).expect("triangular length")),
                pattern: pattern.clone(),
                cone: *cone,
            }
        }
        Prepared::Clone {
            base,
            patterns,
            cone,
        } => {
            let pattern = patterns[rng.random_range(0..patterns.len())].clone();
            Draw {
                factor: draw(base, rng).factor,
                pattern,
                cone: *cone,
            }
        }
        Prepared::PointMass {
            factor,
            pattern,
            cone,
        } => Draw {
            factor: factor.clone(),
            pattern: pattern.clone(),
            cone: *cone,
        },
    }
}

fn expect_support(point: &ConePoint, pattern: &SignPattern, cone: Cone) -> Result<()> {
    if point.cone() != cone {
        return Err(Error::ConeKindMismatch);
    }
    if point.pattern() != pattern {
        return Err(point.pattern().mismatch(pattern));
    }
    Ok(())
}

fn log_density(prepared: &Prepared, point: &ConePoint, measure: Measure) -> Result<f64> {
    match prepared {
        Prepared::Wishart(w) => {
            expect_support(point, &w.pattern, w.cone)?;
            Ok(w.log_pdf_factor(&canonical_factor(point)?))
        }
        Prepared::InverseWishart(w) => {
            expect_support(point, &w.pattern.reverse(), w.cone.flipped())?;
            let k = canonical_factor(point)?;
            // X₁ = pd_image(K) in the flipped cone; its inverse is pd_image(K⁻¹) in w.cone.
            let x_inv = pd_image(&k.inverse(), w.cone);
            Ok(inverse_wishart_log_pdf(
                &x_inv,
                factor_logdet(&k),
                &w.sigma_inv,
                w.sigma_logdet,
                w.dof,
            ))
        }
        Prepared::CholeskyNormal {
            mean,
            cov_root,
            cov_logdet,
            pattern,
            cone,
        } => {
            expect_support(point, pattern, *cone)?;
            let l = canonical_factor(point)?;
            let diff = eta(&l).into_vector() - mean;
            let white = cov_root
                .solve_lower_triangular(&diff)
                .ok_or(Error::SingularMatrix)?;
            let m = mean.len() as f64;
            let lp = -0.5 * (m * (2.0 * std::f64::consts::PI).ln() + cov_logdet + white.norm_squared());
            Ok(match measure {
                Measure::Eta => lp,
                Measure::Symmetric => {
                    lp - jacobian_logdet(&l) - (0..l.dim()).map(|j| l.diag(j).ln()).sum::<f64>()
                }
            })
        }
        Prepared::Clone {
            base,
            patterns,
            cone,
        } => {
            if point.cone() != *cone {
                return Err(Error::ConeKindMismatch);
            }
            if !patterns.contains(point.pattern()) {
                return Ok(f64::NEG_INFINITY);
            }
            let l = canonical_factor(point)?;
            let n = l.dim();
            let pd = canonical_compose(&l, &SignPattern::ones(n), *cone)?;
            Ok(log_density(base, &pd, measure)? - (patterns.len() as f64).ln())
        }
        Prepared::PointMass { .. } => Err(invalid("a point mass has no density")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cholesky::resign;
    use crate::cone::{eigen_inertia, invert_cone_point};
    use crate::random::rng::RngStream;
    use crate::random::stats::{ks_one_sample, ks_two_sample, mean_and_se};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn p(s: &str) -> SignPattern {
        s.parse().unwrap()
    }

    fn sigma2() -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap()
    }

    #[test]
    fn validation() {
        let s = sigma2();
        assert!(DistributionSpec::wishart(s.clone(), 1, p("++"), Cone::Lpm).validate().is_err());
        assert!(DistributionSpec::wishart(s.clone(), 3, p("+"), Cone::Lpm).validate().is_err());
        let indefinite = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(DistributionSpec::wishart(indefinite, 3, p("++"), Cone::Lpm).validate().is_err());
        let cn = DistributionSpec::cholesky_normal(s.clone(), SymmetricMatrix::identity(2), p("++"), Cone::Lpm);
        assert!(matches!(cn.validate(), Err(Error::SpecInvalid(_))));
        let clone = DistributionSpec::InertialClone {
            base: Box::new(DistributionSpec::wishart(s.clone(), 3, p("+-"), Cone::Lpm)),
            inertia: Some(1),
        };
        assert!(clone.validate().is_err());
        assert!(DistributionSpec::wishart(s, 2, p("+-"), Cone::Tpm).validate().is_ok());
    }

    #[test]
    fn serde_roundtrip() {
        let spec = DistributionSpec::InertialClone {
            base: Box::new(DistributionSpec::wishart(sigma2(), 4, p("++"), Cone::Lpm)),
            inertia: Some(1),
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"inertial_clone\""));
        let back: DistributionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let parsed: DistributionSpec = serde_json::from_str(
            r#"{"kind":"wishart","sigma":{"dim":1,"rows":[[1.0]]},"dof":3,"pattern":"-"}"#,
        )
        .unwrap();
        assert_eq!(parsed.cone(), Cone::Lpm);
    }

    #[test]
    fn signed_wishart_draws_land_in_their_cone() {
        let mut rng = RngStream::new(50, 0);
        for cone in [Cone::Lpm, Cone::Tpm] {
            for e in SignPattern::all(3) {
                let sigma = SymmetricMatrix::from_rows(&[
                    vec![2.0, 0.3, 0.1],
                    vec![0.3, 1.0, -0.2],
                    vec![0.1, -0.2, 0.5],
                ])
                .unwrap();
                let s = Sampler::new(&DistributionSpec::wishart(sigma, 4, e.clone(), cone)).unwrap();
                for _ in 0..200 {
                    let m = s.sample(&mut rng);
                    let c = classify(m.matrix(), cone, 0.0).unwrap();
                    assert_eq!(c.pattern(), &e);
                    assert_eq!(eigen_inertia(m.matrix()).0, e.negative_inertia());
                }
            }
        }
    }

    #[test]
    fn scalar_wishart_matches_chi_squared() {
        let s = Sampler::new(&DistributionSpec::wishart(SymmetricMatrix::identity(1), 4, p("+"), Cone::Lpm)).unwrap();
        let mut rng = RngStream::new(51, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| s.sample(&mut rng).matrix().get(0, 0)).collect();
        let chi = ChiSquared::new(4.0).unwrap();
        assert!(ks_one_sample(&xs, |x| chi.cdf(x)).p_value > 0.01);
    }

    #[test]
    fn wishart_mean_is_n_sigma() {
        let sigma = sigma2();
        let s = Sampler::new(&DistributionSpec::wishart(sigma.clone(), 5, p("++"), Cone::Lpm)).unwrap();
        let mut rng = RngStream::new(52, 0);
        let draws: Vec<ConePoint> = (0..20_000).map(|_| s.sample(&mut rng)).collect();
        for i in 0..2 {
            for j in 0..=i {
                let xs: Vec<f64> = draws.iter().map(|m| m.matrix().get(i, j)).collect();
                let (mean, se) = mean_and_se(&xs);
                assert!((mean - 5.0 * sigma.get(i, j)).abs() < 3.5 * se);
            }
        }
    }

    #[test]
    fn reversed_lpm_draws_match_direct_tpm_draws() {
        let sigma = sigma2();
        let lpm = Sampler::new(&DistributionSpec::wishart(sigma.clone(), 4, p("+-"), Cone::Lpm)).unwrap();
        let tpm = Sampler::new(&DistributionSpec::wishart(sigma.reverse(), 4, p("+-"), Cone::Tpm)).unwrap();
        let (mut r1, mut r2) = (RngStream::new(53, 0), RngStream::new(53, 1));
        let logdet = |m: &ConePoint| m.matrix().as_matrix().determinant().abs().ln();
        let a: Vec<f64> = (0..5000).map(|_| logdet(&lpm.sample(&mut r1).reverse())).collect();
        let b: Vec<f64> = (0..5000).map(|_| logdet(&tpm.sample(&mut r2))).collect();
        assert!(ks_two_sample(&a, &b).p_value > 0.01);
        let t11 = |m: &ConePoint| m.matrix().get(1, 1);
        let a: Vec<f64> = (0..5000).map(|_| t11(&lpm.sample(&mut r1).reverse())).collect();
        let b: Vec<f64> = (0..5000).map(|_| t11(&tpm.sample(&mut r2))).collect();
        assert!(ks_two_sample(&a, &b).p_value > 0.01);
    }

    #[test]
    fn wishart_density_examples() {
        let spec = DistributionSpec::wishart(SymmetricMatrix::identity(1), 2, p("+"), Cone::Lpm);
        let s = Sampler::new(&spec).unwrap();
        let one = classify(&SymmetricMatrix::identity(1), Cone::Lpm, DEFAULT_TOL).unwrap();
        let lp = s.log_density(&one, Measure::Eta).unwrap();
        assert!((lp - (-0.5 - 2f64.ln())).abs() < 1e-14);

        let e = p("+-");
        let signed = Sampler::new(&DistributionSpec::wishart(sigma2(), 4, e.clone(), Cone::Lpm)).unwrap();
        let pd = Sampler::new(&DistributionSpec::wishart(sigma2(), 4, p("++"), Cone::Lpm)).unwrap();
        let mut rng = RngStream::new(54, 0);
        for _ in 0..20 {
            let m = signed.sample(&mut rng);
            let image = resign(&m, &p("++")).unwrap();
            let a = signed.log_density(&m, Measure::Eta).unwrap();
            let b = pd.log_density(&image, Measure::Eta).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        let wrong = ConePoint::canonical(&p("++"), Cone::Lpm);
        assert!(matches!(signed.log_density(&wrong, Measure::Eta), Err(Error::PatternMismatch { .. })));
    }

    #[test]
    fn scalar_density_integrates_to_chi_squared_cdf() {
        // ε = (−1): points are −x for x > 0, density f_{χ²₃}(x).
        let s = Sampler::new(&DistributionSpec::wishart(SymmetricMatrix::identity(1), 3, p("-"), Cone::Lpm)).unwrap();
        let (lo, hi, steps) = (0.5f64, 2.0f64, 2000);
        let h = (hi - lo) / steps as f64;
        let integral: f64 = (0..steps)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * h;
                let m = classify(&SymmetricMatrix::from_real_diagonal(&[-x]), Cone::Lpm, 0.0).unwrap();
                s.log_density(&m, Measure::Eta).unwrap().exp() * h
            })
            .sum();
        let chi = ChiSquared::new(3.0).unwrap();
        let exact = chi.cdf(hi) - chi.cdf(lo);
        assert!((integral - exact).abs() < 0.01 * exact);
    }

    #[test]
    fn tpm_density_uses_reverse_factor() {
        let sigma = sigma2();
        let lpm = Sampler::new(&DistributionSpec::wishart(sigma.clone(), 4, p("-+"), Cone::Lpm)).unwrap();
        let tpm = Sampler::new(&DistributionSpec::wishart(sigma.reverse(), 4, p("-+"), Cone::Tpm)).unwrap();
        let mut rng = RngStream::new(55, 0);
        for _ in 0..10 {
            let m = lpm.sample(&mut rng);
            let a = lpm.log_density(&m, Measure::Eta).unwrap();
            let b = tpm.log_density(&m.reverse(), Measure::Eta).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_wishart_draws_and_density() {
        let mut rng = RngStream::new(56, 0);
        let e = p("+-+");
        let sigma = SymmetricMatrix::from_rows(&[
            vec![1.0, 0.2, 0.0],
            vec![0.2, 1.5, 0.3],
            vec![0.0, 0.3, 0.8],
        ])
        .unwrap();
        let w = Sampler::new(&DistributionSpec::wishart(sigma.clone(), 5, e.clone(), Cone::Lpm)).unwrap();
        let iw_spec = DistributionSpec::InverseWishart {
            sigma: sigma.clone(),
            dof: 5,
            pattern: e.clone(),
            cone: Cone::Lpm,
        };
        let iw = Sampler::new(&iw_spec).unwrap();
        for _ in 0..1000 {
            let m = w.sample(&mut rng);
            let inv = invert_cone_point(&m).unwrap();
            assert_eq!(classify(inv.matrix(), Cone::Tpm, 0.0).unwrap().pattern(), &e.reverse());
        }
        // Direct inverse draws agree with numerical inversion of the same Wishart draw.
        let (mut r1, mut r2) = (RngStream::new(57, 0), RngStream::new(57, 0));
        for _ in 0..20 {
            let direct = iw.sample(&mut r1);
            let numeric = invert_cone_point(&w.sample(&mut r2)).unwrap();
            let scale = numeric.matrix().scale().max(1.0);
            assert!(direct.matrix().max_abs_diff(numeric.matrix()) < 1e-9 * scale);
            assert_eq!(direct.pattern(), numeric.pattern());
            // Change of variables under inversion: g(Y) = f(Y⁻¹) |Y|^{−(n+1)}.
            let f = w.log_density(&invert_cone_point(&direct).unwrap(), Measure::Eta).unwrap();
            let g = iw.log_density(&direct, Measure::Eta).unwrap();
            let logdet = direct.matrix().as_matrix().determinant().abs().ln();
            assert!((g - (f - 4.0 * logdet)).abs() < 1e-8);
        }
    }

    #[test]
    fn scalar_inverse_wishart_is_inverse_gamma() {
        let spec = DistributionSpec::InverseWishart {
            sigma: SymmetricMatrix::identity(1),
            dof: 4,
            pattern: p("+"),
            cone: Cone::Lpm,
        };
        let s = Sampler::new(&spec).unwrap();
        for x in [1.0, 0.3, 2.5] {
            let pt = classify(&SymmetricMatrix::from_real_diagonal(&[x]), Cone::Tpm, 0.0).unwrap();
            let lp = s.log_density(&pt, Measure::Eta).unwrap();
            // InvGamma(shape N/2, scale 1/2)
            let (a, b) = (2.0f64, 0.5f64);
            let exact = a * b.ln() - statrs::function::gamma::ln_gamma(a) - (a + 1.0) * x.ln() - b / x;
            assert!((lp - exact).abs() < 1e-10);
        }
    }

    fn normal_spec(cov_scale: f64, e: &SignPattern) -> DistributionSpec {
        let n = e.len();
        let center = canonical_compose(
            &LowerTriangular::new(DMatrix::from_fn(n, n, |i, j| if i == j { 1.5 } else if i > j { 0.4 } else { 0.0 })).unwrap(),
            e,
            Cone::Lpm,
        )
        .unwrap();
        let m = n * (n + 1) / 2;
        DistributionSpec::cholesky_normal(
            center.matrix().clone(),
            SymmetricMatrix::from_real_diagonal(&vec![cov_scale; m]),
            e.clone(),
            Cone::Lpm,
        )
    }

    #[test]
    fn degenerate_cholesky_normal_hits_the_center() {
        let e = p("-+");
        let spec = normal_spec(1e-12, &e);
        let DistributionSpec::CholeskyNormal { center, .. } = &spec else { unreachable!() };
        let s = Sampler::new(&spec).unwrap();
        let mut rng = RngStream::new(58, 0);
        for _ in 0..100 {
            assert!(s.sample(&mut rng).matrix().max_abs_diff(center) < 1e-4);
        }
    }

    #[test]
    fn cholesky_normal_eta_mean() {
        let e = p("+-");
        let spec = normal_spec(0.1, &e);
        let s = Sampler::new(&spec).unwrap();
        let DistributionSpec::CholeskyNormal { center, .. } = &spec else { unreachable!() };
        let mu = eta(&canonical_factor(&classify(center, Cone::Lpm, 0.0).unwrap()).unwrap());
        let mut rng = RngStream::new(59, 0);
        let etas: Vec<DVector<f64>> = (0..20_000)
            .map(|_| eta(&canonical_factor(&s.sample(&mut rng)).unwrap()).into_vector())
            .collect();
        for c in 0..3 {
            let xs: Vec<f64> = etas.iter().map(|v| v[c]).collect();
            let (mean, se) = mean_and_se(&xs);
            assert!((mean - mu.as_vector()[c]).abs() < 3.5 * se);
        }
    }

    #[test]
    fn cholesky_normal_density() {
        let e = p("+-");
        let s = Sampler::new(&normal_spec(0.1, &e)).unwrap();
        let mut rng = RngStream::new(60, 0);
        let m = s.sample(&mut rng);
        let l = canonical_factor(&m).unwrap();
        let a = s.log_density(&m, Measure::Eta).unwrap();
        let b = s.log_density(&m, Measure::Symmetric).unwrap();
        let log_diag: f64 = (0..2).map(|j| l.diag(j).ln()).sum();
        assert!((a - b - jacobian_logdet(&l) - log_diag).abs() < 1e-12);
        // At the mean the quadratic form vanishes.
        let DistributionSpec::CholeskyNormal { center, .. } = normal_spec(0.1, &e) else { unreachable!() };
        let c = classify(&center, Cone::Lpm, 0.0).unwrap();
        let peak = s.log_density(&c, Measure::Eta).unwrap();
        let expected = -0.5 * (3.0 * (2.0 * std::f64::consts::PI).ln() + 3.0 * 0.1f64.ln());
        assert!((peak - expected).abs() < 1e-12);
    }

    #[test]
    fn inertial_clone_draws() {
        let base = DistributionSpec::wishart(SymmetricMatrix::identity(3), 4, SignPattern::ones(3), Cone::Lpm);
        let pd_only = Sampler::new(&DistributionSpec::InertialClone {
            base: Box::new(base.clone()),
            inertia: Some(0),
        })
        .unwrap();
        let mut rng = RngStream::new(61, 0);
        assert!((0..100).all(|_| pd_only.sample(&mut rng).pattern().is_all_plus()));

        let two = Sampler::new(&DistributionSpec::InertialClone {
            base: Box::new(base.clone()),
            inertia: Some(2),
        })
        .unwrap();
        for _ in 0..2000 {
            let m = two.sample(&mut rng);
            assert_eq!(eigen_inertia(m.matrix()).0, 2);
        }

        let one = Sampler::new(&DistributionSpec::InertialClone {
            base: Box::new(base.clone()),
            inertia: Some(1),
        })
        .unwrap();
        let cones = SignPattern::with_inertia(3, 1);
        let mut counts = [0f64; 3];
        let total = 9000;
        for _ in 0..total {
            let m = one.sample(&mut rng);
            counts[cones.iter().position(|c| c == m.pattern()).unwrap()] += 1.0;
        }
        let expected = total as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        // χ²₂ critical value at α = 0.01
        assert!(chi2 < 9.21, "{chi2}");

        let all = Sampler::new(&DistributionSpec::InertialClone {
            base: Box::new(base),
            inertia: None,
        })
        .unwrap();
        let m = all.sample(&mut rng);
        assert!(all.log_density(&m, Measure::Eta).unwrap().is_finite());
        assert_eq!(
            one.log_density(&ConePoint::canonical(&SignPattern::ones(3), Cone::Lpm), Measure::Eta).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn point_mass_and_determinism() {
        let e = p("-+");
        let a = ConePoint::canonical(&e, Cone::Tpm);
        let s = Sampler::new(&DistributionSpec::point_mass(&a)).unwrap();
        let mut rng = RngStream::new(62, 0);
        assert_eq!(s.sample(&mut rng).matrix(), a.matrix());

        let w = Sampler::new(&DistributionSpec::wishart(sigma2(), 3, e, Cone::Lpm)).unwrap();
        let run = || {
            let mut r = RngStream::new(63, 5);
            (0..10).map(|_| w.sample(&mut r).into_matrix()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
