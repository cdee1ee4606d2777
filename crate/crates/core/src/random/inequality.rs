//! Monte Carlo checks of maximal inequalities for random walks on the cone groups.
//!
//! A walk is a list of step laws on one group, either a single cone under `⊛`
//! (metric: log-Cholesky distance) or the glued group `⊡` (metric: `d_p`). Both
//! groups are abelian and `⊙` is addition in `η`-coordinates, so a partial sum is
//! tracked as an `η`-vector plus a sign pattern. Every inequality estimates its
//! two sides from the same simulated paths.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use super::spec::{DistributionSpec, Sampler};
use super::stats::grouped_jackknife;
use crate::cholesky::canonical_factor;
use crate::cone::{classify, Cone, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::exec::{chunks, par_map, Execution};
use crate::geometry::eta;
use crate::matrix::SymmetricMatrix;
use crate::pattern::SignPattern;

/// Number of resampling groups for the jackknife.
const GROUPS: usize = 64;

/// The group a walk lives in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Group {
    /// One cone `LPMₙ(ε)` or `TPMₙ(ε)` under `⊛`.
    Star { cone: Cone, pattern: SignPattern },
    /// All cones of one kind under `⊡`, with the metric `d_p`.
    Box { cone: Cone, p: f64 },
}

impl Group {
    fn cone(&self) -> Cone {
        match self {
            Group::Star { cone, .. } | Group::Box { cone, .. } => *cone,
        }
    }

    fn identity_pattern(&self, n: usize) -> SignPattern {
        match self {
            Group::Star { pattern, .. } => pattern.clone(),
            Group::Box { .. } => SignPattern::ones(n),
        }
    }

    fn accepts(&self, spec: &DistributionSpec) -> bool {
        spec.cone() == self.cone()
            && match self {
                Group::Star { pattern, .. } => spec.pattern().as_ref() == Some(pattern),
                Group::Box { .. } => true,
            }
    }

    fn distance(&self, a: &Element, b: &Element) -> f64 {
        let d = (&a.eta - &b.eta).norm();
        match self {
            Group::Star { .. } => d,
            Group::Box { p, .. } => {
                let jump = if a.pattern == b.pattern { 0.0 } else { 1.0 };
                if p.is_infinite() {
                    d.max(jump)
                } else {
                    (d.powf(*p) + jump).powf(1.0 / p)
                }
            }
        }
    }

    fn combine(&self, a: &Element, b: &Element) -> Element {
        let pattern = match self {
            Group::Star { .. } => a.pattern.clone(),
            Group::Box { .. } => a.pattern.schur(&b.pattern).expect("equal lengths"),
        };
        Element {
            eta: &a.eta + &b.eta,
            pattern,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Element {
    eta: DVector<f64>,
    pattern: SignPattern,
}

/// Independent steps `X₁, …, Xₙ` with partial sums `S_k`, measured from `z₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Walk {
    pub group: Group,
    pub steps: Vec<DistributionSpec>,
    /// Base point; the group identity when absent.
    #[serde(default)]
    pub z1: Option<SymmetricMatrix>,
}

/// Built-in walks, ten steps each on 2×2 matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Cholesky-normal steps around `Id` in the positive definite cone.
    PositiveDefinite,
    /// The same steps cloned uniformly over all four sign patterns, under `⊡` with `d₂`.
    MixedBox,
    /// Every step is `Id`.
    Deterministic,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pd" => Ok(Preset::PositiveDefinite),
            "box" => Ok(Preset::MixedBox),
            "deterministic" => Ok(Preset::Deterministic),
            _ => Err(Error::SpecInvalid(format!("unknown preset {s:?} (expected pd, box or deterministic)"))),
        }
    }
}

impl Walk {
    pub fn preset(preset: Preset) -> Walk {
        let n = 2;
        let id = SymmetricMatrix::identity(n);
        let plus = SignPattern::ones(n);
        let normal = DistributionSpec::cholesky_normal(
            id.clone(),
            SymmetricMatrix::from_real_diagonal(&[0.1; 3]),
            plus.clone(),
            Cone::Lpm,
        );
        let star = Group::Star {
            cone: Cone::Lpm,
            pattern: plus.clone(),
        };
        let (group, step) = match preset {
            Preset::PositiveDefinite => (star, normal),
            Preset::MixedBox => (
                Group::Box { cone: Cone::Lpm, p: 2.0 },
                DistributionSpec::InertialClone {
                    base: Box::new(normal),
                    inertia: None,
                },
            ),
            Preset::Deterministic => (
                star,
                DistributionSpec::PointMass {
                    point: id,
                    pattern: plus,
                    cone: Cone::Lpm,
                },
            ),
        };
        Walk {
            group,
            steps: vec![step; 10],
            z1: None,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// An inequality from the maximal-inequality family, with its constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Inequality {
    /// `P(min_{m≤k≤n} d(z₁,S_k) ≤ a) · min_{m≤k≤n} P(d(S_k,S_n) ≤ b) ≤ P(d(z₁,S_n) ≤ a+b)`.
    MogulskiiMin { m: usize, a: f64, b: f64 },
    /// `P(max_{m≤k≤n} d(z₁,S_k) ≥ a) · min_{m≤k≤n} P(d(S_k,S_n) ≤ b) ≤ P(d(z₁,S_n) ≥ a−b)`.
    MogulskiiMax { m: usize, a: f64, b: f64 },
    /// `P(U_n ≥ α+β) · min_k P(d(S_k,S_n) ≤ β) ≤ P(d(z₁,S_n) ≥ α)`.
    OttavianiSkorohod { alpha: f64, beta: f64 },
    /// `P(U_n > a₁+⋯+a_l) ≤ Σ_{i≥2} p_{a_i} + p′_l`.
    LevyOttaviani { a: Vec<f64> },
    /// Tail of `U_n` beyond a multiple of the levels `t_i` and `s`.
    HoffmannJorgensen { n: Vec<usize>, t: Vec<f64>, s: f64 },
}

pub const INEQUALITY_NAMES: [&str; 5] = [
    "mogulskii_min",
    "mogulskii_max",
    "ottaviani_skorohod",
    "levy_ottaviani",
    "hoffmann_jorgensen",
];

impl Inequality {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::MogulskiiMin { .. } => INEQUALITY_NAMES[0],
            Inequality::MogulskiiMax { .. } => INEQUALITY_NAMES[1],
            Inequality::OttavianiSkorohod { .. } => INEQUALITY_NAMES[2],
            Inequality::LevyOttaviani { .. } => INEQUALITY_NAMES[3],
            Inequality::HoffmannJorgensen { .. } => INEQUALITY_NAMES[4],
        }
    }

    /// Default constants, scaled for the ten-step presets.
    pub fn with_defaults(name: &str) -> Result<Inequality> {
        Ok(match name {
            "mogulskii_min" => Inequality::MogulskiiMin { m: 5, a: 1.5, b: 1.0 },
            "mogulskii_max" => Inequality::MogulskiiMax { m: 5, a: 1.5, b: 1.0 },
            "ottaviani_skorohod" => Inequality::OttavianiSkorohod { alpha: 1.5, beta: 1.0 },
            "levy_ottaviani" => Inequality::LevyOttaviani { a: vec![1.0, 1.0, 0.5] },
            "hoffmann_jorgensen" => Inequality::HoffmannJorgensen {
                n: vec![2, 2],
                t: vec![0.8, 0.8],
                s: 0.5,
            },
            _ => {
                return Err(Error::SpecInvalid(format!(
                    "unknown inequality {name:?}; expected one of {}",
                    INEQUALITY_NAMES.join(", ")
                )))
            }
        })
    }

    /// Like [`Inequality::with_defaults`], with the Mogulskii index clamped so
    /// the constants stay valid for a walk of `steps` steps.
    pub fn defaults_for(name: &str, steps: usize) -> Result<Inequality> {
        let mut ineq = Inequality::with_defaults(name)?;
        if let Inequality::MogulskiiMin { m, .. } | Inequality::MogulskiiMax { m, .. } = &mut ineq {
            *m = (*m).min(steps.max(1));
        }
        Ok(ineq)
    }

    pub fn all_defaults() -> Vec<Inequality> {
        INEQUALITY_NAMES
            .iter()
            .map(|n| Inequality::with_defaults(n).expect("known name"))
            .collect()
    }

    fn validate(&self, steps: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::SpecInvalid(msg));
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match self {
            Inequality::MogulskiiMin { m, a, b } | Inequality::MogulskiiMax { m, a, b } => {
                if *m < 1 || *m > steps {
                    return bad(format!("m = {m} must lie in 1..={steps}"));
                }
                if !nonneg(*a) || !nonneg(*b) {
                    return bad("a and b must be nonnegative".into());
                }
            }
            Inequality::OttavianiSkorohod { alpha, beta } => {
                if !(alpha.is_finite() && *alpha > 0.0 && beta.is_finite() && *beta > 0.0) {
                    return bad("alpha and beta must be positive".into());
                }
            }
            Inequality::LevyOttaviani { a } => {
                if a.len() < 2 {
                    return bad("need at least two levels a₁, a₂".into());
                }
                if !a.iter().all(|&x| nonneg(x)) {
                    return bad("levels must be nonnegative".into());
                }
            }
            Inequality::HoffmannJorgensen { n, t, s } => {
                if n.is_empty() || n.len() != t.len() {
                    return bad("n and t must be nonempty and of equal length".into());
                }
                if !nonneg(*s) || !t.iter().all(|&x| nonneg(x)) {
                    return bad("t and s must be nonnegative".into());
                }
            }
        }
        Ok(())
    }

    /// Whether the hypotheses can be met by a walk with `steps` steps.
    fn applicable(&self, steps: usize) -> bool {
        match self {
            Inequality::HoffmannJorgensen { n, .. } => {
                n.iter().all(|&k| k >= 1) && n.iter().sum::<usize>() <= steps + 1
            }
            _ => true,
        }
    }

    /// Indicator events read off one path; see [`Inequality::sides`] for their layout.
    fn events(&self, s: &PathStats, out: &mut Vec<bool>) {
        let n = s.dz.len();
        match self {
            Inequality::MogulskiiMin { m, a, b } => {
                out.push(s.dz[m - 1..].iter().any(|&d| d <= *a));
                out.extend(s.dsn[m - 1..].iter().map(|&d| d <= *b));
                out.push(s.dz[n - 1] <= a + b);
            }
            Inequality::MogulskiiMax { m, a, b } => {
                out.push(s.dz[m - 1..].iter().any(|&d| d >= *a));
                out.extend(s.dsn[m - 1..].iter().map(|&d| d <= *b));
                out.push(s.dz[n - 1] >= a - b);
            }
            Inequality::OttavianiSkorohod { alpha, beta } => {
                out.push(s.u() >= alpha + beta);
                out.extend(s.dsn.iter().map(|&d| d <= *beta));
                out.push(s.dz[n - 1] >= *alpha);
            }
            Inequality::LevyOttaviani { a } => {
                out.push(s.u() > a.iter().sum::<f64>());
                for &ai in a {
                    out.extend(s.dz.iter().map(|&d| d > ai));
                }
                out.extend(s.dsn.iter().map(|&d| d > a[0]));
            }
            Inequality::HoffmannJorgensen { n: counts, t, s: level } => {
                let total: usize = counts.iter().sum();
                let threshold = (2.0 * counts[0] as f64 - 1.0) * t[0]
                    + 2.0 * counts[1..].iter().zip(&t[1..]).map(|(&k, &ti)| k as f64 * ti).sum::<f64>()
                    + (total as f64 - 1.0) * level;
                let u = s.u();
                out.push(u > threshold);
                out.push(s.dx.iter().cloned().fold(0.0, f64::max) > *level);
                out.extend(t.iter().map(|&ti| u <= ti));
            }
        }
    }

    /// `(lhs, rhs)` from event frequencies laid out as by [`Inequality::events`].
    fn sides(&self, n: usize, q: &[f64]) -> (f64, f64) {
        let min = |xs: &[f64]| xs.iter().cloned().fold(1.0, f64::min);
        let max = |xs: &[f64]| xs.iter().cloned().fold(0.0, f64::max);
        match self {
            Inequality::MogulskiiMin { m, .. } | Inequality::MogulskiiMax { m, .. } => {
                let k = n - m + 1;
                (q[0] * min(&q[1..=k]), q[k + 1])
            }
            Inequality::OttavianiSkorohod { .. } => (q[0] * min(&q[1..=n]), q[n + 1]),
            Inequality::LevyOttaviani { a } => {
                let l = a.len();
                let p = |i: usize| max(&q[1 + i * n..1 + (i + 1) * n]);
                let tail = if l % 2 == 1 { p(0) } else { max(&q[1 + l * n..1 + (l + 1) * n]) };
                (q[0], (1..l).map(p).sum::<f64>() + tail)
            }
            Inequality::HoffmannJorgensen { n: counts, .. } => {
                let below = &q[2..];
                let mut product = 1.0;
                let mut first_in_i0 = true;
                for (i, &k) in counts.iter().enumerate() {
                    let fact: f64 = (1..=k).map(|j| j as f64).product();
                    let exponent = k as i32 - i32::from(i == 0);
                    let in_i0 = below[i].powi(exponent) <= 1.0 / fact;
                    let above = 1.0 - below[i];
                    product *= if in_i0 {
                        above.powi(k as i32)
                    } else {
                        (above / below[i]).powi(k as i32) / fact
                    };
                    if i == 0 {
                        first_in_i0 = in_i0;
                    }
                }
                let lead = if first_in_i0 { 1.0 } else { below[0] };
                (q[0], q[1] + lead * product)
            }
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

/// Both sides of one inequality with jackknife standard errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub inequality: Inequality,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub se_lhs: f64,
    pub se_rhs: f64,
    pub verdict: Verdict,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// `rhs − lhs` in units of the combined standard error.
    pub fn margin(&self) -> f64 {
        let se = self.se_lhs.hypot(self.se_rhs);
        if se > 0.0 {
            (self.rhs - self.lhs) / se
        } else if self.rhs >= self.lhs {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Distances along one path, indexed by `k − 1`.
struct PathStats {
    /// `d(z₁, S_k)`
    dz: Vec<f64>,
    /// `d(S_k, S_n)`
    dsn: Vec<f64>,
    /// `d(Id, X_k)`
    dx: Vec<f64>,
}

impl PathStats {
    fn u(&self) -> f64 {
        self.dz.iter().cloned().fold(0.0, f64::max)
    }
}

struct PreparedWalk {
    group: Group,
    samplers: Vec<Sampler>,
    z1: Element,
    identity: Element,
}

impl PreparedWalk {
    fn new(walk: &Walk) -> Result<Self> {
        let Some(first) = walk.steps.first() else {
            return Err(Error::SpecInvalid("a walk needs at least one step".into()));
        };
        let n = first.dim();
        if let Group::Box { p, .. } = walk.group {
            if !(p >= 1.0) {
                return Err(Error::SpecInvalid(format!("d_p needs p ≥ 1, got {p}")));
            }
        }
        if let Group::Star { pattern, .. } = &walk.group {
            if pattern.len() != n {
                return Err(Error::GroupMismatch(format!("group pattern {pattern} has the wrong length")));
            }
        }
        let mut samplers = Vec::with_capacity(walk.len());
        for (k, spec) in walk.steps.iter().enumerate() {
            if spec.dim() != n {
                return Err(Error::GroupMismatch(format!("step {} has dimension {}, expected {n}", k + 1, spec.dim())));
            }
            if !walk.group.accepts(spec) {
                return Err(Error::GroupMismatch(format!("step {} does not take values in the walk's group", k + 1)));
            }
            samplers.push(Sampler::new(spec)?);
        }
        let identity = Element {
            eta: DVector::zeros(n * (n + 1) / 2),
            pattern: walk.group.identity_pattern(n),
        };
        let z1 = match &walk.z1 {
            None => identity.clone(),
            Some(m) => {
                let point = classify(m, walk.group.cone(), DEFAULT_TOL)?;
                if point.dim() != n {
                    return Err(Error::GroupMismatch("z1 has the wrong dimension".into()));
                }
                if let Group::Star { pattern, .. } = &walk.group {
                    if point.pattern() != pattern {
                        return Err(Error::GroupMismatch(format!("z1 lies in the cone {}, not {pattern}", point.pattern())));
                    }
                }
                Element {
                    eta: eta(&canonical_factor(&point)?).into_vector(),
                    pattern: point.pattern().clone(),
                }
            }
        };
        Ok(PreparedWalk {
            group: walk.group.clone(),
            samplers,
            z1,
            identity,
        })
    }

    fn simulate(&self, rng: &mut RngStream) -> PathStats {
        let mut sums = Vec::with_capacity(self.samplers.len());
        let mut dx = Vec::with_capacity(self.samplers.len());
        let mut acc = self.identity.clone();
        for sampler in &self.samplers {
            let draw = sampler.draw(rng);
            let step = Element {
                eta: eta(&draw.factor).into_vector(),
                pattern: draw.pattern,
            };
            dx.push(self.group.distance(&self.identity, &step));
            acc = self.group.combine(&acc, &step);
            sums.push(acc.clone());
        }
        let last = sums.last().expect("nonempty walk");
        PathStats {
            dz: sums.iter().map(|s| self.group.distance(&self.z1, s)).collect(),
            dsn: sums.iter().map(|s| self.group.distance(s, last)).collect(),
            dx,
        }
    }
}

/// Estimates every inequality in `inequalities` from one shared set of `paths`
/// simulated paths; path `i` uses `RngStream::new(seed, i)`.
pub fn verify_many(
    walk: &Walk,
    inequalities: &[Inequality],
    paths: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Report>> {
    if paths < 2 {
        return Err(Error::SpecInvalid("need at least two paths".into()));
    }
    let prepared = PreparedWalk::new(walk)?;
    let steps = walk.len();
    for ineq in inequalities {
        ineq.validate(steps)?;
    }
    let ranges = chunks(paths, GROUPS);
    let sizes: Vec<u64> = ranges.iter().map(|r| r.len() as u64).collect();
    let per_group: Vec<Vec<Vec<u64>>> = par_map(exec, ranges, |range| {
        let mut counts: Vec<Vec<u64>> = Vec::new();
        let mut buf = Vec::new();
        for i in range {
            let stats = prepared.simulate(&mut RngStream::new(seed, i as u64));
            for (j, ineq) in inequalities.iter().enumerate() {
                buf.clear();
                ineq.events(&stats, &mut buf);
                if counts.len() <= j {
                    counts.push(vec![0; buf.len()]);
                }
                for (c, &hit) in counts[j].iter_mut().zip(&buf) {
                    *c += u64::from(hit);
                }
            }
        }
        counts
    });
    Ok(inequalities
        .iter()
        .enumerate()
        .map(|(j, ineq)| {
            let counts: Vec<Vec<u64>> = per_group.iter().map(|g| g[j].clone()).collect();
            let (lhs, se_lhs) = grouped_jackknife(&counts, &sizes, |q| ineq.sides(steps, q).0);
            let (rhs, se_rhs) = grouped_jackknife(&counts, &sizes, |q| ineq.sides(steps, q).1);
            let verdict = if !ineq.applicable(steps) {
                Verdict::NotApplicable
            } else if lhs <= rhs + 3.0 * se_lhs.hypot(se_rhs) + 1e-12 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Report {
                inequality: ineq.clone(),
                steps,
                paths,
                seed,
                lhs,
                rhs,
                se_lhs,
                se_rhs,
                verdict,
            }
        })
        .collect())
}

/// Single-inequality form of [`verify_many`].
pub fn verify_inequality(
    walk: &Walk,
    inequality: &Inequality,
    paths: usize,
    seed: u64,
    exec: Execution,
) -> Result<Report> {
    Ok(verify_many(walk, std::slice::from_ref(inequality), paths, seed, exec)?.remove(0))
}
