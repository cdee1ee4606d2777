//! Batch command-line front end.
//!
//! Exit codes: 0 on success, 1 on a domain error (reported by its stable name,
//! e.g. `PatternMismatch`), 2 on usage or input-file errors.

pub mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::biggroup::{dp_distance, BigGroupElement};
use crate::cholesky::{compose, compose_tpm, factor, factor_tpm, resign};
use crate::cone::{classify, leading_minors, trailing_minors, Cone, ConePoint, DEFAULT_TOL};
use crate::error::Error;
use crate::exec::{par_map_range, Execution};
use crate::geometry::{log_cholesky_mean, lpm_distance, lpm_geodesic};
use crate::matrix::{LowerTriangular, SymmetricMatrix};
use crate::pattern::SignPattern;
use crate::random::inequality::{verify_many, Inequality, Preset, Walk, INEQUALITY_NAMES};
use crate::random::{DistributionSpec, Measure, RngStream, Sampler};
use crate::ssrpm::is_ssrpm;

use io::{fmt_num, matrix_json, read_json, read_matrix, write_matrix};

/// Environment variable that, when set, replaces any `--seed` flag.
pub const SEED_ENV: &str = "LPMCH_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Malformed input file or flag combination.
    Input(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "lpmch", version, about = "Signed Cholesky factorization, log-Cholesky geometry and random matrices on principal-minor cones")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sign pattern, negative inertia and principal minors of a matrix.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "lpm")]
        cone: ConeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Solve A = L B Lᵀ (leading cone) or A = Lᵀ B L (trailing cone) for L.
    Factor {
        file: PathBuf,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inverse of `factor`: form L B Lᵀ (or Lᵀ B L) from a factor file.
    Compose {
        file: PathBuf,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-Cholesky distance within a cone, or d_p across all cones.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "star")]
        group: GroupArg,
        /// Exponent of d_p (`inf` allowed); only used with `--group box`.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value = "lpm")]
        cone: ConeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Point at time t on the geodesic from A to B.
    Geodesic {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "lpm")]
        cone: ConeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-Cholesky barycentre of matrices in one cone.
    Mean {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "lpm")]
        cone: ConeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stream draws as newline-delimited JSON (header line first).
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-density of a matrix under a distribution.
    Density {
        file: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, value_enum, default_value = "eta")]
        measure: MeasureArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Move a matrix to another cone, keeping its canonical factor.
    Resign {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        to: SignPattern,
        #[arg(long, value_enum, default_value = "lpm")]
        cone: ConeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check of maximal inequalities along a random walk.
    Verify {
        /// One of the inequality names, or `all`.
        #[arg(long, default_value = "all")]
        inequality: String,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON file with `{"walk": …, "inequalities": […]}` or a bare walk.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ["pd", "box", "deterministic"])]
        preset: Option<String>,
        #[arg(long)]
        sequential: bool,
    },
    /// Pattern of all principal minors, or "not SSRPM".
    SsrpmCheck {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConeArg {
    Lpm,
    Tpm,
}

impl From<ConeArg> for Cone {
    fn from(c: ConeArg) -> Cone {
        match c {
            ConeArg::Lpm => Cone::Lpm,
            ConeArg::Tpm => Cone::Tpm,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    Star,
    Box,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeasureArg {
    Eta,
    Symmetric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistKind {
    Wishart,
    InvWishart,
    CholeskyNormal,
    Clone,
}

#[derive(Args, Debug)]
struct BasisArgs {
    /// `diag` for the canonical diagonal of the pattern, or a matrix file.
    #[arg(long, default_value = "diag")]
    basis: String,
    /// Sign pattern such as `+-+`; defaults to the pattern of the input.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<SignPattern>,
    #[arg(long, value_enum, default_value = "lpm")]
    cone: ConeArg,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct DistArgs {
    #[arg(long, value_enum, required_unless_present = "spec")]
    dist: Option<DistKind>,
    /// Full JSON distribution spec; replaces the other distribution flags.
    #[arg(long, conflicts_with = "dist")]
    spec: Option<PathBuf>,
    /// Scale matrix (Wishart kinds and the clone base).
    #[arg(long)]
    sigma: Option<PathBuf>,
    #[arg(long)]
    dof: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<SignPattern>,
    #[arg(long, value_enum, default_value = "lpm")]
    cone: ConeArg,
    /// Centre matrix of a Cholesky-normal law.
    #[arg(long)]
    center: Option<PathBuf>,
    /// Covariance of the η-coordinates, n(n+1)/2 square.
    #[arg(long)]
    cov: Option<PathBuf>,
    /// Number of negative eigenvalues for clones; all cones when absent.
    #[arg(long)]
    inertia: Option<usize>,
}

fn symmetric(path: &Path) -> CliResult<SymmetricMatrix> {
    Ok(SymmetricMatrix::new(read_matrix(path)?, 1e-12)?)
}

fn point(path: &Path, cone: Cone, tol: f64) -> CliResult<ConePoint> {
    Ok(classify(&symmetric(path)?, cone, tol)?)
}

fn emit_matrix(out: &mut dyn Write, dest: Option<&Path>, m: &DMatrix<f64>) -> CliResult<()> {
    match dest {
        Some(path) => write_matrix(path, m),
        None => Ok(writeln!(out, "{}", matrix_json(m))?),
    }
}

fn required<T>(value: Option<T>, flag: &str, kind: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required for --dist {kind}")))
}

impl DistArgs {
    fn spec(&self) -> CliResult<DistributionSpec> {
        if let Some(path) = &self.spec {
            return read_json(path);
        }
        let cone = Cone::from(self.cone);
        let kind = self.dist.expect("clap enforces --dist or --spec");
        let wishart = |name: &str| -> CliResult<(SymmetricMatrix, usize, SignPattern)> {
            let sigma = symmetric(&required(self.sigma.clone(), "sigma", name)?)?;
            let dof = required(self.dof, "dof", name)?;
            let epsilon = self.epsilon.clone().unwrap_or_else(|| SignPattern::ones(sigma.dim()));
            Ok((sigma, dof, epsilon))
        };
        Ok(match kind {
            DistKind::Wishart => {
                let (sigma, dof, pattern) = wishart("wishart")?;
                DistributionSpec::Wishart { sigma, dof, pattern, cone }
            }
            DistKind::InvWishart => {
                let (sigma, dof, pattern) = wishart("inv-wishart")?;
                DistributionSpec::InverseWishart { sigma, dof, pattern, cone }
            }
            DistKind::CholeskyNormal => {
                let center = symmetric(&required(self.center.clone(), "center", "cholesky-normal")?)?;
                let cov = symmetric(&required(self.cov.clone(), "cov", "cholesky-normal")?)?;
                let pattern = match &self.epsilon {
                    Some(e) => e.clone(),
                    None => classify(&center, cone, DEFAULT_TOL)?.pattern().clone(),
                };
                DistributionSpec::CholeskyNormal { center, cov, pattern, cone }
            }
            DistKind::Clone => {
                let (sigma, dof, _) = wishart("clone")?;
                let n = sigma.dim();
                DistributionSpec::InertialClone {
                    base: Box::new(DistributionSpec::Wishart {
                        sigma,
                        dof,
                        pattern: SignPattern::ones(n),
                        cone,
                    }),
                    inertia: self.inertia,
                }
            }
        })
    }
}

impl BasisArgs {
    /// Classifies `file` and builds the basis point `B` (or `C`).
    fn operands(&self, file: &Path, classify_input: bool) -> CliResult<(Option<ConePoint>, ConePoint)> {
        let cone = Cone::from(self.cone);
        let input = if classify_input {
            Some(point(file, cone, self.tol)?)
        } else {
            None
        };
        let basis = if self.basis == "diag" {
            let pattern = match (&self.epsilon, &input) {
                (Some(e), _) => e.clone(),
                (None, Some(a)) => a.pattern().clone(),
                (None, None) => {
                    return Err(CliError::Input("--epsilon is required with --basis diag".into()));
                }
            };
            ConePoint::canonical(&pattern, cone)
        } else {
            let b = point(Path::new(&self.basis), cone, self.tol)?;
            if let Some(e) = &self.epsilon {
                if e != b.pattern() {
                    return Err(b.pattern().mismatch(e).into());
                }
            }
            b
        };
        Ok((input, basis))
    }
}

/// Seed from `LPMCH_SEED` if set, else the flag value.
fn effective_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VerifyConfig {
    Full {
        walk: Walk,
        #[serde(default)]
        inequalities: Vec<Inequality>,
    },
    Bare(Walk),
}

fn run_command(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Classify { file, cone, tol } => {
            let cone = Cone::from(cone);
            let a = symmetric(&file)?;
            let minors = match cone {
                Cone::Lpm => leading_minors(&a),
                Cone::Tpm => trailing_minors(&a),
            };
            let p = classify(&a, cone, tol)?;
            writeln!(
                out,
                "{{\"cone\":\"{cone}\",\"pattern\":\"{}\",\"inertia\":{},\"minors\":[{}]}}",
                p.pattern(),
                p.pattern().negative_inertia(),
                io::fmt_row(minors, ",")
            )?;
        }
        Command::Factor { file, basis, out: dest } => {
            let (a, b) = basis.operands(&file, true)?;
            let a = a.expect("input classified");
            let l = match Cone::from(basis.cone) {
                Cone::Lpm => factor(&a, &b)?,
                Cone::Tpm => factor_tpm(&a, &b)?,
            };
            emit_matrix(out, dest.as_deref(), l.as_matrix())?;
        }
        Command::Compose { file, basis, out: dest } => {
            let l = LowerTriangular::new(read_matrix(&file)?)?;
            let (_, b) = basis.operands(&file, false)?;
            let a = match Cone::from(basis.cone) {
                Cone::Lpm => compose(&l, &b)?,
                Cone::Tpm => compose_tpm(&l, &b)?,
            };
            emit_matrix(out, dest.as_deref(), a.matrix().as_matrix())?;
        }
        Command::Distance { a, b, group, p, cone, tol } => {
            let cone = Cone::from(cone);
            let (a, b) = (point(&a, cone, tol)?, point(&b, cone, tol)?);
            let d = match group {
                GroupArg::Star => lpm_distance(&a, &b)?,
                GroupArg::Box => dp_distance(&BigGroupElement::new(a)?, &BigGroupElement::new(b)?, p)?,
            };
            writeln!(out, "{}", fmt_num(d))?;
        }
        Command::Geodesic { a, b, t, cone, tol, out: dest } => {
            let cone = Cone::from(cone);
            let g = lpm_geodesic(&point(&a, cone, tol)?, &point(&b, cone, tol)?, t)?;
            emit_matrix(out, dest.as_deref(), g.matrix().as_matrix())?;
        }
        Command::Mean { files, cone, tol, out: dest } => {
            let cone = Cone::from(cone);
            let points = files.iter().map(|f| point(f, cone, tol)).collect::<CliResult<Vec<_>>>()?;
            let m = log_cholesky_mean(&points)?;
            emit_matrix(out, dest.as_deref(), m.matrix().as_matrix())?;
        }
        Command::Sample { dist, count, seed, sequential, out: dest } => {
            let spec = dist.spec()?;
            let seed = effective_seed(seed)?;
            let sampler = Sampler::new(&spec)?;
            let lines = par_map_range(exec(sequential), count, |i| {
                let m = sampler.sample(&mut RngStream::new(seed, i as u64));
                matrix_json(m.matrix().as_matrix())
            });
            let header = serde_json::json!({ "spec": spec, "seed": seed, "count": count });
            let mut body = format!("{header}\n");
            for line in lines {
                body.push_str(&line);
                body.push('\n');
            }
            match dest {
                Some(path) => std::fs::write(&path, body)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
                None => out.write_all(body.as_bytes())?,
            }
        }
        Command::Density { file, dist, measure, tol } => {
            let spec = dist.spec()?;
            let sampler = Sampler::new(&spec)?;
            let m = point(&file, spec.cone(), tol)?;
            let measure = match measure {
                MeasureArg::Eta => Measure::Eta,
                MeasureArg::Symmetric => Measure::Symmetric,
            };
            writeln!(out, "{}", fmt_num(sampler.log_density(&m, measure)?))?;
        }
        Command::Resign { file, to, cone, tol, out: dest } => {
            let m = resign(&point(&file, Cone::from(cone), tol)?, &to)?;
            emit_matrix(out, dest.as_deref(), m.matrix().as_matrix())?;
        }
        Command::Verify { inequality, trials, seed, config, preset, sequential } => {
            let seed = effective_seed(seed)?;
            let (walk, configured) = match (config, preset) {
                (Some(path), _) => match read_json::<VerifyConfig>(&path)? {
                    VerifyConfig::Full { walk, inequalities } => (walk, inequalities),
                    VerifyConfig::Bare(walk) => (walk, Vec::new()),
                },
                (None, Some(name)) => (Walk::preset(name.parse::<Preset>()?), Vec::new()),
                (None, None) => unreachable!("clap requires --config or --preset"),
            };
            let names: Vec<&str> = if inequality == "all" {
                INEQUALITY_NAMES.to_vec()
            } else {
                vec![inequality.as_str()]
            };
            let selected = names
                .iter()
                .map(|name| match configured.iter().find(|i| i.name() == *name) {
                    Some(i) => Ok(i.clone()),
                    None => Inequality::defaults_for(name, walk.steps.len()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            for report in verify_many(&walk, &selected, trials, seed, exec(sequential))? {
                writeln!(out, "{}", serde_json::to_string(&report).expect("reports serialize"))?;
            }
        }
        Command::SsrpmCheck { file, tol } => match is_ssrpm(&symmetric(&file)?, tol)? {
            Some(p) => writeln!(out, "{p}")?,
            None => writeln!(out, "not SSRPM")?,
        },
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command writing results
/// to `out` and diagnostics to stderr, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_command(cli.command, out) {
        Ok(()) => 0,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            1
        }
    }
}
