//! `banachlab` command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a mathematical violation
//! was found, 2 for usage and configuration errors.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use banachlab::geoconst::{cbm_estimate, cnj_estimate, dbm_to_euclidean};
use banachlab::opnorm::OpNormConfig;
use banachlab::pglab::{verify_bounds, ProblemSpec, VerifyConfig};
use banachlab::projlab::{audit_projection, random_projection, AuditConfig};
use banachlab::suite::{random_quadratic, run_suite, trusted_cbm, SuiteConfig};
use banachlab::{rng, NormedSpace, SpaceSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use report::{Outcome, Report};

#[derive(Parser)]
#[command(name = "banachlab", version, about = "Geometric constants, projection bounds and Petrov-Galerkin error audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    /// Seed of every random draw.
    #[arg(long)]
    seed: u64,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate C_NJ and C_BM of a space, and d_BM to the Euclidean plane in 2-D.
    Constants {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Banach-Mazur distance of a 2-D space to the Euclidean plane.
    Dbm {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Audit random nontrivial projections.
    ProjAudit {
        #[arg(long, conflicts_with_all = ["dim", "norm"])]
        space: Option<PathBuf>,
        #[arg(long, requires = "norm")]
        dim: Option<usize>,
        /// `quadratic:identity`, `quadratic:random` or `lp:<p>`.
        #[arg(long, requires = "dim")]
        norm: Option<String>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Trusted C_BM of the space; derived from the space when absent.
        #[arg(long)]
        cbm: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the error-bound chain of a Petrov-Galerkin problem.
    PgVerify {
        #[arg(long)]
        problem: PathBuf,
        /// Trusted C_BM of the trial space; 1 for inner-product norms, 2 otherwise when absent.
        #[arg(long)]
        cbm: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full acceptance battery.
    Suite {
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
}

struct Usage(String);

impl From<banachlab::Error> for Usage {
    fn from(e: banachlab::Error) -> Self {
        Usage(e.to_string())
    }
}

fn read_space(path: &PathBuf) -> Result<NormedSpace, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    Ok(SpaceSpec::from_json(&text)?.build()?)
}

fn positive(name: &str, v: f64) -> Result<(), Usage> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn parse_norm(dim: usize, spec: &str, seed: u64) -> Result<NormedSpace, Usage> {
    let bad = || Usage(format!("unknown norm {spec:?}; use quadratic:identity, quadratic:random or lp:<p>"));
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    match (kind, arg) {
        ("quadratic", "identity") => Ok(NormedSpace::quadratic(DMatrix::identity(dim, dim))?),
        ("quadratic", "random") => Ok(random_quadratic(dim, rng::derive_seed(seed, u64::MAX))?),
        ("lp", p) => {
            let p = match p {
                "inf" | "infinity" => f64::INFINITY,
                p => p.parse().map_err(|_| bad())?,
            };
            Ok(NormedSpace::lp(dim, p)?)
        }
        _ => Err(bad()),
    }
}

fn run(command: Command) -> Result<(Report, Common), Usage> {
    match command {
        Command::Constants { space, starts, common } => {
            let s = read_space(&space)?;
            if starts == 0 {
                return Err(Usage("--starts must be at least 1".into()));
            }
            let cnj = cnj_estimate(&s, starts, common.seed)?;
            let cbm = cbm_estimate(&s, starts, common.seed)?;
            let dbm = if s.dim() == 2 { Some(dbm_to_euclidean(&s)?) } else { None };
            Ok((report::constants(&s, common.seed, cnj, cbm, dbm), common))
        }
        Command::Dbm { space, common } => {
            let s = read_space(&space)?;
            if s.dim() != 2 {
                return Err(Usage(format!("dbm needs a 2-D space, got dimension {}", s.dim())));
            }
            Ok((report::dbm(&s, common.seed, dbm_to_euclidean(&s)?), common))
        }
        Command::ProjAudit {
            space,
            dim,
            norm,
            trials,
            samples,
            tol,
            cbm,
            common,
        } => {
            positive("tol", tol)?;
            let s = match (space, dim, norm) {
                (Some(path), _, _) => read_space(&path)?,
                (None, Some(dim), Some(norm)) => parse_norm(dim, &norm, common.seed)?,
                _ => return Err(Usage("give --space or both --dim and --norm".into())),
            };
            let cbm = match cbm {
                Some(c) if c >= 1.0 && c.is_finite() => c,
                Some(c) => return Err(Usage(format!("--cbm must be at least 1, got {c}"))),
                None => trusted_cbm(&s)?,
            };
            let mut audits = Vec::with_capacity(trials);
            for k in 0..trials as u64 {
                let ks = rng::derive_seed(common.seed, k);
                let p = random_projection(&s, ks)?;
                let cfg = AuditConfig {
                    samples,
                    tol,
                    opnorm: OpNormConfig {
                        seed: ks,
                        ..OpNormConfig::default()
                    },
                    ..AuditConfig::default()
                };
                audits.push(audit_projection(&p, ks, cbm, &cfg)?);
            }
            Ok((report::proj_audit(&s, common.seed, cbm, audits), common))
        }
        Command::PgVerify {
            problem,
            cbm,
            tol,
            starts,
            common,
        } => {
            positive("tol", tol)?;
            let text = std::fs::read_to_string(&problem).map_err(|e| Usage(format!("{}: {e}", problem.display())))?;
            let prob = ProblemSpec::from_json(&text)?.build()?;
            let cbm = match cbm {
                Some(c) if c >= 1.0 && c.is_finite() => c,
                Some(c) => return Err(Usage(format!("--cbm must be at least 1, got {c}"))),
                None if prob.x_space().is_hilbert() => 1.0,
                None => 2.0,
            };
            let cfg = VerifyConfig {
                opnorm: OpNormConfig {
                    seed: common.seed,
                    starts,
                    ..OpNormConfig::default()
                },
                tol,
            };
            let r = verify_bounds(&prob, cbm, &cfg)?;
            Ok((report::pg_verify(common.seed, r), common))
        }
        Command::Suite {
            starts,
            samples,
            tol,
            common,
        } => {
            positive("tol", tol)?;
            let cfg = SuiteConfig {
                starts,
                samples,
                tol,
                ..SuiteConfig::new(common.seed)
            };
            Ok((report::suite(run_suite(&cfg)?), common))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, common) = match run(cli.command) {
        Ok(r) => r,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match report.render(common.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match report.outcome() {
        Outcome::Pass => ExitCode::SUCCESS,
        Outcome::Violation => {
            if common.out.is_some() {
                eprintln!("violations found; see the report");
            }
            ExitCode::from(1)
        }
    }
}
