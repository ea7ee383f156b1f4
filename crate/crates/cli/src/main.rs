//! `hec`: batch front end for the homogeneous Einstein toolkit.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hec_core::policy::{install, NumericPolicy};

#[derive(Parser, Debug)]
#[command(name = "hec", version, about = "Curvature of invariant metrics on homogeneous spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Scalar backend for curvature computations.
    #[arg(long, value_enum, global = true, default_value_t = Backend::Rational)]
    pub backend: Backend,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Pass/fail tolerance for residual checks and search convergence.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest absolute parameter when sampling infinite families.
    #[arg(long, global = true, default_value_t = 7)]
    pub pmax: i64,
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run data-parallel work sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
    Markdown,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Catalog rows with dimensions and expected verdicts.
    List,
    /// Structure constants, isotropy modules and table data of a catalog row.
    Describe {
        name: String,
        /// Family parameters, e.g. `1 2`.
        #[arg(allow_negative_numbers = true)]
        params: Vec<i64>,
    },
    /// Ricci curvature of a metric on a space.
    Ricci(SpaceInput),
    /// Einstein, generalized Einstein, moment-map and nilsoliton audits.
    Check(CheckArgs),
    /// Multi-start search for invariant Einstein metrics.
    Search(SearchArgs),
    /// Exact sign sweep over a rational parameter grid.
    Sweep(SweepArgs),
    /// Run every catalog recipe and compare with the expected verdicts.
    VerifyPaper(VerifyArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpaceInput {
    /// Space JSON: `{name, algebra, isotropy, complement, cartan?}`.
    #[arg(long, conflicts_with = "case")]
    pub space: Option<PathBuf>,
    /// Catalog row instead of a space file.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub params: Vec<i64>,
    /// Metric JSON: `{"gram": [[..]]}` or a bare matrix. Defaults to the first invariant form found.
    #[arg(long)]
    pub metric: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: SpaceInput,
    /// Einstein residual of the metric.
    #[arg(long)]
    pub einstein: bool,
    /// θ-data JSON for the generalized Einstein and moment-map audits.
    #[arg(long)]
    pub structure: Option<PathBuf>,
    #[arg(long, requires = "structure")]
    pub generalized_einstein: bool,
    #[arg(long, requires = "structure")]
    pub moment_map: bool,
    /// Nilsoliton fit on the nilradical of the θ-data, or on the space's algebra with its metric.
    #[arg(long)]
    pub nilsoliton: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub input: SpaceInput,
    #[arg(long, default_value_t = 50)]
    pub starts: usize,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// det-one, trace-n or unit-volume-frame.
    #[arg(long, default_value = "det-one")]
    pub normalization: String,
    /// Search the reduced (a, b, d, e) family of the row instead of all invariant metrics.
    #[arg(long)]
    pub family: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    /// theta-d11 or sl2c-u1-entry.
    pub family: String,
    /// Grid JSON: `{"a": {"min": "1/2", "max": 3, "steps": 22}, ...}`. Defaults to the family's grid.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Claim to certify, e.g. computed_not_both_negative or entry_sign_is_sign_d; exit 1 if some node violates it.
    #[arg(long)]
    pub claim: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Only this catalog row.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub family_members: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 8)]
    pub search_starts: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let policy = match NumericPolicy::from_env() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let policy = match cli.global.tol {
        Some(t) if !(t > 0.0 && t < 1.0) => {
            eprintln!("error: --tol must lie in (0,1)");
            return ExitCode::from(2);
        }
        Some(t) => NumericPolicy { convergence: t, curvature: policy.curvature.max(t), ..policy },
        None => policy,
    };
    install(policy);
    match commands::run(&cli, &policy) {
        Ok(report) => match output::emit(&cli, &policy, &report) {
            Ok(()) => ExitCode::from(report.exit as u8),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
