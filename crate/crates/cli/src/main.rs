mod commands;
mod output;
mod params;
mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_core::opnorm::DEFAULT_SEED;

use crate::output::Report;
use crate::params::{Format, SpaceArg, UsageError, WeightArg};

/// Reproducible tables and verification reports for convolution operators,
/// interpolation constants and outer functions on the circle.
#[derive(Debug, Parser)]
#[command(name = "hardy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Random starts on top of the deterministic ones.
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// Seed for all random starts.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Norm of `I − K_n` on the analytic subspace (or the full grid with `--space lp`).
    Problem1,
    /// Norm of the backward shift on the analytic subspace.
    Problem2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Convolution,
    TwoSided,
    Monotone,
    Orlicz,
    Lorentz,
    Outer,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of C_p, 2^{|1-2/p|}, γ_{p,q}, C_{p,q} and Λ_{p,q}.
    Constants {
        /// Values or ranges `start:stop:step`, comma separated.
        #[arg(long, default_value = "1:4:0.1")]
        p: String,
        #[arg(long)]
        q: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate of ‖I − C_K‖ with its analytic bracket.
    Opnorm {
        #[arg(long, default_value = "fejer:0")]
        kernel: String,
        #[arg(long, value_enum, default_value_t = SpaceArg::Lp)]
        space: SpaceArg,
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(short = 'N', long = "grid-size", default_value_t = 1024)]
        grid_size: usize,
        /// Polynomial degree of the analytic subspace (`--space hp`).
        #[arg(short = 'd', long, default_value_t = 32)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Parameter sweep over p, n and d with a d-versus-2d convergence column.
    Sweep {
        #[arg(value_enum)]
        problem: Problem,
        #[arg(long, default_value = "fejer:0,1,2,4")]
        kernel: String,
        #[arg(long, value_enum, default_value_t = SpaceArg::Hp)]
        space: SpaceArg,
        #[arg(long, default_value = "1.5,2,3,4")]
        p: String,
        #[arg(short = 'N', long = "grid-size", default_value_t = 1024)]
        grid_size: usize,
        #[arg(short = 'd', long, default_value = "8,16")]
        degree: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run an invariant suite; exits with 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(short = 'N', long = "grid-size")]
        grid_size: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare ‖W f‖, ‖w f‖ and ‖f‖_{X(w)} for random analytic f.
    OuterCheck {
        /// `exp-cos` or `arc:<eps>`.
        #[arg(long, default_value = "exp-cos")]
        weight: WeightArg,
        #[arg(long, default_value = "1,2,4")]
        p: String,
        #[arg(short = 'N', long = "grid-size", default_value_t = 2048)]
        grid_size: usize,
        /// Degree of the random test polynomials.
        #[arg(short = 'd', long, default_value_t = 16)]
        degree: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
}

pub enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<hardy_core::Error> for Failure {
    fn from(e: hardy_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(cli: Cli) -> Result<(Report, Common), Failure> {
    Ok(match cli.command {
        Command::Constants { p, q, common } => (commands::constants(&p, q.as_deref(), &common)?, common),
        Command::Opnorm {
            kernel,
            space,
            p,
            grid_size,
            degree,
            common,
        } => (commands::opnorm(&kernel, space, &p, grid_size, degree, &common)?, common),
        Command::Sweep {
            problem,
            kernel,
            space,
            p,
            grid_size,
            degree,
            common,
        } => (commands::sweep(problem, &kernel, space, &p, grid_size, &degree, &common)?, common),
        Command::Verify {
            suite,
            grid_size,
            common,
        } => (verify::run(suite, grid_size, &common)?, common),
        Command::OuterCheck {
            weight,
            p,
            grid_size,
            degree,
            trials,
            common,
        } => (commands::outer_check(weight, &p, grid_size, degree, trials, &common)?, common),
    })
}

fn emit(report: &Report, common: &Common) -> std::io::Result<()> {
    match &common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(common.format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write(common.format, &mut lock)?;
            lock.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, common) = match run(cli) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &common) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(2);
    }
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!("check failed: {} (residual {:e} > {:e}) {}", c.name, c.residual, c.tolerance, c.detail);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
