//! `schroedsym`: verification suites, transformation demos and reports.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration, usage and I/O errors.

mod config;
mod demo;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Overrides};
use demo::ElementChoice;
use schroedsym::suite::{self, ReportFormat, SuiteReport, Target};

#[derive(Parser, Debug)]
#[command(
    name = "schroedsym",
    version,
    about = "Symmetry checks for Schrödinger and diffusion equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite.
    Verify {
        /// group, coords, multiplier, solutions, residual, liealg or all
        target: String,
        #[command(flatten)]
        run: RunArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep wall times in json output (zeroed otherwise).
        #[arg(long)]
        timing: bool,
    },
    /// Sample a transformed solution and its residual on a grid.
    DemoTransform {
        #[command(flatten)]
        run: RunArgs,
        /// f1, f2, g1, g3, gaussian, theta, or fixture (the --family fixture)
        #[arg(long, default_value = "f1")]
        solution: String,
        /// identity, random, or c,d,a,b,mu,nu
        #[arg(long, default_value = "random")]
        element: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render a json report; exits 1 if it holds a failing check.
    Report {
        input: PathBuf,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// key = value file; flags win over its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Tolerance for residual-class checks.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    /// text or json
    #[arg(long)]
    format: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> Result<schroedsym::RunConfig, ConfigError> {
        let file = match &self.config {
            Some(p) => Overrides::load(p)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            family: self.family.clone(),
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            omega: self.omega,
            n: self.n,
            seed: self.seed,
            trials: self.trials,
            tol: self.tol,
            nt: self.nt,
            nx: self.nx,
            format: self.format.clone(),
        };
        flags.over(file).into_config()
    }
}

enum Failure {
    Config(anyhow::Error),
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify {
            target,
            run,
            out,
            timing,
        } => {
            let cfg = run.resolve().context("config error")?;
            let target: Target = target.parse().context("config error")?;
            let report = suite::run(target, &cfg).context("config error")?;
            emit(&report.render(cfg.format, timing), out.as_deref())?;
            if !report.passed() {
                return Err(Failure::Checks);
            }
        }
        Command::DemoTransform {
            run,
            solution,
            element,
            out,
        } => {
            let cfg = run.resolve().context("config error")?;
            let choice: ElementChoice = element.parse().context("config error")?;
            let (records, worst) =
                demo::demo_transform(&cfg, &choice, &solution).context("demo-transform")?;
            emit(&records, Some(&out))?;
            eprintln!("worst relative residual {worst:.3e}");
            if worst > cfg.tol.unwrap_or(1e-9) {
                return Err(Failure::Checks);
            }
        }
        Command::Report { input, format, out } => {
            let format: ReportFormat = format.parse().context("config error")?;
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let report = SuiteReport::from_json(&text).context("report")?;
            emit(&report.render(format, true), out.as_deref())?;
            if !report.passed() {
                for c in report.failures() {
                    eprintln!("FAILED {}", c.name);
                }
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
