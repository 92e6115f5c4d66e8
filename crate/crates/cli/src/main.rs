//! `toricverify`: batch driver for the verification pipeline.
//!
//! Exit status is `0` when every check passes, `1` on a verification
//! failure, and `2` on an input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toric_core::config::{parse_precision, ConfigError, Level, Overrides, PipelineConfig};
use toric_core::pipeline::{self, PipelineError};
use toric_core::suite;

#[derive(Parser, Debug)]
#[command(name = "toricverify", version, about = "Exact checks for toric superpotentials and their Floer deformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pipeline configuration or bare toric document (JSON or TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Novikov precision as `p/q`.
    #[arg(long, global = true)]
    precision: Option<String>,
    #[arg(long, global = true, value_parser = ["quick", "full"])]
    level: Option<String>,
    /// Directory for cached Groebner bases.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Print the superpotential.
    Potential,
    /// Groebner basis and standard monomials of the Jacobian ring.
    Jacobian,
    /// Generalised eigensummands with their Floer checks.
    Summands,
    /// Run the acceptance battery.
    Verify,
    /// Pearl-model counts against the closed forms.
    PearlOracle,
    /// Full JSON verification report.
    Report,
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Input(format!("config: {e}"))
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.exit_code() == 2 {
            Failure::Input(e.to_string())
        } else {
            Failure::Verification(e.to_string())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

fn load(cli: &Cli) -> Result<PipelineConfig, Failure> {
    let path = cli.config.as_deref().ok_or_else(|| Failure::Input("--config is required".into()))?;
    let overrides = overrides(cli)?;
    let config = PipelineConfig::load(path, &overrides)?;
    log::info!("seed {}", config.seed);
    Ok(config)
}

fn overrides(cli: &Cli) -> Result<Overrides, Failure> {
    if let Some(p) = &cli.precision {
        parse_precision(p)?;
    }
    Ok(Overrides {
        seed: cli.seed,
        precision: cli.precision.clone(),
        level: cli.level.as_deref().map(str::parse).transpose()?,
        cache: cli.cache.clone(),
    })
}

fn check(passed: bool, what: &str) -> Result<(), Failure> {
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{what} failed")))
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Potential => emit(out, &(pipeline::potential_text(&load(cli)?)? + "\n")),
        Command::Jacobian => emit(out, &json(&pipeline::jacobian_only(&load(cli)?)?)),
        Command::Summands => {
            let report = pipeline::run_pipeline(&load(cli)?)?;
            emit(out, &json(&report.summands))?;
            check(report.summands.iter().all(|s| s.passed), "summand checks")
        }
        Command::PearlOracle => {
            let report = pipeline::run_pipeline(&load(cli)?)?;
            emit(out, &json(&report.pearl))?;
            check(report.pearl.as_ref().is_some_and(|p| p.passed), "pearl oracle")
        }
        Command::Report => {
            let report = pipeline::run_pipeline(&load(cli)?)?;
            emit(out, &report.to_json())?;
            check(report.passed, "verification")
        }
        Command::Verify => {
            let o = overrides(cli)?;
            let level = o.level.unwrap_or(Level::Quick);
            let seed = o.seed.unwrap_or(0);
            log::info!("seed {seed}");
            let summary = suite::verify_suite(level, seed);
            for c in &summary.criteria {
                eprintln!("{}", c.line());
            }
            if let Some(p) = out {
                emit(Some(p), &json(&summary))?;
            }
            check(summary.passed, "acceptance battery")
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
