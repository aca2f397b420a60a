mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use ipcmu::formula::ParseError;
use ipcmu::prover::DEFAULT_BUDGET;

/// Fixed-point elimination for intuitionistic propositional μ-calculus.
///
/// Formulas use `T`, `F`, `/\`, `\/`, `->`, `~`, `mu x. …` and `nu x. …`.
#[derive(Debug, Parser)]
#[command(name = "ipcmu", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: Config,
}

#[derive(Debug, Args, Clone)]
pub struct Config {
    /// Print a single JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest poset whose downset algebras are checked.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub max_poset_size: u8,
    /// Node budget for proof search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Seed for the random corpora of `selftest`.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Size of the random corpora of `selftest`.
    #[arg(long, global = true, default_value_t = 500)]
    pub corpus: usize,
    /// Read an input formula from a file; repeatable. File inputs come
    /// before formulas given as arguments.
    #[arg(long, global = true)]
    pub file: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and print a formula with its well-formedness report.
    Parse { formula: Vec<String> },
    /// Eliminate all fixed points.
    Eliminate {
        formula: Vec<String>,
        /// Re-check the result with the semantic oracle and the prover.
        #[arg(long)]
        verify: bool,
    },
    /// Decide equivalence of two formulas with both oracles.
    Equiv { formulas: Vec<String> },
    /// Closure-ordinal bound for `mu x. phi`, with its derivation.
    Bound {
        formula: Vec<String>,
        /// Measure the closure ordinal on every algebra and compare.
        #[arg(long)]
        measure: bool,
    },
    /// Iterate `phi^k(F)` on every algebra and report when it stabilizes.
    Iterate { formula: Vec<String> },
    /// Run every self-test suite.
    Selftest,
}

/// Failures, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("not well formed: {0}")]
    IllFormed(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Budget(ipcmu::prover::ProverError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::IllFormed(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Internal(_) => 5,
            CliError::Usage(_) => 64,
        }
    }
}

/// What a command prints, plus the failure (if any) that decides the exit
/// status after printing.
pub struct Outcome {
    pub text: String,
    pub json: serde_json::Value,
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn ok(text: String, json: serde_json::Value) -> Self {
        Outcome {
            text,
            json,
            failure: None,
        }
    }
}

fn read_inputs(config: &Config, args: &[String]) -> Result<Vec<String>, CliError> {
    let mut inputs = Vec::new();
    for path in &config.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        inputs.push(text);
    }
    inputs.extend(args.iter().cloned());
    Ok(inputs)
}

fn exactly<const N: usize>(inputs: Vec<String>) -> Result<[String; N], CliError> {
    let got = inputs.len();
    inputs
        .try_into()
        .map_err(|_| CliError::Usage(format!("expected {N} formula(s), got {got}")))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = &cli.config;
    match cli.command {
        Command::Parse { formula } => {
            let [f] = exactly(read_inputs(cfg, &formula)?)?;
            commands::parse(cfg, &f)
        }
        Command::Eliminate { formula, verify } => {
            let [f] = exactly(read_inputs(cfg, &formula)?)?;
            commands::eliminate(cfg, &f, verify)
        }
        Command::Equiv { formulas } => {
            let [f, g] = exactly(read_inputs(cfg, &formulas)?)?;
            commands::equiv(cfg, &f, &g)
        }
        Command::Bound { formula, measure } => {
            let [f] = exactly(read_inputs(cfg, &formula)?)?;
            commands::bound(cfg, &f, measure)
        }
        Command::Iterate { formula } => {
            let [f] = exactly(read_inputs(cfg, &formula)?)?;
            commands::iterate(cfg, &f)
        }
        Command::Selftest => commands::selftest(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.config.json;
    let failure = match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            } else {
                print!("{}", out.text);
            }
            out.failure
        }
        Err(e) => {
            if json {
                let err = serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() });
                println!("{err}");
            }
            Some(e)
        }
    };
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
