//! `gplab` — experiment runner for Gaussian-prime counts over sparse sets
//! of imaginary parts, main-term predictions, exceptional-zero bias
//! corrections, and the lemma-check batteries backing them.
//!
//! Every run is described by a TOML config (or built-in defaults) plus a
//! handful of command-line overrides; reports come out as aligned text on
//! stdout and a stable-schema JSON document.

mod commands;
mod config;
mod report;
mod suites;

use clap::{Args, Parser, Subcommand};
use config::{CommandKind, ExperimentConfig};

#[derive(Debug)]
pub enum CliError {
    /// Config or usage problem: exit 2 before any experiment runs.
    Schema(String),
    /// Failure while executing a valid experiment: exit 1.
    Run(String),
}

#[derive(Parser)]
#[command(
    name = "gplab",
    version,
    about = "Gaussian-prime counting experiments over sparse imaginary parts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML experiment config; defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<std::path::PathBuf>,
    /// Norm bound X (pairs with a² + b² ≤ X)
    #[arg(long)]
    x: Option<u64>,
    /// Set description, e.g. "all:1..100", "primes:1..1000", "multiples:q=7:1..500"
    #[arg(long)]
    set: Option<String>,
    /// Seed for every random choice in the run
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = library default)
    #[arg(long)]
    workers: Option<usize>,
    /// Write the JSON report to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Count pairs (a,b), b in the set, a²+b² ≤ X, with unit or Λ weight
    Count(CommonArgs),
    /// Evaluate the ω-weighted main-term prediction
    Predict(CommonArgs),
    /// Run observed count and prediction side by side
    Compare(CommonArgs),
    /// Compare with quasi-explicit zero corrections from a zero file
    Bias(CommonArgs),
    /// Run a module's full lemma-check battery
    #[command(name = "verify-lemma")]
    VerifyLemma {
        /// Battery to run: characters, analysis, density, or bilinear
        suite: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Brute-force vs reconstructed congruence correlation count
    Correlation(CommonArgs),
    /// Möbius balance statistic over rough Gaussian integers
    Balance(CommonArgs),
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::Count(_) => CommandKind::Count,
            Command::Predict(_) => CommandKind::Predict,
            Command::Compare(_) => CommandKind::Compare,
            Command::Bias(_) => CommandKind::Bias,
            Command::VerifyLemma { .. } => CommandKind::VerifyLemma,
            Command::Correlation(_) => CommandKind::Correlation,
            Command::Balance(_) => CommandKind::Balance,
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Count(c)
            | Command::Predict(c)
            | Command::Compare(c)
            | Command::Bias(c)
            | Command::Correlation(c)
            | Command::Balance(c) => c,
            Command::VerifyLemma { common, .. } => common,
        }
    }
}

fn build_config(cmd: &Command) -> Result<ExperimentConfig, CliError> {
    let common = cmd.common();
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(x) = common.x {
        cfg.x = Some(x);
    }
    if let Some(dsl) = &common.set {
        cfg.set = Some(config::parse_set_dsl(dsl)?);
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = common.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.clone());
    }
    if let Command::VerifyLemma { suite, .. } = cmd {
        if let Some(s) = suite {
            cfg.suite = Some(s.clone());
        }
    }
    if cfg.command.is_none() {
        cfg.command = Some(cmd.kind().name().to_string());
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<usize, CliError> {
    let kind = cli.command.kind();
    let cfg = build_config(&cli.command)?;
    let output = commands::execute(kind, &cfg)?;
    print!("{}", output.text);
    let json = report::to_json_bytes(&output.envelope);
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &json)
            .map_err(|e| CliError::Run(format!("writing {path}: {e}")))?,
        None => {
            println!();
            print!("{}", String::from_utf8_lossy(&json));
        }
    }
    Ok(output.failed_checks)
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(0) => 0,
        Ok(failed) => {
            eprintln!("{failed} check(s) failed");
            1
        }
        Err(CliError::Schema(msg)) => {
            eprintln!("config error: {msg}");
            2
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    };
    std::process::exit(code);
}
