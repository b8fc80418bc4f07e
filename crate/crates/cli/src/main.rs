use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use smplab_cli::{run, Command, ExperimentConfig, Format, HamVariant};

#[derive(Parser)]
#[command(name = "smplab", version, about = "Simultaneous-message protocol experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Index-finding relation: shared-index and grid protocols.
    RelationP(Flags),
    /// Forster bounds against constructed margin realizations.
    Margins(Flags),
    /// Public-coin tables compiled into fingerprint protocols.
    YaoSim(Flags),
    /// Hamming-distance protocols.
    Hamming(Flags),
    /// Zero-error direct-product checks and Holevo examples.
    Lemmas(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML file with default parameters; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Message bits of simulated public-coin tables.
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<u32>>,
    /// Coin values of simulated public-coin tables.
    #[arg(long = "n-prime", value_delimiter = ',')]
    n_prime: Option<Vec<usize>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    /// Runs of the coherent ball-search demo.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    variant: Option<Vec<HamVariant>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Flags {
    fn into_config(self, command: Command) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_toml_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            command: Some(command),
            n: self.n,
            d: self.d,
            k: self.k,
            c: self.c,
            n_prime: self.n_prime,
            eps: self.eps,
            trials: self.trials,
            instances: self.instances,
            runs: self.runs,
            variant: self.variant,
            seed: self.seed,
            out: self.out,
            format: self.format,
        };
        Ok(base.merge(&flags))
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let (command, flags) = match cli.command {
        Sub::RelationP(f) => (Command::RelationP, f),
        Sub::Margins(f) => (Command::Margins, f),
        Sub::YaoSim(f) => (Command::YaoSim, f),
        Sub::Hamming(f) => (Command::Hamming, f),
        Sub::Lemmas(f) => (Command::Lemmas, f),
    };
    let cfg = flags.into_config(command)?;
    let outcome = run(&cfg)?;
    let text = match cfg.format() {
        Format::Csv => outcome.table.to_csv()?,
        Format::Json => outcome.to_json()?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    for check in &outcome.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        eprintln!("{mark} {}: {}", check.name, check.detail);
    }
    Ok(outcome.all_passed())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
