use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RelationP,
    Margins,
    YaoSim,
    Hamming,
    Lemmas,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RelationP => "relation-p",
            Command::Margins => "margins",
            Command::YaoSim => "yao-sim",
            Command::Hamming => "hamming",
            Command::Lemmas => "lemmas",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HamVariant {
    ParitySketch,
    ClassicalBall,
    QuantumBallFresh,
    QuantumBallCoherent,
}

impl HamVariant {
    pub const ALL: [HamVariant; 4] =
        [HamVariant::ParitySketch, HamVariant::ClassicalBall, HamVariant::QuantumBallFresh, HamVariant::QuantumBallCoherent];

    pub fn name(self) -> &'static str {
        match self {
            HamVariant::ParitySketch => "parity-sketch",
            HamVariant::ClassicalBall => "classical-ball",
            HamVariant::QuantumBallFresh => "quantum-ball-fresh",
            HamVariant::QuantumBallCoherent => "quantum-ball-coherent",
        }
    }

    /// Input length used when `n` is not given.
    pub fn default_n(self) -> usize {
        match self {
            HamVariant::ParitySketch => 32,
            HamVariant::ClassicalBall => 12,
            HamVariant::QuantumBallFresh => 10,
            HamVariant::QuantumBallCoherent => 4,
        }
    }
}

/// Parameters of one run. Every field is optional so that a config file and
/// command-line flags can be layered; [`ExperimentConfig::merge`] lets the
/// flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub n: Option<Vec<usize>>,
    pub d: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    /// Message bits of simulated public-coin tables.
    pub c: Option<Vec<u32>>,
    /// Coin values of simulated public-coin tables.
    pub n_prime: Option<Vec<usize>>,
    pub eps: Option<f64>,
    pub trials: Option<u64>,
    /// Number of random instances (or tables, or state quadruples).
    pub instances: Option<usize>,
    /// Seeded runs of the coherent ball-search demo.
    pub runs: Option<usize>,
    pub variant: Option<Vec<HamVariant>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

macro_rules! layer {
    ($base:ident, $over:ident, $($field:ident),*) => {
        $( if $over.$field.is_some() { $base.$field = $over.$field.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn merge(mut self, over: &ExperimentConfig) -> Self {
        layer!(self, over, command, n, d, k, c, n_prime, eps, trials, instances, runs, variant, seed, out, format);
        self
    }

    pub fn command(&self) -> Result<Command> {
        self.command.context("no experiment selected")
    }

    pub fn seed(&self) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("a seed is required: pass --seed or set `seed` in the config file"),
        }
    }

    pub fn eps(&self) -> Result<f64> {
        let eps = self.eps.unwrap_or(1.0 / 3.0);
        if !(eps > 0.0 && eps < 0.5) {
            bail!("eps must lie in (0, 1/2), got {eps}");
        }
        Ok(eps)
    }

    pub fn trials(&self, default: u64) -> Result<u64> {
        match self.trials.unwrap_or(default) {
            0 => bail!("trials must be positive"),
            t => Ok(t),
        }
    }

    pub fn instances(&self, default: usize) -> Result<usize> {
        match self.instances.unwrap_or(default) {
            0 => bail!("instances must be positive"),
            i => Ok(i),
        }
    }

    pub fn list<T: Clone>(field: &Option<Vec<T>>, default: &[T]) -> Vec<T> {
        field.clone().filter(|v| !v.is_empty()).unwrap_or_else(|| default.to_vec())
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}
