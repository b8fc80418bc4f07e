//! Simultaneous-message-passing protocols and their evaluation.
//!
//! A protocol maps Alice's input and Bob's input (plus coins) to messages and
//! lets a referee turn the two messages into an [`Output`]. A [`ProblemSpec`]
//! judges outputs. Evaluation is either exact (coin enumeration for classical
//! protocols, closed-form outcome laws for quantum ones) or seeded
//! Monte-Carlo.

mod classical;
mod eval;
mod quantum;
mod report;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use classical::{ClassicalSmpProtocol, CoinSpace, MessageBudget};
pub use eval::{evaluate_exact, evaluate_monte_carlo, three_sigma, ExactLimits, DEFAULT_COIN_LIMIT, MC_CHUNK};
pub use quantum::{BallSearchReferee, BallVariant, QuantumReferee, QuantumSmpProtocol};
pub(crate) use quantum::apply_phase_mask;
pub use report::{EvaluationMethod, EvaluationReport, ExactCounts, InputReport};

use crate::seed::Rng;
use crate::Result;

/// A referee's output token.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Output {
    DontKnow,
    /// Value of a Boolean function.
    Bit(bool),
    /// `(i, x_i, y_i)` for relational problems.
    Triple { index: usize, x_bit: bool, y_bit: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Judgement {
    Valid,
    DontKnow,
    Invalid,
}

pub type JudgeFn<X, Y> = Arc<dyn Fn(&X, &Y, &Output) -> Judgement + Send + Sync>;

/// What counts as a correct answer, and how much "don't know" is tolerated.
#[derive(Clone)]
pub struct ProblemSpec<X, Y> {
    pub name: String,
    judge: JudgeFn<X, Y>,
    pub dont_know_budget: f64,
}

impl<X, Y> ProblemSpec<X, Y> {
    pub fn new(name: impl Into<String>, dont_know_budget: f64, judge: JudgeFn<X, Y>) -> Result<Self> {
        if !(0.0..=0.5).contains(&dont_know_budget) {
            return Err(crate::Error::InvalidParameter(format!(
                "dont-know budget {dont_know_budget} outside [0, 1/2]"
            )));
        }
        Ok(Self { name: name.into(), judge, dont_know_budget })
    }

    /// Boolean function `f`: `Bit(f(x, y))` is valid, `DontKnow` is tolerated, all else invalid.
    pub fn boolean<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&X, &Y) -> bool + Send + Sync + 'static,
    {
        let judge = Arc::new(move |x: &X, y: &Y, out: &Output| match out {
            Output::Bit(b) if *b == f(x, y) => Judgement::Valid,
            Output::DontKnow => Judgement::DontKnow,
            _ => Judgement::Invalid,
        });
        Self { name: name.into(), judge, dont_know_budget: 0.0 }
    }

    pub fn judge(&self, x: &X, y: &Y, out: &Output) -> Judgement {
        (self.judge)(x, y, out)
    }
}

/// Exact law of the referee's output on one input.
#[derive(Clone, Debug, PartialEq)]
pub enum OutputDistribution {
    /// Each output with the number of coin settings producing it.
    Counted { outcomes: Vec<(Output, u64)>, total: u64 },
    /// Each output with its probability.
    Weighted(Vec<(Output, f64)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CostUnit {
    Bits,
    Qubits,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostSummary {
    pub unit: CostUnit,
    pub total: usize,
    pub alice: usize,
    pub bob: usize,
    /// Human-readable breakdown of the message layout.
    pub breakdown: String,
}

/// Common interface of classical and quantum protocols.
pub trait SmpProtocol<X, Y>: Sync {
    fn name(&self) -> &str;

    fn cost_summary(&self) -> CostSummary;

    fn output_distribution(&self, x: &X, y: &Y, limits: &ExactLimits) -> Result<OutputDistribution>;

    /// Runs the protocol once with fresh randomness from `rng`.
    fn sample_output(&self, x: &X, y: &Y, rng: &mut Rng) -> Result<Output>;
}

pub fn cost_summary<X, Y, P: SmpProtocol<X, Y> + ?Sized>(p: &P) -> CostSummary {
    p.cost_summary()
}
