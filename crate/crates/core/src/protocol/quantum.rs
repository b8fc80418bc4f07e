use std::sync::Arc;

use rand::Rng as _;
use serde::Serialize;

use super::{CostSummary, CostUnit, ExactLimits, Output, OutputDistribution, SmpProtocol};
use crate::binomial::tail_at_least;
use crate::bits::ceil_log2;
use crate::quantum::{swap_test, PureState};
use crate::seed::Rng;
use crate::{Error, Result};

pub type StateFn<T> = Arc<dyn Fn(&T) -> PureState + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BallVariant {
    /// Every candidate is tested on its own `K` copy-pairs.
    FreshCopies,
    /// One set of `K` copy-pairs is measured for every candidate in turn.
    CoherentReuse,
}

/// Referee that searches the Hamming ball around Alice's input.
///
/// Candidate `e` is tested by flipping the signs given by `E(e)` on Alice's
/// fingerprint and running `K` swap tests against Bob's fingerprint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallSearchReferee {
    /// `E(e)` for each candidate `e`, bit `i` of the mask is coordinate `i`.
    pub candidate_phases: Vec<u128>,
    pub copies_per_candidate: usize,
    /// Number of symmetric swap outcomes (out of `K`) that make a candidate pass.
    pub pass_threshold: usize,
    pub variant: BallVariant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum QuantumReferee {
    /// Accept iff at least `min_zero_outcomes` of the `r` swap tests give 0.
    SwapThreshold { min_zero_outcomes: usize },
    BallSearch(BallSearchReferee),
}

impl QuantumReferee {
    fn label(&self) -> &'static str {
        match self {
            QuantumReferee::SwapThreshold { .. } => "swap-threshold",
            QuantumReferee::BallSearch(b) => match b.variant {
                BallVariant::FreshCopies => "ball-search/fresh-copies",
                BallVariant::CoherentReuse => "ball-search/coherent-reuse",
            },
        }
    }
}

/// A quantum SMP protocol: Alice and Bob each send `copies` copies of a pure
/// state of dimension `dim`.
#[derive(Clone)]
pub struct QuantumSmpProtocol<X, Y> {
    name: String,
    dim: usize,
    copies: usize,
    alice: StateFn<X>,
    bob: StateFn<Y>,
    referee: QuantumReferee,
}

impl<X, Y> QuantumSmpProtocol<X, Y> {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        copies: usize,
        alice: StateFn<X>,
        bob: StateFn<Y>,
        referee: QuantumReferee,
    ) -> Result<Self> {
        if dim == 0 || copies == 0 {
            return Err(Error::InvalidParameter("dimension and copies must be positive".into()));
        }
        Ok(Self { name: name.into(), dim, copies, alice, bob, referee })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn referee(&self) -> &QuantumReferee {
        &self.referee
    }

    pub fn qubits_per_copy(&self) -> usize {
        ceil_log2(self.dim as u128)
    }

    /// `2 · r · ceil(log2 dim)`.
    pub fn cost_qubits(&self) -> usize {
        2 * self.copies * self.qubits_per_copy()
    }

    pub fn alice_state(&self, x: &X) -> Result<PureState> {
        self.checked((self.alice)(x))
    }

    pub fn bob_state(&self, y: &Y) -> Result<PureState> {
        self.checked((self.bob)(y))
    }

    fn checked(&self, s: PureState) -> Result<PureState> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, s.dim()));
        }
        Ok(s)
    }

    /// Exact probability of `Bit(true)` when a closed form exists.
    pub fn accept_probability(&self, x: &X, y: &Y) -> Result<f64> {
        let a = self.alice_state(x)?;
        let b = self.bob_state(y)?;
        match &self.referee {
            QuantumReferee::SwapThreshold { min_zero_outcomes } => {
                Ok(tail_at_least(self.copies, swap_test(&a, &b)?, *min_zero_outcomes))
            }
            QuantumReferee::BallSearch(ball) => match ball.variant {
                BallVariant::FreshCopies => {
                    let mut reject = 1.0;
                    for &mask in &ball.candidate_phases {
                        let s = swap_test(&apply_phase_mask(&a, mask), &b)?;
                        reject *= 1.0 - tail_at_least(ball.copies_per_candidate, s, ball.pass_threshold);
                    }
                    Ok(1.0 - reject)
                }
                BallVariant::CoherentReuse => Err(Error::NoClosedForm(self.referee.label().into())),
            },
        }
    }
}

/// Multiplies amplitude `i` by `(-1)^{bit i of mask}`.
pub(crate) fn apply_phase_mask(state: &PureState, mask: u128) -> PureState {
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| if (mask >> i) & 1 == 1 { -a } else { a })
        .collect();
    PureState::new(amps).expect("sign flips preserve the norm")
}

impl<X: Sync, Y: Sync> SmpProtocol<X, Y> for QuantumSmpProtocol<X, Y> {
    fn name(&self) -> &str {
        &self.name
    }

    fn cost_summary(&self) -> CostSummary {
        let per_party = self.copies * self.qubits_per_copy();
        CostSummary {
            unit: CostUnit::Qubits,
            total: self.cost_qubits(),
            alice: per_party,
            bob: per_party,
            breakdown: format!(
                "{} copies x {} qubits (dim {}) per party, referee {}",
                self.copies,
                self.qubits_per_copy(),
                self.dim,
                self.referee.label()
            ),
        }
    }

    fn output_distribution(&self, x: &X, y: &Y, _limits: &ExactLimits) -> Result<OutputDistribution> {
        let p = self.accept_probability(x, y)?;
        Ok(OutputDistribution::Weighted(vec![(Output::Bit(true), p), (Output::Bit(false), 1.0 - p)]))
    }

    fn sample_output(&self, x: &X, y: &Y, rng: &mut Rng) -> Result<Output> {
        let a = self.alice_state(x)?;
        let b = self.bob_state(y)?;
        let accept = match &self.referee {
            QuantumReferee::SwapThreshold { min_zero_outcomes } => {
                let p0 = swap_test(&a, &b)?;
                let zeros = (0..self.copies).filter(|_| rng.gen::<f64>() < p0).count();
                zeros >= *min_zero_outcomes
            }
            QuantumReferee::BallSearch(ball) => match ball.variant {
                BallVariant::FreshCopies => {
                    let mut accepted = false;
                    for &mask in &ball.candidate_phases {
                        let s = swap_test(&apply_phase_mask(&a, mask), &b)?;
                        // every candidate consumes its own copies, even after an accept
                        let sym = (0..ball.copies_per_candidate).filter(|_| rng.gen::<f64>() < s).count();
                        accepted |= sym >= ball.pass_threshold;
                    }
                    accepted
                }
                BallVariant::CoherentReuse => {
                    crate::hamming::coherent::simulate(&a, &b, ball, rng)?.accepted
                }
            },
        };
        Ok(Output::Bit(accept))
    }
}
