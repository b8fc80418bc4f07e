use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng as _;

use super::{CostSummary, CostUnit, ExactLimits, Output, OutputDistribution, SmpProtocol};
use crate::bits::BitString;
use crate::seed::Rng;
use crate::{Error, Result};

pub type MessageFn<T> = Arc<dyn Fn(&T, u64, u64) -> BitString + Send + Sync>;
pub type RefereeFn = Arc<dyn Fn(&BitString, &BitString, Option<u64>) -> Output + Send + Sync>;

/// Sizes of the three coin spaces; each coin is uniform on `0..size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoinSpace {
    pub public: u64,
    pub alice_private: u64,
    pub bob_private: u64,
}

impl CoinSpace {
    pub fn public_only(public: u64) -> Self {
        Self { public, alice_private: 1, bob_private: 1 }
    }

    pub fn private_only(alice_private: u64, bob_private: u64) -> Self {
        Self { public: 1, alice_private, bob_private }
    }

    pub fn total(&self) -> u128 {
        self.public as u128 * self.alice_private as u128 * self.bob_private as u128
    }
}

/// Worst-case message lengths in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MessageBudget {
    pub alice_bits: usize,
    pub bob_bits: usize,
}

/// A classical SMP protocol given by its message maps and referee.
///
/// Alice's map sees `(x, public coin, Alice's private coin)` and Bob's map
/// `(y, public coin, Bob's private coin)`. The referee sees both messages and,
/// only when `referee_sees_coin` is set, the public coin.
#[derive(Clone)]
pub struct ClassicalSmpProtocol<X, Y> {
    name: String,
    coins: CoinSpace,
    budget: MessageBudget,
    referee_sees_coin: bool,
    alice: MessageFn<X>,
    bob: MessageFn<Y>,
    referee: RefereeFn,
    layout: String,
}

impl<X, Y> ClassicalSmpProtocol<X, Y> {
    pub fn new(
        name: impl Into<String>,
        coins: CoinSpace,
        budget: MessageBudget,
        alice: MessageFn<X>,
        bob: MessageFn<Y>,
        referee: RefereeFn,
    ) -> Result<Self> {
        if coins.public == 0 || coins.alice_private == 0 || coins.bob_private == 0 {
            return Err(Error::InvalidParameter("coin spaces must be nonempty".into()));
        }
        Ok(Self {
            name: name.into(),
            coins,
            budget,
            referee_sees_coin: false,
            alice,
            bob,
            referee,
            layout: String::new(),
        })
    }

    pub fn with_referee_sees_coin(mut self, sees: bool) -> Self {
        self.referee_sees_coin = sees;
        self
    }

    /// Attaches a description of the message layout for cost reports.
    pub fn with_layout(mut self, layout: impl Into<String>) -> Self {
        self.layout = layout.into();
        self
    }

    pub fn coins(&self) -> CoinSpace {
        self.coins
    }

    pub fn budget(&self) -> MessageBudget {
        self.budget
    }

    pub fn referee_sees_coin(&self) -> bool {
        self.referee_sees_coin
    }

    pub fn cost_bits(&self) -> usize {
        self.budget.alice_bits + self.budget.bob_bits
    }

    pub fn alice_message(&self, x: &X, public: u64, private: u64) -> Result<BitString> {
        let msg = (self.alice)(x, public, private);
        if msg.len() > self.budget.alice_bits {
            return Err(Error::MessageTooLong { len: msg.len(), budget: self.budget.alice_bits });
        }
        Ok(msg)
    }

    pub fn bob_message(&self, y: &Y, public: u64, private: u64) -> Result<BitString> {
        let msg = (self.bob)(y, public, private);
        if msg.len() > self.budget.bob_bits {
            return Err(Error::MessageTooLong { len: msg.len(), budget: self.budget.bob_bits });
        }
        Ok(msg)
    }

    pub fn referee_output(&self, a: &BitString, b: &BitString, public: u64) -> Output {
        (self.referee)(a, b, self.referee_sees_coin.then_some(public))
    }

    /// Runs the protocol with explicit coins.
    pub fn run(&self, x: &X, y: &Y, public: u64, alice_private: u64, bob_private: u64) -> Result<Output> {
        let a = self.alice_message(x, public, alice_private)?;
        let b = self.bob_message(y, public, bob_private)?;
        Ok(self.referee_output(&a, &b, public))
    }
}

impl<X: Sync, Y: Sync> SmpProtocol<X, Y> for ClassicalSmpProtocol<X, Y> {
    fn name(&self) -> &str {
        &self.name
    }

    fn cost_summary(&self) -> CostSummary {
        CostSummary {
            unit: CostUnit::Bits,
            total: self.cost_bits(),
            alice: self.budget.alice_bits,
            bob: self.budget.bob_bits,
            breakdown: self.layout.clone(),
        }
    }

    fn output_distribution(&self, x: &X, y: &Y, limits: &ExactLimits) -> Result<OutputDistribution> {
        let size = self.coins.total();
        if size > limits.max_coin_space {
            return Err(Error::CoinSpaceTooLarge { size, limit: limits.max_coin_space });
        }
        let mut counts: BTreeMap<Output, u64> = BTreeMap::new();
        for r in 0..self.coins.public {
            let alice_msgs = (0..self.coins.alice_private)
                .map(|ra| self.alice_message(x, r, ra))
                .collect::<Result<Vec<_>>>()?;
            let bob_msgs = (0..self.coins.bob_private)
                .map(|rb| self.bob_message(y, r, rb))
                .collect::<Result<Vec<_>>>()?;
            for a in &alice_msgs {
                for b in &bob_msgs {
                    *counts.entry(self.referee_output(a, b, r)).or_insert(0) += 1;
                }
            }
        }
        Ok(OutputDistribution::Counted { outcomes: counts.into_iter().collect(), total: size as u64 })
    }

    fn sample_output(&self, x: &X, y: &Y, rng: &mut Rng) -> Result<Output> {
        let r = rng.gen_range(0..self.coins.public);
        let ra = rng.gen_range(0..self.coins.alice_private);
        let rb = rng.gen_range(0..self.coins.bob_private);
        self.run(x, y, r, ra, rb)
    }
}
