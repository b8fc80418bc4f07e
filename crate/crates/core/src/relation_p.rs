//! The relation "output `(i, x_i, y_i)` with `s_i = 1`".
//!
//! Alice holds `x`, Bob holds `y` and a selector `s` of weight exactly `n/2`.
//! Two classical protocols solve it with one-sided "don't know" failures:
//! sampling shared indices (public coin, `O(log n)` bits per repetition) and
//! intersecting a random row with a random column of the `√n × √n` grid
//! (private coins, `O(√n)` bits per repetition).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{ceil_log2, BitString};
use crate::protocol::{ClassicalSmpProtocol, CoinSpace, Judgement, MessageBudget, Output, ProblemSpec};
use crate::seed::derive_rng;
use crate::{Error, Result};

/// An instance `(x, (y, s))` with `|s| = n/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationPInstance {
    x: BitString,
    y: BitString,
    s: BitString,
}

/// Bob's half of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BobInput {
    pub y: BitString,
    pub s: BitString,
}

impl RelationPInstance {
    pub fn new(x: BitString, y: BitString, s: BitString) -> Result<Self> {
        let n = x.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("n = {n} must be even and positive")));
        }
        if y.len() != n || s.len() != n {
            return Err(Error::DimensionMismatch(n, if y.len() != n { y.len() } else { s.len() }));
        }
        if s.weight() != n / 2 {
            return Err(Error::InvariantViolation(format!("|s| = {} but n/2 = {}", s.weight(), n / 2)));
        }
        Ok(Self { x, y, s })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitString {
        &self.x
    }

    pub fn y(&self) -> &BitString {
        &self.y
    }

    pub fn s(&self) -> &BitString {
        &self.s
    }

    pub fn bob_input(&self) -> BobInput {
        BobInput { y: self.y.clone(), s: self.s.clone() }
    }

    /// `(x, (y, s))` in the shape the evaluators take.
    pub fn split(&self) -> (BitString, BobInput) {
        (self.x.clone(), self.bob_input())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&InstanceJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: InstanceJson = serde_json::from_str(s)?;
        Self::new(
            BitString::from_hex(&raw.x, raw.n)?,
            BitString::from_hex(&raw.y, raw.n)?,
            BitString::from_hex(&raw.s, raw.n)?,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    n: usize,
    x: String,
    y: String,
    s: String,
}

impl From<&RelationPInstance> for InstanceJson {
    fn from(i: &RelationPInstance) -> Self {
        Self { n: i.n(), x: i.x.to_hex(), y: i.y.to_hex(), s: i.s.to_hex() }
    }
}

/// Valid iff `out = (i, x_i, y_i)` with `s_i = 1`.
pub fn judge_p(x: &BitString, bob: &BobInput, out: &Output) -> Judgement {
    match *out {
        Output::DontKnow => Judgement::DontKnow,
        Output::Triple { index, x_bit, y_bit } => {
            if index < x.len() && bob.s.get(index) && x.get(index) == x_bit && bob.y.get(index) == y_bit {
                Judgement::Valid
            } else {
                Judgement::Invalid
            }
        }
        Output::Bit(_) => Judgement::Invalid,
    }
}

pub fn problem_p(dont_know_budget: f64) -> Result<ProblemSpec<BitString, BobInput>> {
    ProblemSpec::new("relation-p", dont_know_budget, Arc::new(judge_p))
}

/// Decodes coin `r ∈ [n]^k` into its `k` base-`n` digits, least significant first.
fn sampled_indices(mut coin: u64, n: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let i = (coin % n as u64) as usize;
            coin /= n as u64;
            i
        })
        .collect()
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n = {n} must be even and at least 2")));
    }
    Ok(())
}

fn coin_count(n: usize, k: usize) -> Result<u64> {
    (n as u64)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("coin space n^k = {n}^{k} overflows")))
}

/// Shared-index protocol: for `k` public indices `i`, Alice sends `(i, x_i)`
/// and Bob `(i, y_i, s_i)`. The referee does not see the coin.
pub fn public_coin_protocol_p(n: usize, k: usize) -> Result<ClassicalSmpProtocol<BitString, BobInput>> {
    check_even(n)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let w = ceil_log2(n as u128);
    let alice = Arc::new(move |x: &BitString, r: u64, _: u64| {
        let mut msg = BitString::new();
        for i in sampled_indices(r, n, k) {
            msg.push_uint(i as u128, w);
            msg.push(x.get(i));
        }
        msg
    });
    let bob = Arc::new(move |b: &BobInput, r: u64, _: u64| {
        let mut msg = BitString::new();
        for i in sampled_indices(r, n, k) {
            msg.push_uint(i as u128, w);
            msg.push(b.y.get(i));
            msg.push(b.s.get(i));
        }
        msg
    });
    let referee = Arc::new(move |a: &BitString, b: &BitString, _: Option<u64>| {
        (0..k)
            .find_map(|j| {
                let (ao, bo) = (j * (w + 1), j * (w + 2));
                let s_bit = b.get(bo + w + 1);
                s_bit.then(|| Output::Triple {
                    index: b.read_uint(bo, w) as usize,
                    x_bit: a.get(ao + w),
                    y_bit: b.get(bo + w),
                })
            })
            .unwrap_or(Output::DontKnow)
    });
    Ok(ClassicalSmpProtocol::new(
        format!("public-coin(n={n},k={k})"),
        CoinSpace::public_only(coin_count(n, k)?),
        MessageBudget { alice_bits: k * (w + 1), bob_bits: k * (w + 2) },
        alice,
        bob,
        referee,
    )?
    .with_layout(format!("{k} x [index:{w} x_i:1] + {k} x [index:{w} y_i:1 s_i:1]")))
}

/// Variant in which the referee also sees the public coin, so no indices are sent.
pub fn public_coin_protocol_p_referee_sees_coin(
    n: usize,
    k: usize,
) -> Result<ClassicalSmpProtocol<BitString, BobInput>> {
    check_even(n)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let alice = Arc::new(move |x: &BitString, r: u64, _: u64| {
        sampled_indices(r, n, k).into_iter().map(|i| x.get(i)).collect::<BitString>()
    });
    let bob = Arc::new(move |b: &BobInput, r: u64, _: u64| {
        let mut msg = BitString::new();
        for i in sampled_indices(r, n, k) {
            msg.push(b.y.get(i));
            msg.push(b.s.get(i));
        }
        msg
    });
    let referee = Arc::new(move |a: &BitString, b: &BitString, coin: Option<u64>| {
        let Some(r) = coin else { return Output::DontKnow };
        sampled_indices(r, n, k)
            .into_iter()
            .enumerate()
            .find(|&(j, _)| b.get(2 * j + 1))
            .map(|(j, i)| Output::Triple { index: i, x_bit: a.get(j), y_bit: b.get(2 * j) })
            .unwrap_or(Output::DontKnow)
    });
    Ok(ClassicalSmpProtocol::new(
        format!("public-coin-referee-sees(n={n},k={k})"),
        CoinSpace::public_only(coin_count(n, k)?),
        MessageBudget { alice_bits: k, bob_bits: 2 * k },
        alice,
        bob,
        referee,
    )?
    .with_referee_sees_coin(true)
    .with_layout(format!("{k} x [x_i:1] + {k} x [y_i:1 s_i:1]")))
}

/// Side length of the grid if `n` is a perfect square.
pub fn grid_side(n: usize) -> Option<usize> {
    let side = (n as f64).sqrt().round() as usize;
    (side * side == n).then_some(side)
}

/// Grid protocol: per repetition Alice sends a random row of `x` (row-major
/// layout, `i = row · √n + col`) with its index, Bob a random column of `y`
/// and of `s` with its index. The referee reads the intersection.
pub fn grid_protocol_p(n: usize, k: usize) -> Result<ClassicalSmpProtocol<BitString, BobInput>> {
    check_even(n)?;
    let side = grid_side(n).ok_or_else(|| Error::InvalidParameter(format!("n = {n} is not a perfect square")))?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let w = ceil_log2(side as u128);
    let alice = Arc::new(move |x: &BitString, _: u64, ra: u64| {
        let mut msg = BitString::new();
        for row in sampled_indices(ra, side, k) {
            msg.push_uint(row as u128, w);
            for col in 0..side {
                msg.push(x.get(row * side + col));
            }
        }
        msg
    });
    let bob = Arc::new(move |b: &BobInput, _: u64, rb: u64| {
        let mut msg = BitString::new();
        for col in sampled_indices(rb, side, k) {
            msg.push_uint(col as u128, w);
            for row in 0..side {
                msg.push(b.y.get(row * side + col));
            }
            for row in 0..side {
                msg.push(b.s.get(row * side + col));
            }
        }
        msg
    });
    let referee = Arc::new(move |a: &BitString, b: &BitString, _: Option<u64>| {
        (0..k)
            .find_map(|j| {
                let ao = j * (w + side);
                let bo = j * (w + 2 * side);
                let row = a.read_uint(ao, w) as usize;
                let col = b.read_uint(bo, w) as usize;
                b.get(bo + w + side + row).then(|| Output::Triple {
                    index: row * side + col,
                    x_bit: a.get(ao + w + col),
                    y_bit: b.get(bo + w + row),
                })
            })
            .unwrap_or(Output::DontKnow)
    });
    let per_side = coin_count(side, k)?;
    Ok(ClassicalSmpProtocol::new(
        format!("grid(n={n},k={k})"),
        CoinSpace::private_only(per_side, per_side),
        MessageBudget { alice_bits: k * (side + w), bob_bits: k * (2 * side + w) },
        alice,
        bob,
        referee,
    )?
    .with_layout(format!("{k} x [row:{w} x-row:{side}] + {k} x [col:{w} y-col:{side} s-col:{side}]")))
}

/// Uniform `x`, `y`; `s` uniform over weight-`n/2` strings via a partial Fisher–Yates shuffle.
pub fn random_instance_p(n: usize, seed: u64) -> Result<RelationPInstance> {
    check_even(n)?;
    let mut rng = derive_rng(seed, &["relation-p-instance".into(), n.into()]);
    random_instance_with(n, &mut rng)
}

pub fn random_instance_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RelationPInstance> {
    check_even(n)?;
    let x: BitString = (0..n).map(|_| rng.gen::<bool>()).collect();
    let y: BitString = (0..n).map(|_| rng.gen::<bool>()).collect();
    let mut positions: Vec<usize> = (0..n).collect();
    let (chosen, _) = positions.partial_shuffle(rng, n / 2);
    let mut s = BitString::zeros(n);
    for &i in chosen.iter() {
        s.set(i, true);
    }
    RelationPInstance::new(x, y, s)
}
