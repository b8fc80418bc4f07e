use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{ham_predicate, HamInstance};
use crate::binomial::{tail_at_least, tail_at_most};
use crate::bits::BitString;
use crate::geometry::{DomainPair, ThresholdEmbedding};
use crate::protocol::{ClassicalSmpProtocol, CoinSpace, MessageBudget, Output};
use crate::seed::{derive_rng, Label};
use crate::{Error, Result};

const MAX_INPUT_BITS: usize = 128;

/// Parameters of the random-parity sketch for `HAM^(d)_n`.
///
/// Each public coin `r` selects `m_sketch` subsets `T_1 … T_m` of the
/// coordinates, every coordinate included independently with probability
/// `p_include`. The subsets for coin `r` are a deterministic function of
/// `(seed, r)`; [`ParitySketchParams::subsets`] reproduces them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParitySketchParams {
    pub n: usize,
    pub d: usize,
    pub m_sketch: usize,
    pub p_include: f64,
    /// Accept iff at most this fraction of sketch bits disagree.
    pub threshold_ratio: f64,
    /// `floor(threshold_ratio · m_sketch)`.
    pub max_disagreements: usize,
    pub seed: u64,
}

impl ParitySketchParams {
    /// `q(Δ) = (1 - (1 - 2p)^Δ) / 2`, the chance one sketch bit disagrees at distance `Δ`.
    pub fn disagreement(&self, delta: usize) -> f64 {
        disagreement(self.p_include, delta)
    }

    pub fn accept_probability(&self, delta: usize) -> f64 {
        tail_at_most(self.m_sketch, self.disagreement(delta), self.max_disagreements)
    }

    /// Exact error at distance `Δ`: rejection when `Δ <= d`, acceptance otherwise.
    pub fn error_at(&self, delta: usize) -> f64 {
        if delta <= self.d {
            tail_at_least(self.m_sketch, self.disagreement(delta), self.max_disagreements + 1)
        } else {
            self.accept_probability(delta)
        }
    }

    /// Coordinate subsets for public coin `coin`, as masks over the `n` input bits.
    pub fn subsets(&self, coin: u64) -> Vec<u128> {
        let lanes = self.lanes(coin);
        (0..self.m_sketch)
            .map(|j| {
                let block = &lanes[(j / 64) * self.n..(j / 64 + 1) * self.n];
                (0..self.n).filter(|&i| (block[i] >> (j % 64)) & 1 == 1).fold(0u128, |acc, i| acc | 1 << i)
            })
            .collect()
    }

    /// Subsets in bit-sliced form: word `b·n + i` has bit `l` set iff
    /// coordinate `i` belongs to subset `64·b + l`.
    fn lanes(&self, coin: u64) -> Vec<u64> {
        let mut rng = derive_rng(self.seed, &[Label::from("parity-sketch"), Label::from(coin)]);
        let blocks = self.m_sketch.div_ceil(64);
        (0..blocks * self.n).map(|_| bernoulli_lanes(&mut rng, self.p_include)).collect()
    }

    pub fn sketch(&self, x: &BitString, coin: u64) -> BitString {
        let lanes = cached_lanes(self, coin);
        let support: Vec<usize> = (0..self.n).filter(|&i| x.get(i)).collect();
        let mut out = BitString::new();
        for block in lanes.chunks(self.n) {
            let word = support.iter().fold(0u64, |acc, &i| acc ^ block[i]);
            for l in 0..64 {
                if out.len() == self.m_sketch {
                    break;
                }
                out.push((word >> l) & 1 == 1);
            }
        }
        out
    }
}

/// 64 independent draws of `[U < p]`, comparing uniform `U` with `p` bit by bit.
fn bernoulli_lanes<R: rand::RngCore>(rng: &mut R, p: f64) -> u64 {
    let (mut undecided, mut hits) = (u64::MAX, 0u64);
    let mut frac = p;
    for _ in 0..64 {
        frac *= 2.0;
        let bit = frac >= 1.0;
        if bit {
            frac -= 1.0;
        }
        let r = rng.next_u64();
        if bit {
            hits |= undecided & !r;
            undecided &= r;
        } else {
            undecided &= !r;
        }
        if undecided == 0 || frac == 0.0 {
            break;
        }
    }
    hits
}

pub fn disagreement(p: f64, delta: usize) -> f64 {
    (1.0 - (1.0 - 2.0 * p).powi(delta as i32)) / 2.0
}

/// `(seed, n, coin)` and the lanes drawn for them.
type LaneCache = Option<(u64, usize, u64, Arc<Vec<u64>>)>;

thread_local! {
    static LAST_LANES: RefCell<LaneCache> = const { RefCell::new(None) };
}

/// Alice and Bob evaluate the same coin back to back, so the last subsets are kept per thread.
fn cached_lanes(params: &ParitySketchParams, coin: u64) -> Arc<Vec<u64>> {
    LAST_LANES.with(|cell| {
        let mut slot = cell.borrow_mut();
        if let Some((seed, m, c, subsets)) = slot.as_ref() {
            if *seed == params.seed && *m == params.m_sketch && *c == coin {
                return subsets.clone();
            }
        }
        let fresh = Arc::new(params.lanes(coin));
        *slot = Some((params.seed, params.m_sketch, coin, fresh.clone()));
        fresh
    })
}

/// The sketch protocol together with its parameters.
#[derive(Clone)]
pub struct ParitySketch {
    pub protocol: ClassicalSmpProtocol<BitString, BitString>,
    pub params: ParitySketchParams,
}

/// `m = ceil(8 ln(2/ε) / (q(d+1) - q(d))^2)` parity bits per party with `p = 1/(2(d+1))`.
pub fn parity_sketch_protocol(n: usize, d: usize, eps: f64, seed: u64) -> Result<ParitySketch> {
    if n > MAX_INPUT_BITS {
        return Err(Error::InvalidParameter(format!("input length {n} exceeds {MAX_INPUT_BITS}")));
    }
    if d == 0 || 2 * d >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= d < n/2, got d = {d}, n = {n}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps {eps} must lie in (0, 1/2)")));
    }
    let p = 1.0 / (2.0 * (d as f64 + 1.0));
    let (q_lo, q_hi) = (disagreement(p, d), disagreement(p, d + 1));
    let gap = q_hi - q_lo;
    let m_sketch = (8.0 * (2.0 / eps).ln() / (gap * gap)).ceil() as usize;
    let threshold_ratio = (q_lo + q_hi) / 2.0;
    let params = ParitySketchParams {
        n,
        d,
        m_sketch,
        p_include: p,
        threshold_ratio,
        max_disagreements: (threshold_ratio * m_sketch as f64).floor() as usize,
        seed,
    };
    let (pa, pb) = (params.clone(), params.clone());
    let max_dis = params.max_disagreements;
    let protocol = ClassicalSmpProtocol::new(
        format!("parity-sketch(n={n}, d={d})"),
        CoinSpace::public_only(u64::MAX),
        MessageBudget { alice_bits: m_sketch, bob_bits: m_sketch },
        Arc::new(move |x: &BitString, r, _| pa.sketch(x, r)),
        Arc::new(move |y: &BitString, r, _| pb.sketch(y, r)),
        Arc::new(move |a: &BitString, b: &BitString, _| {
            let dis = (0..a.len()).filter(|&i| a.get(i) != b.get(i)).count();
            Output::Bit(dis <= max_dis)
        }),
    )?
    .with_layout(format!("{m_sketch} parity bits per party"));
    Ok(ParitySketch { protocol, params })
}

/// Fingerprints built from a sketch protocol on `n'` fixed coins.
#[derive(Clone, Debug)]
pub struct SketchEmbedding {
    pub embedding: ThresholdEmbedding,
    /// Distinct Alice inputs, indexed as in the embedding.
    pub xs: Vec<BitString>,
    pub ys: Vec<BitString>,
}

fn index_of(list: &mut Vec<BitString>, seen: &mut HashMap<BitString, usize>, s: &BitString) -> usize {
    *seen.entry(s.clone()).or_insert_with(|| {
        list.push(s.clone());
        list.len() - 1
    })
}

/// `α_x = (m n')^{-1/2} Σ_r |r⟩ Σ_i |i⟩ |a_{rxi}⟩` (likewise `β_y`) on coins `0..n'`.
///
/// `⟨α_x, β_y⟩` is the fraction of agreeing sketch bits. The thresholds are
/// the extreme squared overlaps over the declared instances; the embedding
/// is rejected when the 0-instances and 1-instances overlap.
pub fn sketch_to_embedding(sketch: &ParitySketch, n_prime: usize, instances: &[HamInstance]) -> Result<SketchEmbedding> {
    if n_prime == 0 {
        return Err(Error::InvalidParameter("need at least one coin".into()));
    }
    let params = &sketch.params;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let (mut seen_x, mut seen_y) = (HashMap::new(), HashMap::new());
    let mut domain = Vec::with_capacity(instances.len());
    for inst in instances {
        if inst.n != params.n || inst.d != params.d {
            return Err(Error::InvalidParameter("instance does not match sketch parameters".into()));
        }
        let x = index_of(&mut xs, &mut seen_x, &inst.x);
        let y = index_of(&mut ys, &mut seen_y, &inst.y);
        domain.push(DomainPair { x, y, value: ham_predicate(inst) });
    }
    let m = params.m_sketch;
    let amp = 1.0 / ((m * n_prime) as f64).sqrt();
    let state = |s: &BitString, alice: bool| -> Result<Vec<f64>> {
        let mut v = vec![0.0; 2 * m * n_prime];
        for r in 0..n_prime {
            let msg = if alice {
                sketch.protocol.alice_message(s, r as u64, 0)?
            } else {
                sketch.protocol.bob_message(s, r as u64, 0)?
            };
            for i in 0..m {
                v[2 * (r * m + i) + msg.get(i) as usize] = amp;
            }
        }
        Ok(v)
    };
    let alpha = xs.iter().map(|x| state(x, true)).collect::<Result<Vec<_>>>()?;
    let beta = ys.iter().map(|y| state(y, false)).collect::<Result<Vec<_>>>()?;
    let sq = |p: &DomainPair| crate::geometry::dot(&alpha[p.x], &beta[p.y]).powi(2);
    let worst_zero = domain.iter().filter(|p| !p.value).max_by(|a, b| sq(a).total_cmp(&sq(b)));
    let worst_one = domain.iter().filter(|p| p.value).min_by(|a, b| sq(a).total_cmp(&sq(b)));
    let delta0 = worst_zero.map_or(0.0, &sq);
    let delta1 = worst_one.map_or(1.0, &sq);
    if delta0 >= delta1 {
        let p = worst_zero.expect("a 0-instance exists when delta0 > 0");
        return Err(Error::NotSeparating {
            x: p.x,
            y: p.y,
            detail: format!("squared overlap {delta0} is not below the 1-instance minimum {delta1}"),
        });
    }
    let embedding = ThresholdEmbedding::new(alpha, beta, delta0, delta1, domain)?;
    Ok(SketchEmbedding { embedding, xs, ys })
}
