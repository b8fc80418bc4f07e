use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::protocol::apply_phase_mask;
use crate::quantum::PureState;
use crate::seed::{derive_rng, Label};
use crate::{Error, Result};
use rand::Rng as _;

const MAX_MESSAGE_BITS: usize = 16;
const MAX_CODEWORD_BITS: usize = 128;
pub const DEFAULT_RESAMPLES: usize = 1000;

/// A binary linear code `E: {0,1}^n -> {0,1}^m` with brute-forced distance.
///
/// Column `j` of the generator is `E(e_j)`, stored as a mask whose bit `i` is
/// codeword coordinate `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    m: usize,
    columns: Vec<u128>,
    min_distance: usize,
    max_weight: usize,
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    n: usize,
    m: usize,
    min_distance: usize,
    /// `m` generator rows, each `n` bits as hex.
    generator: Vec<String>,
}

impl LinearCode {
    pub fn from_columns(n: usize, m: usize, columns: Vec<u128>) -> Result<Self> {
        if n == 0 || n > MAX_MESSAGE_BITS {
            return Err(Error::InvalidParameter(format!("message length {n} outside 1..={MAX_MESSAGE_BITS}")));
        }
        if m == 0 || m > MAX_CODEWORD_BITS {
            return Err(Error::InvalidParameter(format!("codeword length {m} outside 1..={MAX_CODEWORD_BITS}")));
        }
        if columns.len() != n {
            return Err(Error::DimensionMismatch(n, columns.len()));
        }
        if m < 128 && columns.iter().any(|&c| c >> m != 0) {
            return Err(Error::InvalidParameter("generator column longer than m".into()));
        }
        let (min_distance, max_weight) = weight_range(&columns);
        Ok(Self { n, m, columns, min_distance, max_weight })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    /// Largest weight of a nonzero codeword.
    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    /// `max |1 - 2 w / m|` over nonzero codewords, the largest fingerprint overlap of distinct messages.
    pub fn max_bias(&self) -> f64 {
        let m = self.m as f64;
        (1.0 - 2.0 * self.min_distance as f64 / m).abs().max((1.0 - 2.0 * self.max_weight as f64 / m).abs())
    }

    /// `E(e_j)`.
    pub fn column(&self, j: usize) -> u128 {
        self.columns[j]
    }

    pub fn encode_mask(&self, x: u128) -> u128 {
        self.columns.iter().enumerate().filter(|(j, _)| (x >> j) & 1 == 1).fold(0, |acc, (_, c)| acc ^ c)
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, x.len()));
        }
        Ok(BitString::from_mask(self.encode_mask(x.to_mask()), self.m))
    }

    pub fn to_json(&self) -> Result<String> {
        let generator = (0..self.m)
            .map(|i| (0..self.n).map(|j| (self.columns[j] >> i) & 1 == 1).collect::<BitString>().to_hex())
            .collect();
        Ok(serde_json::to_string(&CodeJson { n: self.n, m: self.m, min_distance: self.min_distance, generator })?)
    }

    /// Parses a code and re-derives its distance; a stale `min_distance` is rejected.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CodeJson = serde_json::from_str(s)?;
        if raw.generator.len() != raw.m {
            return Err(Error::DimensionMismatch(raw.m, raw.generator.len()));
        }
        let mut columns = vec![0u128; raw.n];
        for (i, row) in raw.generator.iter().enumerate() {
            let bits = BitString::from_hex(row, raw.n)?;
            for (j, c) in columns.iter_mut().enumerate() {
                if bits.get(j) {
                    *c |= 1 << i;
                }
            }
        }
        let code = Self::from_columns(raw.n, raw.m, columns)?;
        if code.min_distance != raw.min_distance {
            return Err(Error::InvariantViolation(format!(
                "declared distance {} but generator has {}",
                raw.min_distance, code.min_distance
            )));
        }
        Ok(code)
    }
}

/// Minimum and maximum weight over the `2^n - 1` nonzero codewords, visited in Gray-code order.
fn weight_range(columns: &[u128]) -> (usize, usize) {
    let mut word = 0u128;
    let (mut lo, mut hi) = (usize::MAX, 0);
    for step in 1u64..1 << columns.len() {
        word ^= columns[step.trailing_zeros() as usize];
        let w = word.count_ones() as usize;
        lo = lo.min(w);
        hi = hi.max(w);
    }
    (lo, hi)
}

/// `m = ceil(n / rate)`; the generator is uniform and resampled until its
/// distance reaches `max(distance_floor, 1)`.
pub fn random_linear_code(n: usize, rate: f64, distance_floor: usize, seed: u64) -> Result<LinearCode> {
    random_linear_code_with(n, rate, distance_floor, seed, DEFAULT_RESAMPLES)
}

pub fn random_linear_code_with(
    n: usize,
    rate: f64,
    distance_floor: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<LinearCode> {
    if !(rate > 0.0 && rate <= 0.5) {
        return Err(Error::InvalidParameter(format!("rate {rate} must lie in (0, 1/2]")));
    }
    if n == 0 || n > MAX_MESSAGE_BITS {
        return Err(Error::InvalidParameter(format!("message length {n} outside 1..={MAX_MESSAGE_BITS}")));
    }
    let m = (n as f64 / rate - 1e-9).ceil() as usize;
    if m > MAX_CODEWORD_BITS {
        return Err(Error::InvalidParameter(format!("codeword length {m} exceeds {MAX_CODEWORD_BITS}")));
    }
    let floor = distance_floor.max(1);
    let word_mask = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let mut best = 0;
    for attempt in 0..max_attempts {
        let mut rng = derive_rng(seed, &[Label::from("linear-code"), Label::from(attempt)]);
        let columns = (0..n).map(|_| rng.gen::<u128>() & word_mask).collect();
        let code = LinearCode::from_columns(n, m, columns)?;
        if code.min_distance >= floor {
            return Ok(code);
        }
        best = best.max(code.min_distance);
    }
    Err(Error::DistanceFloorUnreachable { floor, attempts: max_attempts, best })
}

/// Among the first `samples` draws of the resampling stream that reach the
/// distance floor, the one with the smallest maximum bias (earliest on ties).
pub fn lowest_bias_code(n: usize, rate: f64, distance_floor: usize, seed: u64, samples: usize) -> Result<LinearCode> {
    let mut best: Option<LinearCode> = None;
    for i in 0..samples.max(1) {
        let stream = crate::seed::derive_seed(seed, &[Label::from("lowest-bias"), Label::from(i)]);
        let code = random_linear_code(n, rate, distance_floor, stream)?;
        if best.as_ref().is_none_or(|b| code.max_bias() < b.max_bias()) {
            best = Some(code);
        }
    }
    Ok(best.expect("at least one sample"))
}

/// `ceil(fraction · m)`, the usual way distance floors are specified.
pub fn distance_floor_for(fraction: f64, m: usize) -> usize {
    (fraction * m as f64 - 1e-9).ceil().max(0.0) as usize
}

/// `|φ_x⟩ = m^{-1/2} Σ_i (-1)^{E(x)_i} |i⟩`.
pub fn code_fingerprint(x: &BitString, code: &LinearCode) -> Result<PureState> {
    let word = code.encode(x)?;
    let amp = 1.0 / (code.m as f64).sqrt();
    let v: Vec<f64> = (0..code.m).map(|i| if word.get(i) { -amp } else { amp }).collect();
    PureState::from_real(&v)
}

/// Applies `|i⟩ -> (-1)^{E(e_j)_i} |i⟩`, turning `φ_x` into `φ_{x ⊕ e_j}`.
pub fn phase_shift(state: &PureState, j: usize, code: &LinearCode) -> Result<PureState> {
    if state.dim() != code.m {
        return Err(Error::DimensionMismatch(code.m, state.dim()));
    }
    if j >= code.n {
        return Err(Error::InvalidParameter(format!("coordinate {j} outside 0..{}", code.n)));
    }
    Ok(apply_phase_mask(state, code.columns[j]))
}
