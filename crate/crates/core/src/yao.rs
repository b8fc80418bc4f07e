//! Quantum simulation of classical public-coin SMP protocols.
//!
//! A public-coin protocol with `n'` coin values and `c`-bit messages becomes a
//! pair of fingerprint families on `n'(2^c + 1)` dimensions whose overlap is
//! the protocol's acceptance probability scaled by `2^{-c/2}`. Repeated
//! fingerprinting then recovers the function with `O(4^c)` copies.

use rand::seq::SliceRandom as _;
use serde::{Deserialize, Serialize};

use crate::geometry::{compile_repeated_fingerprinting, DomainPair, ThresholdEmbedding};
use crate::protocol::QuantumSmpProtocol;
use crate::{Error, Result};

const MAX_MESSAGE_BITS: u32 = 12;
const MAX_DIM: usize = 1 << 22;

/// A tabulated public-coin protocol: on coin `r`, Alice sends `a_table[r][x]`,
/// Bob sends `b_table[r][y]` and the referee outputs `referee[a·2^c + b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicCoinProtocolTable {
    n_prime: usize,
    c: u32,
    a_table: Vec<Vec<u32>>,
    b_table: Vec<Vec<u32>>,
    #[serde(alias = "R")]
    referee: Vec<bool>,
}

impl PublicCoinProtocolTable {
    pub fn new(n_prime: usize, c: u32, a_table: Vec<Vec<u32>>, b_table: Vec<Vec<u32>>, referee: Vec<bool>) -> Result<Self> {
        if n_prime == 0 {
            return Err(Error::InvalidParameter("need at least one coin value".into()));
        }
        if c == 0 || c > MAX_MESSAGE_BITS {
            return Err(Error::InvalidParameter(format!("message length {c} outside 1..={MAX_MESSAGE_BITS}")));
        }
        if n_prime * ((1usize << c) + 1) > MAX_DIM {
            return Err(Error::InvalidParameter("fingerprint dimension too large".into()));
        }
        if a_table.len() != n_prime || b_table.len() != n_prime {
            return Err(Error::DimensionMismatch(n_prime, a_table.len().min(b_table.len())));
        }
        if referee.len() != 1usize << (2 * c) {
            return Err(Error::DimensionMismatch(1usize << (2 * c), referee.len()));
        }
        let limit = 1u32 << c;
        for table in [&a_table, &b_table] {
            let width = table[0].len();
            if width == 0 {
                return Err(Error::InvalidParameter("input lists must be nonempty".into()));
            }
            for row in table.iter() {
                if row.len() != width {
                    return Err(Error::DimensionMismatch(width, row.len()));
                }
                if let Some(v) = row.iter().find(|&&v| v >= limit) {
                    return Err(Error::InvalidParameter(format!("message {v} does not fit in {c} bits")));
                }
            }
        }
        Ok(Self { n_prime, c, a_table, b_table, referee })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(s)?;
        Self::new(raw.n_prime, raw.c, raw.a_table, raw.b_table, raw.referee)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn x_count(&self) -> usize {
        self.a_table[0].len()
    }

    pub fn y_count(&self) -> usize {
        self.b_table[0].len()
    }

    fn messages(&self) -> usize {
        1 << self.c
    }

    /// Alice's message on coin `r` for input `x`.
    pub fn alice_message(&self, r: usize, x: usize) -> u32 {
        self.a_table[r][x]
    }

    pub fn bob_message(&self, r: usize, y: usize) -> u32 {
        self.b_table[r][y]
    }

    pub fn referee_output(&self, a: u32, b: u32) -> bool {
        self.referee[a as usize * self.messages() + b as usize]
    }

    /// Number of coins on which the referee outputs 1, so `P(x, y) = count / n'`.
    pub fn accept_count(&self, x: usize, y: usize) -> usize {
        (0..self.n_prime).filter(|&r| self.referee_output(self.a_table[r][x], self.b_table[r][y])).count()
    }

    pub fn acceptance(&self, x: usize, y: usize) -> f64 {
        self.accept_count(x, y) as f64 / self.n_prime as f64
    }

    /// `Some(1)` if `P >= 2/3`, `Some(0)` if `P <= 1/3`, `None` in between (exact rational comparison).
    pub fn induced_value(&self, x: usize, y: usize) -> Option<bool> {
        let (k, n) = (3 * self.accept_count(x, y), self.n_prime);
        if k >= 2 * n {
            Some(true)
        } else if k <= n {
            Some(false)
        } else {
            None
        }
    }

    /// The induced function on every pair, or the first pair inside the forbidden band.
    pub fn domain(&self) -> Result<Vec<DomainPair>> {
        let mut out = Vec::with_capacity(self.x_count() * self.y_count());
        for x in 0..self.x_count() {
            for y in 0..self.y_count() {
                match self.induced_value(x, y) {
                    Some(value) => out.push(DomainPair { x, y, value }),
                    None => return Err(Error::ForbiddenBand { x, y, p: self.acceptance(x, y) }),
                }
            }
        }
        Ok(out)
    }

    /// `|A_ry|`, the number of Alice messages the referee accepts against `b_table[r][y]`.
    pub fn accepting_set_size(&self, r: usize, y: usize) -> usize {
        let b = self.b_table[r][y];
        (0..self.messages() as u32).filter(|&a| self.referee_output(a, b)).count()
    }

    pub fn fingerprint_dim(&self) -> usize {
        self.n_prime * (self.messages() + 1)
    }

    /// `α_x = n'^{-1/2} Σ_r |r⟩|a_rx⟩`.
    pub fn alice_fingerprint(&self, x: usize) -> Vec<f64> {
        let block = self.messages() + 1;
        let amp = 1.0 / (self.n_prime as f64).sqrt();
        let mut v = vec![0.0; self.fingerprint_dim()];
        for r in 0..self.n_prime {
            v[r * block + self.a_table[r][x] as usize] = amp;
        }
        v
    }

    /// `β_y = n'^{-1/2} Σ_r |r⟩ (2^{-c/2} Σ_{a ∈ A_ry} |a⟩ + √(1 - |A_ry|/2^c) |dummy⟩)`.
    pub fn bob_fingerprint(&self, y: usize) -> Vec<f64> {
        let m = self.messages();
        let block = m + 1;
        let outer = 1.0 / (self.n_prime as f64).sqrt();
        let inner = 1.0 / (m as f64).sqrt();
        let mut v = vec![0.0; self.fingerprint_dim()];
        for r in 0..self.n_prime {
            let b = self.b_table[r][y];
            let mut accepted = 0;
            for a in 0..m {
                if self.referee_output(a as u32, b) {
                    v[r * block + a] = outer * inner;
                    accepted += 1;
                }
            }
            v[r * block + m] = outer * (1.0 - accepted as f64 / m as f64).sqrt();
        }
        v
    }
}

/// The fingerprint families as a threshold embedding with `δ0 = 1/(9·2^c)`, `δ1 = 4/(9·2^c)`.
pub fn build_fingerprint_states(t: &PublicCoinProtocolTable) -> Result<ThresholdEmbedding> {
    let domain = t.domain()?;
    let scale = (1u64 << t.c) as f64;
    ThresholdEmbedding::new(
        (0..t.x_count()).map(|x| t.alice_fingerprint(x)).collect(),
        (0..t.y_count()).map(|y| t.bob_fingerprint(y)).collect(),
        1.0 / (9.0 * scale),
        4.0 / (9.0 * scale),
        domain,
    )
}

/// Repeated fingerprinting on the simulated fingerprints.
pub fn simulate_public_coin(t: &PublicCoinProtocolTable, eps: f64) -> Result<QuantumSmpProtocol<usize, usize>> {
    compile_repeated_fingerprinting(&build_fingerprint_states(t)?, eps)
}

/// A random table whose acceptance probabilities all avoid `(1/3, 2/3)`.
///
/// A base protocol fixes one message per input; fewer than a third of the coin
/// values are then overwritten with arbitrary messages, which moves every `P`
/// by less than `1/3` away from `0` or `1`.
pub fn random_separated_table<R: rand::Rng + ?Sized>(
    n_prime: usize,
    c: u32,
    x_count: usize,
    y_count: usize,
    rng: &mut R,
) -> Result<PublicCoinProtocolTable> {
    let m = 1u32 << c;
    let referee: Vec<bool> = (0..(m as usize) * (m as usize)).map(|_| rng.gen()).collect();
    let base_a: Vec<u32> = (0..x_count).map(|_| rng.gen_range(0..m)).collect();
    let base_b: Vec<u32> = (0..y_count).map(|_| rng.gen_range(0..m)).collect();
    let noisy_rows = (n_prime - 1) / 3;
    let mut rows: Vec<usize> = (0..n_prime).collect();
    let (noisy, _) = rows.partial_shuffle(rng, noisy_rows);
    let noisy: Vec<usize> = noisy.to_vec();
    let mut a_table = vec![base_a; n_prime];
    let mut b_table = vec![base_b; n_prime];
    for &r in &noisy {
        a_table[r].iter_mut().for_each(|v| *v = rng.gen_range(0..m));
        b_table[r].iter_mut().for_each(|v| *v = rng.gen_range(0..m));
    }
    PublicCoinProtocolTable::new(n_prime, c, a_table, b_table, referee)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::required_copies;
    use crate::protocol::{evaluate_exact, ExactLimits};
    use crate::seed::derive_rng;

    fn ln_choose(n: usize, k: usize) -> f64 {
        (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
    }

    fn constant_table(value: bool) -> PublicCoinProtocolTable {
        PublicCoinProtocolTable::new(3, 2, vec![vec![0, 1, 2]; 3], vec![vec![3, 1]; 3], vec![value; 16]).unwrap()
    }

    #[test]
    fn constant_referees() {
        let one = build_fingerprint_states(&constant_table(true)).unwrap();
        let zero = build_fingerprint_states(&constant_table(false)).unwrap();
        for x in 0..3 {
            for y in 0..2 {
                assert!((one.overlap(x, y) - 0.5).abs() < 1e-12);
                assert!(zero.overlap(x, y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlap_identity_on_random_tables() {
        let mut rng = derive_rng(3, &["yao-unit".into()]);
        for _ in 0..10 {
            let t = random_separated_table(8, 2, 5, 4, &mut rng).unwrap();
            let e = build_fingerprint_states(&t).unwrap();
            for x in 0..5 {
                for y in 0..4 {
                    let direct: f64 = (0..8)
                        .map(|r| t.referee_output(t.a_table[r][x], t.b_table[r][y]) as u8 as f64)
                        .sum::<f64>()
                        / 8.0
                        / 2.0;
                    assert!((e.overlap(x, y) - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn band_is_rejected() {
        // two coins, one accepting: P = 1/2
        let t = PublicCoinProtocolTable::new(2, 1, vec![vec![0], vec![1]], vec![vec![0], vec![0]], vec![true, false, false, false])
            .unwrap();
        assert!(matches!(build_fingerprint_states(&t), Err(Error::ForbiddenBand { x: 0, y: 0, .. })));
    }

    #[test]
    fn one_bit_equality() {
        let eq = PublicCoinProtocolTable::new(1, 1, vec![vec![0, 1]], vec![vec![0, 1]], vec![true, false, false, true])
            .unwrap();
        let p = simulate_public_coin(&eq, 1.0 / 3.0).unwrap();
        assert_eq!(p.copies(), 317);
        assert_eq!(p.copies(), required_copies(1.0 / 6.0, 1.0 / 3.0).unwrap());
        assert_eq!(p.cost_qubits(), 2 * 317 * 2);
        let e = build_fingerprint_states(&eq).unwrap();
        let report = evaluate_exact(&p, &e.problem_spec(), &e.domain_inputs(), &ExactLimits::default()).unwrap();
        assert!(report.max_invalid() <= 1.0 / 3.0);
        // the worst pairs are x != y with swap probability exactly 1/2
        let t = (317.0f64 * 41.0 / 72.0).ceil() as usize;
        let tail: f64 = (t..=317).map(|k| ln_choose(317, k) - 317.0 * 2f64.ln()).map(f64::exp).sum();
        assert!((report.max_invalid() - tail).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let t = constant_table(true);
        assert_eq!(PublicCoinProtocolTable::from_json(&t.to_json().unwrap()).unwrap(), t);
        let aliased = r#"{"n_prime":1,"c":1,"a_table":[[0]],"b_table":[[1]],"R":[false,true,false,false]}"#;
        assert!(PublicCoinProtocolTable::from_json(aliased).unwrap().referee_output(0, 1));
        let bad = r#"{"n_prime":1,"c":1,"a_table":[[2]],"b_table":[[1]],"referee":[false,true,false,false]}"#;
        assert!(PublicCoinProtocolTable::from_json(bad).is_err());
    }
}
