use std::sync::Arc;

use rand::Rng as _;
use serde::Serialize;

use super::code::{code_fingerprint, LinearCode};
use crate::bits::BitString;
use crate::protocol::{BallSearchReferee, BallVariant, ClassicalSmpProtocol, CoinSpace, MessageBudget, Output};
use crate::protocol::{QuantumReferee, QuantumSmpProtocol};
use crate::seed::{derive_rng, Label};
use crate::{Error, Result};

const FRESH_MAX_N: usize = 16;
const COHERENT_MAX_M: usize = 8;
const COHERENT_MAX_K: usize = 3;
const COHERENT_MAX_D: usize = 5;
const CLASSICAL_MAX_N: usize = 20;
const CLASSICAL_MAX_D: usize = 3;

pub fn ball_size(n: usize, d: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for i in 0..=d.min(n) {
        total += binom;
        binom = binom * (n - i) as u128 / (i + 1) as u128;
    }
    total
}

/// All `e` with `|e| <= d`, by weight and then lexicographically by support (so `e_1` precedes `e_2`).
pub fn ball_candidates(n: usize, d: usize) -> Vec<u128> {
    let mut out = Vec::new();
    for w in 0..=d.min(n) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            out.push(support.iter().fold(0u128, |acc, &i| acc | 1 << i));
            // next combination of w indices out of n
            let Some(pos) = (0..w).rev().find(|&k| support[k] < n - w + k) else { break };
            support[pos] += 1;
            for k in pos + 1..w {
                support[k] = support[k - 1] + 1;
            }
        }
    }
    out
}

/// Overrides for the derived ball-search parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BallOptions {
    pub copies_per_candidate: Option<usize>,
    pub pass_threshold: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallParams {
    pub n: usize,
    pub d: usize,
    pub ball_size: usize,
    /// Largest swap-test acceptance for a wrong candidate, `1/2 + b^2/2` with `b` the code's maximum bias.
    pub wrong_candidate_swap: f64,
    pub copies_per_candidate: usize,
    pub pass_threshold: usize,
    /// `D · s^K`, the union bound on accepting a far pair with the all-symmetric rule.
    pub soundness_bound: f64,
}

pub struct BallSearch {
    pub protocol: QuantumSmpProtocol<BitString, BitString>,
    pub params: BallParams,
}

/// Quantum ball search over code fingerprints.
///
/// With fresh copies each of the `D` candidates gets `K = ceil(log2(D/ε) / log2(1/s))`
/// copy-pairs of its own and passes when all `K` swap tests are symmetric. With
/// coherent reuse the same `K` pairs serve every candidate. Either rule can be
/// relaxed to "at least `t` symmetric" through [`BallOptions`].
pub fn ball_search_protocol(
    n: usize,
    d: usize,
    eps: f64,
    code: &LinearCode,
    variant: BallVariant,
    options: BallOptions,
) -> Result<BallSearch> {
    if code.n() != n {
        return Err(Error::DimensionMismatch(n, code.n()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} must lie in (0, 1)")));
    }
    let bias = code.max_bias();
    let s = 0.5 + bias * bias / 2.0;
    if s >= 1.0 - 1e-6 {
        return Err(Error::CodeTooWeak(s));
    }
    let big_d = ball_size(n, d) as usize;
    let k = match options.copies_per_candidate {
        Some(k) if k > 0 => k,
        Some(_) => return Err(Error::InvalidParameter("copies per candidate must be positive".into())),
        None => ((big_d as f64 / eps).log2() / (1.0 / s).log2()).ceil().max(1.0) as usize,
    };
    let threshold = options.pass_threshold.unwrap_or(k);
    if threshold == 0 || threshold > k {
        return Err(Error::InvalidParameter(format!("pass threshold {threshold} outside 1..={k}")));
    }
    match variant {
        BallVariant::FreshCopies if n > FRESH_MAX_N => {
            return Err(Error::BudgetExceeded(format!("fresh copies need n <= {FRESH_MAX_N}")));
        }
        BallVariant::CoherentReuse if code.m() > COHERENT_MAX_M || k > COHERENT_MAX_K || big_d > COHERENT_MAX_D => {
            return Err(Error::BudgetExceeded(format!(
                "coherent reuse needs m <= {COHERENT_MAX_M}, K <= {COHERENT_MAX_K}, D <= {COHERENT_MAX_D} \
                 (got m = {}, K = {k}, D = {big_d})",
                code.m()
            )));
        }
        _ => {}
    }
    let candidate_phases: Vec<u128> = ball_candidates(n, d).into_iter().map(|e| code.encode_mask(e)).collect();
    let copies = match variant {
        BallVariant::FreshCopies => big_d * k,
        BallVariant::CoherentReuse => k,
    };
    let (ca, cb) = (code.clone(), code.clone());
    let protocol = QuantumSmpProtocol::new(
        format!("ball-search(n={n}, d={d})"),
        code.m(),
        copies,
        Arc::new(move |x: &BitString| code_fingerprint(x, &ca).expect("input length checked by caller")),
        Arc::new(move |y: &BitString| code_fingerprint(y, &cb).expect("input length checked by caller")),
        QuantumReferee::BallSearch(BallSearchReferee {
            candidate_phases,
            copies_per_candidate: k,
            pass_threshold: threshold,
            variant,
        }),
    )?;
    let params = BallParams {
        n,
        d,
        ball_size: big_d,
        wrong_candidate_swap: s,
        copies_per_candidate: k,
        pass_threshold: threshold,
        soundness_bound: big_d as f64 * s.powi(k as i32),
    };
    Ok(BallSearch { protocol, params })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalBallParams {
    pub n: usize,
    pub d: usize,
    pub ball_size: usize,
    pub parities: usize,
    /// `D · 2^{-K}`.
    pub soundness_bound: f64,
    pub seed: u64,
}

impl ClassicalBallParams {
    /// The `K` parity vectors for public coin `coin`.
    pub fn parity_vectors(&self, coin: u64) -> Vec<u128> {
        let mut rng = derive_rng(self.seed, &[Label::from("ball-parities"), Label::from(coin)]);
        let mask = (1u128 << self.n) - 1;
        (0..self.parities).map(|_| rng.gen::<u128>() & mask).collect()
    }
}

pub struct ClassicalBall {
    pub protocol: ClassicalSmpProtocol<BitString, BitString>,
    pub params: ClassicalBallParams,
}

fn parities(v: u128, vectors: &[u128]) -> BitString {
    vectors.iter().map(|r| (v & r).count_ones() % 2 == 1).collect()
}

/// Classical ball search with `K = ceil(log2(D/ε))` shared random parities.
///
/// The referee sees the coin and accepts iff some `e` with `|e| <= d` has the
/// same parities as the XOR of the two messages.
pub fn classical_ball_protocol(n: usize, d: usize, eps: f64, seed: u64) -> Result<ClassicalBall> {
    if n == 0 || n > CLASSICAL_MAX_N || d > CLASSICAL_MAX_D || d > n {
        return Err(Error::BudgetExceeded(format!(
            "classical ball search needs n <= {CLASSICAL_MAX_N}, d <= {CLASSICAL_MAX_D} (got n = {n}, d = {d})"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} must lie in (0, 1)")));
    }
    let big_d = ball_size(n, d) as usize;
    let k = ((big_d as f64 / eps).log2() - 1e-9).ceil().max(1.0) as usize;
    let params = ClassicalBallParams {
        n,
        d,
        ball_size: big_d,
        parities: k,
        soundness_bound: big_d as f64 * 2f64.powi(-(k as i32)),
        seed,
    };
    let candidates = Arc::new(ball_candidates(n, d));
    let (pa, pb, pr) = (params.clone(), params.clone(), params.clone());
    let protocol = ClassicalSmpProtocol::new(
        format!("classical-ball(n={n}, d={d})"),
        CoinSpace::public_only(u64::MAX),
        MessageBudget { alice_bits: k, bob_bits: k },
        Arc::new(move |x: &BitString, r, _| parities(x.to_mask(), &pa.parity_vectors(r))),
        Arc::new(move |y: &BitString, r, _| parities(y.to_mask(), &pb.parity_vectors(r))),
        Arc::new(move |a: &BitString, b: &BitString, coin| {
            let vectors = pr.parity_vectors(coin.expect("referee sees the coin"));
            let syndrome = a.to_mask() ^ b.to_mask();
            let hit = candidates.iter().any(|&e| parities(e, &vectors).to_mask() == syndrome);
            Output::Bit(hit)
        }),
    )?
    .with_referee_sees_coin(true)
    .with_layout(format!("{k} parity bits per party"));
    Ok(ClassicalBall { protocol, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamming::code::random_linear_code;
    use crate::protocol::SmpProtocol;
    use crate::seed::derive_rng;

    #[test]
    fn ball_sizes_and_order() {
        assert_eq!(ball_size(10, 1), 11);
        assert_eq!(ball_size(4, 2), 11);
        assert_eq!(ball_size(3, 5), 8);
        assert_eq!(ball_candidates(4, 1), vec![0, 1, 2, 4, 8]);
        assert_eq!(ball_candidates(4, 2)[5..], [3, 5, 9, 6, 10, 12]);
        assert_eq!(ball_candidates(6, 3).len() as u128, ball_size(6, 3));
    }

    #[test]
    fn fresh_copies_completeness_and_bound() {
        let code = random_linear_code(10, 0.25, 8, 2).unwrap();
        let bs = ball_search_protocol(10, 1, 1.0 / 3.0, &code, BallVariant::FreshCopies, BallOptions::default()).unwrap();
        assert!(bs.params.soundness_bound <= 1.0 / 3.0);
        let x = BitString::from_uint(0b1011001110, 10);
        let mut y = x.clone();
        y.set(4, !y.get(4));
        assert_eq!(bs.protocol.accept_probability(&x, &x).unwrap(), 1.0);
        assert_eq!(bs.protocol.accept_probability(&x, &y).unwrap(), 1.0);
        y.set(7, !y.get(7));
        assert!(bs.protocol.accept_probability(&x, &y).unwrap() <= bs.params.soundness_bound);
        assert_eq!(bs.protocol.copies(), 11 * bs.params.copies_per_candidate);
    }

    #[test]
    fn coherent_budget() {
        let code = random_linear_code(4, 0.5, 1, 1).unwrap();
        let too_many = ball_search_protocol(4, 2, 0.3, &code, BallVariant::CoherentReuse, BallOptions::default());
        assert!(matches!(too_many, Err(Error::BudgetExceeded(_))));
        let opts = BallOptions { copies_per_candidate: Some(3), pass_threshold: None };
        assert!(ball_search_protocol(4, 1, 0.3, &code, BallVariant::CoherentReuse, opts).is_ok());
    }

    #[test]
    fn classical_ball_basics() {
        let cb = classical_ball_protocol(12, 1, 1.0 / 3.0, 4).unwrap();
        assert_eq!(cb.params.parities, ((3.0 * 13.0f64).log2()).ceil() as usize);
        let x = BitString::from_uint(0xa5c, 12);
        let mut y = x.clone();
        y.set(3, !y.get(3));
        let mut rng = derive_rng(0, &["classical-ball-unit".into()]);
        for _ in 0..200 {
            assert_eq!(cb.protocol.sample_output(&x, &y, &mut rng).unwrap(), Output::Bit(true));
        }
    }
}
