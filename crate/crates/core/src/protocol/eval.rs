use rayon::prelude::*;

use super::report::{EvaluationMethod, EvaluationReport, ExactCounts, InputReport};
use super::{Judgement, OutputDistribution, ProblemSpec, SmpProtocol};
use crate::seed::derive_rng;
use crate::{Error, Result};

/// Default bound on the number of enumerated coin settings per input.
pub const DEFAULT_COIN_LIMIT: u128 = 1 << 24;

/// Trials per Monte-Carlo partition. Each partition draws from its own
/// stream derived from `(seed, input, partition)`, so results do not depend
/// on how partitions are scheduled.
pub const MC_CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug)]
pub struct ExactLimits {
    pub max_coin_space: u128,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self { max_coin_space: DEFAULT_COIN_LIMIT }
    }
}

fn tally(judgement: Judgement, weight: f64, acc: &mut [f64; 3]) {
    match judgement {
        Judgement::Valid => acc[0] += weight,
        Judgement::DontKnow => acc[1] += weight,
        Judgement::Invalid => acc[2] += weight,
    }
}

/// Exact evaluation over every listed input.
pub fn evaluate_exact<X, Y, P>(
    protocol: &P,
    spec: &ProblemSpec<X, Y>,
    inputs: &[(X, Y)],
    limits: &ExactLimits,
) -> Result<EvaluationReport>
where
    P: SmpProtocol<X, Y> + ?Sized,
{
    let mut rows = Vec::with_capacity(inputs.len());
    for (id, (x, y)) in inputs.iter().enumerate() {
        let row = match protocol.output_distribution(x, y, limits)? {
            OutputDistribution::Counted { outcomes, total } => {
                let mut counts = ExactCounts { valid: 0, dont_know: 0, invalid: 0, total };
                for (out, n) in &outcomes {
                    match spec.judge(x, y, out) {
                        Judgement::Valid => counts.valid += n,
                        Judgement::DontKnow => counts.dont_know += n,
                        Judgement::Invalid => counts.invalid += n,
                    }
                }
                let t = total as f64;
                InputReport {
                    input_id: id.to_string(),
                    p_valid: counts.valid as f64 / t,
                    p_dontknow: counts.dont_know as f64 / t,
                    p_invalid: counts.invalid as f64 / t,
                    exact_counts: Some(counts),
                    trials: None,
                    radius: None,
                }
            }
            OutputDistribution::Weighted(outcomes) => {
                let mut acc = [0.0; 3];
                for (out, w) in &outcomes {
                    tally(spec.judge(x, y, out), *w, &mut acc);
                }
                let total: f64 = acc.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvariantViolation(format!("output law sums to {total}")));
                }
                InputReport {
                    input_id: id.to_string(),
                    p_valid: acc[0],
                    p_dontknow: acc[1],
                    p_invalid: acc[2],
                    exact_counts: None,
                    trials: None,
                    radius: None,
                }
            }
        };
        rows.push(row);
    }
    Ok(EvaluationReport::new(
        protocol.name().to_string(),
        spec.name.clone(),
        EvaluationMethod::Exact,
        spec.dont_know_budget,
        rows,
    ))
}

/// `3 sqrt(p(1-p)/n)`.
pub fn three_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Seeded Monte-Carlo evaluation with `trials` runs per input.
pub fn evaluate_monte_carlo<X, Y, P>(
    protocol: &P,
    spec: &ProblemSpec<X, Y>,
    inputs: &[(X, Y)],
    trials: u64,
    seed: u64,
) -> Result<EvaluationReport>
where
    X: Sync,
    Y: Sync,
    P: SmpProtocol<X, Y> + ?Sized,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let chunks = trials.div_ceil(MC_CHUNK);
    let mut rows = Vec::with_capacity(inputs.len());
    for (id, (x, y)) in inputs.iter().enumerate() {
        let counts = (0..chunks)
            .into_par_iter()
            .map(|chunk| -> Result<[u64; 3]> {
                let mut rng = derive_rng(seed, &["mc".into(), id.into(), chunk.into()]);
                let n = MC_CHUNK.min(trials - chunk * MC_CHUNK);
                let mut c = [0u64; 3];
                for _ in 0..n {
                    let out = protocol.sample_output(x, y, &mut rng)?;
                    match spec.judge(x, y, &out) {
                        Judgement::Valid => c[0] += 1,
                        Judgement::DontKnow => c[1] += 1,
                        Judgement::Invalid => c[2] += 1,
                    }
                }
                Ok(c)
            })
            .try_reduce(|| [0; 3], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]))?;
        let t = trials as f64;
        let p = counts.map(|c| c as f64 / t);
        rows.push(InputReport {
            input_id: id.to_string(),
            p_valid: p[0],
            p_dontknow: p[1],
            p_invalid: p[2],
            exact_counts: None,
            trials: Some(trials),
            radius: Some(p.iter().map(|&q| three_sigma(q, trials)).fold(0.0, f64::max)),
        });
    }
    Ok(EvaluationReport::new(
        protocol.name().to_string(),
        spec.name.clone(),
        EvaluationMethod::MonteCarlo { trials, seed },
        spec.dont_know_budget,
        rows,
    ))
}
