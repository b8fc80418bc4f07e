use std::sync::Arc;

use super::ThresholdEmbedding;
use crate::protocol::{QuantumReferee, QuantumSmpProtocol};
use crate::quantum::PureState;
use crate::{Error, Result};

const ROUNDING_SLACK: f64 = 1e-9;

/// `8 ln(1/ε) / gap²` before rounding.
pub fn required_copies_real(gap: f64, eps: f64) -> f64 {
    8.0 * (1.0 / eps).ln() / (gap * gap)
}

/// Number of copy-pairs `r = ceil(8 ln(1/ε) / gap²)`.
pub fn required_copies(gap: f64, eps: f64) -> Result<usize> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::InvalidParameter(format!("gap {gap} must lie in (0, 1]")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps {eps} must lie in (0, 1/2)")));
    }
    Ok(ceil_with_slack(required_copies_real(gap, eps)).max(1))
}

/// Smallest count of 0-outcomes that is `>= r (1/2 + (δ0 + δ1)/4)`; a count on the boundary accepts.
pub fn acceptance_count(r: usize, delta0: f64, delta1: f64) -> usize {
    ceil_with_slack(r as f64 * (0.5 + (delta0 + delta1) / 4.0))
}

fn ceil_with_slack(v: f64) -> usize {
    let nearest = v.round();
    if (v - nearest).abs() <= ROUNDING_SLACK * v.abs().max(1.0) {
        nearest as usize
    } else {
        v.ceil() as usize
    }
}

/// Repeated fingerprinting: both parties send `r` copies of their fingerprint,
/// the referee runs `r` swap tests and thresholds the number of 0-outcomes
/// midway between the expected counts under `δ0` and `δ1`.
pub fn compile_repeated_fingerprinting(e: &ThresholdEmbedding, eps: f64) -> Result<QuantumSmpProtocol<usize, usize>> {
    let r = required_copies(e.gap(), eps)?;
    let t = acceptance_count(r, e.delta0(), e.delta1());
    let states = |vs: &[Vec<f64>]| -> Result<Arc<Vec<PureState>>> {
        Ok(Arc::new(vs.iter().map(|v| PureState::from_real(v)).collect::<Result<Vec<_>>>()?))
    };
    let alpha = states(e.alpha())?;
    let beta = states(e.beta())?;
    QuantumSmpProtocol::new(
        "repeated-fingerprinting",
        e.dim(),
        r,
        Arc::new(move |x: &usize| alpha[*x].clone()),
        Arc::new(move |y: &usize| beta[*y].clone()),
        QuantumReferee::SwapThreshold { min_zero_outcomes: t },
    )
}
