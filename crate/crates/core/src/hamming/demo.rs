use serde::Serialize;

use super::ball::{ball_search_protocol, BallOptions};
use super::code::{code_fingerprint, LinearCode};
use super::coherent::{simulate, CandidateStep};
use super::predicate::{ham_predicate, instance_at_distance};
use crate::protocol::{BallVariant, QuantumReferee};
use crate::seed::{derive_rng, Label};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CoherentDemoReport {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub copies: usize,
    pub runs: usize,
    /// Runs whose output equals the predicate.
    pub agreements: usize,
    pub near_agreements: usize,
    pub far_agreements: usize,
    /// Mean over runs of the fidelity after the last candidate.
    pub mean_final_fidelity: f64,
    pub min_fidelity: f64,
    /// Number of candidate steps that carried a fidelity value.
    pub telemetry_steps: usize,
    pub candidates_per_run: usize,
}

impl CoherentDemoReport {
    pub fn agreement_rate(&self) -> f64 {
        self.agreements as f64 / self.runs as f64
    }
}

/// Coherent-reuse ball search on alternating near (`Δ <= d`) and far (`Δ > d`)
/// instances, with distances drawn uniformly on each side.
pub fn coherent_demo(code: &LinearCode, d: usize, copies: usize, runs: usize, seed: u64) -> Result<CoherentDemoReport> {
    let n = code.n();
    if d >= n {
        return Err(Error::InvalidParameter(format!("need d < n for far instances, got d = {d}, n = {n}")));
    }
    let opts = BallOptions { copies_per_candidate: Some(copies), pass_threshold: None };
    let bs = ball_search_protocol(n, d, 1.0 / 3.0, code, BallVariant::CoherentReuse, opts)?;
    let QuantumReferee::BallSearch(referee) = bs.protocol.referee() else {
        unreachable!("ball search protocols use the ball-search referee")
    };
    let mut report = CoherentDemoReport {
        n,
        d,
        m: code.m(),
        copies,
        runs,
        agreements: 0,
        near_agreements: 0,
        far_agreements: 0,
        mean_final_fidelity: 0.0,
        min_fidelity: 1.0,
        telemetry_steps: 0,
        candidates_per_run: referee.candidate_phases.len(),
    };
    for run in 0..runs {
        let mut rng = derive_rng(seed, &[Label::from("coherent-demo"), Label::from(run)]);
        let far = run % 2 == 1;
        let delta = if far { rand::Rng::gen_range(&mut rng, d + 1..=n) } else { rand::Rng::gen_range(&mut rng, 0..=d) };
        let inst = instance_at_distance(n, d, delta, &mut rng)?;
        let a = code_fingerprint(&inst.x, code)?;
        let b = code_fingerprint(&inst.y, code)?;
        let out = simulate(&a, &b, referee, &mut rng)?;
        if out.accepted == ham_predicate(&inst) {
            report.agreements += 1;
            if far {
                report.far_agreements += 1;
            } else {
                report.near_agreements += 1;
            }
        }
        report.telemetry_steps += out.steps.iter().filter(|s| s.fidelity.is_finite()).count();
        let last: Option<&CandidateStep> = out.steps.last();
        report.mean_final_fidelity += last.map_or(1.0, |s| s.fidelity) / runs as f64;
        report.min_fidelity = out.steps.iter().map(|s| s.fidelity).fold(report.min_fidelity, f64::min);
    }
    Ok(report)
}
