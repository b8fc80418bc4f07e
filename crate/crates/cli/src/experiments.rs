use anyhow::{bail, Context, Result};
use rand::Rng as _;
use serde::Serialize;

use smplab::bits::BitString;
use smplab::geometry::{
    column_realization, equality_realization, ip_sign_matrix, realization_to_embedding, required_copies,
    required_copies_real, spectral_norm, MarginRealization, SpectralMethod,
};
use smplab::hamming::{
    ball_search_protocol, classical_ball_protocol, coherent_demo, distance_floor_for, ham_predicate,
    instance_at_distance, lowest_bias_code, parity_sketch_protocol, random_linear_code, BallOptions, HamInstance,
};
use smplab::lemmas::direct_product_check;
use smplab::protocol::{
    evaluate_exact, evaluate_monte_carlo, three_sigma, BallVariant, ClassicalSmpProtocol, EvaluationReport,
    ExactLimits, ProblemSpec,
};
use smplab::quantum::{holevo_chi, random_density_matrix, Ensemble, PureState};
use smplab::relation_p::{
    grid_protocol_p, grid_side, problem_p, public_coin_protocol_p, public_coin_protocol_p_referee_sees_coin,
    random_instance_with, BobInput,
};
use smplab::seed::{derive_rng, derive_seed};
use smplab::yao::{build_fingerprint_states, random_separated_table, simulate_public_coin};
use smplab::Error as CoreError;

use crate::config::{Command, ExperimentConfig, HamVariant};
use crate::table::{Cell, Table};

/// One named assertion evaluated during a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub experiment: String,
    pub table: Table,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::json!({
            "experiment": self.experiment,
            "rows": self.table.to_json_rows(),
            "checks": self.checks,
        });
        Ok(serde_json::to_string_pretty(&value)? + "\n")
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let command = cfg.command()?;
    let (mut table, checks) = match command {
        Command::RelationP => relation_p(cfg)?,
        Command::Margins => margins(cfg)?,
        Command::YaoSim => yao_sim(cfg)?,
        Command::Hamming => hamming(cfg)?,
        Command::Lemmas => lemmas(cfg)?,
    };
    table.sort();
    Ok(Outcome { experiment: command.name().to_string(), table, checks })
}

type Parts = (Table, Vec<Check>);

fn relation_p(cfg: &ExperimentConfig) -> Result<Parts> {
    let seed = cfg.seed()?;
    let ns = ExperimentConfig::list(&cfg.n, &[4, 16]);
    let ks = ExperimentConfig::list(&cfg.k, &[1, 2, 3, 4]);
    let instances = cfg.instances(100)?;
    let trials = cfg.trials(1000)?;
    let limits = ExactLimits::default();
    let mut table = Table::new(&[
        "protocol",
        "n",
        "k",
        "cost_bits",
        "exact_dontknow",
        "exact_invalid",
        "mc_estimate",
        "radius",
    ]);
    let mut checks = Vec::new();
    for &n in &ns {
        let inputs: Vec<(BitString, BobInput)> = (0..instances)
            .map(|i| {
                let mut rng = derive_rng(seed, &["relation-p".into(), "instance".into(), n.into(), i.into()]);
                random_instance_with(n, &mut rng).map(|inst| inst.split())
            })
            .collect::<smplab::Result<_>>()
            .with_context(|| format!("relation-p instances for n = {n}"))?;
        let side = grid_side(n);
        for &k in &ks {
            let w = smplab::bits::ceil_log2(n as u128);
            let mut protocols: Vec<(&str, ClassicalSmpProtocol<BitString, BobInput>, usize)> = vec![
                ("public-coin", public_coin_protocol_p(n, k)?, k * (2 * w + 3)),
                ("public-coin-referee-sees-coin", public_coin_protocol_p_referee_sees_coin(n, k)?, 3 * k),
            ];
            if let Some(side) = side {
                let ws = smplab::bits::ceil_log2(side as u128);
                protocols.push(("grid", grid_protocol_p(n, k)?, k * (3 * side + 2 * ws)));
            }
            let denominator = 1u64 << k;
            let target = 1.0 / denominator as f64;
            let spec = problem_p(target.min(0.5))?;
            for (label, protocol, formula) in protocols {
                let cost = protocol.cost_bits();
                checks.push(Check::new(
                    format!("relation-p {label} n={n} k={k} cost formula"),
                    cost == formula,
                    format!("{cost} bits, formula {formula}"),
                ));
                let (exact_dk, exact_inv) = if protocol.coins().total() <= limits.max_coin_space {
                    let report = evaluate_exact(&protocol, &spec, &inputs, &limits)?;
                    let rational = report.inputs.iter().all(|r| {
                        r.exact_counts.as_ref().is_some_and(|c| c.dont_know_equals(1, denominator) && c.invalid == 0)
                    });
                    checks.push(Check::new(
                        format!("relation-p {label} n={n} k={k} exact"),
                        rational,
                        format!("dont-know = 1/{denominator} and invalid = 0 on {instances} instances"),
                    ));
                    let dk = report.inputs.iter().map(|r| r.p_dontknow).fold(0.0, f64::max);
                    (Some(dk), Some(report.max_invalid()))
                } else {
                    (None, None)
                };
                let mc_seed = derive_seed(seed, &["relation-p".into(), label.into(), n.into(), k.into()]);
                let mc = evaluate_monte_carlo(&protocol, &spec, &inputs, trials, mc_seed)?;
                let pooled = mean(mc.inputs.iter().map(|r| r.p_dontknow));
                let radius = three_sigma(target, trials * instances as u64);
                checks.push(Check::new(
                    format!("relation-p {label} n={n} k={k} monte-carlo"),
                    (pooled - target).abs() <= radius && mc.max_invalid() == 0.0,
                    format!("pooled dont-know {pooled} vs {target}, 3 sigma {radius}"),
                ));
                table.push(vec![
                    label.into(),
                    n.into(),
                    k.into(),
                    cost.into(),
                    exact_dk.into(),
                    exact_inv.into(),
                    pooled.into(),
                    radius.into(),
                ]);
            }
        }
    }
    Ok((table, checks))
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn margins(cfg: &ExperimentConfig) -> Result<Parts> {
    let ns = ExperimentConfig::list(&cfg.n, &[2, 3, 4]);
    if let Some(&bad) = ns.iter().find(|&&n| n == 0 || n > 4) {
        bail!("margins needs 1 <= n <= 4 for inner-product matrices, got n = {bad}");
    }
    let mut table = Table::new(&[
        "function",
        "n",
        "points",
        "spectral_norm",
        "spectral_method",
        "forster_bound",
        "constructed_margin",
        "delta0",
        "delta1",
    ]);
    let mut checks = Vec::new();
    for &n in &ns {
        let points = 1usize << n;
        let rows: [(&str, MarginRealization); 2] = [
            ("equality", equality_realization(points)?),
            ("inner-product", column_realization(&ip_sign_matrix(n)?)?),
        ];
        for (function, realization) in rows {
            let sign = realization.sign_matrix().context("realization covers every input pair")?;
            let norm = spectral_norm(&sign);
            let bound = norm.value / ((sign.rows() * sign.cols()) as f64).sqrt();
            let margin = realization.worst_signed_margin();
            let embedding = realization_to_embedding(&realization)?;
            checks.push(Check::new(
                format!("margins {function} n={n} margin below bound"),
                margin > 0.0 && margin <= bound + 1e-6,
                format!("margin {margin}, bound {bound}"),
            ));
            if function == "inner-product" {
                let expected = (points as f64).sqrt();
                checks.push(Check::new(
                    format!("margins inner-product n={n} spectral norm"),
                    (norm.value - expected).abs() <= 1e-9 * expected,
                    format!("{} vs sqrt(2^{n}) = {expected}", norm.value),
                ));
            }
            let method = match norm.method {
                SpectralMethod::PowerIteration { .. } => "power-iteration",
                SpectralMethod::Eigensolve => "eigensolve",
            };
            table.push(vec![
                function.into(),
                n.into(),
                points.into(),
                norm.value.into(),
                method.into(),
                bound.into(),
                margin.into(),
                embedding.delta0().into(),
                embedding.delta1().into(),
            ]);
        }
    }
    Ok((table, checks))
}

const YAO_INPUTS: usize = 8;

fn yao_sim(cfg: &ExperimentConfig) -> Result<Parts> {
    let seed = cfg.seed()?;
    let eps = cfg.eps()?;
    let cs = ExperimentConfig::list(&cfg.c, &[1, 2, 3]);
    let nps = ExperimentConfig::list(&cfg.n_prime, &[8]);
    let tables = cfg.instances(10)?;
    let mut table = Table::new(&[
        "c",
        "n_prime",
        "table",
        "dim",
        "copies",
        "cost_qubits",
        "identity_defect",
        "exact_error",
    ]);
    let mut checks = Vec::new();
    for &c in &cs {
        if c == 0 || c > 12 {
            bail!("yao-sim needs 1 <= c <= 12, got c = {c}");
        }
        for &np in &nps {
            let mut worst_defect: f64 = 0.0;
            let mut worst_error: f64 = 0.0;
            let mut copies_ok = true;
            for t in 0..tables {
                let mut rng = derive_rng(seed, &["yao".into(), (c as u64).into(), np.into(), t.into()]);
                let pt = random_separated_table(np, c, YAO_INPUTS, YAO_INPUTS, &mut rng)?;
                let embedding = build_fingerprint_states(&pt)?;
                let scale = f64::from(1u32 << c).sqrt();
                let mut defect: f64 = 0.0;
                for x in 0..pt.x_count() {
                    let a = pt.alice_fingerprint(x);
                    for y in 0..pt.y_count() {
                        let ip: f64 = a.iter().zip(pt.bob_fingerprint(y)).map(|(u, v)| u * v).sum();
                        defect = defect.max((ip - pt.acceptance(x, y) / scale).abs());
                    }
                }
                let protocol = simulate_public_coin(&pt, eps)?;
                let report =
                    evaluate_exact(&protocol, &embedding.problem_spec(), &embedding.domain_inputs(), &ExactLimits::default())?;
                copies_ok &= protocol.copies() == required_copies(embedding.gap(), eps)?;
                worst_defect = worst_defect.max(defect);
                worst_error = worst_error.max(report.worst_case);
                table.push(vec![
                    c.into(),
                    np.into(),
                    t.into(),
                    protocol.dim().into(),
                    protocol.copies().into(),
                    protocol.cost_qubits().into(),
                    defect.into(),
                    report.worst_case.into(),
                ]);
            }
            checks.push(Check::new(
                format!("yao-sim c={c} n'={np} inner-product identity"),
                worst_defect <= 1e-12,
                format!("largest defect {worst_defect} over {tables} tables"),
            ));
            checks.push(Check::new(
                format!("yao-sim c={c} n'={np} exact error"),
                worst_error <= eps,
                format!("largest error {worst_error}, eps {eps}"),
            ));
            checks.push(Check::new(
                format!("yao-sim c={c} n'={np} copies"),
                copies_ok,
                "copies equal ceil(8 ln(1/eps) / gap^2)".to_string(),
            ));
        }
    }
    for pair in cs.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let gap = |c: u32| 1.0 / (3.0 * f64::from(1u32 << c));
        let ratio = required_copies_real(gap(hi), eps) / required_copies_real(gap(lo), eps);
        let expected = 4f64.powi(hi as i32 - lo as i32);
        checks.push(Check::new(
            format!("yao-sim copies scale from c={lo} to c={hi}"),
            (ratio - expected).abs() <= 1e-9 * expected,
            format!("ratio {ratio}, expected {expected}"),
        ));
    }
    Ok((table, checks))
}

struct HamRow {
    m: Option<usize>,
    copies: Option<usize>,
    cost: usize,
    cost_unit: &'static str,
    exact_error: Option<f64>,
    mc_error: Option<f64>,
    radius: Option<f64>,
    bound: Option<f64>,
    fidelity: Option<f64>,
}

const HAM_COLUMNS: [&str; 13] = [
    "variant",
    "n",
    "d",
    "status",
    "m",
    "copies",
    "cost",
    "cost_unit",
    "exact_error",
    "mc_error",
    "radius",
    "bound",
    "fidelity",
];

/// Near instances cycle through `Δ = d, d-1, ..., 0`; far ones sit at `Δ = d + 1`.
pub fn hamming_instances(n: usize, d: usize, per_side: usize, seed: u64, tag: &str) -> Result<Vec<HamInstance>> {
    let mut out = Vec::with_capacity(2 * per_side);
    for i in 0..per_side {
        for (side, delta) in [("near", d - i % (d + 1)), ("far", d + 1)] {
            let mut rng = derive_rng(seed, &["hamming".into(), tag.into(), side.into(), n.into(), d.into(), i.into()]);
            out.push(instance_at_distance(n, d, delta, &mut rng)?);
        }
    }
    Ok(out)
}

fn ham_spec(d: usize) -> ProblemSpec<BitString, BitString> {
    ProblemSpec::boolean(format!("ham(d={d})"), move |x: &BitString, y: &BitString| {
        (0..x.len()).filter(|&i| x.get(i) != y.get(i)).count() <= d
    })
}

fn pairs(instances: &[HamInstance]) -> Vec<(BitString, BitString)> {
    instances.iter().map(|h| (h.x.clone(), h.y.clone())).collect()
}

fn worst_error(report: &EvaluationReport) -> f64 {
    report.inputs.iter().map(|r| r.p_invalid).fold(0.0, f64::max)
}

/// Compares every Monte-Carlo estimate with the exact value it should track.
fn mc_tracks_exact(mc: &EvaluationReport, exact: &[f64], trials: u64) -> (bool, f64) {
    let mut worst_gap: f64 = 0.0;
    let mut ok = true;
    for (r, &p) in mc.inputs.iter().zip(exact) {
        let gap = (r.p_invalid - p).abs();
        ok &= gap <= three_sigma(p, trials);
        worst_gap = worst_gap.max(gap);
    }
    (ok, worst_gap)
}

fn hamming(cfg: &ExperimentConfig) -> Result<Parts> {
    let seed = cfg.seed()?;
    let eps = cfg.eps()?;
    let trials = cfg.trials(10_000)?;
    let per_side = cfg.instances(2)?;
    let runs = cfg.runs.unwrap_or(1000);
    let ds = ExperimentConfig::list(&cfg.d, &[1, 2, 3]);
    let variants = ExperimentConfig::list(&cfg.variant, &HamVariant::ALL);
    let mut table = Table::new(&HAM_COLUMNS);
    let mut checks = Vec::new();
    let mut sketch_lengths: Vec<(usize, usize, usize)> = Vec::new();
    for &variant in &variants {
        let ns = cfg.n.clone().unwrap_or_else(|| vec![variant.default_n()]);
        for &n in &ns {
            for &d in &ds {
                let name = variant.name();
                let result = hamming_row(variant, n, d, eps, trials, per_side, runs, seed, &mut checks);
                let (status, row) = match result {
                    Ok(row) => ("ok".to_string(), Some(row)),
                    Err(e) => match e.downcast_ref::<CoreError>() {
                        Some(CoreError::BudgetExceeded(msg)) => (format!("skipped: {msg}"), None),
                        Some(CoreError::InvalidParameter(msg)) => (format!("skipped: {msg}"), None),
                        _ => return Err(e.context(format!("{name} n={n} d={d}"))),
                    },
                };
                if let (HamVariant::ParitySketch, Some(r)) = (variant, &row) {
                    sketch_lengths.push((n, d, r.m.unwrap_or(0)));
                }
                let row = row.unwrap_or(HamRow {
                    m: None,
                    copies: None,
                    cost: 0,
                    cost_unit: "",
                    exact_error: None,
                    mc_error: None,
                    radius: None,
                    bound: None,
                    fidelity: None,
                });
                let cost = if status == "ok" { Cell::from(row.cost) } else { Cell::Empty };
                table.push(vec![
                    name.into(),
                    n.into(),
                    d.into(),
                    status.into(),
                    row.m.into(),
                    row.copies.into(),
                    cost,
                    row.cost_unit.into(),
                    row.exact_error.into(),
                    row.mc_error.into(),
                    row.radius.into(),
                    row.bound.into(),
                    row.fidelity.into(),
                ]);
            }
        }
    }
    sketch_lengths.sort();
    for w in sketch_lengths.windows(2) {
        let ((n0, d0, m0), (n1, d1, m1)) = (w[0], w[1]);
        if n0 != n1 {
            continue;
        }
        let (r0, r1) = (m0 as f64 / ((d0 + 1) * (d0 + 1)) as f64, m1 as f64 / ((d1 + 1) * (d1 + 1)) as f64);
        checks.push(Check::new(
            format!("hamming parity-sketch n={n0} length grows quadratically from d={d0} to d={d1}"),
            r1 >= r0,
            format!("m/(d+1)^2 = {r0} then {r1}"),
        ));
    }
    Ok((table, checks))
}

#[allow(clippy::too_many_arguments)]
fn hamming_row(
    variant: HamVariant,
    n: usize,
    d: usize,
    eps: f64,
    trials: u64,
    per_side: usize,
    runs: usize,
    seed: u64,
    checks: &mut Vec<Check>,
) -> Result<HamRow> {
    let name = variant.name();
    let tag = format!("{name} n={n} d={d}");
    let mc_seed = derive_seed(seed, &["hamming".into(), name.into(), "mc".into(), n.into(), d.into()]);
    let spec = ham_spec(d);
    match variant {
        HamVariant::ParitySketch => {
            let sketch_seed = derive_seed(seed, &["hamming".into(), name.into(), n.into(), d.into()]);
            let sketch = parity_sketch_protocol(n, d, eps, sketch_seed)?;
            let params = &sketch.params;
            let exact_worst = params.error_at(d).max(params.error_at(d + 1));
            checks.push(Check::new(
                format!("hamming {tag} exact error"),
                exact_worst <= eps,
                format!("error at d: {}, at d+1: {}", params.error_at(d), params.error_at(d + 1)),
            ));
            // the sketch error depends only on the distance, so inputs sit at Δ = d and Δ = d + 1
            let mut inputs = Vec::new();
            let mut exact = Vec::new();
            for i in 0..per_side {
                for delta in [d, d + 1] {
                    let mut rng = derive_rng(
                        seed,
                        &["hamming".into(), name.into(), "input".into(), n.into(), delta.into(), i.into()],
                    );
                    let h = instance_at_distance(n, d, delta, &mut rng)?;
                    inputs.push((h.x, h.y));
                    exact.push(params.error_at(delta));
                }
            }
            let mc = evaluate_monte_carlo(&sketch.protocol, &spec, &inputs, trials, mc_seed)?;
            let (ok, gap) = mc_tracks_exact(&mc, &exact, trials);
            let radius = exact.iter().map(|&p| three_sigma(p, trials)).fold(0.0, f64::max);
            checks.push(Check::new(
                format!("hamming {tag} monte-carlo"),
                ok,
                format!("largest |mc - exact| {gap}, 3 sigma {radius}"),
            ));
            Ok(HamRow {
                m: Some(params.m_sketch),
                copies: None,
                cost: sketch.protocol.cost_bits(),
                cost_unit: "bits",
                exact_error: Some(exact_worst),
                mc_error: Some(worst_error(&mc)),
                radius: Some(radius),
                bound: None,
                fidelity: None,
            })
        }
        HamVariant::ClassicalBall => {
            let ball_seed = derive_seed(seed, &["hamming".into(), name.into(), n.into(), d.into()]);
            let ball = classical_ball_protocol(n, d, eps, ball_seed)?;
            let instances = hamming_instances(n, d, per_side, seed, name)?;
            let mc = evaluate_monte_carlo(&ball.protocol, &spec, &pairs(&instances), trials, mc_seed)?;
            let near_worst = near_far_worst(&mc, &instances, true);
            let far_worst = near_far_worst(&mc, &instances, false);
            let radius = three_sigma(eps, trials);
            checks.push(Check::new(
                format!("hamming {tag} completeness"),
                near_worst == 0.0,
                format!("largest rejection rate on near inputs {near_worst}"),
            ));
            checks.push(Check::new(
                format!("hamming {tag} soundness"),
                far_worst <= eps + radius,
                format!("largest acceptance rate on far inputs {far_worst}, eps {eps}, 3 sigma {radius}"),
            ));
            Ok(HamRow {
                m: None,
                copies: Some(ball.params.parities),
                cost: ball.protocol.cost_bits(),
                cost_unit: "bits",
                exact_error: None,
                mc_error: Some(near_worst.max(far_worst)),
                radius: Some(radius),
                bound: Some(ball.params.soundness_bound),
                fidelity: None,
            })
        }
        HamVariant::QuantumBallFresh => {
            let code_seed = derive_seed(seed, &["hamming".into(), name.into(), "code".into(), n.into()]);
            let m = (n as f64 / 0.25 - 1e-9).ceil() as usize;
            let code = random_linear_code(n, 0.25, distance_floor_for(0.05, m), code_seed)?;
            let ball = ball_search_protocol(n, d, eps, &code, BallVariant::FreshCopies, BallOptions::default())?;
            let instances = hamming_instances(n, d, per_side, seed, name)?;
            let inputs = pairs(&instances);
            let exact_report = evaluate_exact(&ball.protocol, &spec, &inputs, &ExactLimits::default())?;
            let exact: Vec<f64> = exact_report.inputs.iter().map(|r| r.p_invalid).collect();
            let mc = evaluate_monte_carlo(&ball.protocol, &spec, &inputs, trials, mc_seed)?;
            let (ok, gap) = mc_tracks_exact(&mc, &exact, trials);
            let exact_worst = exact.iter().copied().fold(0.0, f64::max);
            let near_exact = near_far_worst(&exact_report, &instances, true);
            let radius = exact.iter().map(|&p| three_sigma(p, trials)).fold(0.0, f64::max);
            checks.push(Check::new(
                format!("hamming {tag} completeness"),
                near_exact == 0.0,
                format!("largest exact rejection on near inputs {near_exact}"),
            ));
            checks.push(Check::new(
                format!("hamming {tag} exact error"),
                exact_worst <= eps,
                format!("largest exact error {exact_worst}, bound {}", ball.params.soundness_bound),
            ));
            checks.push(Check::new(
                format!("hamming {tag} monte-carlo"),
                ok,
                format!("largest |mc - exact| {gap}, 3 sigma {radius}"),
            ));
            Ok(HamRow {
                m: Some(code.m()),
                copies: Some(ball.protocol.copies()),
                cost: ball.protocol.cost_qubits(),
                cost_unit: "qubits",
                exact_error: Some(exact_worst),
                mc_error: Some(worst_error(&mc)),
                radius: Some(radius),
                bound: Some(ball.params.soundness_bound),
                fidelity: None,
            })
        }
        HamVariant::QuantumBallCoherent => {
            let code_seed = derive_seed(seed, &["hamming".into(), name.into(), "code".into(), n.into()]);
            let code = lowest_bias_code(n, 0.5, 1, code_seed, 64)?;
            let copies = 3;
            let opts = BallOptions { copies_per_candidate: Some(copies), pass_threshold: None };
            let ball = ball_search_protocol(n, d, eps, &code, BallVariant::CoherentReuse, opts)?;
            let demo_seed = derive_seed(seed, &["hamming".into(), name.into(), "demo".into(), n.into(), d.into()]);
            let report = coherent_demo(&code, d, copies, runs, demo_seed)?;
            let error = 1.0 - report.agreement_rate();
            checks.push(Check::new(
                format!("hamming {tag} agreement"),
                error <= eps,
                format!("{} of {runs} runs agree with the predicate", report.agreements),
            ));
            checks.push(Check::new(
                format!("hamming {tag} fidelity telemetry"),
                report.telemetry_steps == runs * report.candidates_per_run,
                format!("{} of {} candidate steps", report.telemetry_steps, runs * report.candidates_per_run),
            ));
            Ok(HamRow {
                m: Some(code.m()),
                copies: Some(copies),
                cost: ball.protocol.cost_qubits(),
                cost_unit: "qubits",
                exact_error: None,
                mc_error: Some(error),
                radius: Some(three_sigma(eps, runs.max(1) as u64)),
                bound: Some(ball.params.soundness_bound),
                fidelity: Some(report.mean_final_fidelity),
            })
        }
    }
}

fn near_far_worst(report: &EvaluationReport, instances: &[HamInstance], near: bool) -> f64 {
    report
        .inputs
        .iter()
        .zip(instances)
        .filter(|(_, h)| ham_predicate(h) == near)
        .map(|(r, _)| r.p_invalid)
        .fold(0.0, f64::max)
}

fn lemmas(cfg: &ExperimentConfig) -> Result<Parts> {
    let seed = cfg.seed()?;
    let quadruples = cfg.instances(200)?;
    let mut table = Table::new(&[
        "trial",
        "dim_a",
        "dim_b",
        "a0",
        "a1",
        "b0",
        "b1",
        "quarter_sum",
        "bound_4ab_upper",
        "factorization_defect",
        "chain_holds",
    ]);
    let mut failures = 0;
    let mut worst_defect: f64 = 0.0;
    for trial in 0..quadruples {
        let mut rng = derive_rng(seed, &["lemmas".into(), trial.into()]);
        let (da, db) = (rng.gen_range(2..=4usize), rng.gen_range(2..=4usize));
        let state = |dim: usize, rng: &mut smplab::seed::Rng| {
            let rank = rng.gen_range(1..=dim);
            random_density_matrix(dim, rank, rng)
        };
        let rho = [state(da, &mut rng), state(da, &mut rng)];
        let sigma = [state(db, &mut rng), state(db, &mut rng)];
        let report = direct_product_check([&rho[0], &rho[1]], [&sigma[0], &sigma[1]])?;
        failures += usize::from(!report.chain_holds);
        worst_defect = worst_defect.max(report.factorization_defect);
        table.push(vec![
            trial.into(),
            da.into(),
            db.into(),
            report.rates_a.a0.into(),
            report.rates_a.a1.into(),
            report.rates_b.a0.into(),
            report.rates_b.a1.into(),
            report.quarter_sum.into(),
            report.bound_4ab_upper.into(),
            report.factorization_defect.into(),
            report.chain_holds.to_string().into(),
        ]);
    }
    let mut checks = vec![Check::new(
        "lemmas direct product",
        failures == 0 && worst_defect <= 1e-9,
        format!("{failures} failures in {quadruples} quadruples, largest defect {worst_defect}"),
    )];
    for (label, chi, expected, tol) in holevo_examples()? {
        checks.push(Check::new(
            format!("lemmas holevo {label}"),
            (chi - expected).abs() <= tol,
            format!("chi {chi}, expected {expected}"),
        ));
    }
    Ok((table, checks))
}

/// The three standard ensembles: an orthonormal basis, identical states, and `{|0>, |+>}`.
pub fn holevo_examples() -> Result<Vec<(&'static str, f64, f64, f64)>> {
    let zero = PureState::basis(2, 0)?;
    let one = PureState::basis(2, 1)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::from_real(&[h, h])?;
    let basis = Ensemble::uniform(vec![zero.to_density(), one.to_density()])?;
    let same = Ensemble::uniform(vec![plus.to_density(); 3])?;
    let mixed = Ensemble::uniform(vec![zero.to_density(), plus.to_density()])?;
    Ok(vec![
        ("orthogonal pair", holevo_chi(&basis), 1.0, 1e-9),
        ("identical states", holevo_chi(&same), 0.0, 1e-9),
        ("zero and plus", holevo_chi(&mixed), 0.6009, 1e-3),
    ])
}
