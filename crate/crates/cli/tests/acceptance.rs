//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported as FAIL when they fail but do
//! not change the exit status. Any other failure makes the run exit with 1.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;

use smplab::bits::BitString;
use smplab::geometry::{
    column_realization, embedding_to_realization, equality_realization, forster_bound, ip_sign_matrix,
    random_projection, realization_to_embedding, required_copies_real, spectral_norm, DomainPair, MarginRealization,
    ProjectionKind, SignMatrix, ThresholdEmbedding,
};
use smplab::hamming::{
    ball_search_protocol, coherent_demo, lowest_bias_code, parity_sketch_protocol, rac_reduction,
    random_linear_code, BallOptions, HamInstance,
};
use smplab::hamming::{ham_predicate, instance_at_distance};
use smplab::lemmas::direct_product_check;
use smplab::protocol::{evaluate_exact, evaluate_monte_carlo, BallVariant, ExactLimits, ProblemSpec};
use smplab::quantum::{holevo_chi, random_density_matrix, random_pure_state, Ensemble, PureState, SwapTestSampler};
use smplab::relation_p::{
    grid_protocol_p, problem_p, public_coin_protocol_p, public_coin_protocol_p_referee_sees_coin, random_instance_p,
};
use smplab::seed::{derive_rng, derive_seed};
use smplab::yao::{build_fingerprint_states, random_separated_table, simulate_public_coin};

/// Criteria that cannot pass with the specified procedure; see the README.
const KNOWN_RED: &[u32] = &[12];

const ROOT_SEED: u64 = 20_240_611;

type Verdict = Result<(bool, String), String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sigma3(p: f64, n: u64) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in [4usize, 16] {
        let inputs: Vec<_> = (0..100u64)
            .map(|i| random_instance_p(n, derive_seed(ROOT_SEED, &["c1".into(), n.into(), i.into()])).map(|p| p.split()))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        for k in 1..=4usize {
            let den = 1u64 << k;
            let spec = problem_p(1.0 / den as f64).map_err(err)?;
            let protocols = [
                public_coin_protocol_p(n, k).map_err(err)?,
                public_coin_protocol_p_referee_sees_coin(n, k).map_err(err)?,
                grid_protocol_p(n, k).map_err(err)?,
            ];
            for p in &protocols {
                let report = evaluate_exact(p, &spec, &inputs, &ExactLimits::default()).map_err(err)?;
                for row in &report.inputs {
                    let c = row.exact_counts.as_ref().ok_or("exact counts missing")?;
                    // dont_know / total == 1 / 2^k as integers
                    if c.dont_know as u128 * den as u128 != c.total as u128 || c.invalid != 0 {
                        failures.push(format!("{} input {}", report.protocol, row.input_id));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        failures.is_empty() && secs < 10.0,
        format!("{} failing (protocol, instance) pairs, {secs:.2} s", failures.len()),
    ))
}

fn criterion_2() -> Verdict {
    let mut rng = derive_rng(ROOT_SEED, &["c2".into()]);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (da, db) = (rng.gen_range(2..=4usize), rng.gen_range(2..=4usize));
        let mut state = |dim: usize| {
            let rank = rng.gen_range(1..=dim);
            random_density_matrix(dim, rank, &mut rng)
        };
        let (r0, r1, s0, s1) = (state(da), state(da), state(db), state(db));
        let rep = direct_product_check([&r0, &r1], [&s0, &s1]).map_err(err)?;
        let (a, b) = (rep.rates_a, rep.rates_b);
        let factored = (a.a0 + a.a1) * (b.a0 + b.a1) / 4.0;
        let mut defect: f64 = 0.0;
        for c in 0..2 {
            for d in 0..2 {
                defect = defect.max((rep.product_rates[2 * c + d] - a.component(c as u8) * b.component(d as u8)).abs());
            }
        }
        let upper_a = (a.a0 + a.a1) / 2.0;
        let upper_b = (b.a0 + b.a1) / 2.0;
        let ok = defect <= 1e-9
            && (rep.quarter_sum - factored).abs() <= 1e-9
            && rep.quarter_sum <= 4.0 * upper_a * upper_b + 1e-9;
        failures += usize::from(!ok);
        worst = worst.max(defect);
    }
    Ok((failures == 0, format!("{failures} failures in 200 quadruples, largest defect {worst:.2e}")))
}

fn all_unit(vectors: &[Vec<f64>]) -> bool {
    vectors.iter().all(|v| (dot(v, v).sqrt() - 1.0).abs() <= 1e-10)
}

fn criterion_3() -> Verdict {
    let mut rng = derive_rng(ROOT_SEED, &["c3".into()]);
    let mut failures = 0;
    let mut trials = 0;
    while trials < 100 {
        let dim = rng.gen_range(2..=5usize);
        let (xs, ys) = (rng.gen_range(2..=6usize), rng.gen_range(2..=6usize));
        let alpha: Vec<Vec<f64>> = (0..xs).map(|_| unit_vector(dim, &mut rng)).collect();
        let beta: Vec<Vec<f64>> = (0..ys).map(|_| unit_vector(dim, &mut rng)).collect();
        if trials % 2 == 0 {
            // embedding -> realization
            let (d0, d1) = (0.15, 0.45);
            let domain: Vec<DomainPair> = (0..xs)
                .flat_map(|x| (0..ys).map(move |y| (x, y)))
                .filter_map(|(x, y)| {
                    let s = dot(&alpha[x], &beta[y]).powi(2);
                    (s <= d0 || s >= d1).then_some(DomainPair { x, y, value: s >= d1 })
                })
                .collect();
            if domain.is_empty() {
                continue;
            }
            let e = ThresholdEmbedding::new(alpha, beta, d0, d1, domain.clone()).map_err(err)?;
            let r = embedding_to_realization(&e).map_err(err)?;
            let gamma = (d1 - d0) / (2.0 + d1 + d0);
            let margins_ok = domain.iter().all(|p| {
                let ip = dot(&r.alpha()[p.x], &r.beta()[p.y]);
                if p.value {
                    ip <= -gamma + 1e-9
                } else {
                    ip >= gamma - 1e-9
                }
            });
            let ok = (r.gamma() - gamma).abs() <= 1e-9 && margins_ok && all_unit(r.alpha()) && all_unit(r.beta());
            failures += usize::from(!ok);
        } else {
            // realization -> embedding
            let gamma = 0.2;
            let domain: Vec<DomainPair> = (0..xs)
                .flat_map(|x| (0..ys).map(move |y| (x, y)))
                .filter_map(|(x, y)| {
                    let ip = dot(&alpha[x], &beta[y]);
                    (ip.abs() >= gamma).then_some(DomainPair { x, y, value: ip < 0.0 })
                })
                .collect();
            if domain.is_empty() {
                continue;
            }
            let r = MarginRealization::new(alpha, beta, gamma, domain.clone()).map_err(err)?;
            let e = realization_to_embedding(&r).map_err(err)?;
            let (d0, d1) = ((1.0 - gamma).powi(2) / 4.0, (1.0 + gamma).powi(2) / 4.0);
            let overlaps_ok = domain.iter().all(|p| {
                let s = dot(&e.alpha()[p.x], &e.beta()[p.y]).powi(2);
                if p.value {
                    s >= d1 - 1e-9
                } else {
                    s <= d0 + 1e-9
                }
            });
            let back = embedding_to_realization(&e).map_err(err)?;
            let gamma_back = (d1 - d0) / (2.0 + d1 + d0);
            let ok = (e.delta0() - d0).abs() <= 1e-9
                && (e.delta1() - d1).abs() <= 1e-9
                && overlaps_ok
                && (back.gamma() - gamma_back).abs() <= 1e-9
                && back.worst_signed_margin() >= gamma_back - 1e-9
                && all_unit(e.alpha())
                && all_unit(e.beta())
                && all_unit(back.alpha())
                && all_unit(back.beta());
            failures += usize::from(!ok);
        }
        trials += 1;
    }
    Ok((failures == 0, format!("{failures} failures in {trials} conversions")))
}

fn svd_norm(m: &SignMatrix) -> f64 {
    let dm = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j) as f64);
    dm.singular_values().max()
}

fn criterion_4() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in 2..=4usize {
        let m = ip_sign_matrix(n).map_err(err)?;
        let norm = spectral_norm(&m).value;
        let expected = f64::from(1u32 << n).sqrt();
        let rel = (norm - expected).abs() / expected;
        ok &= rel <= 1e-9;
        notes.push(format!("IP n={n} rel err {rel:.1e}"));
    }
    let mut realizations: Vec<MarginRealization> = Vec::new();
    for n in 2..=4usize {
        realizations.push(column_realization(&ip_sign_matrix(n).map_err(err)?).map_err(err)?);
    }
    for points in [2usize, 4, 8, 16] {
        realizations.push(equality_realization(points).map_err(err)?);
    }
    let base = equality_realization(16).map_err(err)?;
    for seed in 0..20u64 {
        if let Ok(p) = random_projection(&base, 200, seed, ProjectionKind::Gaussian) {
            realizations.push(p);
        }
    }
    let mut worst_slack = f64::INFINITY;
    for r in &realizations {
        let m = r.sign_matrix().ok_or("realization is not total")?;
        let bound = forster_bound(&m);
        let oracle = svd_norm(&m) / ((m.rows() * m.cols()) as f64).sqrt();
        ok &= (bound - oracle).abs() <= 1e-9 * oracle.max(1.0);
        let slack = bound + 1e-6 - r.worst_signed_margin();
        ok &= slack >= 0.0;
        worst_slack = worst_slack.min(slack);
    }
    notes.push(format!("{} realizations, smallest bound - margin {worst_slack:.3e}", realizations.len()));
    Ok((ok, notes.join("; ")))
}

fn criterion_5() -> Verdict {
    let mut rng = derive_rng(ROOT_SEED, &["c5".into()]);
    let eps = 1.0 / 3.0;
    let mut worst_defect: f64 = 0.0;
    let mut worst_error: f64 = 0.0;
    let mut copies_ok = true;
    for t in 0..50 {
        let c = 1 + (t % 3) as u32;
        let n_prime = rng.gen_range(1..=8usize);
        let (xs, ys) = (rng.gen_range(1..=16usize), rng.gen_range(1..=16usize));
        let table = random_separated_table(n_prime, c, xs, ys, &mut rng).map_err(err)?;
        let e = build_fingerprint_states(&table).map_err(err)?;
        let scale = f64::from(1u32 << c).sqrt();
        for x in 0..xs {
            for y in 0..ys {
                let accepted = (0..n_prime).filter(|&r| table.referee_output(table.alice_message(r, x), table.bob_message(r, y))).count();
                let p = accepted as f64 / n_prime as f64;
                if p > 1.0 / 3.0 + 1e-12 && p < 2.0 / 3.0 - 1e-12 {
                    return Err(format!("table {t} has P({x},{y}) = {p} inside the band"));
                }
                worst_defect = worst_defect.max((dot(&table.alice_fingerprint(x), &table.bob_fingerprint(y)) - p / scale).abs());
            }
        }
        let protocol = simulate_public_coin(&table, eps).map_err(err)?;
        let report = evaluate_exact(&protocol, &e.problem_spec(), &e.domain_inputs(), &ExactLimits::default()).map_err(err)?;
        worst_error = worst_error.max(report.worst_case);
        let gap = 1.0 / (3.0 * f64::from(1u32 << c));
        let formula = (8.0 * (1.0 / eps).ln() / (gap * gap)).ceil() as usize;
        copies_ok &= protocol.copies() == formula && (e.gap() - gap).abs() <= 1e-12;
    }
    let scaling_ok = (1..3).all(|c: i32| {
        let g = |c: i32| 1.0 / (3.0 * 2f64.powi(c));
        let ratio = required_copies_real(g(c + 1), eps) / required_copies_real(g(c), eps);
        (ratio - 4.0).abs() <= 1e-9
    });
    Ok((
        worst_defect <= 1e-12 && worst_error <= eps && copies_ok && scaling_ok,
        format!(
            "identity defect {worst_defect:.1e}, worst exact error {worst_error:.4}, copies match formula: {copies_ok}, x4 scaling: {scaling_ok}"
        ),
    ))
}

fn criterion_6() -> Verdict {
    let mut rng = derive_rng(ROOT_SEED, &["c6".into()]);
    let trials = 100_000u64;
    let mut within = 0;
    for pair in 0..20u64 {
        let dim = rng.gen_range(2..=6usize);
        let (a, b) = (random_pure_state(dim, &mut rng), random_pure_state(dim, &mut rng));
        let overlap = a.amplitudes().iter().zip(b.amplitudes()).map(|(u, v)| u.conj() * v).sum::<smplab::linalg::C64>();
        let p = 0.5 + overlap.norm_sqr() / 2.0;
        let mut sampler = SwapTestSampler::new(&a, &b, derive_seed(ROOT_SEED, &["c6-sampler".into(), pair.into()])).map_err(err)?;
        let zeros = (0..trials).filter(|_| sampler.sample() == 0).count();
        let freq = zeros as f64 / trials as f64;
        within += usize::from((freq - p).abs() <= sigma3(p, trials));
    }
    Ok((within >= 19, format!("{within}/20 pairs within 3 sigma")))
}

/// `P(Bin(m, q) >= t)` by summing the pmf in log space.
fn binomial_tail_at_least(m: usize, q: f64, t: usize) -> f64 {
    let mut ln_pmf = m as f64 * (1.0 - q).ln();
    let ratio = (q / (1.0 - q)).ln();
    let mut total = 0.0;
    for k in 0..=m {
        if k >= t {
            total += ln_pmf.exp();
        }
        if k < m {
            ln_pmf += ((m - k) as f64).ln() - ((k + 1) as f64).ln() + ratio;
        }
    }
    total
}

/// Probability that a random subset with inclusion `p` hits an odd number of `delta` coordinates.
fn odd_hit_probability(p: f64, delta: usize) -> f64 {
    let mut choose = 1.0;
    let mut total = 0.0;
    for j in 0..=delta {
        if j % 2 == 1 {
            total += choose * p.powi(j as i32) * (1.0 - p).powi((delta - j) as i32);
        }
        choose = choose * (delta - j) as f64 / (j + 1) as f64;
    }
    total
}

fn ham_spec(d: usize) -> ProblemSpec<BitString, BitString> {
    ProblemSpec::boolean("ham", move |x: &BitString, y: &BitString| {
        (0..x.len()).filter(|&i| x.get(i) != y.get(i)).count() <= d
    })
}

fn criterion_7() -> Verdict {
    let (n, eps, trials) = (32usize, 1.0 / 3.0, 10_000u64);
    let mut ok = true;
    let mut notes = Vec::new();
    let mut lengths = Vec::new();
    for d in 1..=3usize {
        let sketch = parity_sketch_protocol(n, d, eps, derive_seed(ROOT_SEED, &["c7".into(), d.into()])).map_err(err)?;
        let params = &sketch.params;
        let p = 1.0 / (2.0 * (d as f64 + 1.0));
        let (q0, q1) = (odd_hit_probability(p, d), odd_hit_probability(p, d + 1));
        let m = (8.0 * (2.0 / eps).ln() / (q1 - q0).powi(2)).ceil() as usize;
        let t = ((q0 + q1) / 2.0 * m as f64).floor() as usize;
        ok &= params.m_sketch == m && params.max_disagreements == t;
        let exact = [binomial_tail_at_least(m, q0, t + 1), 1.0 - binomial_tail_at_least(m, q1, t + 1)];
        ok &= exact.iter().all(|&e| e <= eps);
        ok &= (params.error_at(d) - exact[0]).abs() <= 1e-12 && (params.error_at(d + 1) - exact[1]).abs() <= 1e-12;
        let mut rng = derive_rng(ROOT_SEED, &["c7-inputs".into(), d.into()]);
        let inputs: Vec<_> = [d, d + 1]
            .iter()
            .map(|&delta| instance_at_distance(n, d, delta, &mut rng).map(|h| (h.x, h.y)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let mc = evaluate_monte_carlo(&sketch.protocol, &ham_spec(d), &inputs, trials, derive_seed(ROOT_SEED, &["c7-mc".into(), d.into()]))
            .map_err(err)?;
        for (row, &e) in mc.inputs.iter().zip(&exact) {
            ok &= (row.p_invalid - e).abs() <= sigma3(e, trials);
        }
        notes.push(format!("d={d}: m={m}, exact errors {:.2e}/{:.2e}", exact[0], exact[1]));
        lengths.push((d, m));
    }
    let ratios: Vec<f64> = lengths.iter().map(|&(d, m)| m as f64 / ((d + 1) * (d + 1)) as f64).collect();
    ok &= ratios.windows(2).all(|w| w[1] >= w[0]);
    notes.push(format!("m/(d+1)^2 = {ratios:.1?}"));
    Ok((ok, notes.join("; ")))
}

fn criterion_8() -> Verdict {
    let (n, d, eps, trials) = (10usize, 1usize, 1.0 / 3.0, 1000u64);
    let m = 40;
    let floor = (0.05 * m as f64).ceil() as usize;
    let code = random_linear_code(n, 0.25, floor, derive_seed(ROOT_SEED, &["c8-code".into()])).map_err(err)?;
    let brute = (1u128..1 << n)
        .map(|x| (0..n).filter(|&j| (x >> j) & 1 == 1).fold(0u128, |acc, j| acc ^ code.column(j)).count_ones() as usize)
        .min()
        .unwrap_or(0);
    let ball = ball_search_protocol(n, d, eps, &code, BallVariant::FreshCopies, BallOptions::default()).map_err(err)?;
    let mut rng = derive_rng(ROOT_SEED, &["c8-instances".into()]);
    let near: Vec<HamInstance> = (0..50).map(|i| instance_at_distance(n, d, i % 2, &mut rng)).collect::<Result<_, _>>().map_err(err)?;
    let far: Vec<HamInstance> = (0..50).map(|_| instance_at_distance(n, d, 2, &mut rng)).collect::<Result<_, _>>().map_err(err)?;
    let complete = near
        .iter()
        .map(|h| ball.protocol.accept_probability(&h.x, &h.y))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?
        .iter()
        .all(|&p| p == 1.0);
    let far_inputs: Vec<_> = far.iter().map(|h| (h.x.clone(), h.y.clone())).collect();
    let mc = evaluate_monte_carlo(&ball.protocol, &ham_spec(d), &far_inputs, trials, derive_seed(ROOT_SEED, &["c8-mc".into()]))
        .map_err(err)?;
    let worst = mc.inputs.iter().map(|r| r.p_invalid).fold(0.0, f64::max);
    let sound = worst <= eps + sigma3(eps, trials);
    Ok((
        brute >= floor && brute == code.min_distance() && complete && sound,
        format!(
            "m={}, brute-force distance {brute} (floor {floor}), completeness 1 on 50: {complete}, worst far accept rate {worst}",
            code.m()
        ),
    ))
}

fn criterion_9() -> Verdict {
    let code = lowest_bias_code(4, 0.5, 1, derive_seed(ROOT_SEED, &["c9-code".into()]), 64).map_err(err)?;
    let report = coherent_demo(&code, 1, 3, 1000, derive_seed(ROOT_SEED, &["c9-demo".into()])).map_err(err)?;
    let telemetry = report.telemetry_steps == report.runs * report.candidates_per_run && report.candidates_per_run == 5;
    Ok((
        code.m() == 8 && 3 * report.agreements >= 2 * report.runs && telemetry,
        format!(
            "m={}, {}/{} runs agree (near {}, far {}), telemetry steps {}",
            code.m(),
            report.agreements,
            report.runs,
            report.near_agreements,
            report.far_agreements,
            report.telemetry_steps
        ),
    ))
}

fn criterion_10() -> Verdict {
    let mut cases = 0u64;
    for d in 1..=6usize {
        let n = 2 * d + 2;
        for zmask in 0u32..1 << d {
            let z: BitString = (0..d).map(|j| (zmask >> j) & 1 == 1).collect();
            for i in 1..=d {
                let (x, y) = rac_reduction(&z, i, n).map_err(err)?;
                let delta = (0..n).filter(|&j| x.get(j) != y.get(j)).count();
                let zi = z.get(i - 1);
                let inst = HamInstance::new(d, x, y).map_err(err)?;
                if delta != d + 2 - 2 * usize::from(zi) || ham_predicate(&inst) != zi {
                    return Ok((false, format!("mismatch at d={d}, z={zmask:b}, i={i}: distance {delta}")));
                }
                cases += 1;
            }
        }
    }
    Ok((true, format!("{cases} cases")))
}

fn criterion_11() -> Verdict {
    let zero = PureState::basis(2, 0).map_err(err)?;
    let one = PureState::basis(2, 1).map_err(err)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::from_real(&[h, h]).map_err(err)?;
    let chi = [
        holevo_chi(&Ensemble::uniform(vec![zero.to_density(), one.to_density()]).map_err(err)?),
        holevo_chi(&Ensemble::uniform(vec![plus.to_density(); 2]).map_err(err)?),
        holevo_chi(&Ensemble::uniform(vec![zero.to_density(), plus.to_density()]).map_err(err)?),
    ];
    let ok = (chi[0] - 1.0).abs() <= 1e-9 && chi[1].abs() <= 1e-9 && (chi[2] - 0.6009).abs() <= 1e-3;
    Ok((ok, format!("chi = {:.6}, {:.6}, {:.6}", chi[0], chi[1], chi[2])))
}

fn criterion_12() -> Verdict {
    let r = equality_realization(16).map_err(err)?;
    let count = |kind| (0..100u64).filter(|&s| random_projection(&r, 200, s, kind).is_ok()).count();
    let gaussian = count(ProjectionKind::Gaussian);
    let orthogonal = count(ProjectionKind::OrthogonalGaussian);
    Ok((
        gaussian >= 90,
        format!(
            "gamma {:.4}: {gaussian}/100 Gaussian seeds keep margin >= gamma/2 (orthogonal kind, informational: {orthogonal}/100)",
            r.gamma()
        ),
    ))
}

fn run_binary(config: &Path, sub: &str, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_smplab"))
        .args([sub, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(err)?;
    if status.code() == Some(2) || status.code().is_none() {
        return Err(format!("{sub} exited with {status}"));
    }
    Ok(())
}

fn criterion_13() -> Verdict {
    let dir = std::env::temp_dir().join(format!("smplab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let configs = [
        ("relation-p", "n = [4, 16]\nk = [1, 2]\ntrials = 500\ninstances = 20\nseed = 99\n"),
        ("yao-sim", "c = [1, 2]\ninstances = 3\nseed = 99\n"),
        ("hamming", "variant = [\"parity-sketch\", \"classical-ball\", \"quantum-ball-fresh\"]\nd = [1]\ntrials = 2000\ninstances = 1\nseed = 99\n"),
        ("lemmas", "instances = 30\nseed = 99\n"),
    ];
    let mut identical = 0;
    for (sub, text) in configs {
        let cfg = dir.join(format!("{sub}.toml"));
        std::fs::write(&cfg, text).map_err(err)?;
        let (a, b) = (dir.join(format!("{sub}-1.csv")), dir.join(format!("{sub}-2.csv")));
        run_binary(&cfg, sub, &a)?;
        run_binary(&cfg, sub, &b)?;
        let (ba, bb) = (std::fs::read(&a).map_err(err)?, std::fs::read(&b).map_err(err)?);
        identical += usize::from(!ba.is_empty() && ba == bb);
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok((identical == configs.len(), format!("{identical}/{} subcommands byte-identical across two runs", configs.len())))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        (1, "relation-P exact dont-know", criterion_1),
        (2, "direct-product lemma", criterion_2),
        (3, "embedding/realization conversions", criterion_3),
        (4, "Forster bound", criterion_4),
        (5, "public-coin simulation", criterion_5),
        (6, "swap-test statistics", criterion_6),
        (7, "parity sketch", criterion_7),
        (8, "ball search with fresh copies", criterion_8),
        (9, "coherent-reuse demo", criterion_9),
        (10, "random-access-code reduction", criterion_10),
        (11, "Holevo examples", criterion_11),
        (12, "random projection", criterion_12),
        (13, "CLI determinism", criterion_13),
    ];
    let mut unexpected = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let mark = if passed { "PASS" } else { "FAIL" };
        let known = if !passed && KNOWN_RED.contains(&id) { " [known red]" } else { "" };
        println!("{mark} {id:>2} {title}: {detail} ({:.1} s){known}", start.elapsed().as_secs_f64());
        if !passed && known.is_empty() {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
