//! State-vector simulation of the ball-search referee that reuses one set of
//! `K` copy-pairs for every candidate.
//!
//! Registers are ordered `A_0 B_0 A_1 B_1 ... A_{K-1} B_{K-1}`, each of
//! dimension `m`. For each candidate `e` the referee applies the sign pattern
//! `E(e)` to every Alice register, measures the two-outcome projector
//! "at least `pass_threshold` pairs symmetric", keeps the collapsed state and
//! undoes the signs. Only real amplitudes are supported.

use std::cell::RefCell;
use std::collections::HashMap;

use rand::Rng as _;
use serde::Serialize;

use crate::protocol::BallSearchReferee;
use crate::quantum::PureState;
use crate::seed::Rng;
use crate::{Error, Result};

/// Largest joint state simulated, `(m^2)^K`.
pub const MAX_JOINT_DIM: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateStep {
    pub candidate: usize,
    pub pass_probability: f64,
    pub passed: bool,
    /// `|<initial|current>|^2` after the signs have been undone.
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherentRun {
    pub accepted: bool,
    pub steps: Vec<CandidateStep>,
}

fn real_amplitudes(s: &PureState) -> Result<Vec<f64>> {
    s.amplitudes()
        .iter()
        .map(|a| {
            if a.im.abs() > 1e-12 {
                Err(Error::InvalidParameter("coherent reuse needs real amplitudes".into()))
            } else {
                Ok(a.re)
            }
        })
        .collect()
}

struct Layout {
    m: usize,
    pairs: usize,
    /// For each pair `k`, the basis permutation that swaps `A_k` and `B_k`.
    swaps: Vec<Vec<u32>>,
}

impl Layout {
    fn new(m: usize, pairs: usize) -> Self {
        let mut layout = Self { m, pairs, swaps: Vec::new() };
        layout.swaps = (0..pairs).map(|k| layout.swap_table(k)).collect();
        layout
    }

    fn pair_dim(&self) -> usize {
        self.m * self.m
    }

    fn len(&self) -> usize {
        self.pair_dim().pow(self.pairs as u32)
    }

    fn stride(&self, k: usize) -> usize {
        self.pair_dim().pow((self.pairs - 1 - k) as u32)
    }

    fn swap_table(&self, k: usize) -> Vec<u32> {
        let (m, stride) = (self.m, self.stride(k));
        (0..self.len())
            .map(|idx| {
                let digit = (idx / stride) % self.pair_dim();
                let (a, b) = (digit / m, digit % m);
                (idx - digit * stride + (b * m + a) * stride) as u32
            })
            .collect()
    }

    /// Projects pair `k` onto its symmetric subspace, `(I + SWAP_k) / 2`.
    fn symmetrize(&self, psi: &mut [f64], k: usize) {
        let table = &self.swaps[k];
        for i in 0..psi.len() {
            let j = table[i] as usize;
            if i < j {
                let h = 0.5 * (psi[i] + psi[j]);
                psi[i] = h;
                psi[j] = h;
            }
        }
    }

    /// Projector onto "at least `threshold` pairs symmetric", applied to `psi`.
    ///
    /// The pair swaps `W_k` commute, so the projector is the multilinear
    /// polynomial `Σ_S c_S Π_{k∈S} W_k` whose coefficients are the Fourier
    /// coefficients of the pass indicator on `{±1}^K`.
    fn pass_component(&self, psi: &[f64], threshold: usize, out: &mut [f64], images: &mut [Vec<f64>]) {
        out.copy_from_slice(psi);
        if threshold == self.pairs {
            (0..self.pairs).for_each(|k| self.symmetrize(out, k));
            return;
        }
        let subsets = 1usize << self.pairs;
        let coefficient = |set: usize| -> f64 {
            let total: i64 = (0..subsets)
                .filter(|pattern| pattern.count_ones() as usize >= threshold)
                .map(|pattern| if (set & !pattern).count_ones().is_multiple_of(2) { 1 } else { -1 })
                .sum();
            total as f64 / subsets as f64
        };
        images[0].copy_from_slice(psi);
        let c0 = coefficient(0);
        out.iter_mut().for_each(|o| *o *= c0);
        for set in 1..subsets {
            let top = (usize::BITS - 1 - set.leading_zeros()) as usize;
            let (done, rest) = images.split_at_mut(set);
            let base = &done[set & !(1 << top)];
            for (v, &j) in rest[0].iter_mut().zip(&self.swaps[top]) {
                *v = base[j as usize];
            }
            let c = coefficient(set);
            if c != 0.0 {
                out.iter_mut().zip(&rest[0]).for_each(|(o, v)| *o += c * v);
            }
        }
    }

    /// `+1/-1` per basis index for the sign pattern `mask` on all Alice registers.
    fn alice_signs(&self, mask: u128) -> Vec<f64> {
        let m = self.m;
        let pair_signs: Vec<f64> =
            (0..self.pair_dim()).map(|digit| if (mask >> (digit / m)) & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let mut signs = vec![1.0];
        for _ in 0..self.pairs {
            signs = signs.iter().flat_map(|s| pair_signs.iter().map(move |p| s * p)).collect();
        }
        signs
    }
}

/// Swap tables, sign patterns and scratch buffers reused across runs of the same shape.
struct Workspace {
    layout: Layout,
    signs: HashMap<u128, Vec<f64>>,
    pass: Vec<f64>,
    images: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(m: usize, pairs: usize) -> Self {
        let layout = Layout::new(m, pairs);
        let len = layout.len();
        let images = if pairs == 0 { Vec::new() } else { vec![vec![0.0; len]; 1 << pairs] };
        Self { layout, signs: HashMap::new(), pass: vec![0.0; len], images }
    }
}

thread_local! {
    static WORKSPACE: RefCell<Option<Workspace>> = const { RefCell::new(None) };
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Runs one coherent ball search on `K` copies of `(a, b)`.
pub fn simulate(a: &PureState, b: &PureState, ball: &BallSearchReferee, rng: &mut Rng) -> Result<CoherentRun> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let (m, pairs) = (a.dim(), ball.copies_per_candidate);
    let joint = ((m * m) as u128).checked_pow(pairs as u32).unwrap_or(u128::MAX);
    if joint > MAX_JOINT_DIM as u128 {
        return Err(Error::BudgetExceeded(format!(
            "joint dimension (m^2)^K = {joint} exceeds {MAX_JOINT_DIM}"
        )));
    }
    let (va, vb) = (real_amplitudes(a)?, real_amplitudes(b)?);
    WORKSPACE.with(|cell| {
        let mut slot = cell.borrow_mut();
        if !matches!(slot.as_ref(), Some(ws) if ws.layout.m == m && ws.layout.pairs == pairs) {
            *slot = Some(Workspace::new(m, pairs));
        }
        let ws = slot.as_mut().expect("workspace initialised above");
        if ws.signs.len() > 4096 {
            ws.signs.clear();
        }
        run_candidates(ws, &va, &vb, ball, rng)
    })
}

fn run_candidates(ws: &mut Workspace, va: &[f64], vb: &[f64], ball: &BallSearchReferee, rng: &mut Rng) -> Result<CoherentRun> {
    let layout = &ws.layout;
    let pair: Vec<f64> = va.iter().flat_map(|x| vb.iter().map(move |y| x * y)).collect();
    let mut initial = vec![1.0];
    for _ in 0..layout.pairs {
        initial = initial.iter().flat_map(|x| pair.iter().map(move |y| x * y)).collect();
    }
    let mut psi = initial.clone();
    let mut steps = Vec::with_capacity(ball.candidate_phases.len());
    let mut accepted = false;
    for (candidate, &mask) in ball.candidate_phases.iter().enumerate() {
        let signs = ws.signs.entry(mask).or_insert_with(|| layout.alice_signs(mask));
        for (p, s) in psi.iter_mut().zip(signs.iter()) {
            *p *= s;
        }
        layout.pass_component(&psi, ball.pass_threshold, &mut ws.pass, &mut ws.images);
        let p_pass = dot(&ws.pass, &ws.pass).clamp(0.0, 1.0);
        let passed = rng.gen::<f64>() < p_pass;
        if passed {
            psi.copy_from_slice(&ws.pass);
        } else {
            for (p, q) in psi.iter_mut().zip(&ws.pass) {
                *p -= q;
            }
        }
        let norm = dot(&psi, &psi).sqrt();
        for (p, s) in psi.iter_mut().zip(signs.iter()) {
            *p *= s / norm;
        }
        accepted |= passed;
        let overlap = dot(&initial, &psi);
        steps.push(CandidateStep { candidate, pass_probability: p_pass, passed, fidelity: overlap * overlap });
    }
    Ok(CoherentRun { accepted, steps })
}
