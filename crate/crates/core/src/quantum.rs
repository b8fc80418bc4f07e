//! Finite-dimensional quantum states: pure states, density matrices and
//! ensembles, with inner products, tensor products, swap tests, support
//! projectors and entropies.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, support_projector_of, CMatrix, C64, ZERO};
use crate::{Error, Result, CONSTRUCT_TOL, IDENTITY_TOL};

/// Default eigenvalue threshold below which a direction is outside the support.
pub const SUPPORT_TOL: f64 = 1e-9;

/// A unit vector in `C^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Rejects empty vectors and vectors whose squared norm is not 1 within `1e-10`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("pure state of dimension 0".into()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > CONSTRUCT_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm_sqr} != 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} >= dim {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { entries: CMatrix::outer(&self.amplitudes) }
    }
}

/// A Hermitian, positive semidefinite, trace-one matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.rows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and nonempty, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        let defect = entries.hermiticity_defect();
        if defect > CONSTRUCT_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect})")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > CONSTRUCT_TOL || tr.im.abs() > CONSTRUCT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = hermitian_eigen(&entries).values[0];
        if min_eig < -CONSTRUCT_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(Self { entries })
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidState("dimension 0".into()));
        }
        Self::new(CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.entries).values
    }
}

/// A finite probability distribution over density matrices of one dimension.
#[derive(Clone, Debug)]
pub struct Ensemble {
    items: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some((_, first)) = items.first() else {
            return Err(Error::InvalidState("empty ensemble".into()));
        };
        let dim = first.dim();
        if let Some((_, bad)) = items.iter().find(|(_, rho)| rho.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, bad.dim()));
        }
        if let Some((p, _)) = items.iter().find(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::InvalidState(format!("negative probability {p}")));
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > CONSTRUCT_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { items })
    }

    /// Equal weights over `states`.
    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn items(&self) -> &[(f64, DensityMatrix)] {
        &self.items
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    /// `sum_i p_i rho_i`.
    pub fn average(&self) -> DensityMatrix {
        let dim = self.dim();
        let avg = self.items.iter().fold(CMatrix::zeros(dim, dim), |acc, (p, rho)| {
            &acc + &rho.entries.scale(C64::new(*p, 0.0))
        });
        DensityMatrix { entries: avg }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// `<a|b> = sum_z conj(a_z) b_z`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<C64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

/// Kronecker product of two states of the same kind.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        PureState { amplitudes: amps }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        DensityMatrix { entries: self.entries.kron(&other.entries) }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Probability that the swap test on `a ⊗ b` yields outcome 0: `1/2 + |<a|b>|^2 / 2`.
pub fn swap_test(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = inner_product(a, b)?.norm_sqr().min(1.0);
    Ok(0.5 + 0.5 * overlap)
}

/// Draws one swap-test outcome (0 or 1) given the outcome-0 probability.
pub fn sample_swap_outcome<R: Rng + ?Sized>(p_zero: f64, rng: &mut R) -> u8 {
    if rng.gen::<f64>() < p_zero {
        0
    } else {
        1
    }
}

/// Seeded swap-test sampler for a fixed pair of states.
#[derive(Clone, Debug)]
pub struct SwapTestSampler {
    p_zero: f64,
    rng: crate::seed::Rng,
}

impl SwapTestSampler {
    pub fn new(a: &PureState, b: &PureState, seed: u64) -> Result<Self> {
        Ok(Self { p_zero: swap_test(a, b)?, rng: crate::seed::derive_rng(seed, &["swap-test".into()]) })
    }

    pub fn probability_zero(&self) -> f64 {
        self.p_zero
    }

    pub fn sample(&mut self) -> u8 {
        sample_swap_outcome(self.p_zero, &mut self.rng)
    }
}

/// The support projector of a density matrix and its orthogonal complement.
#[derive(Clone, Debug)]
pub struct SupportSplit {
    pub support: CMatrix,
    pub complement: CMatrix,
}

/// Projector onto the span of eigenvectors of `rho` with eigenvalue above `tol`.
pub fn support_projector(rho: &DensityMatrix, tol: f64) -> SupportSplit {
    let support = support_projector_of(&rho.entries, tol);
    let complement = &CMatrix::identity(rho.dim()) - &support;
    SupportSplit { support, complement }
}

/// `-sum λ log2 λ` over nonzero eigenvalues, with `0 log 0 = 0`.
fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Holevo quantity `S(sum p_i rho_i) - sum p_i S(rho_i)` in bits.
pub fn holevo_chi(ensemble: &Ensemble) -> f64 {
    let avg = von_neumann_entropy(&ensemble.average());
    let mixed: f64 = ensemble.items.iter().map(|(p, rho)| p * von_neumann_entropy(rho)).sum();
    avg - mixed
}

/// Binary entropy `H(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p])
}

/// Haar-distributed pure state from normalized complex Gaussians.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
    }
}

/// Random real unit vector.
pub fn random_real_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Wishart-style random density matrix `G G^† / Tr(G G^†)` with `G` of size `dim × rank`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    assert!(dim >= 1 && rank >= 1);
    let g = CMatrix::from_fn(dim, rank, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    let mut m = w.scale(C64::new(1.0 / tr, 0.0));
    for i in 0..dim {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    DensityMatrix::new(m).expect("Wishart matrix is a valid state")
}

/// `Tr(P rho)` as a real number clamped to `[0, 1]` after checking it is not far outside.
pub(crate) fn trace_weight(projector: &CMatrix, rho: &CMatrix) -> f64 {
    let w = projector.trace_of_product(rho).re;
    debug_assert!(w > -IDENTITY_TOL && w < 1.0 + IDENTITY_TOL, "weight {w} outside [0, 1]");
    w.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::derive_rng;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn e(dim: usize, i: usize) -> PureState {
        PureState::basis(dim, i).unwrap()
    }

    fn plus() -> PureState {
        PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn constructors_reject_invalid_input() {
        assert!(PureState::from_real(&[1.0, 1.0]).is_err());
        assert!(PureState::new(vec![]).is_err());
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.5, -0.5]).is_err());
        let mut m = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let rho = DensityMatrix::diagonal(&[1.0]).unwrap();
        let sigma = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert!(Ensemble::new(vec![(0.5, rho.clone()), (0.5, sigma)]).is_err());
        assert!(Ensemble::new(vec![(0.7, rho.clone()), (0.7, rho)]).is_err());
    }

    #[test]
    fn inner_product_examples() {
        assert_abs_diff_eq!(inner_product(&e(2, 0), &e(2, 0)).unwrap().re, 1.0);
        assert_abs_diff_eq!(inner_product(&e(2, 0), &e(2, 1)).unwrap().norm(), 0.0);
        let ip = inner_product(&plus(), &e(2, 0)).unwrap();
        assert_abs_diff_eq!(ip.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(ip.im, 0.0);
        assert_eq!(inner_product(&e(2, 0), &e(3, 0)), Err(Error::DimensionMismatch(2, 3)));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = PureState::new(vec![C64::new(0.0, 1.0), ZERO]).unwrap(); // i|0>
        assert_abs_diff_eq!(inner_product(&a, &e(2, 0)).unwrap().im, -1.0);
        assert_abs_diff_eq!(inner_product(&e(2, 0), &a).unwrap().im, 1.0);
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor(&e(2, 0), &e(2, 0)), e(4, 0));
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        let quarter = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(tensor(&half, &half).matrix().max_abs_diff(quarter.matrix()) < 1e-15);
    }

    #[test]
    fn tensor_inner_products_factor() {
        let mut rng = derive_rng(1, &["tensor-ip".into()]);
        for _ in 0..100 {
            let [a, c] = [2, 2].map(|d| random_pure_state(d, &mut rng));
            let [b, d] = [3, 3].map(|d| random_pure_state(d, &mut rng));
            let lhs = inner_product(&a.tensor(&b), &c.tensor(&d)).unwrap();
            let rhs = inner_product(&a, &c).unwrap() * inner_product(&b, &d).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn swap_test_examples() {
        assert_abs_diff_eq!(swap_test(&e(2, 0), &e(2, 0)).unwrap(), 1.0);
        assert_abs_diff_eq!(swap_test(&e(2, 0), &e(2, 1)).unwrap(), 0.5);
        assert_abs_diff_eq!(swap_test(&plus(), &e(2, 0)).unwrap(), 0.75, epsilon = 1e-15);
        assert!(swap_test(&e(2, 0), &e(4, 0)).is_err());
    }

    #[test]
    fn swap_sampler_frequency_and_determinism() {
        let a = plus();
        let b = e(2, 0);
        let mut s1 = SwapTestSampler::new(&a, &b, 9).unwrap();
        let mut s2 = SwapTestSampler::new(&a, &b, 9).unwrap();
        let n = 100_000;
        let zeros = (0..n).filter(|_| s1.sample() == 0).count();
        let replay = (0..n).filter(|_| s2.sample() == 0).count();
        assert_eq!(zeros, replay);
        let p = 0.75;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((zeros as f64 / n as f64 - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn support_projector_examples() {
        let pure = e(2, 0).to_density();
        let split = support_projector(&pure, SUPPORT_TOL);
        assert!(split.support.max_abs_diff(&CMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-12);
        assert!(split.complement.max_abs_diff(&CMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(support_projector(&mixed, SUPPORT_TOL).support.max_abs_diff(&CMatrix::identity(2)) < 1e-12);
        let partial = DensityMatrix::diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let p = support_projector(&partial, SUPPORT_TOL).support;
        assert!(p.max_abs_diff(&CMatrix::from_real_diagonal(&[1.0, 1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn support_projector_is_idempotent_and_carries_the_state() {
        let mut rng = derive_rng(2, &["support".into()]);
        for dim in 2..=5 {
            for rank in 1..=dim {
                let rho = random_density_matrix(dim, rank, &mut rng);
                let p = support_projector(&rho, SUPPORT_TOL).support;
                assert!((&p * &p).max_abs_diff(&p) < 1e-9);
                assert!(p.hermiticity_defect() < 1e-9);
                assert!((p.trace_of_product(rho.matrix()).re - 1.0).abs() < 1e-9);
                assert!((p.trace().re - rank as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&plus().to_density()), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_entropy(&DensityMatrix::maximally_mixed(2).unwrap()), 1.0, epsilon = 1e-12);
        // independent closed form: -(3/4)log2(3/4) - (1/4)log2(1/4)
        let expected = -(0.75f64 * 0.75f64.log2()) - 0.25 * 0.25f64.log2();
        let s = von_neumann_entropy(&DensityMatrix::diagonal(&[0.75, 0.25]).unwrap());
        assert_abs_diff_eq!(s, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 0.8113, epsilon = 1e-4);
    }

    #[test]
    fn holevo_examples() {
        let basis = Ensemble::uniform(vec![e(2, 0).to_density(), e(2, 1).to_density()]).unwrap();
        assert_abs_diff_eq!(holevo_chi(&basis), 1.0, epsilon = 1e-12);
        let same = Ensemble::uniform(vec![plus().to_density(); 3]).unwrap();
        assert_abs_diff_eq!(holevo_chi(&same), 0.0, epsilon = 1e-12);
        // average state has eigenvalues (1 ± 1/√2)/2
        let l = (1.0 + FRAC_1_SQRT_2) / 2.0;
        let expected = binary_entropy(l);
        let mixed = Ensemble::uniform(vec![e(2, 0).to_density(), plus().to_density()]).unwrap();
        assert_abs_diff_eq!(holevo_chi(&mixed), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(holevo_chi(&mixed), 0.6009, epsilon = 1e-4);
    }

    #[test]
    fn holevo_sandwich_on_random_ensembles() {
        let mut rng = derive_rng(3, &["holevo".into()]);
        for dim in 2..=4 {
            for _ in 0..10 {
                let states = (0..3).map(|_| random_density_matrix(dim, 1 + rng.gen_range(0..dim), &mut rng)).collect();
                let chi = holevo_chi(&Ensemble::uniform(states).unwrap());
                assert!(chi >= -1e-9 && chi <= (dim as f64).log2() + 1e-9);
            }
        }
    }
}
