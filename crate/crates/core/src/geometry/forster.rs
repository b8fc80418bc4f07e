use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, CMatrix, C64};
use crate::seed::Rng;
use crate::{Error, Result};

/// A `±1` matrix indexed by `X × Y`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("sign matrix must be nonempty".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(rows * cols, entries.len()));
        }
        if let Some(bad) = entries.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::InvariantViolation(format!("entry {bad} is not ±1")));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i8) -> Result<Self> {
        let entries = (0..rows).flat_map(|x| (0..cols).map(move |y| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.entries[x * self.cols + y]
    }

    /// `M Mᵀ` in exact integer arithmetic.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.rows)
                    .map(|j| (0..self.cols).map(|k| (self.get(i, k) as i64) * (self.get(j, k) as i64)).sum())
                    .collect()
            })
            .collect()
    }

    fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) as f64 * v[j]).sum()).collect()
    }

    fn mul_transpose_vec(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) as f64 * u[i];
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectralMethod {
    PowerIteration { iterations: usize },
    Eigensolve,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralNorm {
    pub value: f64,
    pub method: SpectralMethod,
}

const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 20_000;
const EIGENSOLVE_LIMIT: usize = 256;

/// Largest singular value of `m`.
///
/// Power iteration on `MᵀM` from a fixed Gaussian start, stopping once the
/// eigen-residual drops below `1e-12` relative to the Rayleigh quotient. If
/// that does not happen and `MᵀM` is small enough, a dense eigensolve is used.
pub fn spectral_norm(m: &SignMatrix) -> SpectralNorm {
    let mut rng = Rng::seed_from_u64(0x5eed_f0f5);
    let mut v: Vec<f64> = (0..m.cols).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let w = m.mul_transpose_vec(&m.mul_vec(&v));
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let residual = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if residual <= RESIDUAL_TOL * lambda.abs().max(f64::MIN_POSITIVE) {
            return SpectralNorm { value: lambda.max(0.0).sqrt(), method: SpectralMethod::PowerIteration { iterations: it } };
        }
        v = w;
        if normalize(&mut v) == 0.0 {
            return SpectralNorm { value: 0.0, method: SpectralMethod::PowerIteration { iterations: it } };
        }
    }
    if m.cols <= EIGENSOLVE_LIMIT {
        return SpectralNorm { value: dense_spectral_norm(m), method: SpectralMethod::Eigensolve };
    }
    SpectralNorm { value: lambda.max(0.0).sqrt(), method: SpectralMethod::PowerIteration { iterations: MAX_ITERATIONS } }
}

pub(crate) fn dense_spectral_norm(m: &SignMatrix) -> f64 {
    let mtm = CMatrix::from_fn(m.cols, m.cols, |i, j| {
        C64::new((0..m.rows).map(|k| (m.get(k, i) as i64 * m.get(k, j) as i64) as f64).sum(), 0.0)
    });
    let top = hermitian_eigen(&mtm).values.last().copied().unwrap_or(0.0);
    top.max(0.0).sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
    n
}

/// `‖M‖ / √(|X| |Y|)`, an upper bound on the margin of any realization with sign matrix `M`.
pub fn forster_bound(m: &SignMatrix) -> f64 {
    spectral_norm(m).value / ((m.rows * m.cols) as f64).sqrt()
}

/// `M_xy = (-1)^{<x, y> mod 2}` over `n`-bit strings, `1 <= n <= 6`.
pub fn ip_sign_matrix(n: usize) -> Result<SignMatrix> {
    if !(1..=6).contains(&n) {
        return Err(Error::InvalidParameter(format!("inner-product sign matrix needs 1 <= n <= 6, got {n}")));
    }
    let size = 1usize << n;
    SignMatrix::from_fn(size, size, |x, y| if (x & y).count_ones() % 2 == 0 { 1 } else { -1 })
}
