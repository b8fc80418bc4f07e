//! Zero-error discrimination rates and their behaviour on tensor products.
//!
//! For a pair `(rho0, rho1)`, the best zero-error measurement that answers
//! `0` projects onto the complement of `supp(rho1)`, so
//! `a0 = Tr(rho0 · Π⊥(rho1))` and symmetrically for `a1`. For four states
//! the joint outcome `(c, d)` may only fire on the intersection of the
//! complements of the other three product supports. [`product_rate`] computes
//! that projector directly in the joint space, which makes the factorization
//! `p(cd) = a(c) · b(d)` a genuine numerical check.

use serde::Serialize;

use crate::linalg::{support_projector_of, CMatrix};
use crate::quantum::{support_projector, trace_weight, DensityMatrix, Tensor, SUPPORT_TOL};
use crate::{Error, Result, IDENTITY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroErrorRates {
    pub a0: f64,
    pub a1: f64,
    /// `max(a0, a1) / 2`, a lower bound on the optimal average success.
    pub lower: f64,
    /// `(a0 + a1) / 2`, an upper bound on the optimal average success.
    pub upper: f64,
}

impl ZeroErrorRates {
    pub fn new(a0: f64, a1: f64) -> Result<Self> {
        let range = -IDENTITY_TOL..=1.0 + IDENTITY_TOL;
        if !range.contains(&a0) || !range.contains(&a1) {
            return Err(Error::InvariantViolation(format!("rates ({a0}, {a1}) outside [0, 1]")));
        }
        let (a0, a1) = (a0.clamp(0.0, 1.0), a1.clamp(0.0, 1.0));
        Ok(Self { a0, a1, lower: a0.max(a1) / 2.0, upper: (a0 + a1) / 2.0 })
    }

    pub fn component(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.a0
        } else {
            self.a1
        }
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

pub fn zero_error_rates(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<ZeroErrorRates> {
    same_dim(rho0, rho1)?;
    let perp1 = support_projector(rho1, SUPPORT_TOL).complement;
    let perp0 = support_projector(rho0, SUPPORT_TOL).complement;
    ZeroErrorRates::new(trace_weight(&perp1, rho0.matrix()), trace_weight(&perp0, rho1.matrix()))
}

/// Optimal probability that a zero-error measurement on the four product
/// states `rho_c ⊗ sigma_d` identifies the pair `(c, d)` when given it.
pub fn product_rate(
    rho: [&DensityMatrix; 2],
    sigma: [&DensityMatrix; 2],
    c: u8,
    d: u8,
) -> Result<f64> {
    same_dim(rho[0], rho[1])?;
    same_dim(sigma[0], sigma[1])?;
    let (c, d) = (c as usize & 1, d as usize & 1);
    let dim = rho[0].dim() * sigma[0].dim();
    // span of the three competing product supports
    let mut others = CMatrix::zeros(dim, dim);
    for cc in 0..2 {
        for dd in 0..2 {
            if (cc, dd) != (c, d) {
                others = &others + rho[cc].tensor(sigma[dd]).matrix();
            }
        }
    }
    let allowed = &CMatrix::identity(dim) - &support_projector_of(&others, SUPPORT_TOL);
    let target = rho[c].tensor(sigma[d]);
    Ok(trace_weight(&allowed, target.matrix()))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DirectProductReport {
    /// `p(cd)` indexed by `2c + d`.
    pub product_rates: [f64; 4],
    pub rates_a: ZeroErrorRates,
    pub rates_b: ZeroErrorRates,
    /// `(1/4) sum_cd p(cd)`, an upper bound on the optimal joint success.
    pub quarter_sum: f64,
    /// `4 · upper_a · upper_b`.
    pub bound_4ab_upper: f64,
    /// Largest `|p(cd) - a(c) b(d)|`.
    pub factorization_defect: f64,
    pub chain_holds: bool,
}

/// Checks `p(cd) = a(c) b(d)` for all four outcomes and the chain
/// `(1/4) sum p(cd) = (1/4)(a0 + a1)(b0 + b1) <= 4 · upper_a · upper_b`.
pub fn direct_product_check(
    rho: [&DensityMatrix; 2],
    sigma: [&DensityMatrix; 2],
) -> Result<DirectProductReport> {
    let rates_a = zero_error_rates(rho[0], rho[1])?;
    let rates_b = zero_error_rates(sigma[0], sigma[1])?;
    let mut product_rates = [0.0; 4];
    let mut defect: f64 = 0.0;
    for c in 0..2u8 {
        for d in 0..2u8 {
            let p = product_rate(rho, sigma, c, d)?;
            product_rates[(2 * c + d) as usize] = p;
            defect = defect.max((p - rates_a.component(c) * rates_b.component(d)).abs());
        }
    }
    let quarter_sum = product_rates.iter().sum::<f64>() / 4.0;
    let factored = (rates_a.a0 + rates_a.a1) * (rates_b.a0 + rates_b.a1) / 4.0;
    let bound_4ab_upper = 4.0 * rates_a.upper * rates_b.upper;
    let chain_holds = defect <= IDENTITY_TOL
        && (quarter_sum - factored).abs() <= IDENTITY_TOL
        && quarter_sum <= bound_4ab_upper + IDENTITY_TOL;
    Ok(DirectProductReport {
        product_rates,
        rates_a,
        rates_b,
        quarter_sum,
        bound_4ab_upper,
        factorization_defect: defect,
        chain_holds,
    })
}
