use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{dot, norm, SignMatrix};
use crate::protocol::ProblemSpec;
use crate::{Error, Result, CONSTRUCT_TOL, IDENTITY_TOL};

/// One point of a (possibly partial) Boolean function: `f(x, y) = value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainPair {
    pub x: usize,
    pub y: usize,
    pub value: bool,
}

fn check_vectors(name: &str, vectors: &[Vec<f64>], dim: usize) -> Result<()> {
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(dim, v.len()));
        }
        let n = norm(v);
        if (n - 1.0).abs() > CONSTRUCT_TOL {
            return Err(Error::InvariantViolation(format!("{name}[{i}] has norm {n}")));
        }
    }
    Ok(())
}

fn check_domain(domain: &[DomainPair], xs: usize, ys: usize) -> Result<()> {
    if let Some(p) = domain.iter().find(|p| p.x >= xs || p.y >= ys) {
        return Err(Error::InvalidParameter(format!("domain pair ({}, {}) out of range", p.x, p.y)));
    }
    Ok(())
}

fn common_dim(alpha: &[Vec<f64>], beta: &[Vec<f64>]) -> Result<usize> {
    let dim = alpha.first().or(beta.first()).map(Vec::len).unwrap_or(0);
    if dim == 0 {
        return Err(Error::InvalidParameter("vectors must be nonempty".into()));
    }
    Ok(dim)
}

/// `(d, δ0, δ1)`-threshold embedding: `<α_x, β_y>^2 <= δ0` on 0-inputs and `>= δ1` on 1-inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEmbedding {
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    delta0: f64,
    delta1: f64,
    domain: Vec<DomainPair>,
}

impl ThresholdEmbedding {
    pub fn new(
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
        delta0: f64,
        delta1: f64,
        domain: Vec<DomainPair>,
    ) -> Result<Self> {
        if !(0.0 <= delta0 && delta0 < delta1 && delta1 <= 1.0) {
            return Err(Error::InvariantViolation(format!(
                "need 0 <= delta0 < delta1 <= 1, got ({delta0}, {delta1})"
            )));
        }
        let dim = common_dim(&alpha, &beta)?;
        check_vectors("alpha", &alpha, dim)?;
        check_vectors("beta", &beta, dim)?;
        check_domain(&domain, alpha.len(), beta.len())?;
        for p in &domain {
            let sq = dot(&alpha[p.x], &beta[p.y]).powi(2);
            let ok = if p.value { sq >= delta1 - IDENTITY_TOL } else { sq <= delta0 + IDENTITY_TOL };
            if !ok {
                return Err(Error::InvariantViolation(format!(
                    "pair ({}, {}) with f = {} has squared overlap {sq} against ({delta0}, {delta1})",
                    p.x, p.y, p.value as u8
                )));
            }
        }
        Ok(Self { alpha, beta, delta0, delta1, domain })
    }

    pub fn dim(&self) -> usize {
        self.alpha.first().or(self.beta.first()).map_or(0, Vec::len)
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn gap(&self) -> f64 {
        self.delta1 - self.delta0
    }

    pub fn domain(&self) -> &[DomainPair] {
        &self.domain
    }

    /// `<α_x, β_y>`, not squared.
    pub fn overlap(&self, x: usize, y: usize) -> f64 {
        dot(&self.alpha[x], &self.beta[y])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses and re-validates.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(s)?;
        Self::new(raw.alpha, raw.beta, raw.delta0, raw.delta1, raw.domain)
    }
}

/// `d`-dimensional realization with margin `γ`: `<α_x, β_y> >= γ` on 0-inputs, `<= -γ` on 1-inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginRealization {
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    gamma: f64,
    domain: Vec<DomainPair>,
}

impl MarginRealization {
    pub fn new(alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>>, gamma: f64, domain: Vec<DomainPair>) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvariantViolation(format!("margin {gamma} must be positive")));
        }
        let dim = common_dim(&alpha, &beta)?;
        check_vectors("alpha", &alpha, dim)?;
        check_vectors("beta", &beta, dim)?;
        check_domain(&domain, alpha.len(), beta.len())?;
        let r = Self { alpha, beta, gamma, domain };
        let worst = r.worst_signed_margin();
        if worst < gamma - IDENTITY_TOL {
            return Err(Error::InvariantViolation(format!("signed margin {worst} below gamma {gamma}")));
        }
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.alpha.first().or(self.beta.first()).map_or(0, Vec::len)
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn domain(&self) -> &[DomainPair] {
        &self.domain
    }

    /// `min` over the domain of `±<α_x, β_y>`, the sign chosen so that correct pairs are positive.
    pub fn worst_signed_margin(&self) -> f64 {
        signed_margin(&self.alpha, &self.beta, &self.domain)
    }

    /// `M_xy = (-1)^{f(x,y)}`, available when the domain covers every pair.
    pub fn sign_matrix(&self) -> Option<SignMatrix> {
        let (rows, cols) = (self.alpha.len(), self.beta.len());
        let values: HashMap<(usize, usize), bool> = self.domain.iter().map(|p| ((p.x, p.y), p.value)).collect();
        if values.len() != rows * cols {
            return None;
        }
        SignMatrix::from_fn(rows, cols, |x, y| if values[&(x, y)] { -1 } else { 1 }).ok()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(s)?;
        Self::new(raw.alpha, raw.beta, raw.gamma, raw.domain)
    }
}

pub(crate) fn signed_margin(alpha: &[Vec<f64>], beta: &[Vec<f64>], domain: &[DomainPair]) -> f64 {
    domain
        .iter()
        .map(|p| {
            let ip = dot(&alpha[p.x], &beta[p.y]);
            if p.value {
                -ip
            } else {
                ip
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn self_tensor(v: &[f64]) -> impl Iterator<Item = f64> + '_ {
    v.iter().flat_map(move |a| v.iter().map(move |b| a * b))
}

/// `α' = (√a, √(1-a) α⊗α)`, `β' = (√a, -√(1-a) β⊗β)` with `a = (δ1+δ0)/(2+δ1+δ0)`,
/// giving margin `γ = (δ1-δ0)/(2+δ1+δ0)` in dimension `d^2 + 1`.
pub fn embedding_to_realization(e: &ThresholdEmbedding) -> Result<MarginRealization> {
    let (d0, d1) = (e.delta0, e.delta1);
    let a = (d1 + d0) / (2.0 + d1 + d0);
    let gamma = (d1 - d0) / (2.0 + d1 + d0);
    let (sa, sb) = (a.sqrt(), (1.0 - a).sqrt());
    let lift = |v: &Vec<f64>, sign: f64| -> Vec<f64> {
        std::iter::once(sa).chain(self_tensor(v).map(|t| sign * sb * t)).collect()
    };
    MarginRealization::new(
        e.alpha.iter().map(|v| lift(v, 1.0)).collect(),
        e.beta.iter().map(|v| lift(v, -1.0)).collect(),
        gamma,
        e.domain.clone(),
    )
}

/// `α' = (1, α)/√2`, `β' = (1, -β)/√2`, giving `δ0 = (1-γ)^2/4`, `δ1 = (1+γ)^2/4` in dimension `d + 1`.
pub fn realization_to_embedding(r: &MarginRealization) -> Result<ThresholdEmbedding> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let lift = |v: &Vec<f64>, sign: f64| -> Vec<f64> {
        std::iter::once(s).chain(v.iter().map(|t| sign * s * t)).collect()
    };
    let g = r.gamma;
    ThresholdEmbedding::new(
        r.alpha.iter().map(|v| lift(v, 1.0)).collect(),
        r.beta.iter().map(|v| lift(v, -1.0)).collect(),
        (1.0 - g).powi(2) / 4.0,
        (1.0 + g).powi(2) / 4.0,
        r.domain.clone(),
    )
}

/// Equality on `points` inputs with orthonormal fingerprints: `δ0 = 0`, `δ1 = 1`.
pub fn equality_embedding(points: usize) -> Result<ThresholdEmbedding> {
    let basis: Vec<Vec<f64>> = (0..points)
        .map(|i| (0..points).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    ThresholdEmbedding::new(basis.clone(), basis, 0.0, 1.0, total_domain(points, points, |x, y| x == y))
}

/// Equality on `N = points >= 2` inputs with the largest possible margin `N / (3N - 4)`.
///
/// Built from a regular simplex `u_x` (pairwise inner products `-1/(N-1)`):
/// `α_x = (√a, √(1-a) u_x)`, `β_y = (√a, -√(1-a) u_y)` with `a = (N-2)/(3N-4)`.
pub fn equality_realization(points: usize) -> Result<MarginRealization> {
    if points < 2 {
        return Err(Error::InvalidParameter("equality realization needs at least 2 points".into()));
    }
    let n = points as f64;
    let a = (n - 2.0) / (3.0 * n - 4.0);
    let scale = (1.0 - 1.0 / n).sqrt();
    let simplex = |i: usize| (0..points).map(move |j| ((i == j) as u8 as f64 - 1.0 / n) / scale);
    let lift = |i: usize, sign: f64| -> Vec<f64> {
        std::iter::once(a.sqrt()).chain(simplex(i).map(|t| sign * (1.0 - a).sqrt() * t)).collect()
    };
    MarginRealization::new(
        (0..points).map(|i| lift(i, 1.0)).collect(),
        (0..points).map(|i| lift(i, -1.0)).collect(),
        n / (3.0 * n - 4.0),
        total_domain(points, points, |x, y| x == y),
    )
}

/// `α_x = e_x`, `β_y = M_{·y} / √|X|`: realizes any sign matrix with margin `1/√|X|`.
pub fn column_realization(m: &SignMatrix) -> Result<MarginRealization> {
    let rows = m.rows();
    let scale = 1.0 / (rows as f64).sqrt();
    let alpha = (0..rows).map(|x| (0..rows).map(|i| if i == x { 1.0 } else { 0.0 }).collect()).collect();
    let beta = (0..m.cols()).map(|y| (0..rows).map(|i| m.get(i, y) as f64 * scale).collect()).collect();
    MarginRealization::new(alpha, beta, scale, total_domain(rows, m.cols(), |x, y| m.get(x, y) < 0))
}

pub(crate) fn total_domain(xs: usize, ys: usize, f: impl Fn(usize, usize) -> bool) -> Vec<DomainPair> {
    (0..xs).flat_map(|x| (0..ys).map(move |y| (x, y))).map(|(x, y)| DomainPair { x, y, value: f(x, y) }).collect()
}

impl ThresholdEmbedding {
    /// The Boolean function on this domain as a problem for the evaluators.
    pub fn problem_spec(&self) -> ProblemSpec<usize, usize> {
        let table: Arc<HashMap<(usize, usize), bool>> =
            Arc::new(self.domain.iter().map(|p| ((p.x, p.y), p.value)).collect());
        ProblemSpec::boolean("embedded-function", move |x: &usize, y: &usize| table[&(*x, *y)])
    }

    pub fn domain_inputs(&self) -> Vec<(usize, usize)> {
        self.domain.iter().map(|p| (p.x, p.y)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_embedding_gives_third_margin() {
        let e = equality_embedding(2).unwrap();
        let r = embedding_to_realization(&e).unwrap();
        assert_abs_diff_eq!(r.gamma(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(r.dim(), 5);
        // a = 1/3, so the first coordinate is 1/√3
        assert_abs_diff_eq!(r.alpha()[0][0], (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        // pairwise: equal inputs -> a - (1 - a) = -1/3, distinct -> a = 1/3
        assert_abs_diff_eq!(dot(&r.alpha()[0], &r.beta()[0]), -1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dot(&r.alpha()[0], &r.beta()[1]), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn realization_deltas() {
        let r = equality_realization(3).unwrap();
        let e = realization_to_embedding(&r).unwrap();
        let g = r.gamma();
        assert_abs_diff_eq!(e.delta0(), (1.0 - g).powi(2) / 4.0);
        assert_abs_diff_eq!(e.delta1(), (1.0 + g).powi(2) / 4.0);
        assert_eq!(e.dim(), r.dim() + 1);
    }

    #[test]
    fn antipodal_realization_has_delta1_one() {
        let alpha = vec![vec![1.0, 0.0]];
        let beta = vec![vec![-1.0, 0.0], vec![0.6, 0.8]];
        let domain = vec![DomainPair { x: 0, y: 0, value: true }, DomainPair { x: 0, y: 1, value: false }];
        let r = MarginRealization::new(alpha, beta, 0.6, domain.clone()).unwrap();
        let e = realization_to_embedding(&r).unwrap();
        assert_abs_diff_eq!(e.overlap(0, 0).powi(2), 1.0, epsilon = 1e-12);
        let full = MarginRealization::new(vec![vec![1.0]], vec![vec![-1.0]], 1.0, vec![domain[0]]).unwrap();
        assert_abs_diff_eq!(realization_to_embedding(&full).unwrap().delta1(), 1.0);
    }

    #[test]
    fn third_margin_gives_ninths() {
        let r = MarginRealization::new(
            vec![vec![1.0]],
            vec![vec![-1.0]],
            1.0 / 3.0,
            vec![DomainPair { x: 0, y: 0, value: true }],
        )
        .unwrap();
        let e = realization_to_embedding(&r).unwrap();
        assert_abs_diff_eq!(e.delta0(), 1.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.delta1(), 4.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn constructors_reject_violations() {
        let v = vec![vec![1.0, 0.0]];
        let d = vec![DomainPair { x: 0, y: 0, value: false }];
        assert!(ThresholdEmbedding::new(v.clone(), v.clone(), 0.5, 0.4, d.clone()).is_err());
        // f = 0 but overlap 1
        assert!(ThresholdEmbedding::new(v.clone(), v.clone(), 0.2, 0.9, d.clone()).is_err());
        assert!(ThresholdEmbedding::new(vec![vec![1.0, 1.0]], v.clone(), 0.0, 1.0, vec![]).is_err());
        assert!(MarginRealization::new(v.clone(), v.clone(), 0.0, d.clone()).is_err());
        assert!(MarginRealization::new(v.clone(), vec![vec![-1.0, 0.0]], 0.5, d).is_err());
        let out_of_range = vec![DomainPair { x: 3, y: 0, value: false }];
        assert!(MarginRealization::new(v.clone(), v, 0.5, out_of_range).is_err());
    }

    #[test]
    fn optimal_equality_margin() {
        let r = equality_realization(16).unwrap();
        assert_abs_diff_eq!(r.gamma(), 4.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.worst_signed_margin(), 4.0 / 11.0, epsilon = 1e-12);
    }

    #[test]
    fn column_realization_margin() {
        let m = crate::geometry::ip_sign_matrix(3).unwrap();
        let r = column_realization(&m).unwrap();
        assert_abs_diff_eq!(r.gamma(), 8f64.sqrt().recip(), epsilon = 1e-15);
        assert_eq!(r.sign_matrix().unwrap(), m);
    }

    #[test]
    fn json_round_trip_revalidates() {
        let e = equality_embedding(3).unwrap();
        let json = e.to_json().unwrap();
        assert_eq!(ThresholdEmbedding::from_json(&json).unwrap(), e);
        let tampered = json.replace("\"delta1\":1.0", "\"delta1\":0.0");
        assert!(ThresholdEmbedding::from_json(&tampered).is_err());
        let r = equality_realization(3).unwrap();
        assert_eq!(MarginRealization::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
