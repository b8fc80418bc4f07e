use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::embedding::signed_margin;
use super::{norm, MarginRealization};
use crate::seed::{derive_rng, Label};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionKind {
    /// Seeded `k × d` Gaussian matrix scaled by `1/√k`.
    Gaussian,
    /// Gaussian matrix orthonormalized by Gram-Schmidt: orthonormal columns
    /// when `k >= d` (an isometry), orthonormal rows scaled by `√(d/k)` otherwise.
    OrthogonalGaussian,
    /// The identity map; requires `k = d`.
    Identity,
}

/// Projects a realization to `target_dim` dimensions and renormalizes.
///
/// Succeeds iff the projected vectors still realize the function with margin `γ/2`;
/// otherwise reports the worst margin seen so the caller can resample.
pub fn random_projection(
    r: &MarginRealization,
    target_dim: usize,
    seed: u64,
    kind: ProjectionKind,
) -> Result<MarginRealization> {
    if target_dim == 0 {
        return Err(Error::InvalidParameter("target dimension must be positive".into()));
    }
    let d = r.dim();
    let matrix: Vec<Vec<f64>> = match kind {
        ProjectionKind::Identity => {
            if target_dim != d {
                return Err(Error::DimensionMismatch(d, target_dim));
            }
            (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
        }
        ProjectionKind::Gaussian => {
            let scale = 1.0 / (target_dim as f64).sqrt();
            gaussian_matrix(seed, target_dim, d).into_iter().map(|row| row.into_iter().map(|g| g * scale).collect()).collect()
        }
        ProjectionKind::OrthogonalGaussian => orthogonal_gaussian(seed, target_dim, d),
    };
    let project = |v: &Vec<f64>| -> Result<Vec<f64>> {
        let mut p: Vec<f64> = matrix.iter().map(|row| super::dot(row, v)).collect();
        let n = norm(&p);
        if n == 0.0 {
            return Err(Error::ProjectionFailed { worst: f64::NEG_INFINITY, required: r.gamma() / 2.0 });
        }
        p.iter_mut().for_each(|a| *a /= n);
        Ok(p)
    };
    let alpha = r.alpha().iter().map(project).collect::<Result<Vec<_>>>()?;
    let beta = r.beta().iter().map(project).collect::<Result<Vec<_>>>()?;
    let required = r.gamma() / 2.0;
    let worst = signed_margin(&alpha, &beta, r.domain());
    if worst < required {
        return Err(Error::ProjectionFailed { worst, required });
    }
    MarginRealization::new(alpha, beta, required, r.domain().to_vec())
}

fn gaussian_matrix(seed: u64, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut rng = derive_rng(seed, &[Label::from("projection"), Label::from(rows)]);
    (0..rows).map(|_| (0..cols).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()
}

fn gram_schmidt(vectors: &mut [Vec<f64>]) {
    for i in 0..vectors.len() {
        for j in 0..i {
            let c = super::dot(&vectors[i], &vectors[j]);
            let (head, tail) = vectors.split_at_mut(i);
            tail[0].iter_mut().zip(&head[j]).for_each(|(a, b)| *a -= c * b);
        }
        let n = norm(&vectors[i]);
        vectors[i].iter_mut().for_each(|a| *a /= n);
    }
}

fn orthogonal_gaussian(seed: u64, k: usize, d: usize) -> Vec<Vec<f64>> {
    let g = gaussian_matrix(seed, k, d);
    if k <= d {
        let mut rows = g;
        gram_schmidt(&mut rows);
        let scale = (d as f64 / k as f64).sqrt();
        rows.into_iter().map(|r| r.into_iter().map(|v| v * scale).collect()).collect()
    } else {
        let mut cols: Vec<Vec<f64>> = (0..d).map(|j| g.iter().map(|row| row[j]).collect()).collect();
        gram_schmidt(&mut cols);
        (0..k).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }
}
