//! Geometry of fingerprinting protocols.
//!
//! A threshold embedding assigns unit vectors to both parties so that squared
//! overlaps separate the 0-inputs from the 1-inputs. A margin realization
//! separates them by the sign of the inner product (an arrangement of
//! homogeneous halfspaces). The two are interconvertible, the achievable
//! margin is bounded via the spectral norm of the sign matrix, and an
//! embedding compiles directly into a repeated swap-test protocol.

mod block_ip;
mod compile;
mod embedding;
mod forster;
mod projection;

pub use block_ip::{block_ip_instance, block_ip_value, inner_product_mod2};
pub use compile::{acceptance_count, compile_repeated_fingerprinting, required_copies, required_copies_real};
pub use embedding::{
    column_realization, embedding_to_realization, equality_embedding, equality_realization, realization_to_embedding, DomainPair,
    MarginRealization, ThresholdEmbedding,
};
pub use forster::{forster_bound, ip_sign_matrix, spectral_norm, SignMatrix, SpectralMethod, SpectralNorm};
pub use projection::{random_projection, ProjectionKind};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
