//! Desk-scale laboratory for simultaneous-message-passing (SMP) protocols.
//!
//! Alice and Bob each send one message to a referee. The crate models the
//! classical public/private-coin and quantum (fingerprinting) variants of
//! that setting and evaluates concrete protocols exactly or by seeded
//! Monte-Carlo simulation:
//!
//! - [`quantum`]: pure states, density matrices, swap tests, entropies.
//! - [`lemmas`]: zero-error discrimination rates and their product rule.
//! - [`protocol`]: protocol representation, exact and Monte-Carlo evaluation.
//! - [`relation_p`]: the "find an index with `s_i = 1`" relation and its protocols.
//! - [`geometry`]: threshold embeddings, margin realizations, Forster's bound.
//! - [`yao`]: compiling public-coin tables into fingerprint states.
//! - [`hamming`]: Hamming-distance protocols and the random-access-code reduction.

pub mod binomial;
pub mod bits;
mod error;
pub mod geometry;
pub mod hamming;
pub mod lemmas;
pub mod linalg;
pub mod protocol;
pub mod quantum;
pub mod relation_p;
pub mod seed;
pub mod yao;

pub use error::{Error, Result};

/// Tolerance applied by constructors of states and geometric objects.
pub const CONSTRUCT_TOL: f64 = 1e-10;
/// Tolerance for identities derived from valid objects.
pub const IDENTITY_TOL: f64 = 1e-9;
