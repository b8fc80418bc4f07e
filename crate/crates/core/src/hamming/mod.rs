//! Protocols for `HAM^(d)`: decide whether two `n`-bit strings are within
//! Hamming distance `d`.
//!
//! Includes a random-parity sketch and its fingerprint embedding, quantum
//! ball search over linear-code fingerprints (with a state-vector simulation
//! of the coherent variant), the classical ball protocol, and the reduction
//! from random access codes that gives the lower bound.

mod ball;
mod code;
pub mod coherent;
mod demo;
mod predicate;
mod sketch;

pub use ball::{
    ball_candidates, ball_search_protocol, ball_size, classical_ball_protocol, BallOptions, BallParams, BallSearch,
    ClassicalBall, ClassicalBallParams,
};
pub use code::{
    code_fingerprint, distance_floor_for, lowest_bias_code, phase_shift, random_linear_code, random_linear_code_with, LinearCode,
    DEFAULT_RESAMPLES,
};
pub use demo::{coherent_demo, CoherentDemoReport};
pub use predicate::{ham_predicate, instance_at_distance, nayak_check, rac_rate, rac_reduction, HamInstance};
pub use sketch::{disagreement, parity_sketch_protocol, sketch_to_embedding, ParitySketch, ParitySketchParams, SketchEmbedding};
