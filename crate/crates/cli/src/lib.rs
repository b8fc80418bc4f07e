//! Experiment runner behind the `smplab` binary.
//!
//! Each experiment turns a resolved [`ExperimentConfig`] into a [`Table`] of
//! results plus a list of [`Check`]s. The binary writes the table as CSV or
//! JSON and exits non-zero when a check fails.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::{Command, ExperimentConfig, Format, HamVariant};
pub use experiments::{run, Check, Outcome};
pub use table::{Cell, Table};
