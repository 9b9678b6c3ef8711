//! Scenario-driven Monte Carlo runner.
//!
//! A [`Scenario`] is loaded from a small TOML file, validated completely, and
//! executed by [`run`] into a [`SimulationReport`]. Every replication reads
//! its own derived random stream and per-replication results are folded in
//! replication order, so a report depends only on the scenario and its seed
//! root, never on the number of worker threads.

pub mod audit;
mod experiments;
mod report;
mod runner;
mod scenario;

pub use experiments::{family_wise_error, optional_stopping_alpha, FamilyWiseError, OptionalStopping};
pub use report::{format_float, Row, RowKind, SimulationReport};
pub use runner::{run, run_with_threads};
pub use scenario::{NpRule, Paradigm, Scenario};
