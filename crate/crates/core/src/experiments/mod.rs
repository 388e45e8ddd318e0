//! Seeded, config-driven scenario runner.

pub mod config;
pub mod rng;
pub mod scenarios;

pub use config::{ConfigOverrides, Scenario, ScenarioConfig};
pub use rng::{sample_environment, sample_environment_with, CouplingNorm, LabRng, Sampling};
pub use scenarios::{compute_scenario, run_scenario, Cell, RunRecord, SCHEMA_VERSION};
