//! Configuration, seeded batch runs, bound-verification suites and the
//! files they write.

pub mod bounds;
pub mod config;
pub mod experiment;
pub mod output;

pub use bounds::{envelope_coverage, verify_variance_bound, CoverageConfig, CoverageReport, VarianceBoundReport};
pub use config::{ExperimentConfig, ObjectiveConfig, OptimizerConfig};
pub use experiment::{compare, run_experiment, Aggregate, ExperimentOutcome, ReplicationResult, RunSummary};
