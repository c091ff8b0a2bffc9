//! Experiment harness for stochastic-rounding error studies: Horner
//! evaluation and summation swept over sizes and rounding modes, written as
//! versioned CSV, plus a statistical verification battery.

pub mod config;
pub mod csv;
mod error;
pub mod run;
pub mod sampling;
pub mod verify;

pub use config::{parse_sizes, ExperimentConfig, ExperimentKind};
pub use error::{LabError, Result};
pub use run::{run_experiment, run_experiment_with_threads, run_horner_experiment, run_pairwise_experiment, ResultRow};
pub use sampling::Distribution;
pub use verify::{run_verification_suite, run_verification_suite_with, VerificationReport, VerifyOptions};
