//! Experiment runner for `degenflow-core`: loads a JSON experiment config,
//! runs one pipeline (solve, classify, entropy check, stability pair,
//! viscosity sweep or Crocco demo) and writes JSON reports, plot-ready CSVs
//! and a manifest. The verdicts of the run decide the exit status.

// `!(x > 0.0)` is the NaN-rejecting form of the parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod error;
pub mod run;

pub use config::{load_config, parse_config, ExperimentConfig, ExperimentKind, Override};
pub use error::CliError;
pub use run::{execute, run_experiment, Outcome, RunRecord};
