//! Experiment harness around `ratio-core`: MNIST IDX ingestion, config files,
//! model and CSV artifacts, the experiment pipelines and the `ratio-net` CLI.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod idx;
pub mod plot;
pub mod run;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
