//! Training objectives whose unique minimizer is a chosen increasing transform of
//! a likelihood ratio, a two-layer ReLU network with analytic gradients, and the
//! detection tools built on the resulting estimators.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration and
//! the command-line harness live in the `ratio-net` crate.
#![no_std]

extern crate alloc;

pub mod data;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod local_stat;
pub mod loss;
pub mod markov;
pub mod network;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use estimators::{LogRatio, RatioEstimator, Target};
pub use loss::{GeneratorRho, Interval, LossPair, OmegaTransform, Preset, PresetParams};
pub use network::{HiddenActivation, Mlp2, OutputNonlinearity};
pub use trainer::{TrainConfig, TrainMode, TrainTrace};
