//! Harness around `cfma-core`: channel files, Monte Carlo runs, parameter
//! sweeps and their CSV/JSON artifacts.

#![deny(missing_docs)]

pub mod channel;
pub mod cli;
mod error;
pub mod experiment;
pub mod grid;
pub mod output;
pub mod report;
pub mod sweep;

pub use self::channel::ChannelSpec;
pub use self::error::{Error, Result};
pub use self::experiment::{run_montecarlo, CovariancePolicy, CurvePoint, ExperimentConfig, Model};
pub use self::output::{emit_csv, emit_montecarlo_csv};
pub use self::sweep::{run_sweep, SweepRow};
