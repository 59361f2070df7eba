//! Experiment runner for the SWIPT mode-selection study: parameter sweeps
//! over AP count or antenna count, Monte-Carlo validation of the closed-form
//! metrics, proposed-versus-oracle gaps and SVG plots.
//!
//! Every sweep point and drop gets its own seed derived from the master
//! seed, runs in parallel on the rayon pool and is written back in a fixed
//! order, so CSV outputs are byte-identical across runs and thread counts.

pub mod config;
pub mod error;
pub mod oracle_gap;
pub mod plot;
pub mod sweep;
pub mod validation;

pub use config::{ExperimentSpec, Sweep, SweepVariable};
pub use error::{ExperimentError, Result};
pub use oracle_gap::{run_oracle_gap, GapRow};
pub use plot::{render_plot, PlotStyle};
pub use sweep::{aggregate, run_experiment, write_outputs, Aggregate, ResultRow, SweepResult};
pub use validation::{run_validation, ValidationReport, ValidationRow};
