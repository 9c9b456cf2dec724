//! Monte Carlo experiments on the n×n torus: percolation probability curves,
//! bisection for the critical probability, and origin infection times.
//!
//! All randomness is counter-based, so results depend only on the config and
//! master seed, never on the worker count.

pub mod experiment;
pub mod sample;
pub mod scaling;
pub mod stats;

pub use experiment::{
    estimate_pc, percolation_probability, tau_budget, tau_outcome, tau_row, to_csv, ConfigError, EstimateRow,
    ExperimentConfig, PcError, PcEstimate, TauOutcome, TauRow, CSV_HEADER, PC_BATCH, PC_INTERIM_Z, PC_RELATIVE_WIDTH,
    TAU_ABORT_RATE,
};
pub use sample::{draw, sample_initial, threshold};
pub use scaling::{fit_medians, fit_with_bootstrap, linear_grid, summarize, tau_scaling, FitKind, TauFits, TauScaling};
pub use stats::{linear_fit, mean, median, wilson, LinearFit, Z95};
