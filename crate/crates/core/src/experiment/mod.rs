//! Monte Carlo engine.
//!
//! A run draws `n_channel` channel realizations (layout, large-scale fading
//! and channel estimate) and `n_error` CSIT-error matrices per realization.
//! Precoders depend on the estimate only, so every inner product that enters
//! an SINR can be computed once per trial and reused for every power split
//! and SNR point; see [`TrialStats`].

mod config;
mod search;
mod sweep;
mod trials;

pub use config::{ExperimentConfig, PhysicalParams, SnrNorm, Variant};
pub use search::{delta_grid, esr_for_delta, optimize_delta, DeltaSearch, EsrEvaluation};
pub use sweep::{single_trial, sweep_error_variance, sweep_snr, SweepMetadata, SweepRecord, SweepResult};
pub use trials::{realize, run_trials, Realization, StageTerms, TrialSet, TrialStats};
