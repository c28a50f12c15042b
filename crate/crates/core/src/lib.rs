//! Monte Carlo simulator for rate-splitting (RS) downlinks in cell-free and
//! colocated multi-user MIMO under imperfect CSIT.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: AP and user placement, horizontal distances.
//! - [`channel`]: three-slope path loss, shadowing, estimate/error sampling,
//!   noise and SNR bookkeeping.
//! - [`precoding`]: matched-filter and zero-forcing private precoders, the
//!   SVD common precoder and the common/private power split.
//! - [`rates`]: per-user SINR decompositions, the closed-form MF/ZF
//!   expressions, and ergodic sum-rate aggregation.
//! - [`experiment`]: the trial engine with cached inner products, the power
//!   split search and SNR / error-variance sweeps.
//! - [`scenario`], [`output`] and [`cli`]: configuration files, result
//!   serialization and the command-line front end.
//!
//! Runnable walkthroughs of each layer live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x >= 0.0)` deliberately rejects NaN too

pub mod channel;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod output;
pub mod precoding;
pub mod rates;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};

pub type Complex64 = nalgebra::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;
