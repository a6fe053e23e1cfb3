//! Explanatory evaluation toolkit for point-of-interest recommendation.
//!
//! The crate turns a stream of geolocated check-ins into an explanatory
//! analysis of recommender behaviour, in five steps:
//!
//! 1. [`data`] — parse and clean check-ins, detect each user's home city,
//!    and build the binary user×venue interaction matrix.
//! 2. [`subsample`] — cross four filter families (user origin, season,
//!    drop-top-venues, k-core) into a grid of subsamples, each temporally
//!    split into train/test.
//! 3. [`ev`] — compute 32 explanatory variables describing every training
//!    matrix (size/shape/density, Gini concentration, popularity bias,
//!    long-tail, mobility radius, distance to the city center, activity
//!    span).
//! 4. [`rec`] + [`eval`] — fit a suite of recommenders per subsample with a
//!    hyperparameter grid search, and score nDCG@k, expected popularity
//!    complement, and item exposure on the held-out visits.
//! 5. [`explain`] — drop collinear variables by iterative VIF elimination,
//!    then fit per-model OLS regressions of each metric on the normalized
//!    variables, with standard errors, t statistics and p-values.
//!
//! [`pipeline`] wires the steps into a resumable, file-based run directory;
//! [`synth`] generates a deterministic synthetic city so the whole pipeline
//! can be exercised without any external data set.
//!
//! With the default `parallel` feature, independent units of work
//! (materializations, fits, evaluations, regressions) run on a rayon pool;
//! building with `--no-default-features` yields a sequential binary with
//! byte-identical outputs.

pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod ev;
pub mod explain;
pub mod par;
pub mod pipeline;
pub mod rec;
pub mod seeds;
pub mod subsample;
pub mod synth;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
