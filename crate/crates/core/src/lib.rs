//! Mining class association rules for a rare positive class and turning
//! them into an interpretable disjunctive classifier.
//!
//! The pipeline:
//!
//! 1. [`dataset`]: encode categorical CSV data into column-major bit rows and
//!    split it into training, validation and test partitions;
//! 2. [`mining`]: level-wise mining of rules `X -> [Y = 1]` thresholded on
//!    local support and a confidence ratio;
//! 3. [`pruning`]: keep risk patterns (relative risk above a threshold) and
//!    drop redundant and weak ones with exact nested-count tests;
//! 4. [`classifier`]: pick representative patterns on validation data,
//!    classify a record as positive when any pattern matches, evaluate, sweep
//!    parameter grids and select a point in ROC space;
//! 5. [`report`]: DOT tree and CSV table output.
//!
//! [`synth`] generates data with planted risk patterns of known strength.

pub mod bits;
pub mod classifier;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod mining;
pub mod pruning;
pub mod report;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
