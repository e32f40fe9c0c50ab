//! Learning type-II ("true") opposites of inputs to unknown functions from
//! sampled data.
//!
//! The pipeline: sample a benchmark function, mine (quasi-)opposite pairs
//! from the samples, train a small neural regressor on the mined pairs, then
//! judge the learned map against an exact oracle and use it to guide a
//! greedy guess/opposite-guess search.
//!
//! * [`benchfn`] - benchmark function registry, sampling, dataset CSV
//! * [`opposition`] - oppositeness schemes and opposition mining
//! * [`regressor`] - the opposite-map neural regressor
//! * [`evaluation`] - exact oracle, percent error metric, Welch's t-test
//! * [`optimizer`] - opposition-guided random-search experiment
//! * [`cli`] - the `opplearn` command-line pipeline

pub mod benchfn;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod opposition;
pub mod optimizer;
pub mod regressor;
pub mod special;

pub use error::{Error, Result};
