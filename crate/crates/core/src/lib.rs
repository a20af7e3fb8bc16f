//! Categorically constrained frequent itemset mining and audience size
//! forecasting over timestamped categorical event logs.

pub mod copula;
pub mod data;
pub mod error;
pub mod estimator;
pub mod ets;
pub mod eval;
pub mod mining;

pub use error::{Error, Result};
