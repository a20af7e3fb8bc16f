//! Audience size forecasts for arbitrary targets.
//!
//! Only single-item targets keep full hourly series. Any other target is
//! forecast as `P̂(T | U) · ŝ(U)`: the ratio comes from training-window
//! supports in the FIS store, `ŝ(U)` from the univariate's forecaster.
//! Infrequent targets fall back to a product of per-attribute conditionals,
//! with `κ / s(U)` standing in for conditionals that were not stored.

mod estimate;
mod store;

pub use estimate::{estimate_sigma, Estimate, Estimator, Method};
pub use store::{build_store, load_store, parse_store, render_params, save_store, FISStore, Univariate, UnivariateSet};
