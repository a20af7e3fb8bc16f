//! Synthetic categorical event logs from a Gaussian copula.
//!
//! Correlated normals `x = L z` are pushed through the normal CDF, which
//! makes every coordinate uniform while keeping the dependence, and then
//! through each attribute's inverse multinomial CDF.

mod association;
mod generate;
mod linalg;
mod marginal;
mod scenario;

pub use association::{
    chi_square_goodness_of_fit, chi_square_independence, chi_square_statistic, contingency, cramers_v,
    cramers_v_matrix, mean_off_diagonal,
};
pub use generate::{generate, scenario_schema, TimestampPlan};
pub use linalg::{check_correlation, cholesky, min_eigenvalue, nearest_correlation};
pub use marginal::{std_normal_cdf, MarginalShape, MarginalSpec, STEEP_RATIO};
pub use scenario::{
    halve_off_diagonal, high_correlation, make_scenario, CopulaSpec, CorrelationLevel, ScenarioConfig,
    DEFAULT_VALUES_PER_ATTRIBUTE, EIGEN_FLOOR, GRID_K, HIGH_CORRELATION_RANGE,
};
