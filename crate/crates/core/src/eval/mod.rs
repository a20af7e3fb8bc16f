//! Benchmark protocol: target sampling, baselines and MAPE reports.
//!
//! Two baselines sit next to the estimator. TS fits every target's own
//! hourly series, which is only affordable for a sample of targets. FB
//! multiplies the global forecast by one share forecast per fixed attribute,
//! with values below a share threshold assumed to sit at half of it.

mod baselines;
mod benchmark;
mod counts;
mod report;
mod sampling;

pub use baselines::{baseline_fb, baseline_ts, Evaluator, FbModel, FB_THRESHOLD};
pub use benchmark::{benchmark_windows, run_benchmark, Benchmark, BenchmarkConfig, TEST_DAYS, TRAIN_DAYS};
pub use counts::SeriesSource;
pub use report::{EvalMethod, EvalRecord, EvalReport, SummaryRow, TargetClass};
pub use sampling::{default_ifis_kappa, ifis_pool, sample_fis, sample_ifis};
