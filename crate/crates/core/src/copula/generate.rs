use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::marginal::std_normal_cdf;
use super::scenario::CopulaSpec;
use crate::data::{AttributeSchema, TransactionLog, DAY};
use crate::error::{Error, Result};

const ROW_STREAM: u64 = 1;
const TIME_STREAM: u64 = 2;

/// How synthetic events are spread over time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimestampPlan {
    /// Uniform over `[start, end)`.
    Uniform { start: i64, end: i64 },
    /// Arrival intensity `1 + amplitude·sin(2π·t/day)` over `days` days from `start`.
    DailySine { start: i64, days: u32, amplitude: f64 },
}

impl TimestampPlan {
    pub fn window(&self) -> (i64, i64) {
        match *self {
            TimestampPlan::Uniform { start, end } => (start, end),
            TimestampPlan::DailySine { start, days, .. } => (start, start + days as i64 * DAY),
        }
    }

    fn validate(&self) -> Result<()> {
        let (start, end) = self.window();
        if start >= end {
            return Err(Error::Config("timestamp plan covers an empty interval".into()));
        }
        if let TimestampPlan::DailySine { amplitude, .. } = *self {
            if !(0.0..1.0).contains(&amplitude) {
                return Err(Error::Config(format!("amplitude {amplitude} must lie in [0, 1)")));
            }
        }
        Ok(())
    }

    /// `n` sorted timestamps.
    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
        let (start, end) = self.window();
        let mut ts: Vec<i64> = match *self {
            TimestampPlan::Uniform { .. } => (0..n).map(|_| rng.random_range(start..end)).collect(),
            TimestampPlan::DailySine { amplitude, .. } => {
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    let t = rng.random_range(start..end);
                    let phase = 2.0 * std::f64::consts::PI * ((t - start).rem_euclid(DAY)) as f64 / DAY as f64;
                    let accept = (1.0 + amplitude * phase.sin()) / (1.0 + amplitude);
                    if rng.random::<f64>() < accept {
                        out.push(t);
                    }
                }
                out
            }
        };
        ts.sort_unstable();
        ts
    }
}

impl FromStr for TimestampPlan {
    type Err = Error;

    /// `uniform`, `uniform:START:END`, `daily-sine` or
    /// `daily-sine:START:DAYS:AMPLITUDE`. Bare names start at epoch 0 and span 7 days
    /// (daily-sine amplitude 0.5).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts[i].parse::<f64>().map_err(|_| Error::Config(format!("bad timestamp plan field {:?}", parts[i])))
        };
        let plan = match (parts[0], parts.len()) {
            ("uniform", 1) => TimestampPlan::Uniform { start: 0, end: 7 * DAY },
            ("uniform", 3) => TimestampPlan::Uniform { start: num(1)? as i64, end: num(2)? as i64 },
            ("daily-sine", 1) => TimestampPlan::DailySine { start: 0, days: 7, amplitude: 0.5 },
            ("daily-sine", 4) => {
                TimestampPlan::DailySine { start: num(1)? as i64, days: num(2)? as u32, amplitude: num(3)? }
            }
            _ => return Err(Error::Config(format!("unknown timestamp plan {s:?}"))),
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Schema `a0..a{k-1}` with values `v0..`.
pub fn scenario_schema(spec: &CopulaSpec) -> AttributeSchema {
    AttributeSchema::from_pairs(
        spec.marginals()
            .iter()
            .enumerate()
            .map(|(a, m)| (format!("a{a}"), (0..m.len()).map(|v| format!("v{v}")).collect::<Vec<_>>())),
    )
    .expect("generated labels are valid")
}

/// Samples `n` events: `x = L z` with `z` standard normal, then each
/// coordinate goes through `Φ` and its marginal's inverse CDF.
pub fn generate(spec: &CopulaSpec, n: usize, seed: u64, plan: TimestampPlan) -> Result<TransactionLog> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    plan.validate()?;
    let k = spec.k();
    let l = spec.cholesky_factor();
    // row-major copy of the lower triangle for the inner loop
    let lower: Vec<Vec<f64>> = (0..k).map(|i| (0..=i).map(|j| l[(i, j)]).collect()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ROW_STREAM);
    let mut z = vec![0.0; k];
    let mut values = Vec::with_capacity(n * k);
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        for (i, row) in lower.iter().enumerate() {
            let x: f64 = row.iter().zip(&z).map(|(a, b)| a * b).sum();
            values.push(spec.marginals()[i].inverse_cdf(std_normal_cdf(x)) as u32);
        }
    }

    let mut trng = ChaCha8Rng::seed_from_u64(seed);
    trng.set_stream(TIME_STREAM);
    let timestamps = plan.sample(n, &mut trng);
    TransactionLog::from_raw(scenario_schema(spec), timestamps, values)
}
