use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{cholesky, min_eigenvalue, nearest_correlation};
use super::marginal::{MarginalShape, MarginalSpec};
use crate::error::{Error, Result};

/// Gaussian copula: correlation matrix, one marginal per attribute, and the
/// cached Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSpec {
    correlation: DMatrix<f64>,
    marginals: Vec<MarginalSpec>,
    cholesky_factor: DMatrix<f64>,
}

impl CopulaSpec {
    pub fn new(correlation: DMatrix<f64>, marginals: Vec<MarginalSpec>) -> Result<Self> {
        if marginals.len() != correlation.nrows() {
            return Err(Error::InvalidCorrelation(format!(
                "{} marginals for a {}x{} matrix",
                marginals.len(),
                correlation.nrows(),
                correlation.ncols()
            )));
        }
        let cholesky_factor = cholesky(&correlation)?;
        Ok(CopulaSpec { correlation, marginals, cholesky_factor })
    }

    pub fn k(&self) -> usize {
        self.marginals.len()
    }

    pub fn correlation(&self) -> &DMatrix<f64> {
        &self.correlation
    }

    pub fn marginals(&self) -> &[MarginalSpec] {
        &self.marginals
    }

    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.cholesky_factor
    }

    /// Mean of the off-diagonal correlation entries.
    pub fn mean_off_diagonal(&self) -> f64 {
        let k = self.k();
        if k < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..k {
            for j in 0..i {
                s += self.correlation[(i, j)];
            }
        }
        s / (k * (k - 1) / 2) as f64
    }

    /// Multi-line human-readable summary.
    pub fn summary(&self) -> String {
        let k = self.k();
        let mut out = format!("k={k} mean_off_diagonal={:.4}\n", self.mean_off_diagonal());
        for (a, m) in self.marginals.iter().enumerate() {
            let head: Vec<String> = m.probabilities().iter().take(4).map(|p| format!("{p:.4}")).collect();
            out.push_str(&format!(
                "attr a{a}: {:?} values={} p=[{}{}]\n",
                m.shape(),
                m.len(),
                head.join(","),
                if m.len() > 4 { ",..." } else { "" }
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationLevel {
    High,
    /// High-correlation off-diagonals halved.
    Low,
}

impl FromStr for CorrelationLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" => Ok(CorrelationLevel::High),
            "low" => Ok(CorrelationLevel::Low),
            other => Err(Error::Config(format!("correlation must be high or low, got {other:?}"))),
        }
    }
}

impl fmt::Display for CorrelationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationLevel::High => "high",
            CorrelationLevel::Low => "low",
        })
    }
}

impl FromStr for MarginalShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "steep" => Ok(MarginalShape::Steep),
            "flat" => Ok(MarginalShape::Flat),
            other => Err(Error::Config(format!("marginals must be steep or flat, got {other:?}"))),
        }
    }
}

impl fmt::Display for MarginalShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarginalShape::Steep => "steep",
            MarginalShape::Flat => "flat",
            MarginalShape::Custom => "custom",
        })
    }
}

/// Attribute counts of the scenario grid.
pub const GRID_K: [usize; 3] = [8, 16, 32];
/// Range of the seeded high-correlation off-diagonals.
pub const HIGH_CORRELATION_RANGE: (f64, f64) = (0.2, 0.6);
/// Eigenvalue floor of the correlation repair.
pub const EIGEN_FLOOR: f64 = 1e-6;
pub const DEFAULT_VALUES_PER_ATTRIBUTE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub k: usize,
    pub correlation: CorrelationLevel,
    pub marginal_shape: MarginalShape,
    pub values_per_attribute: Vec<usize>,
    pub rows: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(k: usize, correlation: CorrelationLevel, marginal_shape: MarginalShape, rows: usize, seed: u64) -> Self {
        ScenarioConfig {
            k,
            correlation,
            marginal_shape,
            values_per_attribute: vec![DEFAULT_VALUES_PER_ATTRIBUTE; k],
            rows,
            seed,
        }
    }

    pub fn with_values(mut self, values: usize) -> Self {
        self.values_per_attribute = vec![values; self.k];
        self
    }

    /// `strict_grid` restricts `k` to 8, 16 or 32.
    pub fn validate(&self, strict_grid: bool) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if strict_grid && !GRID_K.contains(&self.k) {
            return Err(Error::Config(format!("k={} is not one of {GRID_K:?}", self.k)));
        }
        if self.values_per_attribute.len() != self.k {
            return Err(Error::Config(format!(
                "{} value counts for {} attributes",
                self.values_per_attribute.len(),
                self.k
            )));
        }
        if self.values_per_attribute.iter().any(|&v| v == 0) {
            return Err(Error::Config("every attribute needs at least one value".into()));
        }
        if matches!(self.marginal_shape, MarginalShape::Custom) {
            return Err(Error::Config("scenarios use steep or flat marginals".into()));
        }
        Ok(())
    }
}

/// High-correlation matrix for `k` attributes: seeded uniform off-diagonals,
/// repaired to a valid correlation matrix when not positive definite.
pub fn high_correlation(k: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xC0);
    let (lo, hi) = HIGH_CORRELATION_RANGE;
    let mut r = DMatrix::<f64>::identity(k, k);
    for i in 0..k {
        for j in 0..i {
            let v = rng.random_range(lo..hi);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    if k > 1 && min_eigenvalue(&r) < EIGEN_FLOOR {
        r = nearest_correlation(&r, EIGEN_FLOOR);
    }
    r
}

/// Halves every off-diagonal entry.
pub fn halve_off_diagonal(r: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(r.nrows(), r.ncols(), |i, j| if i == j { 1.0 } else { r[(i, j)] * 0.5 })
}

pub fn make_scenario(cfg: &ScenarioConfig) -> Result<CopulaSpec> {
    cfg.validate(false)?;
    let high = high_correlation(cfg.k, cfg.seed);
    let r = match cfg.correlation {
        CorrelationLevel::High => high,
        CorrelationLevel::Low => halve_off_diagonal(&high),
    };
    let marginals = cfg
        .values_per_attribute
        .iter()
        .map(|&v| match cfg.marginal_shape {
            MarginalShape::Steep => MarginalSpec::steep(v),
            _ => MarginalSpec::flat(v),
        })
        .collect::<Result<Vec<_>>>()?;
    CopulaSpec::new(r, marginals)
}
