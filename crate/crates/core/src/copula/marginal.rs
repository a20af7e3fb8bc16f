use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal CDF, `Φ(x) = erfc(-x/√2) / 2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginalShape {
    /// Geometric decay: a few dominant values and a long tail.
    Steep,
    Flat,
    Custom,
}

/// Ratio of the geometric decay used for steep marginals.
pub const STEEP_RATIO: f64 = 0.5;

/// Categorical distribution over one attribute's values.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpec {
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
    shape: MarginalShape,
}

impl MarginalSpec {
    pub fn new(probabilities: Vec<f64>, shape: MarginalShape) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidMarginal("no values".into()));
        }
        if probabilities.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidMarginal("negative or non-finite probability".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMarginal(format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(MarginalSpec { probabilities, cumulative, shape })
    }

    pub fn custom(probabilities: Vec<f64>) -> Result<Self> {
        Self::new(probabilities, MarginalShape::Custom)
    }

    pub fn flat(values: usize) -> Result<Self> {
        if values == 0 {
            return Err(Error::InvalidMarginal("no values".into()));
        }
        Self::new(vec![1.0 / values as f64; values], MarginalShape::Flat)
    }

    /// `p_j ∝ 0.5^j`, normalized.
    pub fn steep(values: usize) -> Result<Self> {
        if values == 0 {
            return Err(Error::InvalidMarginal("no values".into()));
        }
        let raw: Vec<f64> = (0..values).map(|j| STEEP_RATIO.powi(j as i32)).collect();
        let total: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|p| p / total).collect(), MarginalShape::Steep)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn shape(&self) -> MarginalShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Smallest index whose cumulative probability reaches `u`.
    ///
    /// `u = 0` maps to index 0 and `u = 1` to the last index with positive
    /// mass; values outside [0, 1] are clamped.
    pub fn inverse_cdf(&self, u: f64) -> usize {
        let u = u.clamp(0.0, 1.0);
        if u <= 0.0 {
            return 0;
        }
        let last_positive = self.probabilities.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        let idx = self.cumulative.partition_point(|c| *c < u);
        idx.min(last_positive)
    }
}
