use nalgebra::DMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::data::LogView;
use crate::error::{Error, Result};

/// Pearson chi-square statistic of an `r x c` table, with degrees of freedom
/// over observed rows and columns only.
pub fn chi_square_statistic(table: &[Vec<u64>]) -> (f64, usize, usize) {
    let rows: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols_n = table.first().map_or(0, Vec::len);
    let cols: Vec<u64> = (0..cols_n).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let n: u64 = rows.iter().sum();
    let mut chi2 = 0.0;
    if n > 0 {
        for (i, r) in table.iter().enumerate() {
            for (j, &o) in r.iter().enumerate() {
                let e = rows[i] as f64 * cols[j] as f64 / n as f64;
                if e > 0.0 {
                    chi2 += (o as f64 - e).powi(2) / e;
                }
            }
        }
    }
    let observed_rows = rows.iter().filter(|&&x| x > 0).count();
    let observed_cols = cols.iter().filter(|&&x| x > 0).count();
    (chi2, observed_rows, observed_cols)
}

/// Bias-uncorrected Cramér's V, `√(χ² / (n · min(r−1, c−1)))`; 0 when either
/// variable shows a single observed value.
pub fn cramers_v(table: &[Vec<u64>]) -> f64 {
    let (chi2, r, c) = chi_square_statistic(table);
    let n: u64 = table.iter().flatten().sum();
    let m = r.min(c).saturating_sub(1);
    if m == 0 || n == 0 {
        return 0.0;
    }
    (chi2 / (n as f64 * m as f64)).sqrt().min(1.0)
}

/// Contingency table of attributes `a` and `b`.
pub fn contingency<'a>(log: impl Into<LogView<'a>>, a: usize, b: usize) -> Vec<Vec<u64>> {
    let log = log.into();
    let ca = log.schema().cardinality(a);
    let cb = log.schema().cardinality(b);
    let mut t = vec![vec![0u64; cb]; ca];
    for row in log.rows() {
        t[row[a] as usize][row[b] as usize] += 1;
    }
    t
}

/// Symmetric `k x k` matrix of pairwise Cramér's V with unit diagonal.
pub fn cramers_v_matrix<'a>(log: impl Into<LogView<'a>>) -> Result<DMatrix<f64>> {
    let log = log.into();
    if log.len() < 2 {
        return Err(Error::Config("Cramér's V needs at least 2 rows".into()));
    }
    let k = log.k();
    let mut m = DMatrix::<f64>::identity(k, k);
    for a in 0..k {
        for b in 0..a {
            let v = cramers_v(&contingency(log, a, b));
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(m)
}

/// Mean of the off-diagonal entries of a square matrix.
pub fn mean_off_diagonal(m: &DMatrix<f64>) -> f64 {
    let k = m.nrows();
    if k < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..i {
            s += m[(i, j)];
        }
    }
    s / (k * (k - 1) / 2) as f64
}

/// Goodness-of-fit test of observed counts against `probabilities`.
/// Returns `(statistic, p_value)`.
pub fn chi_square_goodness_of_fit(counts: &[u64], probabilities: &[f64]) -> Result<(f64, f64)> {
    if counts.len() != probabilities.len() {
        return Err(Error::LengthMismatch(counts.len(), probabilities.len()));
    }
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in counts.iter().zip(probabilities) {
        if p > 0.0 {
            let e = p * n as f64;
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if cells < 2 {
        return Ok((0.0, 1.0));
    }
    let dist = ChiSquared::new((cells - 1) as f64).expect("positive dof");
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Chi-square test of independence. Returns `(statistic, p_value)`.
pub fn chi_square_independence(table: &[Vec<u64>]) -> (f64, f64) {
    let (chi2, r, c) = chi_square_statistic(table);
    let dof = (r.saturating_sub(1) * c.saturating_sub(1)) as f64;
    if dof == 0.0 {
        return (chi2, 1.0);
    }
    let dist = ChiSquared::new(dof).expect("positive dof");
    (chi2, 1.0 - dist.cdf(chi2))
}
