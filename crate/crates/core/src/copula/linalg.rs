use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-6;

/// Lower-triangular `L` with `L Lᵀ = R`.
///
/// A semi-definite `R` is retried with diagonal jitter growing tenfold from
/// 1e-10 up to 1e-6.
pub fn cholesky(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_correlation(r)?;
    if let Some(l) = factor(r, 0.0) {
        return Ok(l);
    }
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-12) {
        if let Some(l) = factor(r, jitter) {
            return Ok(l);
        }
        jitter *= 10.0;
    }
    Err(Error::InvalidCorrelation("not positive semi-definite (Cholesky failed at max jitter)".into()))
}

/// Plain Cholesky–Banachiewicz on `r + jitter·I`; `None` on a non-positive pivot.
fn factor(r: &DMatrix<f64>, jitter: f64) -> Option<DMatrix<f64>> {
    let n = r.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = r[(i, j)];
            for p in 0..j {
                sum -= l[(i, p)] * l[(j, p)];
            }
            if i == j {
                let d = sum + jitter;
                if !(d > 0.0) {
                    return None;
                }
                l[(i, i)] = d.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Square, symmetric, unit diagonal, entries within [-1, 1].
pub fn check_correlation(r: &DMatrix<f64>) -> Result<()> {
    let n = r.nrows();
    if n == 0 || r.ncols() != n {
        return Err(Error::InvalidCorrelation(format!("matrix is {}x{}", r.nrows(), r.ncols())));
    }
    for i in 0..n {
        if (r[(i, i)] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCorrelation(format!("diagonal entry {i} is {}", r[(i, i)])));
        }
        for j in 0..i {
            if (r[(i, j)] - r[(j, i)]).abs() > 1e-12 {
                return Err(Error::InvalidCorrelation(format!("asymmetric at ({i}, {j})")));
            }
            if !(r[(i, j)].abs() <= 1.0) {
                return Err(Error::InvalidCorrelation(format!("entry ({i}, {j}) = {} outside [-1, 1]", r[(i, j)])));
            }
        }
    }
    Ok(())
}

/// Repairs a symmetric matrix into a correlation matrix: eigenvalues are
/// clipped at `floor`, then the diagonal is rescaled back to 1.
pub fn nearest_correlation(a: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let clipped = eig.eigenvalues.map(|v| v.max(floor));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let n = a.nrows();
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / rebuilt[(i, i)].sqrt()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            // average the two triangles so the result is exactly symmetric
            let v = 0.5 * (rebuilt[(i, j)] + rebuilt[(j, i)]) * scale[i] * scale[j];
            v.clamp(-1.0, 1.0)
        }
    })
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
