//! Additive Holt-Winters forecasting of hourly counts, and MAPE.

mod model;

pub use model::{fit_ets, forecast, forecast_hours, EtsParams, FitMethod, ForecastResult, GRID_STEPS, SEASON};

use crate::error::{Error, Result};

/// Mean absolute percentage error, in percent. Hours whose actual value is
/// zero are left out of the average.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch(actual.len(), predicted.len()));
    }
    let (sum, n) = actual
        .iter()
        .zip(predicted)
        .filter(|(a, _)| **a != 0.0)
        .fold((0.0, 0usize), |(s, n), (a, p)| (s + ((a - p) / a).abs(), n + 1));
    if n == 0 {
        return Err(Error::UndefinedMape);
    }
    Ok(100.0 * sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mape_examples() {
        assert_eq!(mape(&[5.0, 7.0], &[5.0, 7.0]).unwrap(), 0.0);
        assert!((mape(&[100.0, 100.0], &[90.0, 110.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!((mape(&[0.0, 50.0], &[3.0, 40.0]).unwrap() - 20.0).abs() < 1e-12);
        assert!(matches!(mape(&[0.0, 0.0], &[1.0, 2.0]), Err(Error::UndefinedMape)));
        assert!(mape(&[1.0], &[1.0, 2.0]).is_err());
    }
}
