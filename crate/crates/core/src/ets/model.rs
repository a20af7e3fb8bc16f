use crate::data::HourlySeries;
use crate::error::{Error, Result};

/// Daily season on hourly data.
pub const SEASON: usize = 24;
/// Smoothing weights searched: 0, 0.05, ..., 1.
pub const GRID_STEPS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Grid-searched additive Holt-Winters.
    HoltWinters,
    /// Repeat of the last observed day (series shorter than two seasons).
    SeasonalNaive,
    /// All-zero input.
    Zero,
}

/// Fitted additive Holt-Winters state.
///
/// `seasonal[j]` is the component for forecast step `j + 1` (and every 24th
/// step after it), so the vector is already rotated to the forecast origin.
#[derive(Debug, Clone, PartialEq)]
pub struct EtsParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub level: f64,
    pub trend: f64,
    pub seasonal: [f64; SEASON],
    /// Root mean squared one-step in-sample error.
    pub resid_sigma: f64,
    /// Epoch hour of forecast step 1.
    pub origin_hour: i64,
    pub method: FitMethod,
}

impl EtsParams {
    pub fn season_length(&self) -> usize {
        SEASON
    }

    /// Parameters that forecast 0 with zero error.
    pub fn zero(origin_hour: i64) -> Self {
        EtsParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            level: 0.0,
            trend: 0.0,
            seasonal: [0.0; SEASON],
            resid_sigma: 0.0,
            origin_hour,
            method: FitMethod::Zero,
        }
    }

    /// `alpha,beta,gamma,level,trend,seasonal[0..23],resid_sigma`.
    pub fn to_record(&self) -> String {
        let mut fields = vec![self.alpha, self.beta, self.gamma, self.level, self.trend];
        fields.extend_from_slice(&self.seasonal);
        fields.push(self.resid_sigma);
        fields.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn from_record(s: &str, origin_hour: i64) -> Result<Self> {
        let vals = s
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|_| Error::StoreFormat { line: 0, msg: format!("bad number {f:?}") }))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 6 + SEASON {
            return Err(Error::StoreFormat { line: 0, msg: format!("expected {} fields, found {}", 6 + SEASON, vals.len()) });
        }
        let mut seasonal = [0.0; SEASON];
        seasonal.copy_from_slice(&vals[5..5 + SEASON]);
        let all_zero = vals.iter().all(|v| *v == 0.0);
        Ok(EtsParams {
            alpha: vals[0],
            beta: vals[1],
            gamma: vals[2],
            level: vals[3],
            trend: vals[4],
            seasonal,
            resid_sigma: vals[5 + SEASON],
            origin_hour,
            method: if all_zero { FitMethod::Zero } else { FitMethod::HoltWinters },
        })
    }
}

/// Point forecasts and per-step standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub horizon: usize,
    /// Clamped at 0.
    pub points: Vec<f64>,
    /// Before clamping.
    pub raw: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl ForecastResult {
    pub fn total(&self) -> f64 {
        self.points.iter().sum()
    }

    /// Sum of squared per-step sigmas.
    pub fn total_variance(&self) -> f64 {
        self.sigma.iter().map(|s| s * s).sum()
    }

    /// Steps `from..from+len` (0-based) of a longer forecast.
    pub fn slice(&self, from: usize, len: usize) -> ForecastResult {
        ForecastResult {
            horizon: len,
            points: self.points[from..from + len].to_vec(),
            raw: self.raw[from..from + len].to_vec(),
            sigma: self.sigma[from..from + len].to_vec(),
        }
    }
}

struct Init {
    level: f64,
    trend: f64,
    seasonal: [f64; SEASON],
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Initial level, trend and seasonal state.
///
/// The trend is the hourly change between the means of the first two days.
/// Seasonal components are hour-of-cycle means of the detrended series minus
/// its overall mean, and the level sits one step before the first
/// observation so that the first one-step forecast is `level + trend`.
fn initial_state(y: &[f64]) -> Init {
    let first = mean(&y[..SEASON]);
    let second = mean(&y[SEASON..2 * SEASON]);
    let trend = (second - first) / SEASON as f64;
    let detrended: Vec<f64> = y.iter().enumerate().map(|(t, v)| v - trend * t as f64).collect();
    let overall = mean(&detrended);
    let mut seasonal = [0.0; SEASON];
    for (p, s) in seasonal.iter_mut().enumerate() {
        let phase: Vec<f64> = detrended.iter().skip(p).step_by(SEASON).copied().collect();
        *s = mean(&phase) - overall;
    }
    // exact zero-sum even when the window is not a whole number of days
    let drift = mean(&seasonal);
    seasonal.iter_mut().for_each(|s| *s -= drift);
    // the first day's mean is the level at its midpoint, t = 11.5
    let level = first - trend * (SEASON as f64 + 1.0) / 2.0;
    Init { level, trend, seasonal }
}

struct Run {
    sse: f64,
    level: f64,
    trend: f64,
    seasonal: [f64; SEASON],
}

/// One pass of the additive recursion; phase of `y[t]` is `t mod 24`.
fn run(y: &[f64], init: &Init, alpha: f64, beta: f64, gamma: f64) -> Run {
    let (mut l, mut b, mut s) = (init.level, init.trend, init.seasonal);
    let mut sse = 0.0;
    for (t, &obs) in y.iter().enumerate() {
        let p = t % SEASON;
        let e = obs - (l + b + s[p]);
        sse += e * e;
        let nl = alpha * (obs - s[p]) + (1.0 - alpha) * (l + b);
        b = beta * (nl - l) + (1.0 - beta) * b;
        s[p] = gamma * (obs - nl) + (1.0 - gamma) * s[p];
        l = nl;
    }
    Run { sse, level: l, trend: b, seasonal: s }
}

/// Rotates phase-indexed seasonal state so index 0 is the first forecast step,
/// and moves its mean into the level.
fn finalize(run: &Run, n: usize) -> (f64, [f64; SEASON]) {
    let drift = mean(&run.seasonal);
    let mut aligned = [0.0; SEASON];
    for (j, a) in aligned.iter_mut().enumerate() {
        *a = run.seasonal[(n + j) % SEASON] - drift;
    }
    (run.level + drift, aligned)
}

fn grid_value(i: usize) -> f64 {
    i as f64 / (GRID_STEPS - 1) as f64
}

/// Fits additive Holt-Winters by minimizing in-sample one-step squared error
/// over the weight grid. Series shorter than two seasons fall back to a
/// seasonal-naive forecast; an all-zero series forecasts 0.
pub fn fit_ets(series: &HourlySeries) -> EtsParams {
    let y = &series.values;
    let origin = series.end_hour();
    if y.iter().all(|v| *v == 0.0) {
        return EtsParams::zero(origin);
    }
    if y.len() < 2 * SEASON {
        return seasonal_naive(y, origin);
    }

    let init = initial_state(y);
    let mut best: Option<(f64, [usize; 3])> = None;
    for ai in 0..GRID_STEPS {
        for bi in 0..GRID_STEPS {
            for gi in 0..GRID_STEPS {
                let sse = run(y, &init, grid_value(ai), grid_value(bi), grid_value(gi)).sse;
                // strict improvement beyond rounding keeps the earliest grid point on ties
                let better = match best {
                    None => true,
                    Some((b, _)) => sse < b * (1.0 - 1e-9) - 1e-12,
                };
                if better && sse.is_finite() {
                    best = Some((sse, [ai, bi, gi]));
                }
            }
        }
    }
    let (_, [ai, bi, gi]) = best.expect("grid is non-empty");
    let (alpha, beta, gamma) = (grid_value(ai), grid_value(bi), grid_value(gi));
    let r = run(y, &init, alpha, beta, gamma);
    let (level, seasonal) = finalize(&r, y.len());
    EtsParams {
        alpha,
        beta,
        gamma,
        level,
        trend: r.trend,
        seasonal,
        resid_sigma: (r.sse / y.len() as f64).sqrt(),
        origin_hour: origin,
        method: FitMethod::HoltWinters,
    }
}

fn seasonal_naive(y: &[f64], origin_hour: i64) -> EtsParams {
    let n = y.len();
    // latest observation for each forecast step's phase, if any
    let latest: Vec<Option<f64>> = (0..SEASON)
        .map(|j| {
            let phase = (n + j) % SEASON;
            (0..n).rev().find(|t| t % SEASON == phase).map(|t| y[t])
        })
        .collect();
    let seen: Vec<f64> = latest.iter().flatten().copied().collect();
    let level = mean(&seen);
    let mut seasonal = [0.0; SEASON];
    for (s, v) in seasonal.iter_mut().zip(&latest) {
        *s = v.map_or(0.0, |v| v - level);
    }
    let resid_sigma = if n > SEASON {
        let r: Vec<f64> = (n.saturating_sub(SEASON).max(SEASON)..n).map(|t| (y[t] - y[t - SEASON]).powi(2)).collect();
        mean(&r).sqrt()
    } else {
        let m = mean(y);
        (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    EtsParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        level,
        trend: 0.0,
        seasonal,
        resid_sigma,
        origin_hour,
        method: FitMethod::SeasonalNaive,
    }
}

/// `h`-step forecast. Point `j` is `level + j·trend + seasonal[(j-1) mod 24]`,
/// clamped at 0; sigma grows as `resid_sigma · √j`.
pub fn forecast(params: &EtsParams, h: usize) -> ForecastResult {
    let mut raw = Vec::with_capacity(h);
    let mut sigma = Vec::with_capacity(h);
    for step in 1..=h {
        raw.push(params.level + step as f64 * params.trend + params.seasonal[(step - 1) % SEASON]);
        sigma.push(params.resid_sigma * (step as f64).sqrt());
    }
    let points = raw.iter().map(|v| v.max(0.0)).collect();
    ForecastResult { horizon: h, points, raw, sigma }
}

/// Forecast for the hours `[start_hour, start_hour + hours)`, which must not
/// precede the forecast origin.
pub fn forecast_hours(params: &EtsParams, start_hour: i64, hours: usize) -> Result<ForecastResult> {
    let offset = start_hour - params.origin_hour;
    if offset < 0 {
        return Err(Error::Estimation(format!(
            "forecast window starts at hour {start_hour}, before the forecast origin {}",
            params.origin_hour
        )));
    }
    let offset = offset as usize;
    Ok(forecast(params, offset + hours).slice(offset, hours))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> HourlySeries {
        HourlySeries::new(1000, values)
    }

    fn pattern(t: usize) -> f64 {
        (2.0 * std::f64::consts::PI * (t % SEASON) as f64 / SEASON as f64).sin()
    }

    #[test]
    fn constant_series_is_a_fixed_point() {
        let p = fit_ets(&series(vec![37.0; 144]));
        assert_eq!(p.resid_sigma, 0.0);
        let f = forecast(&p, 24);
        assert!(f.points.iter().all(|v| (v - 37.0).abs() < 1e-9));
        assert_eq!(f.sigma[0], 0.0);
        assert_eq!(p.origin_hour, 1144);
    }

    #[test]
    fn pure_seasonal_next_day() {
        let y: Vec<f64> = (0..168).map(|t| 100.0 + 20.0 * pattern(t)).collect();
        let p = fit_ets(&series(y[..144].to_vec()));
        let f = forecast(&p, 24);
        let m = crate::ets::mape(&y[144..], &f.points).unwrap();
        assert!(m < 1.0, "MAPE {m}");
        assert!(p.seasonal.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn linear_trend_continues() {
        let y: Vec<f64> = (0..168).map(|t| t as f64).collect();
        let p = fit_ets(&series(y[..144].to_vec()));
        let f = forecast(&p, 24);
        for (j, v) in f.points.iter().enumerate() {
            let truth = (144 + j) as f64;
            assert!((v - truth).abs() / truth < 0.01, "step {j}: {v} vs {truth}");
        }
    }

    #[test]
    fn first_step_follows_from_final_state() {
        let y: Vec<f64> = (0..100).map(|t| 50.0 + 10.0 * pattern(t) + (t % 7) as f64).collect();
        let p = fit_ets(&series(y));
        let f = forecast(&p, 3);
        assert!((f.raw[0] - (p.level + p.trend + p.seasonal[0])).abs() < 1e-12);
        assert!(f.sigma.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn all_zero_and_short_series() {
        let z = fit_ets(&series(vec![0.0; 10]));
        assert_eq!(z.method, FitMethod::Zero);
        assert!(forecast(&z, 5).points.iter().all(|v| *v == 0.0));

        let y: Vec<f64> = (0..30).map(|t| (t % SEASON) as f64).collect();
        let p = fit_ets(&series(y.clone()));
        assert_eq!(p.method, FitMethod::SeasonalNaive);
        let f = forecast(&p, 24);
        // repeats the last observed day: step j is phase (30 + j - 1) mod 24
        for j in 0..24 {
            assert!((f.points[j] - ((30 + j) % SEASON) as f64).abs() < 1e-9);
        }
        // phases never observed fall back to the mean of what was seen
        let tiny = fit_ets(&series(vec![4.0, 6.0]));
        let f = forecast(&tiny, 24);
        assert!((f.points[0] - 5.0).abs() < 1e-12);
        assert!((f.points[22] - 4.0).abs() < 1e-12 && (f.points[23] - 6.0).abs() < 1e-12);
        assert!(tiny.resid_sigma > 0.0);
    }

    #[test]
    fn negative_forecasts_are_clamped() {
        let y: Vec<f64> = (0..144).map(|t| (200.0 - 1.5 * t as f64).max(0.0)).collect();
        let p = fit_ets(&series(y));
        let f = forecast(&p, 24);
        assert!(f.points.iter().all(|v| *v >= 0.0));
        assert!(f.raw.iter().zip(&f.points).all(|(r, p)| *r == *p || (*r < 0.0 && *p == 0.0)));
    }

    #[test]
    fn record_round_trip() {
        let y: Vec<f64> = (0..144).map(|t| 10.0 + pattern(t) * 3.0 + (t % 5) as f64 * 0.1).collect();
        let p = fit_ets(&series(y));
        let back = EtsParams::from_record(&p.to_record(), p.origin_hour).unwrap();
        assert_eq!(forecast(&back, 30), forecast(&p, 30));
        assert!(EtsParams::from_record("1,2,3", 0).is_err());
    }

    #[test]
    fn forecast_hours_offsets() {
        let y: Vec<f64> = (0..144).map(|t| 20.0 + 5.0 * pattern(t)).collect();
        let p = fit_ets(&series(y));
        let full = forecast(&p, 30);
        let part = forecast_hours(&p, p.origin_hour + 6, 24).unwrap();
        assert_eq!(part.points, full.points[6..30].to_vec());
        assert!(forecast_hours(&p, p.origin_hour - 1, 2).is_err());
    }
}
