use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::counts::SeriesSource;
use super::report::{EvalMethod, EvalRecord, EvalReport, TargetClass};
use crate::data::{HourlySeries, ItemCode, LogView, TargetDefinition, TimeWindow};
use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::ets::{fit_ets, forecast_hours, EtsParams};

/// Share threshold below which FB treats a value as unknown.
pub const FB_THRESHOLD: f64 = 0.005;

/// Compares forecasts over a test window against actual hourly counts, with
/// models trained on an earlier window.
#[derive(Debug)]
pub struct Evaluator<'a> {
    src: SeriesSource<'a>,
    train: TimeWindow,
    test: TimeWindow,
    // the same targets are scored by several methods
    cache: Mutex<HashMap<TargetDefinition, Arc<Vec<f64>>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(db: impl Into<LogView<'a>>, train: TimeWindow, test: TimeWindow) -> Result<Self> {
        train.require_hour_aligned()?;
        test.require_hour_aligned()?;
        if test.start() < train.end() {
            return Err(Error::InvalidWindow(format!(
                "test window [{}, {}) must follow training window [{}, {})",
                test.start(),
                test.end(),
                train.start(),
                train.end()
            )));
        }
        let src = SeriesSource::new(db, TimeWindow::new(train.start(), test.end())?)?;
        Ok(Evaluator { src, train, test, cache: Mutex::default() })
    }

    pub fn train(&self) -> TimeWindow {
        self.train
    }

    pub fn test(&self) -> TimeWindow {
        self.test
    }

    /// Training series and test-window actuals of `target`.
    pub fn series(&self, target: &TargetDefinition) -> (HourlySeries, Vec<f64>) {
        let cached = self.cache.lock().expect("cache lock").get(target).cloned();
        let full = cached.unwrap_or_else(|| {
            let full = Arc::new(self.src.hourly(target));
            self.cache.lock().expect("cache lock").insert(target.clone(), full.clone());
            full
        });
        let skip = (self.test.start_hour() - self.src.span().start_hour()) as usize;
        let train = full[..self.train.hour_count()].to_vec();
        (HourlySeries::new(self.train.start_hour(), train), full[skip..].to_vec())
    }

    fn forecast_test(&self, params: &EtsParams) -> Result<Vec<f64>> {
        Ok(forecast_hours(params, self.test.start_hour(), self.test.hour_count())?.points)
    }

    fn record(&self, target: &TargetDefinition, class: TargetClass, method: EvalMethod, predicted: Vec<f64>, actual: Vec<f64>) -> Result<EvalRecord> {
        let name = target.render(self.src.view().schema());
        EvalRecord::new(name, class, method, self.test.start_hour(), predicted, actual)
    }

    /// Fits each target's own training series and forecasts the test window.
    pub fn baseline_ts(&self, targets: &[TargetDefinition], class: TargetClass) -> Result<EvalReport> {
        let records = targets
            .par_iter()
            .map(|t| {
                let (train, actual) = self.series(t);
                let predicted = self.forecast_test(&fit_ets(&train))?;
                self.record(t, class, EvalMethod::Ts, predicted, actual)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport::new(records))
    }

    /// Global forecast times one share forecast per fixed attribute.
    pub fn baseline_fb(&self, targets: &[TargetDefinition], class: TargetClass, fb_threshold: f64) -> Result<EvalReport> {
        let fb = FbModel::fit(self, targets, fb_threshold)?;
        let records = targets
            .par_iter()
            .map(|t| {
                let (_, actual) = self.series(t);
                self.record(t, class, EvalMethod::Fb, fb.predict(t), actual)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport::new(records))
    }

    pub fn estimator(&self, est: &Estimator<'_>, targets: &[TargetDefinition], class: TargetClass) -> Result<EvalReport> {
        let records = targets
            .par_iter()
            .map(|t| {
                let e = est.estimate(t, self.test)?;
                let (_, actual) = self.series(t);
                self.record(t, class, EvalMethod::Estimator, e.hourly, actual)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport::new(records))
    }
}

/// Fitted pieces of the FB baseline.
#[derive(Debug, Clone)]
pub struct FbModel {
    global: Vec<f64>,
    /// Forecast share per test hour for each value at or above the threshold.
    shares: BTreeMap<ItemCode, Vec<f64>>,
    unknown: f64,
}

impl FbModel {
    /// Fits the global series and the share series of every value used by
    /// `targets`. Values whose training share is below `fb_threshold` get
    /// the midpoint of `[0, fb_threshold]`.
    pub fn fit(ev: &Evaluator<'_>, targets: &[TargetDefinition], fb_threshold: f64) -> Result<Self> {
        let k = ev.src.view().k();
        let (global_train, _) = ev.series(&TargetDefinition::global(k));
        let global = ev.forecast_test(&fit_ets(&global_train))?;
        let n_train = global_train.total();
        let mut items: Vec<ItemCode> = targets.iter().flat_map(|t| t.items()).collect();
        items.sort_unstable();
        items.dedup();
        let fitted: Vec<Option<(ItemCode, Vec<f64>)>> = items
            .par_iter()
            .map(|&it| {
                let (train, _) = ev.series(&TargetDefinition::from_items(k, &[it])?);
                let overall = if n_train > 0.0 { train.total() / n_train } else { 0.0 };
                if overall < fb_threshold {
                    return Ok(None);
                }
                // hours without traffic carry the overall share
                let frac: Vec<f64> = train
                    .values
                    .iter()
                    .zip(&global_train.values)
                    .map(|(c, g)| if *g > 0.0 { c / g } else { overall })
                    .collect();
                let fc = ev.forecast_test(&fit_ets(&HourlySeries::new(train.start_hour, frac)))?;
                Ok(Some((it, fc.into_iter().map(|f| f.clamp(0.0, 1.0)).collect())))
            })
            .collect::<Result<_>>()?;
        Ok(FbModel { global, shares: fitted.into_iter().flatten().collect(), unknown: fb_threshold / 2.0 })
    }

    pub fn global(&self) -> &[f64] {
        &self.global
    }

    /// Hourly FB forecast of `target`; the all-wildcard target returns the
    /// global forecast unchanged.
    pub fn predict(&self, target: &TargetDefinition) -> Vec<f64> {
        let items = target.items();
        (0..self.global.len())
            .map(|h| {
                items.iter().fold(self.global[h], |acc, it| {
                    acc * self.shares.get(it).map_or(self.unknown, |s| s[h])
                })
            })
            .collect()
    }
}

/// Per-target series baseline over `train` then `test`.
pub fn baseline_ts<'a>(
    db: impl Into<LogView<'a>>,
    targets: &[TargetDefinition],
    class: TargetClass,
    train: TimeWindow,
    test: TimeWindow,
) -> Result<EvalReport> {
    Evaluator::new(db, train, test)?.baseline_ts(targets, class)
}

/// Share-product baseline over `train` then `test`.
pub fn baseline_fb<'a>(
    db: impl Into<LogView<'a>>,
    targets: &[TargetDefinition],
    class: TargetClass,
    train: TimeWindow,
    test: TimeWindow,
    fb_threshold: f64,
) -> Result<EvalReport> {
    Evaluator::new(db, train, test)?.baseline_fb(targets, class, fb_threshold)
}
