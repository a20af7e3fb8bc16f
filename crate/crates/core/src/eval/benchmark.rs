use std::fs;
use std::path::Path;
use std::time::Instant;

use super::baselines::{Evaluator, FB_THRESHOLD};
use super::report::{EvalReport, TargetClass};
use super::sampling::{default_ifis_kappa, sample_fis, sample_ifis};
use crate::data::{hour_of, LogView, TargetDefinition, TimeWindow, DAY, HOUR};
use crate::error::{Error, Result};
use crate::estimator::{build_store, Estimate, Estimator, FISStore, UnivariateSet};
use crate::mining::Threshold;

pub const TRAIN_DAYS: i64 = 6;
pub const TEST_DAYS: i64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    /// Store threshold over the training rows.
    pub kappa: Threshold,
    pub fis_count: usize,
    pub ifis_count: usize,
    /// Mining threshold for infrequent-itemset discovery; defaults to `κ / 10`.
    pub ifis_kappa: Option<u64>,
    pub seed: u64,
    pub fb_threshold: f64,
    /// First second of day one; defaults to the hour of the earliest event.
    pub start: Option<i64>,
    /// The per-target series baseline fits one model per target.
    pub include_ts: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            kappa: Threshold::Fraction(0.0001),
            fis_count: 500,
            ifis_count: 500,
            ifis_kappa: None,
            seed: 0,
            fb_threshold: FB_THRESHOLD,
            start: None,
            include_ts: true,
        }
    }
}

/// Six training days followed by one test day.
pub fn benchmark_windows<'a>(db: impl Into<LogView<'a>>, start: Option<i64>) -> Result<(TimeWindow, TimeWindow)> {
    let db = db.into();
    let (Some(&first), Some(&last)) = (db.timestamps().first(), db.timestamps().last()) else {
        return Err(Error::Benchmark("empty log".into()));
    };
    let start = start.unwrap_or(hour_of(first) * HOUR);
    let train = TimeWindow::new(start, start + TRAIN_DAYS * DAY)?;
    let test = TimeWindow::new(train.end(), train.end() + TEST_DAYS * DAY)?;
    train.require_hour_aligned()?;
    if first >= train.end() || last < test.end() - HOUR {
        return Err(Error::Benchmark(format!(
            "log spans [{first}, {last}] but the benchmark needs events from {} through the last hour before {}",
            train.start(),
            test.end()
        )));
    }
    Ok((train, test))
}

/// Everything produced by one benchmark run.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub train: TimeWindow,
    pub test: TimeWindow,
    pub kappa: u64,
    pub ifis_kappa: u64,
    pub store: FISStore,
    pub univariates: UnivariateSet,
    pub fis: Vec<TargetDefinition>,
    pub ifis: Vec<TargetDefinition>,
    /// Estimator output for every sampled frequent target.
    pub fis_estimates: Vec<Estimate>,
    pub report: EvalReport,
}

impl Benchmark {
    /// `target,chosen_univariate,method,multiplier,univariate_forecast,point,sigma`
    /// for the frequent sample, with floats in round-trip form.
    pub fn estimates_csv(&self) -> Result<String> {
        let schema = self.store.schema();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["target", "chosen_univariate", "method", "multiplier", "univariate_forecast", "point", "sigma"])?;
        for e in &self.fis_estimates {
            w.write_record([
                e.target.render(schema),
                e.chosen_univariate.map_or_else(|| "*".to_string(), |it| schema.render_item(it)),
                e.method.to_string(),
                e.multiplier.to_string(),
                e.univariate_forecast.to_string(),
                e.point.to_string(),
                e.sigma.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Benchmark(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Report files plus `estimates.csv`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        self.report.write(dir)?;
        let p = dir.join("estimates.csv");
        fs::write(&p, self.estimates_csv()?).map_err(|e| Error::io(&p, e))
    }
}

/// Builds the store on the training days, samples frequent and infrequent
/// targets, and scores the estimator, FB and (optionally) TS on the test day.
pub fn run_benchmark<'a>(db: impl Into<LogView<'a>>, cfg: &BenchmarkConfig) -> Result<Benchmark> {
    let clock = Instant::now();
    let db = db.into();
    let (train, test) = benchmark_windows(db, cfg.start)?;
    let train_view = db.window(train);
    let kappa = cfg.kappa.resolve(train_view.len())?;
    let (store, univariates) = build_store(db, train, kappa)?;
    if store.is_empty() {
        return Err(Error::Benchmark(format!("no itemset reaches support {kappa} in the training window")));
    }
    let ifis_kappa = cfg.ifis_kappa.unwrap_or_else(|| default_ifis_kappa(kappa));
    let fis = sample_fis(&store, cfg.fis_count, cfg.seed);
    let ifis = sample_ifis(train_view, &store, cfg.ifis_count, cfg.seed.wrapping_add(1), ifis_kappa)?;

    let ev = Evaluator::new(db, train, test)?;
    let est = Estimator::new(&store, &univariates);
    let mut report = EvalReport::default();
    for (targets, class) in [(&fis, TargetClass::Fis), (&ifis, TargetClass::Ifis)] {
        report.extend(ev.estimator(&est, targets, class)?);
        if cfg.include_ts {
            report.extend(ev.baseline_ts(targets, class)?);
        }
        report.extend(ev.baseline_fb(targets, class, cfg.fb_threshold)?);
    }
    let fis_estimates = fis.iter().map(|t| est.estimate(t, test)).collect::<Result<Vec<_>>>()?;
    report.elapsed_seconds = Some(clock.elapsed().as_secs_f64());
    Ok(Benchmark { train, test, kappa, ifis_kappa, store, univariates, fis, ifis, fis_estimates, report })
}
