use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ets::mape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetClass {
    Fis,
    Ifis,
}

impl TargetClass {
    pub fn name(&self) -> &'static str {
        match self {
            TargetClass::Fis => "FIS",
            TargetClass::Ifis => "IFIS",
        }
    }
}

impl fmt::Display for TargetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvalMethod {
    Estimator,
    /// Per-target series, fitted directly.
    Ts,
    /// Global forecast scaled by per-attribute share forecasts.
    Fb,
}

impl EvalMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EvalMethod::Estimator => "estimator",
            EvalMethod::Ts => "TS",
            EvalMethod::Fb => "FB",
        }
    }
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One method's hourly forecast of one target against the actual counts.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub target: String,
    pub class: TargetClass,
    pub method: EvalMethod,
    pub start_hour: i64,
    pub predicted: Vec<f64>,
    pub actual: Vec<f64>,
    /// `None` when every actual hour is zero.
    pub mape: Option<f64>,
}

impl EvalRecord {
    pub fn new(
        target: String,
        class: TargetClass,
        method: EvalMethod,
        start_hour: i64,
        predicted: Vec<f64>,
        actual: Vec<f64>,
    ) -> Result<Self> {
        let mape = match mape(&actual, &predicted) {
            Ok(m) => Some(m),
            Err(Error::UndefinedMape) => None,
            Err(e) => return Err(e),
        };
        Ok(EvalRecord { target, class, method, start_hour, predicted, actual, mape })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub class: TargetClass,
    pub method: EvalMethod,
    /// Targets with a defined MAPE.
    pub count: usize,
    pub undefined: usize,
    pub mean: f64,
    pub median: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub records: Vec<EvalRecord>,
    /// Wall time of the run; kept out of the CSV files.
    pub elapsed_seconds: Option<f64>,
}

impl EvalReport {
    pub fn new(records: Vec<EvalRecord>) -> Self {
        EvalReport { records, elapsed_seconds: None }
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.records.extend(other.records);
    }

    /// Mean and median MAPE per (class, method), in that order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut keys: Vec<(TargetClass, EvalMethod)> = self.records.iter().map(|r| (r.class, r.method)).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(class, method)| {
                let rs = self.records.iter().filter(|r| r.class == class && r.method == method);
                let mut vals: Vec<f64> = rs.clone().filter_map(|r| r.mape).collect();
                let undefined = rs.filter(|r| r.mape.is_none()).count();
                vals.sort_by(f64::total_cmp);
                let mean = if vals.is_empty() { f64::NAN } else { vals.iter().sum::<f64>() / vals.len() as f64 };
                SummaryRow { class, method, count: vals.len(), undefined, mean, median: median(&vals) }
            })
            .collect()
    }

    pub fn cell(&self, class: TargetClass, method: EvalMethod) -> Option<SummaryRow> {
        self.summary().into_iter().find(|r| r.class == class && r.method == method)
    }

    pub fn undefined(&self) -> impl Iterator<Item = &EvalRecord> {
        self.records.iter().filter(|r| r.mape.is_none())
    }

    /// `target,class,method,mape` for every record with a defined MAPE.
    pub fn mape_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["target", "class", "method", "mape"])?;
        for r in &self.records {
            if let Some(m) = r.mape {
                w.write_record([r.target.as_str(), r.class.name(), r.method.name(), &m.to_string()])?;
            }
        }
        finish(w)
    }

    /// Per-hour predictions and actuals for every record.
    pub fn detail_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["target", "class", "method", "hour_index", "predicted", "actual"])?;
        for r in &self.records {
            for (j, (p, a)) in r.predicted.iter().zip(&r.actual).enumerate() {
                w.write_record([
                    r.target.as_str(),
                    r.class.name(),
                    r.method.name(),
                    &(r.start_hour + j as i64).to_string(),
                    &p.to_string(),
                    &a.to_string(),
                ])?;
            }
        }
        finish(w)
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<6} {:<10} {:>6} {:>10} {:>10} {:>9}", "class", "method", "n", "mean", "median", "undefined");
        for r in self.summary() {
            let _ = writeln!(
                out,
                "{:<6} {:<10} {:>6} {:>10.3} {:>10.3} {:>9}",
                r.class.name(),
                r.method.name(),
                r.count,
                r.mean,
                r.median,
                r.undefined
            );
        }
        let undefined: Vec<&EvalRecord> = self.undefined().collect();
        if !undefined.is_empty() {
            let _ = writeln!(out, "\nundefined MAPE (all-zero actuals):");
            for r in undefined {
                let _ = writeln!(out, "  {} {} {}", r.class, r.method, r.target);
            }
        }
        if let Some(s) = self.elapsed_seconds {
            let _ = writeln!(out, "\nelapsed_seconds {s:.3}");
        }
        out
    }

    /// Writes `mape.csv`, `detail.csv` and `summary.txt` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in
            [("mape.csv", self.mape_csv()?), ("detail.csv", self.detail_csv()?), ("summary.txt", self.summary_text())]
        {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Benchmark(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
