use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Contiguous hourly values starting at epoch hour `start_hour`.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries {
    pub start_hour: i64,
    pub values: Vec<f64>,
}

impl HourlySeries {
    pub fn new(start_hour: i64, values: Vec<f64>) -> Self {
        HourlySeries { start_hour, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// First hour after the series.
    pub fn end_hour(&self) -> i64 {
        self.start_hour + self.values.len() as i64
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `hour_index,count` lines, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("hour_index,count\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.start_hour + i as i64, v);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut start = None;
        let mut values = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line_no == 0 && line.starts_with("hour_index") {
                continue;
            }
            let (h, c) = line.split_once(',').ok_or_else(|| Error::Parse {
                row: line_no + 1,
                msg: format!("expected hour_index,count: {line:?}"),
            })?;
            let h: i64 = h.trim().parse().map_err(|e| Error::Parse { row: line_no + 1, msg: format!("{e}") })?;
            let c: f64 = c.trim().parse().map_err(|e| Error::Parse { row: line_no + 1, msg: format!("{e}") })?;
            let expected = *start.get_or_insert(h) + values.len() as i64;
            if h != expected {
                return Err(Error::Parse {
                    row: line_no + 1,
                    msg: format!("hour {h} breaks contiguity (expected {expected})"),
                });
            }
            values.push(c);
        }
        let start_hour = start.ok_or_else(|| Error::Parse { row: 0, msg: "empty series".into() })?;
        Ok(HourlySeries { start_hour, values })
    }
}
