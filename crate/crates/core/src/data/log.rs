use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};

use super::schema::{Attribute, AttributeSchema, ItemCode};
use super::series::HourlySeries;
use super::target::TargetDefinition;
use super::window::{hour_of, TimeWindow};
use crate::error::{Error, Result};

/// One owned event: a timestamp and exactly one item per attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub timestamp: i64,
    pub items: Vec<ItemCode>,
}

impl Transaction {
    /// Builds a transaction from one value index per attribute.
    pub fn from_values(timestamp: i64, values: &[u32]) -> Self {
        let items = values
            .iter()
            .enumerate()
            .map(|(a, &v)| ItemCode::new(a as u32, v))
            .collect();
        Transaction { timestamp, items }
    }
}

/// Immutable event log. Rows are stored row-major as value indices
/// (`values[i * k + a]` is the value of attribute `a` in row `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionLog {
    schema: AttributeSchema,
    timestamps: Vec<i64>,
    values: Vec<u32>,
}

/// Borrowed contiguous run of rows of a [`TransactionLog`].
#[derive(Debug, Clone, Copy)]
pub struct LogView<'a> {
    schema: &'a AttributeSchema,
    timestamps: &'a [i64],
    values: &'a [u32],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaMode<'a> {
    Declared(&'a AttributeSchema),
    Inferred,
}

impl TransactionLog {
    /// Builds a log from transactions, sorting them by timestamp (stable).
    pub fn new(schema: AttributeSchema, mut transactions: Vec<Transaction>) -> Result<Self> {
        transactions.sort_by_key(|t| t.timestamp);
        let k = schema.k();
        let mut timestamps = Vec::with_capacity(transactions.len());
        let mut values = Vec::with_capacity(transactions.len() * k);
        for (row, t) in transactions.iter().enumerate() {
            if t.items.len() != k {
                return Err(Error::SchemaViolation {
                    row,
                    msg: format!("expected {k} items, found {}", t.items.len()),
                });
            }
            for (a, it) in t.items.iter().enumerate() {
                if it.attr as usize != a || !schema.is_valid(*it) {
                    return Err(Error::SchemaViolation { row, msg: format!("invalid item {it} at position {a}") });
                }
                values.push(it.value);
            }
            timestamps.push(t.timestamp);
        }
        Ok(TransactionLog { schema, timestamps, values })
    }

    /// Builds a log from already-encoded columns. `values` is row-major.
    pub fn from_raw(schema: AttributeSchema, timestamps: Vec<i64>, values: Vec<u32>) -> Result<Self> {
        let k = schema.k();
        if values.len() != timestamps.len() * k {
            return Err(Error::LengthMismatch(values.len(), timestamps.len() * k));
        }
        let cards = schema.cardinalities();
        for (row, chunk) in values.chunks_exact(k).enumerate() {
            for (a, &v) in chunk.iter().enumerate() {
                if v as usize >= cards[a] {
                    return Err(Error::SchemaViolation {
                        row,
                        msg: format!("value index {v} out of range for attribute {a}"),
                    });
                }
            }
        }
        let mut log = TransactionLog { schema, timestamps, values };
        if !log.timestamps.windows(2).all(|w| w[0] <= w[1]) {
            let mut order: Vec<usize> = (0..log.timestamps.len()).collect();
            order.sort_by_key(|&i| log.timestamps[i]);
            let ts = order.iter().map(|&i| log.timestamps[i]).collect();
            let vals = order.iter().flat_map(|&i| log.values[i * k..(i + 1) * k].iter().copied()).collect();
            log.timestamps = ts;
            log.values = vals;
        }
        Ok(log)
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn view(&self) -> LogView<'_> {
        LogView { schema: &self.schema, timestamps: &self.timestamps, values: &self.values }
    }

    /// Rows with timestamps inside `w`.
    pub fn window(&self, w: TimeWindow) -> LogView<'_> {
        self.view().window(w)
    }

    pub fn transaction(&self, i: usize) -> Transaction {
        Transaction::from_values(self.timestamps[i], self.row(i))
    }

    pub fn row(&self, i: usize) -> &[u32] {
        self.view().row(i)
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn count_in_window(&self, target: &TargetDefinition, w: TimeWindow) -> u64 {
        self.window(w).count(target)
    }

    pub fn hourly_series(&self, target: &TargetDefinition, w: TimeWindow) -> Result<HourlySeries> {
        self.view().hourly_series(target, w)
    }

    pub fn load_csv(path: impl AsRef<Path>, mode: SchemaMode<'_>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, mode)
    }

    /// Parses the `timestamp,attr1,attr2,...` format.
    pub fn read_csv<R: Read>(reader: R, mode: SchemaMode<'_>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::InvalidSchema("header needs a timestamp column and at least one attribute".into()));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let k = names.len();

        // Inferred mode collects labels in first-seen order.
        let mut inferred: Vec<(Vec<String>, HashMap<String, u32>)> = vec![Default::default(); k];
        if let SchemaMode::Declared(schema) = mode {
            if schema.k() != k || names.iter().enumerate().any(|(a, n)| schema.attr_name(a) != n) {
                return Err(Error::SchemaViolation {
                    row: 1,
                    msg: format!("header {names:?} does not match declared attributes"),
                });
            }
        }

        let mut timestamps = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2; // 1-based file line, header is line 1
            let rec = rec?;
            if rec.len() != k + 1 {
                return Err(Error::SchemaViolation {
                    row,
                    msg: format!("expected {} columns, found {} (values containing commas are not allowed)", k + 1, rec.len()),
                });
            }
            timestamps.push(parse_timestamp(&rec[0]).map_err(|msg| Error::Parse { row, msg })?);
            for (a, field) in rec.iter().skip(1).enumerate() {
                if field.is_empty() {
                    return Err(Error::SchemaViolation {
                        row,
                        msg: format!("missing value for attribute {:?}", names[a]),
                    });
                }
                let code = match mode {
                    SchemaMode::Declared(schema) => schema.value_code(a, field).ok_or_else(|| Error::SchemaViolation {
                        row,
                        msg: format!("value {field:?} not declared for attribute {:?}", names[a]),
                    })?,
                    SchemaMode::Inferred => {
                        let (labels, index) = &mut inferred[a];
                        match index.get(field) {
                            Some(&c) => c,
                            None => {
                                let c = labels.len() as u32;
                                labels.push(field.to_string());
                                index.insert(field.to_string(), c);
                                c
                            }
                        }
                    }
                };
                values.push(code);
            }
        }

        let schema = match mode {
            SchemaMode::Declared(s) => s.clone(),
            SchemaMode::Inferred => {
                let attributes = names
                    .into_iter()
                    .zip(inferred)
                    .map(|(name, (mut labels, _))| {
                        // An attribute never observed (header-only file) still needs a value list.
                        if labels.is_empty() {
                            labels.push("_".to_string());
                        }
                        Attribute { name, values: labels }
                    })
                    .collect();
                AttributeSchema::new(attributes)?
            }
        };
        Self::from_raw(schema, timestamps, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_csv_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Writes epoch-second timestamps followed by value labels.
    pub fn write_csv_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let k = self.schema.k();
        write!(w, "timestamp")?;
        for a in 0..k {
            write!(w, ",{}", self.schema.attr_name(a))?;
        }
        writeln!(w)?;
        let labels: Vec<&[String]> = self.schema.attributes().iter().map(|a| a.values.as_slice()).collect();
        for i in 0..self.len() {
            write!(w, "{}", self.timestamps[i])?;
            for (a, &v) in self.row(i).iter().enumerate() {
                write!(w, ",{}", labels[a][v as usize])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

impl<'a> From<&'a TransactionLog> for LogView<'a> {
    fn from(log: &'a TransactionLog) -> Self {
        log.view()
    }
}

impl<'a> LogView<'a> {
    pub fn schema(&self) -> &'a AttributeSchema {
        self.schema
    }

    pub fn k(&self) -> usize {
        self.schema.k()
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn row(&self, i: usize) -> &'a [u32] {
        let k = self.schema.k();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &'a [u32]> + 'a {
        self.values.chunks_exact(self.schema.k())
    }

    pub fn timestamps(&self) -> &'a [i64] {
        self.timestamps
    }

    pub fn timestamp(&self, i: usize) -> i64 {
        self.timestamps[i]
    }

    /// Sub-view of the rows inside `w` (rows are timestamp-sorted).
    pub fn window(&self, w: TimeWindow) -> LogView<'a> {
        let lo = self.timestamps.partition_point(|&t| t < w.start());
        let hi = self.timestamps.partition_point(|&t| t < w.end());
        let k = self.schema.k();
        LogView {
            schema: self.schema,
            timestamps: &self.timestamps[lo..hi],
            values: &self.values[lo * k..hi * k],
        }
    }

    /// Rows matching `target`.
    pub fn count(&self, target: &TargetDefinition) -> u64 {
        self.rows().filter(|r| target.matches(r)).count() as u64
    }

    pub fn count_in_window(&self, target: &TargetDefinition, w: TimeWindow) -> u64 {
        self.window(w).count(target)
    }

    /// One bucket per hour of `w`; hours with no matching rows are zeros.
    pub fn hourly_series(&self, target: &TargetDefinition, w: TimeWindow) -> Result<HourlySeries> {
        w.require_hour_aligned()?;
        let sub = self.window(w);
        let start_hour = w.start_hour();
        let mut values = vec![0.0; w.hour_count()];
        for (i, r) in sub.rows().enumerate() {
            if target.matches(r) {
                values[(hour_of(sub.timestamps[i]) - start_hour) as usize] += 1.0;
            }
        }
        Ok(HourlySeries::new(start_hour, values))
    }

    /// Hour-aligned window covering every row, or `None` for an empty view.
    pub fn hour_span(&self) -> Option<TimeWindow> {
        let first = *self.timestamps.first()?;
        let last = *self.timestamps.last()?;
        TimeWindow::hours(hour_of(first), hour_of(last) - hour_of(first) + 1).ok()
    }
}

fn parse_timestamp(s: &str) -> std::result::Result<i64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Ok(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt.and_utc().timestamp());
        }
    }
    Err(format!("malformed timestamp {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "timestamp,country,browser\n\
        2024-01-01T00:10:00Z,US,Chrome\n\
        1704067200,IN,Safari\n\
        2024-01-01 01:30:00,US,Safari\n";

    #[test]
    fn load_three_rows_inferred() {
        let log = TransactionLog::read_csv(SMALL.as_bytes(), SchemaMode::Inferred).unwrap();
        assert_eq!(log.schema().k(), 2);
        assert_eq!(log.len(), 3);
        // sorted by time: the epoch row (00:00) comes first
        assert_eq!(log.timestamps(), &[1_704_067_200, 1_704_067_800, 1_704_072_600]);
        // first-seen order: US then IN; Chrome then Safari
        assert_eq!(log.schema().attributes()[0].values, vec!["US", "IN"]);
        assert_eq!(log.row(0), &[1, 1]);
    }

    #[test]
    fn header_only_file() {
        let log = TransactionLog::read_csv("timestamp,a,b\n".as_bytes(), SchemaMode::Inferred).unwrap();
        assert_eq!(log.len(), 0);
        assert_eq!(log.schema().k(), 2);
    }

    #[test]
    fn malformed_timestamp_reports_row() {
        let text = "timestamp,a\n0,x\nyesterday,y\n";
        match TransactionLog::read_csv(text.as_bytes(), SchemaMode::Inferred) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn declared_schema_violation() {
        let schema = AttributeSchema::from_pairs(vec![("a", vec!["x"])]).unwrap();
        let text = "timestamp,a\n0,x\n1,z\n";
        assert!(matches!(
            TransactionLog::read_csv(text.as_bytes(), SchemaMode::Declared(&schema)),
            Err(Error::SchemaViolation { row: 3, .. })
        ));
        let ok = TransactionLog::read_csv("timestamp,a\n0,x\n".as_bytes(), SchemaMode::Declared(&schema)).unwrap();
        assert_eq!(ok.len(), 1);
    }

    #[test]
    fn missing_value_and_embedded_comma_rejected() {
        assert!(TransactionLog::read_csv("timestamp,a,b\n0,x,\n".as_bytes(), SchemaMode::Inferred).is_err());
        assert!(TransactionLog::read_csv("timestamp,a,b\n0,x,y,z\n".as_bytes(), SchemaMode::Inferred).is_err());
        assert!(TransactionLog::read_csv("timestamp,a\n0,\"x,y\"\n".as_bytes(), SchemaMode::Inferred).is_err());
    }

    #[test]
    fn duplicate_rows_are_counted() {
        let text = "timestamp,a,b\n0,x,y\n0,x,y\n5,x,z\n";
        let log = TransactionLog::read_csv(text.as_bytes(), SchemaMode::Inferred).unwrap();
        assert_eq!(log.len(), 3);
        let t = TargetDefinition::parse(log.schema(), "a=x,b=y").unwrap();
        let w = TimeWindow::new(0, 3600).unwrap();
        // brute-force count over the file text
        let expected = text.lines().skip(1).filter(|l| l.ends_with(",x,y")).count() as u64;
        assert_eq!(log.count_in_window(&t, w), expected);
    }

    #[test]
    fn csv_write_read_round_trip() {
        let log = TransactionLog::read_csv(SMALL.as_bytes(), SchemaMode::Inferred).unwrap();
        let mut buf = Vec::new();
        log.write_csv_to(&mut buf).unwrap();
        let back = TransactionLog::read_csv(buf.as_slice(), SchemaMode::Declared(log.schema())).unwrap();
        assert_eq!(back, log);
    }

    fn ten_row_log() -> TransactionLog {
        let schema = AttributeSchema::from_pairs(vec![
            ("a", vec!["a0", "a1"]),
            ("b", vec!["b0", "b1", "b2"]),
            ("c", vec!["c0", "c1"]),
        ])
        .unwrap();
        let rows: [[u32; 3]; 10] = [
            [0, 0, 0],
            [0, 1, 1],
            [1, 0, 0],
            [0, 0, 1],
            [1, 2, 0],
            [0, 0, 0],
            [1, 1, 1],
            [0, 2, 0],
            [0, 0, 1],
            [1, 0, 1],
        ];
        let txs = rows.iter().enumerate().map(|(i, r)| Transaction::from_values(i as i64 * 600, r)).collect();
        TransactionLog::new(schema, txs).unwrap()
    }

    #[test]
    fn count_in_window_hand_enumerated() {
        let log = ten_row_log();
        let all = TimeWindow::new(0, 10 * 600).unwrap();
        // a=a0, b=b0: rows 0, 3, 5, 8
        let t = TargetDefinition::from_constraints(vec![Some(0), Some(0), None]);
        assert_eq!(log.count_in_window(&t, all), 4);
        // first hour covers rows 0..=5: rows 0, 3, 5
        assert_eq!(log.count_in_window(&t, TimeWindow::new(0, 3600).unwrap()), 3);
        assert_eq!(log.count_in_window(&TargetDefinition::global(3), all), 10);
        assert_eq!(log.count_in_window(&t, TimeWindow::new(100_000, 200_000).unwrap()), 0);
    }

    #[test]
    fn hourly_series_consistency() {
        let log = ten_row_log();
        let t = TargetDefinition::from_constraints(vec![Some(0), None, None]);
        let w = TimeWindow::hours(0, 3).unwrap();
        let s = log.hourly_series(&t, w).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.total() as u64, log.count_in_window(&t, w));
        assert_eq!(s.values[2], 0.0);
        let one = log.hourly_series(&t, TimeWindow::hours(0, 1).unwrap()).unwrap();
        assert_eq!(one.values, vec![log.count_in_window(&t, TimeWindow::hours(0, 1).unwrap()) as f64]);
        assert!(log.hourly_series(&t, TimeWindow::new(1, 3600).unwrap()).is_err());
    }

    #[test]
    fn empty_log_series_is_zero() {
        let schema = AttributeSchema::from_pairs(vec![("a", vec!["x"])]).unwrap();
        let log = TransactionLog::new(schema, vec![]).unwrap();
        let s = log.hourly_series(&TargetDefinition::global(1), TimeWindow::hours(10, 24).unwrap()).unwrap();
        assert_eq!(s.values, vec![0.0; 24]);
    }
}
