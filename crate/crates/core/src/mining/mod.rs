//! Frequent itemset miners over categorical transaction logs.
//!
//! All miners share one output contract: every itemset `I` with support
//! `s(I) >= κ` (never the empty set), sorted lexicographically by
//! [`ItemCode`] order. The `_cc` variants discard candidates that put two
//! values of one attribute together before their support is computed;
//! such itemsets have empty covers, so the output is unchanged and only the
//! work done differs.

mod apriori;
mod brute;
mod eclat;
mod fisfile;
mod fpgrowth;
mod tidlist;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use apriori::{mine_apriori, mine_apriori_cc};
pub use brute::{brute_force_mine, BRUTE_FORCE_LIMIT};
pub use eclat::{mine_eclat, mine_eclat_cc};
pub use fisfile::{parse_fis, read_fis, render_fis, write_fis};
pub use fpgrowth::mine_fpgrowth;
pub use tidlist::{intersect, TidList, VerticalIndex};

use crate::data::{AttributeSchema, ItemCode, LogView};
use crate::error::{Error, Result};

/// Sorted, duplicate-free set of items. May violate the categorical
/// constraint; use [`categorical_constraint`] to check.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Itemset(Vec<ItemCode>);

impl Itemset {
    pub fn new(mut items: Vec<ItemCode>) -> Self {
        items.sort_unstable();
        items.dedup();
        Itemset(items)
    }

    /// Wraps items already sorted and deduplicated.
    pub(crate) fn from_sorted(items: Vec<ItemCode>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Itemset(items)
    }

    pub fn singleton(item: ItemCode) -> Self {
        Itemset(vec![item])
    }

    pub fn items(&self) -> &[ItemCode] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: ItemCode) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|it| other.contains(*it))
    }

    /// Copy with `item` added.
    pub fn with(&self, item: ItemCode) -> Itemset {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&item) {
            v.insert(pos, item);
        }
        Itemset(v)
    }

    pub fn render(&self, schema: &AttributeSchema) -> String {
        self.0.iter().map(|it| schema.render_item(*it)).collect::<Vec<_>>().join(";")
    }
}

impl From<Vec<ItemCode>> for Itemset {
    fn from(v: Vec<ItemCode>) -> Self {
        Itemset::new(v)
    }
}

/// True iff no two items share an attribute.
pub fn categorical_constraint(itemset: &Itemset) -> bool {
    // sorted by attribute first, so a repeat must be adjacent
    itemset.0.windows(2).all(|w| w[0].attr != w[1].attr)
}

/// A frequent itemset with its absolute support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FISRecord {
    pub itemset: Itemset,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(u64),
    /// Fraction of the row count, resolved with a ceiling.
    Fraction(f64),
}

impl Threshold {
    /// Resolves to an absolute count for `n` rows. Fractions round up,
    /// except that products within 1e-9 of an integer are taken as that integer.
    pub fn resolve(&self, n: usize) -> Result<u64> {
        let kappa = match *self {
            Threshold::Absolute(k) => k,
            Threshold::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::Config(format!("support fraction {f} outside (0, 1]")));
                }
                let x = f * n as f64;
                let r = x.round();
                if (x - r).abs() <= 1e-9 * x.max(1.0) {
                    r as u64
                } else {
                    x.ceil() as u64
                }
            }
        };
        if kappa == 0 {
            return Err(Error::Config("support threshold resolves to 0".into()));
        }
        Ok(kappa)
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// `N%` is a percentage of the row count; a bare integer is absolute.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(p) = s.strip_suffix('%') {
            let pct: f64 = p.trim().parse().map_err(|_| Error::Config(format!("bad percentage {s:?}")))?;
            Ok(Threshold::Fraction(pct / 100.0))
        } else {
            let k: u64 = s.parse().map_err(|_| Error::Config(format!("bad support {s:?}")))?;
            Ok(Threshold::Absolute(k))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Apriori,
    AprioriCc,
    Eclat,
    EclatCc,
    FpGrowth,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Apriori, Algorithm::AprioriCc, Algorithm::Eclat, Algorithm::EclatCc, Algorithm::FpGrowth];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Apriori => "apriori",
            Algorithm::AprioriCc => "apriori_cc",
            Algorithm::Eclat => "eclat",
            Algorithm::EclatCc => "eclat_cc",
            Algorithm::FpGrowth => "fpgrowth",
        }
    }

    pub fn uses_cc(&self) -> bool {
        matches!(self, Algorithm::AprioriCc | Algorithm::EclatCc)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == norm || (norm == "fp_growth" && *a == Algorithm::FpGrowth))
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningConfig {
    pub threshold: Threshold,
    pub algorithm: Algorithm,
    pub max_size: Option<usize>,
    /// Worker threads for miners that partition over first-level classes;
    /// 1 runs serially.
    pub threads: usize,
}

impl MiningConfig {
    pub fn new(algorithm: Algorithm, threshold: Threshold) -> Self {
        MiningConfig { threshold, algorithm, max_size: None, threads: 1 }
    }

    pub fn with_max_size(mut self, max: usize) -> Self {
        self.max_size = Some(max);
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub(crate) fn size_cap(&self) -> usize {
        self.max_size.unwrap_or(usize::MAX)
    }

    fn check(&self, expected: &[Algorithm]) -> Result<()> {
        if expected.contains(&self.algorithm) {
            Ok(())
        } else {
            Err(Error::Config(format!("config names {} but {} was called", self.algorithm, expected[0])))
        }
    }
}

/// Work counters. For miners without a categorical check,
/// `candidates_rejected_by_cc` stays 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MiningStats {
    pub candidates_generated: u64,
    pub candidates_rejected_by_cc: u64,
    pub tidlist_intersections: u64,
    pub wall_time: f64,
}

impl MiningStats {
    pub(crate) fn absorb(&mut self, other: &MiningStats) {
        self.candidates_generated += other.candidates_generated;
        self.candidates_rejected_by_cc += other.candidates_rejected_by_cc;
        self.tidlist_intersections += other.tidlist_intersections;
    }

    /// Same counters, ignoring wall time.
    pub fn same_work(&self, other: &MiningStats) -> bool {
        self.candidates_generated == other.candidates_generated
            && self.candidates_rejected_by_cc == other.candidates_rejected_by_cc
            && self.tidlist_intersections == other.tidlist_intersections
    }
}

impl fmt::Display for MiningStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "candidates_generated={} candidates_rejected_by_cc={} tidlist_intersections={} wall_time={:.6}",
            self.candidates_generated, self.candidates_rejected_by_cc, self.tidlist_intersections, self.wall_time
        )
    }
}

pub type MiningOutput = (Vec<FISRecord>, MiningStats);

/// Dispatches on `cfg.algorithm`.
pub fn mine<'a>(db: impl Into<LogView<'a>>, cfg: &MiningConfig) -> Result<MiningOutput> {
    let db = db.into();
    match cfg.algorithm {
        Algorithm::Apriori => mine_apriori(db, cfg),
        Algorithm::AprioriCc => mine_apriori_cc(db, cfg),
        Algorithm::Eclat => mine_eclat(db, cfg),
        Algorithm::EclatCc => mine_eclat_cc(db, cfg),
        Algorithm::FpGrowth => mine_fpgrowth(db, cfg),
    }
}

pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

pub(crate) fn finish(mut records: Vec<FISRecord>, mut stats: MiningStats, elapsed: Duration) -> MiningOutput {
    records.sort_unstable_by(|a, b| a.itemset.cmp(&b.itemset));
    stats.wall_time = elapsed.as_secs_f64();
    (records, stats)
}

/// Per-item supports over `db`, indexed `[attr][value]`.
pub(crate) fn item_supports(db: &LogView<'_>) -> Vec<Vec<u64>> {
    let mut counts: Vec<Vec<u64>> = db.schema().cardinalities().into_iter().map(|c| vec![0; c]).collect();
    for row in db.rows() {
        for (a, &v) in row.iter().enumerate() {
            counts[a][v as usize] += 1;
        }
    }
    counts
}
