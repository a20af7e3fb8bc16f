use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::data::{Attribute, AttributeSchema, HourlySeries, ItemCode, LogView, TimeWindow};
use crate::ets::{fit_ets, EtsParams};
use crate::mining::{mine_eclat_cc, parse_fis, render_fis, Algorithm, FISRecord, Itemset, MiningConfig, Threshold};
use crate::error::{Error, Result};

/// Frequent itemsets of the training window with their supports.
#[derive(Debug, Clone)]
pub struct FISStore {
    schema: AttributeSchema,
    records: Vec<FISRecord>,
    index: HashMap<Itemset, u64>,
    kappa: u64,
    window: TimeWindow,
    n_train: u64,
}

impl FISStore {
    pub fn new(schema: AttributeSchema, records: Vec<FISRecord>, kappa: u64, window: TimeWindow, n_train: u64) -> Result<Self> {
        if let Some(r) = records.iter().find(|r| r.support < kappa) {
            return Err(Error::Estimation(format!(
                "record {} has support {} below threshold {kappa}",
                r.itemset.render(&schema),
                r.support
            )));
        }
        let index = records.iter().map(|r| (r.itemset.clone(), r.support)).collect();
        Ok(FISStore { schema, records, index, kappa, window, n_train })
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn records(&self) -> &[FISRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn n_train(&self) -> u64 {
        self.n_train
    }

    /// Training support, or `None` when the itemset is infrequent. The empty
    /// itemset (the global target) has support `n_train`.
    pub fn support(&self, itemset: &Itemset) -> Option<u64> {
        if itemset.is_empty() {
            return Some(self.n_train);
        }
        self.index.get(itemset).copied()
    }

    pub fn support_of_items(&self, items: &[ItemCode]) -> Option<u64> {
        self.support(&Itemset::new(items.to_vec()))
    }

    pub fn is_frequent(&self, itemset: &Itemset) -> bool {
        self.support(itemset).is_some()
    }
}

/// A univariate (single-item) target, or the global target when `item` is `None`.
#[derive(Debug, Clone)]
pub struct Univariate {
    pub item: Option<ItemCode>,
    /// Training-window support.
    pub support: u64,
    pub params: EtsParams,
    /// Training series; absent when the set was loaded from disk.
    pub series: Option<HourlySeries>,
}

impl Univariate {
    pub fn is_global(&self) -> bool {
        self.item.is_none()
    }

    pub fn render(&self, schema: &AttributeSchema) -> String {
        self.item.map_or_else(|| "*".to_string(), |it| schema.render_item(it))
    }
}

/// Frequent single items with fitted forecasters, plus the global target.
#[derive(Debug, Clone)]
pub struct UnivariateSet {
    members: Vec<Univariate>,
    global: Univariate,
    by_item: HashMap<ItemCode, usize>,
}

impl UnivariateSet {
    pub fn new(members: Vec<Univariate>, global: Univariate) -> Result<Self> {
        if !global.is_global() {
            return Err(Error::Estimation("global univariate must not carry an item".into()));
        }
        let mut by_item = HashMap::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            let item = m.item.ok_or_else(|| Error::Estimation("member without an item".into()))?;
            if by_item.insert(item, i).is_some() {
                return Err(Error::Estimation(format!("duplicate univariate {item}")));
            }
        }
        Ok(UnivariateSet { members, global, by_item })
    }

    pub fn members(&self) -> &[Univariate] {
        &self.members
    }

    pub fn global(&self) -> &Univariate {
        &self.global
    }

    pub fn get(&self, item: ItemCode) -> Option<&Univariate> {
        self.by_item.get(&item).map(|&i| &self.members[i])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Mines the training window with Eclat-CC at `kappa`, keeps the frequent
/// singletons as univariates and fits a forecaster to each of them and to
/// the global series.
pub fn build_store<'a>(db: impl Into<LogView<'a>>, window: TimeWindow, kappa: u64) -> Result<(FISStore, UnivariateSet)> {
    let db = db.into();
    window.require_hour_aligned()?;
    let train = db.window(window);
    if train.is_empty() {
        return Err(Error::Estimation("training window contains no transactions".into()));
    }
    let cfg = MiningConfig::new(Algorithm::EclatCc, Threshold::Absolute(kappa));
    let (records, _) = mine_eclat_cc(train, &cfg)?;
    let store = FISStore::new(db.schema().clone(), records, kappa, window, train.len() as u64)?;

    let singles: Vec<(ItemCode, u64)> = store
        .records()
        .iter()
        .filter(|r| r.itemset.len() == 1)
        .map(|r| (r.itemset.items()[0], r.support))
        .collect();

    // one pass for every member's hourly counts plus the global series
    let hours = window.hour_count();
    let start_hour = window.start_hour();
    let mut slot: Vec<Vec<Option<usize>>> = db.schema().cardinalities().into_iter().map(|c| vec![None; c]).collect();
    for (i, (it, _)) in singles.iter().enumerate() {
        slot[it.attr as usize][it.value as usize] = Some(i);
    }
    let mut counts = vec![vec![0.0; hours]; singles.len()];
    let mut global = vec![0.0; hours];
    for (r, row) in train.rows().enumerate() {
        let h = (crate::data::hour_of(train.timestamp(r)) - start_hour) as usize;
        global[h] += 1.0;
        for (a, &v) in row.iter().enumerate() {
            if let Some(i) = slot[a][v as usize] {
                counts[i][h] += 1.0;
            }
        }
    }

    let members: Vec<Univariate> = singles
        .par_iter()
        .zip(counts.into_par_iter())
        .map(|(&(item, support), values)| {
            let series = HourlySeries::new(start_hour, values);
            Univariate { item: Some(item), support, params: fit_ets(&series), series: Some(series) }
        })
        .collect();
    let gseries = HourlySeries::new(start_hour, global);
    let global = Univariate { item: None, support: store.n_train(), params: fit_ets(&gseries), series: Some(gseries) };
    let uset = UnivariateSet::new(members, global)?;
    Ok((store, uset))
}

/// Writes the FIS file and the companion univariate parameter file.
///
/// Parameter lines are `item<TAB>alpha,beta,gamma,level,trend,seasonal[0..23],resid_sigma`
/// with `*` naming the global target. Lines starting with `#` carry the
/// schema, training window, threshold and training row count.
pub fn save_store(store: &FISStore, uset: &UnivariateSet, fis_path: impl AsRef<Path>, params_path: impl AsRef<Path>) -> Result<()> {
    let fis_path = fis_path.as_ref();
    fs::write(fis_path, render_fis(store.records(), store.schema())).map_err(|e| Error::io(fis_path, e))?;
    let params_path = params_path.as_ref();
    fs::write(params_path, render_params(store, uset)).map_err(|e| Error::io(params_path, e))
}

pub fn render_params(store: &FISStore, uset: &UnivariateSet) -> String {
    let schema = store.schema();
    let mut out = String::new();
    for a in schema.attributes() {
        let _ = writeln!(out, "# attr {}\t{}", a.name, a.values.join(","));
    }
    let _ = writeln!(out, "# window {} {}", store.window().start(), store.window().end());
    let _ = writeln!(out, "# kappa {}", store.kappa());
    let _ = writeln!(out, "# n_train {}", store.n_train());
    let mut lines: Vec<String> =
        uset.members().iter().map(|m| format!("{}\t{}", m.render(schema), m.params.to_record())).collect();
    lines.sort_unstable();
    lines.push(format!("*\t{}", uset.global().params.to_record()));
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn load_store(fis_path: impl AsRef<Path>, params_path: impl AsRef<Path>) -> Result<(FISStore, UnivariateSet)> {
    let params_path = params_path.as_ref();
    let params_text = fs::read_to_string(params_path).map_err(|e| Error::io(params_path, e))?;
    let fis_path = fis_path.as_ref();
    let fis_text = fs::read_to_string(fis_path).map_err(|e| Error::io(fis_path, e))?;
    parse_store(&fis_text, &params_text)
}

pub fn parse_store(fis_text: &str, params_text: &str) -> Result<(FISStore, UnivariateSet)> {
    let mut attributes = Vec::new();
    let mut window = None;
    let mut kappa = None;
    let mut n_train = None;
    let mut entries = Vec::new();
    for (i, line) in params_text.lines().enumerate() {
        let bad = |msg: String| Error::StoreFormat { line: i + 1, msg };
        if line.trim().is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            let (key, rest) = meta.split_once(' ').unwrap_or((meta, ""));
            match key {
                "attr" => {
                    let (name, values) = rest.split_once('\t').ok_or_else(|| bad("attr line needs a TAB".into()))?;
                    attributes.push(Attribute {
                        name: name.to_string(),
                        values: values.split(',').map(str::to_string).collect(),
                    });
                }
                "window" => {
                    let nums: Vec<i64> = rest.split_whitespace().filter_map(|x| x.parse().ok()).collect();
                    if nums.len() != 2 {
                        return Err(bad(format!("bad window {rest:?}")));
                    }
                    window = Some(TimeWindow::new(nums[0], nums[1])?);
                }
                "kappa" => kappa = Some(rest.trim().parse::<u64>().map_err(|_| bad(format!("bad kappa {rest:?}")))?),
                "n_train" => {
                    n_train = Some(rest.trim().parse::<u64>().map_err(|_| bad(format!("bad n_train {rest:?}")))?)
                }
                _ => {}
            }
            continue;
        }
        let (item, record) = line.split_once('\t').ok_or_else(|| bad("missing TAB".into()))?;
        entries.push((i + 1, item.to_string(), record.to_string()));
    }
    let missing = |what: &str| Error::StoreFormat { line: 0, msg: format!("parameter file lacks the {what} header") };
    let schema = AttributeSchema::new(attributes)?;
    let window = window.ok_or_else(|| missing("window"))?;
    let kappa = kappa.ok_or_else(|| missing("kappa"))?;
    let n_train = n_train.ok_or_else(|| missing("n_train"))?;
    let origin = window.end().div_euclid(crate::data::HOUR);

    let store = FISStore::new(schema.clone(), parse_fis(fis_text, &schema)?, kappa, window, n_train)?;
    let mut members = Vec::new();
    let mut global = None;
    for (line, item, record) in entries {
        let params = EtsParams::from_record(&record, origin).map_err(|e| Error::StoreFormat { line, msg: e.to_string() })?;
        if item == "*" {
            global = Some(Univariate { item: None, support: n_train, params, series: None });
        } else {
            let code = schema.parse_item(&item).map_err(|e| Error::StoreFormat { line, msg: e.to_string() })?;
            let support = store.support(&Itemset::singleton(code)).ok_or_else(|| Error::StoreFormat {
                line,
                msg: format!("univariate {item} is not in the FIS file"),
            })?;
            members.push(Univariate { item: Some(code), support, params, series: None });
        }
    }
    members.sort_by_key(|m| m.item);
    let global = global.ok_or_else(|| missing("global (*) parameter"))?;
    Ok((store, UnivariateSet::new(members, global)?))
}
