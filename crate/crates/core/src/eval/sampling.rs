use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{LogView, TargetDefinition};
use crate::error::{Error, Result};
use crate::estimator::FISStore;
use crate::mining::{mine_eclat_cc, Algorithm, FISRecord, MiningConfig, Threshold};

fn to_target(k: usize, r: &FISRecord) -> TargetDefinition {
    TargetDefinition::from_items(k, r.itemset.items()).expect("mined itemsets satisfy the categorical constraint")
}

/// Draws `count` store itemsets without replacement, each draw picking a
/// remaining itemset with probability proportional to its support. Returned
/// in draw order.
pub fn sample_fis(store: &FISStore, count: usize, seed: u64) -> Vec<TargetDefinition> {
    let k = store.schema().k();
    weighted_order(store.records(), count, seed).into_iter().map(|i| to_target(k, &store.records()[i])).collect()
}

/// Sequential weighted sampling via exponential keys: the item with the
/// smallest `Exp(1) / w` is the first draw, and so on.
fn weighted_order(records: &[FISRecord], count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keyed: Vec<(f64, usize)> = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let u: f64 = rng.random();
            (-(1.0 - u).ln() / r.support as f64, i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().take(count).map(|(_, i)| i).collect()
}

/// Infrequent itemsets with support in `[kappa_low, κ)` over the training
/// view, found by mining at `kappa_low` and dropping store members.
pub fn ifis_pool(train: LogView<'_>, store: &FISStore, kappa_low: u64) -> Result<Vec<FISRecord>> {
    let kappa_low = kappa_low.max(1);
    if kappa_low >= store.kappa() {
        return Err(Error::Benchmark(format!(
            "infrequent threshold {kappa_low} must be below the store threshold {}",
            store.kappa()
        )));
    }
    let cfg = MiningConfig::new(Algorithm::EclatCc, Threshold::Absolute(kappa_low));
    let (records, _) = mine_eclat_cc(train, &cfg)?;
    Ok(records.into_iter().filter(|r| r.support < store.kappa()).collect())
}

/// Default lowered threshold for infrequent-itemset discovery.
pub fn default_ifis_kappa(kappa: u64) -> u64 {
    (kappa / 10).max(1)
}

/// Uniform sample without replacement of infrequent itemsets, mined at
/// `kappa_low` (see [`default_ifis_kappa`]).
pub fn sample_ifis(
    train: LogView<'_>,
    store: &FISStore,
    count: usize,
    seed: u64,
    kappa_low: u64,
) -> Result<Vec<TargetDefinition>> {
    let pool = ifis_pool(train, store, kappa_low)?;
    if pool.is_empty() {
        return Err(Error::Benchmark(format!(
            "no infrequent itemsets with support >= {kappa_low}; lower the infrequent threshold"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = store.schema().k();
    Ok(pool.choose_multiple(&mut rng, count.min(pool.len())).map(|r| to_target(k, r)).collect())
}
