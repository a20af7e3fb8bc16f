use std::collections::HashSet;

use super::{finish, item_supports, timed, Algorithm, FISRecord, Itemset, MiningConfig, MiningOutput, MiningStats};
use crate::data::{ItemCode, LogView};
use crate::error::Result;

/// Level-wise Apriori.
pub fn mine_apriori<'a>(db: impl Into<LogView<'a>>, cfg: &MiningConfig) -> Result<MiningOutput> {
    cfg.check(&[Algorithm::Apriori])?;
    run(db.into(), cfg, false)
}

/// Apriori with the categorical constraint pushed into candidate generation:
/// violating candidates are dropped before subset pruning and counting, at
/// every level.
pub fn mine_apriori_cc<'a>(db: impl Into<LogView<'a>>, cfg: &MiningConfig) -> Result<MiningOutput> {
    cfg.check(&[Algorithm::AprioriCc])?;
    run(db.into(), cfg, true)
}

fn run(db: LogView<'_>, cfg: &MiningConfig, cc: bool) -> Result<MiningOutput> {
    let kappa = cfg.threshold.resolve(db.len())?;
    let cap = cfg.size_cap();
    let ((records, stats), elapsed) = timed(|| {
        let mut stats = MiningStats::default();
        let mut records = Vec::new();
        if cap == 0 {
            return (records, stats);
        }

        let mut level: Vec<Vec<ItemCode>> = Vec::new();
        for (a, per) in item_supports(&db).into_iter().enumerate() {
            for (v, s) in per.into_iter().enumerate() {
                if s >= kappa {
                    let it = ItemCode::new(a as u32, v as u32);
                    records.push(FISRecord { itemset: Itemset::singleton(it), support: s });
                    level.push(vec![it]);
                }
            }
        }

        let mut size = 1;
        while !level.is_empty() && size < cap {
            let candidates = generate(&level, cc, &mut stats);
            if candidates.is_empty() {
                break;
            }
            let supports = count(&db, &candidates);
            level = candidates
                .into_iter()
                .zip(supports)
                .filter(|(_, s)| *s >= kappa)
                .map(|(c, s)| {
                    records.push(FISRecord { itemset: Itemset::from_sorted(c.clone()), support: s });
                    c
                })
                .collect();
            size += 1;
        }
        (records, stats)
    });
    Ok(finish(records, stats, elapsed))
}

/// Joins frequent `k`-itemsets sharing their first `k-1` items, then keeps
/// candidates whose every `k`-subset is frequent. `level` is sorted.
fn generate(level: &[Vec<ItemCode>], cc: bool, stats: &mut MiningStats) -> Vec<Vec<ItemCode>> {
    let frequent: HashSet<&[ItemCode]> = level.iter().map(Vec::as_slice).collect();
    let k = level[0].len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < level.len() {
        // block of itemsets sharing the same (k-1)-prefix
        let prefix = &level[start][..k - 1];
        let end = start + level[start..].iter().take_while(|s| &s[..k - 1] == prefix).count();
        for i in start..end {
            for j in i + 1..end {
                stats.candidates_generated += 1;
                let (x, y) = (level[i][k - 1], level[j][k - 1]);
                if cc && x.attr == y.attr {
                    stats.candidates_rejected_by_cc += 1;
                    continue;
                }
                let mut cand = level[i].clone();
                cand.push(y);
                let all_subsets_frequent = (0..k - 1).all(|drop| {
                    let sub: Vec<ItemCode> =
                        cand.iter().enumerate().filter(|(p, _)| *p != drop).map(|(_, it)| *it).collect();
                    frequent.contains(sub.as_slice())
                });
                if all_subsets_frequent {
                    out.push(cand);
                }
            }
        }
        start = end;
    }
    out
}

/// One database pass. A categorical row holds at most one value per
/// attribute, so containment reduces to `row[attr] == value` per item.
fn count(db: &LogView<'_>, candidates: &[Vec<ItemCode>]) -> Vec<u64> {
    let mut supports = vec![0u64; candidates.len()];
    for row in db.rows() {
        for (c, s) in candidates.iter().zip(supports.iter_mut()) {
            if c.iter().all(|it| row[it.attr as usize] == it.value) {
                *s += 1;
            }
        }
    }
    supports
}
