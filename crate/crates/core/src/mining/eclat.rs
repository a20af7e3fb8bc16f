use rayon::prelude::*;

use super::tidlist::{intersect, TidList, VerticalIndex};
use super::{finish, timed, Algorithm, FISRecord, Itemset, MiningConfig, MiningOutput, MiningStats};
use crate::data::{ItemCode, LogView};
use crate::error::Result;

/// Depth-first Eclat: tidlist intersection inside prefix equivalence classes.
pub fn mine_eclat<'a>(db: impl Into<LogView<'a>>, cfg: &MiningConfig) -> Result<MiningOutput> {
    cfg.check(&[Algorithm::Eclat])?;
    run(db.into(), cfg, false)
}

/// Eclat with the categorical check applied to each candidate before its
/// tidlist intersection.
pub fn mine_eclat_cc<'a>(db: impl Into<LogView<'a>>, cfg: &MiningConfig) -> Result<MiningOutput> {
    cfg.check(&[Algorithm::EclatCc])?;
    run(db.into(), cfg, true)
}

/// One member of an equivalence class: the last item added to the shared
/// prefix, and the cover of prefix + item.
struct Member {
    item: ItemCode,
    tids: TidList,
}

struct Miner {
    kappa: u64,
    cap: usize,
    cc: bool,
}

impl Miner {
    /// Expands class member `a` of `class`: reports it, builds its child
    /// class and recurses.
    fn expand(&self, prefix: &mut Vec<ItemCode>, class: &[Member], a: usize, out: &mut Vec<FISRecord>, stats: &mut MiningStats) {
        let xa = &class[a];
        prefix.push(xa.item);
        out.push(FISRecord { itemset: Itemset::from_sorted(prefix.clone()), support: xa.tids.support() });

        if prefix.len() < self.cap {
            let mut child = Vec::new();
            for xb in &class[a + 1..] {
                stats.candidates_generated += 1;
                // Both members extend the same prefix, which already satisfies
                // the constraint, so the union violates it iff the two new
                // items share an attribute.
                if self.cc && xa.item.attr == xb.item.attr {
                    stats.candidates_rejected_by_cc += 1;
                    continue;
                }
                stats.tidlist_intersections += 1;
                let tids = intersect(&xa.tids, &xb.tids);
                if tids.support() >= self.kappa {
                    child.push(Member { item: xb.item, tids });
                }
            }
            for b in 0..child.len() {
                self.expand(prefix, &child, b, out, stats);
            }
        }
        prefix.pop();
    }
}

fn run(db: LogView<'_>, cfg: &MiningConfig, cc: bool) -> Result<MiningOutput> {
    let kappa = cfg.threshold.resolve(db.len())?;
    let miner = Miner { kappa, cap: cfg.size_cap(), cc };
    let ((records, stats), elapsed) = timed(|| {
        let index = VerticalIndex::build(&db);
        // initial class: frequent singletons in item order
        let root: Vec<Member> = index
            .items()
            .filter(|(_, t)| t.support() >= kappa)
            .map(|(item, t)| Member { item, tids: t.clone() })
            .collect();
        drop(index);
        if miner.cap == 0 {
            return (Vec::new(), MiningStats::default());
        }

        let subtree = |a: usize| {
            let mut out = Vec::new();
            let mut stats = MiningStats::default();
            miner.expand(&mut Vec::new(), &root, a, &mut out, &mut stats);
            (out, stats)
        };
        let parts: Vec<(Vec<FISRecord>, MiningStats)> = if cfg.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build().expect("thread pool");
            pool.install(|| (0..root.len()).into_par_iter().map(subtree).collect())
        } else {
            (0..root.len()).map(subtree).collect()
        };

        let mut records = Vec::with_capacity(parts.iter().map(|p| p.0.len()).sum());
        let mut stats = MiningStats::default();
        for (r, s) in parts {
            records.extend(r);
            stats.absorb(&s);
        }
        (records, stats)
    });
    Ok(finish(records, stats, elapsed))
}
