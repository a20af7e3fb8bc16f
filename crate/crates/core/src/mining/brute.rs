use super::{FISRecord, Itemset};
use crate::data::{ItemCode, LogView};
use crate::error::{Error, Result};

/// Largest search space (product of `|V_l| + 1`) the oracle accepts.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Reference miner: counts every constraint-satisfying itemset directly.
///
/// Each itemset is a mixed-radix number with one digit per attribute
/// (0 = attribute absent, `v + 1` = value `v`). Every row adds one to each
/// of its `2^k` sub-itemsets.
pub fn brute_force_mine<'a>(db: impl Into<LogView<'a>>, kappa: u64) -> Result<Vec<FISRecord>> {
    let db = db.into();
    let schema = db.schema();
    let size = schema.search_space();
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchSpaceTooLarge { size, limit: BRUTE_FORCE_LIMIT });
    }
    let kappa = kappa.max(1);
    let k = schema.k();
    let radix: Vec<usize> = schema.cardinalities().iter().map(|c| c + 1).collect();
    let mut place = vec![1usize; k];
    for a in 1..k {
        place[a] = place[a - 1] * radix[a - 1];
    }

    let mut counts = vec![0u64; size as usize];
    for row in db.rows() {
        for mask in 1u64..(1u64 << k) {
            let mut idx = 0;
            for a in 0..k {
                if mask >> a & 1 == 1 {
                    idx += (row[a] as usize + 1) * place[a];
                }
            }
            counts[idx] += 1;
        }
    }

    let mut out = Vec::new();
    for (idx, &s) in counts.iter().enumerate() {
        if idx == 0 || s < kappa {
            continue;
        }
        let mut items = Vec::new();
        let mut rest = idx;
        for (a, &r) in radix.iter().enumerate() {
            let digit = rest % r;
            rest /= r;
            if digit > 0 {
                items.push(ItemCode::new(a as u32, digit as u32 - 1));
            }
        }
        out.push(FISRecord { itemset: Itemset::from_sorted(items), support: s });
    }
    out.sort_unstable_by(|a, b| a.itemset.cmp(&b.itemset));
    Ok(out)
}
