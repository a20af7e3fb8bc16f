#![allow(dead_code)]

use audience_core::data::{AttributeSchema, TransactionLog};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Schema with attributes `a0..` and values `v0..`.
pub fn schema(cards: &[usize]) -> AttributeSchema {
    AttributeSchema::from_pairs(
        cards
            .iter()
            .enumerate()
            .map(|(a, &c)| (format!("a{a}"), (0..c).map(|v| format!("v{v}")).collect::<Vec<_>>())),
    )
    .unwrap()
}

/// Random log with a skew towards low value indices so that multi-item
/// itemsets become frequent.
pub fn random_log(seed: u64, n: usize, cards: &[usize]) -> TransactionLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = cards.len();
    let mut values = Vec::with_capacity(n * k);
    for _ in 0..n {
        for &c in cards {
            let v = if rng.random_bool(0.5) { 0 } else { rng.random_range(0..c as u32) };
            values.push(v);
        }
    }
    let ts = (0..n as i64).map(|i| i * 60).collect();
    TransactionLog::from_raw(schema(cards), ts, values).unwrap()
}

pub fn from_rows(cards: &[usize], rows: &[&[u32]]) -> TransactionLog {
    let values = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let ts = (0..rows.len() as i64).collect();
    TransactionLog::from_raw(schema(cards), ts, values).unwrap()
}
