use crate::data::{ItemCode, LogView};

/// The cover of an itemset: strictly increasing row indices.
///
/// Covers holding at least 1/512 of the rows are kept as bitmaps: two of
/// them intersect with one AND per 64 rows, which beats merging lists of
/// that length. Sparser covers stay sorted lists.
#[derive(Debug, Clone, Default)]
pub struct TidList {
    repr: Repr,
    len: usize,
}

#[derive(Debug, Clone)]
enum Repr {
    Sparse(Vec<u32>),
    Dense(Vec<u64>),
}

impl Default for Repr {
    fn default() -> Self {
        Repr::Sparse(Vec::new())
    }
}

const DENSE_DIVISOR: usize = 512;

fn dense_enough(len: usize, universe: usize) -> bool {
    universe > 0 && len * DENSE_DIVISOR >= universe
}

impl TidList {
    /// Sorted list form.
    pub fn new(tids: Vec<u32>) -> Self {
        debug_assert!(tids.windows(2).all(|w| w[0] < w[1]));
        TidList { len: tids.len(), repr: Repr::Sparse(tids) }
    }

    /// Picks the representation for a cover within `universe` rows.
    pub fn with_universe(tids: Vec<u32>, universe: usize) -> Self {
        if dense_enough(tids.len(), universe) {
            let mut words = vec![0u64; universe.div_ceil(64)];
            for &t in &tids {
                words[t as usize / 64] |= 1 << (t % 64);
            }
            TidList { len: tids.len(), repr: Repr::Dense(words) }
        } else {
            TidList::new(tids)
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn support(&self) -> u64 {
        self.len as u64
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Row indices in increasing order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match &self.repr {
            Repr::Sparse(v) => Box::new(v.iter().copied()),
            Repr::Dense(words) => Box::new(words.iter().enumerate().flat_map(|(w, &bits)| BitIter { bits, base: w as u32 * 64 })),
        }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

impl PartialEq for TidList {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.iter().eq(other.iter())
    }
}

impl Eq for TidList {}

struct BitIter {
    bits: u64,
    base: u32,
}

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.bits == 0 {
            return None;
        }
        let t = self.bits.trailing_zeros();
        self.bits &= self.bits - 1;
        Some(self.base + t)
    }
}

fn contains(words: &[u64], t: u32) -> bool {
    words.get(t as usize / 64).is_some_and(|w| w >> (t % 64) & 1 == 1)
}

/// Intersection of two covers.
pub fn intersect(a: &TidList, b: &TidList) -> TidList {
    match (&a.repr, &b.repr) {
        (Repr::Sparse(x), Repr::Sparse(y)) => TidList::new(intersect_sorted(x, y)),
        (Repr::Sparse(x), Repr::Dense(w)) | (Repr::Dense(w), Repr::Sparse(x)) => {
            TidList::new(x.iter().copied().filter(|&t| contains(w, t)).collect())
        }
        (Repr::Dense(x), Repr::Dense(y)) => {
            let words: Vec<u64> = x.iter().zip(y).map(|(p, q)| p & q).collect();
            let len = words.iter().map(|w| w.count_ones() as usize).sum();
            let universe = words.len() * 64;
            if dense_enough(len, universe) {
                TidList { len, repr: Repr::Dense(words) }
            } else {
                let tids: Vec<u32> = words
                    .iter()
                    .enumerate()
                    .flat_map(|(w, &bits)| BitIter { bits, base: w as u32 * 64 })
                    .collect();
                TidList::new(tids)
            }
        }
    }
}

/// Sorted-list intersection: a branch-free linear merge, or a galloping
/// search when one side is much shorter.
fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if a.is_empty() {
        return Vec::new();
    }
    if b.len() / a.len() >= GALLOP_RATIO {
        return gallop(a, b);
    }
    let mut out = vec![0u32; a.len()];
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        out[n] = x;
        n += (x == y) as usize;
        i += (x <= y) as usize;
        j += (y <= x) as usize;
    }
    out.truncate(n);
    out
}

const GALLOP_RATIO: usize = 32;

fn gallop(short: &[u32], long: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(short.len());
    let mut rest = long;
    for &x in short {
        // exponential probe, then binary search inside the bracket
        let mut hi = 1;
        while hi < rest.len() && rest[hi - 1] < x {
            hi *= 2;
        }
        let hi = hi.min(rest.len());
        let pos = rest[..hi].partition_point(|&y| y < x);
        if pos < rest.len() && rest[pos] == x {
            out.push(x);
            rest = &rest[pos + 1..];
        } else {
            rest = &rest[pos..];
        }
        if rest.is_empty() {
            break;
        }
    }
    out
}

/// Vertical layout of a log: one tidlist per item, indexed `[attr][value]`.
#[derive(Debug, Clone)]
pub struct VerticalIndex {
    lists: Vec<Vec<TidList>>,
}

impl VerticalIndex {
    pub fn build(db: &LogView<'_>) -> Self {
        let mut lists: Vec<Vec<Vec<u32>>> =
            db.schema().cardinalities().into_iter().map(|c| vec![Vec::new(); c]).collect();
        for (i, row) in db.rows().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                lists[a][v as usize].push(i as u32);
            }
        }
        VerticalIndex {
            lists: lists
                .into_iter()
                .map(|per| per.into_iter().map(|t| TidList::with_universe(t, db.len())).collect())
                .collect(),
        }
    }

    pub fn tidlist(&self, item: ItemCode) -> &TidList {
        &self.lists[item.attr as usize][item.value as usize]
    }

    pub fn support(&self, item: ItemCode) -> u64 {
        self.tidlist(item).support()
    }

    /// All items in [`ItemCode`] order with their tidlists.
    pub fn items(&self) -> impl Iterator<Item = (ItemCode, &TidList)> {
        self.lists.iter().enumerate().flat_map(|(a, per)| {
            per.iter().enumerate().map(move |(v, t)| (ItemCode::new(a as u32, v as u32), t))
        })
    }

    /// Support of an arbitrary itemset by successive intersection.
    pub fn support_of(&self, items: &[ItemCode]) -> u64 {
        match items {
            [] => u64::MAX,
            [one] => self.support(*one),
            _ => {
                let mut sorted: Vec<&TidList> = items.iter().map(|it| self.tidlist(*it)).collect();
                sorted.sort_by_key(|t| t.len());
                let mut acc = sorted[0].clone();
                for t in &sorted[1..] {
                    if acc.is_empty() {
                        break;
                    }
                    acc = intersect(&acc, t);
                }
                acc.support()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn intersect_basic() {
        let a = TidList::new(vec![1, 3, 5, 7]);
        let b = TidList::new(vec![2, 3, 4, 7, 9]);
        assert_eq!(intersect(&a, &b).to_vec(), vec![3, 7]);
        assert!(intersect(&a, &TidList::default()).is_empty());
    }

    #[test]
    fn mixed_representations_agree() {
        let n = 100_000;
        let evens: Vec<u32> = (0..n).filter(|t| t % 2 == 0).collect();
        let threes: Vec<u32> = (0..n).filter(|t| t % 3 == 0).collect();
        let few: Vec<u32> = vec![0, 6, 7, 500, 99_999];
        let (de, dt) = (TidList::with_universe(evens.clone(), n as usize), TidList::with_universe(threes.clone(), n as usize));
        assert!(de.is_dense() && dt.is_dense());
        let expected: Vec<u32> = (0..n).filter(|t| t % 6 == 0).collect();
        assert_eq!(intersect(&de, &dt).to_vec(), expected);
        assert_eq!(intersect(&de, &dt), TidList::new(expected));
        let sparse = TidList::with_universe(few.clone(), n as usize);
        assert!(!sparse.is_dense());
        assert_eq!(intersect(&sparse, &de).to_vec(), vec![0, 6, 500]);
        assert_eq!(intersect(&de, &sparse).to_vec(), vec![0, 6, 500]);
        // a dense result that falls below the cutoff comes back as a list
        let a = TidList::with_universe((0..1000).collect(), n as usize);
        let b = TidList::with_universe((995..2000).collect(), n as usize);
        assert!(a.is_dense() && b.is_dense());
        let ab = intersect(&a, &b);
        assert!(!ab.is_dense());
        assert_eq!(ab.to_vec(), vec![995, 996, 997, 998, 999]);
    }

    proptest! {
        #[test]
        fn intersect_matches_set_intersection(a in proptest::collection::btree_set(0u32..200, 0..60),
                                              b in proptest::collection::btree_set(0u32..200, 0..60)) {
            let expected: Vec<u32> = a.intersection(&b).copied().collect();
            for universe in [0, 200] {
                let ta = TidList::with_universe(a.iter().copied().collect(), universe);
                let tb = TidList::with_universe(b.iter().copied().collect(), universe);
                let got = intersect(&ta, &tb);
                prop_assert_eq!(got.to_vec(), expected.clone());
                prop_assert_eq!(got.support(), expected.len() as u64);
            }
        }

        #[test]
        fn galloping_matches_set_intersection(a in proptest::collection::btree_set(0u32..5000, 0..20),
                                              b in proptest::collection::btree_set(0u32..5000, 500..2000)) {
            let expected: Vec<u32> = a.intersection(&b).copied().collect();
            let (ta, tb) = (TidList::new(a.iter().copied().collect()), TidList::new(b.iter().copied().collect()));
            let (ab, ba) = (intersect(&ta, &tb), intersect(&tb, &ta));
            prop_assert_eq!(ab.to_vec(), expected.clone());
            prop_assert_eq!(ba.to_vec(), expected);
        }
    }
}
