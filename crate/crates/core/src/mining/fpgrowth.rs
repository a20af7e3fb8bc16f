use super::{finish, item_supports, timed, Algorithm, FISRecord, Itemset, MiningConfig, MiningOutput, MiningStats};
use crate::data::{ItemCode, LogView};
use crate::error::Result;

/// FP-Growth over a prefix tree of support-ordered items. There is no
/// categorical variant: the tree never forms cross-value candidates for one
/// attribute, because no transaction carries two values of it.
pub fn mine_fpgrowth<'a>(db: impl Into<LogView<'a>>, cfg: &MiningConfig) -> Result<MiningOutput> {
    cfg.check(&[Algorithm::FpGrowth])?;
    let db = db.into();
    let kappa = cfg.threshold.resolve(db.len())?;
    let cap = cfg.size_cap();

    let ((records, stats), elapsed) = timed(|| {
        let mut stats = MiningStats::default();
        let mut records = Vec::new();
        if cap == 0 {
            return (records, stats);
        }

        // rank 0 = most frequent; ties broken by item order
        let mut frequent: Vec<(ItemCode, u64)> = item_supports(&db)
            .into_iter()
            .enumerate()
            .flat_map(|(a, per)| {
                per.into_iter().enumerate().map(move |(v, s)| (ItemCode::new(a as u32, v as u32), s))
            })
            .filter(|(_, s)| *s >= kappa)
            .collect();
        frequent.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        let items: Vec<ItemCode> = frequent.iter().map(|(it, _)| *it).collect();
        let mut rank_of: Vec<Vec<Option<u32>>> =
            db.schema().cardinalities().into_iter().map(|c| vec![None; c]).collect();
        for (r, it) in items.iter().enumerate() {
            rank_of[it.attr as usize][it.value as usize] = Some(r as u32);
        }

        let mut tree = FpTree::new(items.len());
        let mut path = Vec::with_capacity(db.k());
        for row in db.rows() {
            path.clear();
            path.extend(row.iter().enumerate().filter_map(|(a, &v)| rank_of[a][v as usize]));
            path.sort_unstable();
            tree.insert(&path, 1);
        }

        let ctx = Ctx { kappa, cap, items: &items };
        ctx.grow(&tree, &mut Vec::new(), &mut records, &mut stats);
        (records, stats)
    });
    Ok(finish(records, stats, elapsed))
}

const ROOT: usize = 0;

struct Node {
    rank: u32,
    count: u64,
    parent: usize,
    children: Vec<usize>,
}

struct FpTree {
    nodes: Vec<Node>,
    /// node indices per rank
    header: Vec<Vec<usize>>,
}

impl FpTree {
    fn new(ranks: usize) -> Self {
        FpTree {
            nodes: vec![Node { rank: u32::MAX, count: 0, parent: ROOT, children: Vec::new() }],
            header: vec![Vec::new(); ranks],
        }
    }

    /// Inserts a path of ascending ranks with multiplicity `count`.
    fn insert(&mut self, path: &[u32], count: u64) {
        let mut cur = ROOT;
        for &r in path {
            let next = self.nodes[cur].children.iter().copied().find(|&c| self.nodes[c].rank == r);
            cur = match next {
                Some(c) => c,
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(Node { rank: r, count: 0, parent: cur, children: Vec::new() });
                    self.nodes[cur].children.push(id);
                    self.header[r as usize].push(id);
                    id
                }
            };
            self.nodes[cur].count += count;
        }
    }
}

struct Ctx<'a> {
    kappa: u64,
    cap: usize,
    items: &'a [ItemCode],
}

impl Ctx<'_> {
    /// Mines `tree`, whose patterns all extend `suffix` (ranks).
    fn grow(&self, tree: &FpTree, suffix: &mut Vec<u32>, out: &mut Vec<FISRecord>, stats: &mut MiningStats) {
        for r in (0..tree.header.len()).rev() {
            let nodes = &tree.header[r];
            if nodes.is_empty() {
                continue;
            }
            let support: u64 = nodes.iter().map(|&n| tree.nodes[n].count).sum();
            if support < self.kappa {
                continue;
            }
            suffix.push(r as u32);
            let mut items: Vec<ItemCode> = suffix.iter().map(|&x| self.items[x as usize]).collect();
            items.sort_unstable();
            out.push(FISRecord { itemset: Itemset::from_sorted(items), support });

            if suffix.len() < self.cap {
                // conditional pattern base: prefix paths ending above each node of rank r
                let mut base: Vec<(Vec<u32>, u64)> = Vec::with_capacity(nodes.len());
                let mut counts = vec![0u64; r];
                for &n in nodes {
                    let count = tree.nodes[n].count;
                    let mut p = Vec::new();
                    let mut cur = tree.nodes[n].parent;
                    while cur != ROOT {
                        let pr = tree.nodes[cur].rank;
                        p.push(pr);
                        counts[pr as usize] += count;
                        cur = tree.nodes[cur].parent;
                    }
                    if !p.is_empty() {
                        p.reverse();
                        base.push((p, count));
                    }
                }
                stats.candidates_generated += counts.iter().filter(|&&c| c > 0).count() as u64;
                if counts.iter().any(|&c| c >= self.kappa) {
                    let mut cond = FpTree::new(r);
                    for (p, count) in &base {
                        let kept: Vec<u32> = p.iter().copied().filter(|&x| counts[x as usize] >= self.kappa).collect();
                        if !kept.is_empty() {
                            cond.insert(&kept, *count);
                        }
                    }
                    self.grow(&cond, suffix, out, stats);
                }
            }
            suffix.pop();
        }
    }
}
