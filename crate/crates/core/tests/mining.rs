mod common;

use std::collections::{HashMap, HashSet};

use audience_core::data::ItemCode;
use audience_core::mining::*;
use common::{from_rows, random_log};
use proptest::prelude::*;

fn cfg(algo: Algorithm, kappa: u64) -> MiningConfig {
    MiningConfig::new(algo, Threshold::Absolute(kappa))
}

#[test]
fn identical_transactions_yield_every_subset() {
    let rows: Vec<&[u32]> = vec![&[1, 0, 2, 1]; 7];
    let db = from_rows(&[2, 2, 3, 2], &rows);
    for algo in Algorithm::ALL {
        let (fis, _) = mine(&db, &cfg(algo, 7)).unwrap();
        assert_eq!(fis.len(), 15, "{algo}");
        assert!(fis.iter().all(|r| r.support == 7 && categorical_constraint(&r.itemset)));
        let (none, _) = mine(&db, &cfg(algo, 8)).unwrap();
        assert!(none.is_empty(), "{algo}");
    }
}

#[test]
fn random_db_matches_oracle() {
    for seed in 0..5 {
        let db = random_log(seed, 50, &[3, 3, 3]);
        let oracle = brute_force_mine(&db, 5).unwrap();
        assert!(!oracle.is_empty());
        for algo in Algorithm::ALL {
            let (fis, stats) = mine(&db, &cfg(algo, 5)).unwrap();
            assert_eq!(fis, oracle, "{algo} seed {seed}");
            if !algo.uses_cc() {
                assert_eq!(stats.candidates_rejected_by_cc, 0);
            }
            assert!(stats.candidates_rejected_by_cc <= stats.candidates_generated);
        }
    }
}

#[test]
fn zero_threshold_is_a_config_error() {
    let db = random_log(1, 10, &[2]);
    assert!(mine_eclat(&db, &cfg(Algorithm::Eclat, 0)).is_err());
    assert!(mine_eclat(&db, &cfg(Algorithm::EclatCc, 3)).is_err(), "algorithm mismatch");
}

#[test]
fn eclat_cc_rejects_same_attribute_pairs() {
    // attribute 0 has three frequent values, attribute 1 a single value
    let rows: Vec<&[u32]> = vec![&[0, 0], &[0, 0], &[1, 0], &[1, 0], &[2, 0], &[2, 0]];
    let db = from_rows(&[3, 1], &rows);
    let (plain, ps) = mine_eclat(&db, &cfg(Algorithm::Eclat, 2)).unwrap();
    let (cc, cs) = mine_eclat_cc(&db, &cfg(Algorithm::EclatCc, 2)).unwrap();
    assert_eq!(plain, cc);
    // pairs among the three values of attribute 0
    assert_eq!(cs.candidates_rejected_by_cc, 3);
    assert_eq!(ps.tidlist_intersections - cs.tidlist_intersections, 3);
    assert_eq!(ps.candidates_generated, cs.candidates_generated);
}

#[test]
fn eclat_cc_identical_without_same_attribute_candidates() {
    // every attribute has exactly one frequent value
    let rows: Vec<&[u32]> = vec![&[0, 0, 0], &[0, 0, 1], &[0, 1, 0], &[0, 0, 0], &[1, 0, 0]];
    let db = from_rows(&[2, 2, 2], &rows);
    let (a, sa) = mine_eclat(&db, &cfg(Algorithm::Eclat, 3)).unwrap();
    let (b, sb) = mine_eclat_cc(&db, &cfg(Algorithm::EclatCc, 3)).unwrap();
    assert_eq!(a, b);
    assert!(sa.same_work(&sb));
    assert_eq!(sb.candidates_rejected_by_cc, 0);
}

#[test]
fn apriori_cc_level_two_candidate_count() {
    for seed in 0..5 {
        let db = random_log(seed + 100, 120, &[3, 4, 2, 3]);
        let kappa = 6;
        let single = brute_force_mine(&db, kappa).unwrap();
        let frequent_items: Vec<ItemCode> =
            single.iter().filter(|r| r.itemset.len() == 1).map(|r| r.itemset.items()[0]).collect();
        let f = frequent_items.len() as u64;
        let mut per_attr: HashMap<u32, u64> = HashMap::new();
        for it in &frequent_items {
            *per_attr.entry(it.attr).or_default() += 1;
        }
        let same_attr: u64 = per_attr.values().map(|c| c * (c - 1) / 2).sum();

        let c = cfg(Algorithm::AprioriCc, kappa).with_max_size(2);
        let (_, stats) = mine_apriori_cc(&db, &c).unwrap();
        assert_eq!(stats.candidates_generated, f * (f - 1) / 2);
        assert_eq!(stats.candidates_generated - stats.candidates_rejected_by_cc, f * (f - 1) / 2 - same_attr);
    }
}

#[test]
fn single_attribute_db_has_no_pair_candidates_under_cc() {
    let rows: Vec<&[u32]> = vec![&[0], &[1], &[2], &[0], &[1]];
    let db = from_rows(&[3], &rows);
    let (fis, stats) = mine_apriori_cc(&db, &cfg(Algorithm::AprioriCc, 1)).unwrap();
    assert!(fis.iter().all(|r| r.itemset.len() == 1));
    assert_eq!(stats.candidates_generated, stats.candidates_rejected_by_cc);
}

#[test]
fn brute_force_edge_cases() {
    let empty = from_rows(&[2, 2], &[]);
    assert!(brute_force_mine(&empty, 1).unwrap().is_empty());
    let one = from_rows(&[2, 3, 2], &[&[1, 2, 0]]);
    assert_eq!(brute_force_mine(&one, 1).unwrap().len(), 7);
    let wide = common::schema(&[99; 4]);
    let db = audience_core::data::TransactionLog::from_raw(wide, vec![], vec![]).unwrap();
    assert!(matches!(brute_force_mine(&db, 1), Err(audience_core::Error::SearchSpaceTooLarge { .. })));
}

#[test]
fn parallel_mode_matches_serial() {
    let db = random_log(9, 400, &[4, 3, 4, 2, 3]);
    for algo in [Algorithm::Eclat, Algorithm::EclatCc] {
        let (a, sa) = mine(&db, &cfg(algo, 4)).unwrap();
        let (b, sb) = mine(&db, &cfg(algo, 4).with_threads(4)).unwrap();
        assert_eq!(a, b);
        assert!(sa.same_work(&sb));
    }
}

#[test]
fn fis_file_round_trip_is_sorted_and_stable() {
    let db = random_log(3, 80, &[3, 2, 3]);
    let (fis, _) = mine_eclat_cc(&db, &cfg(Algorithm::EclatCc, 4)).unwrap();
    let text = render_fis(&fis, db.schema());
    let lines: Vec<&str> = text.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort_unstable();
    assert_eq!(lines, sorted);
    assert!(lines[0].contains('\t') && lines[0].contains('='));
    assert_eq!(parse_fis(&text, db.schema()).unwrap(), fis);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fis.txt");
    write_fis(&path, &fis, db.schema()).unwrap();
    assert_eq!(read_fis(&path, db.schema()).unwrap(), fis);
    // every miner serializes to the same bytes
    for algo in Algorithm::ALL {
        let (other, _) = mine(&db, &cfg(algo, 4)).unwrap();
        assert_eq!(render_fis(&other, db.schema()), text, "{algo}");
    }
    assert!(parse_fis("a0=v0\tx\n", db.schema()).is_err());
    assert!(parse_fis("a0=v9\t3\n", db.schema()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn miners_agree_with_oracle(seed in 0u64..10_000, n in 0usize..120, k in 1usize..5, kappa in 1u64..8) {
        let cards: Vec<usize> = (0..k).map(|a| 2 + (seed as usize + a) % 3).collect();
        let db = random_log(seed, n, &cards);
        let oracle = brute_force_mine(&db, kappa).unwrap();
        for algo in Algorithm::ALL {
            let (fis, _) = mine(&db, &cfg(algo, kappa)).unwrap();
            prop_assert_eq!(&fis, &oracle, "{}", algo);
        }
    }

    #[test]
    fn output_is_downward_closed(seed in 0u64..10_000, kappa in 1u64..6) {
        let db = random_log(seed, 90, &[3, 2, 4]);
        let (fis, _) = mine_eclat_cc(&db, &cfg(Algorithm::EclatCc, kappa)).unwrap();
        let by_set: HashMap<&Itemset, u64> = fis.iter().map(|r| (&r.itemset, r.support)).collect();
        for r in &fis {
            let items = r.itemset.items();
            for drop in 0..items.len() {
                if items.len() == 1 { break; }
                let sub = Itemset::new(items.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, it)| *it).collect());
                let s = by_set.get(&sub).copied();
                prop_assert!(s.is_some_and(|s| s >= r.support));
            }
        }
    }

    #[test]
    fn raising_threshold_yields_subset(seed in 0u64..10_000, kappa in 1u64..6, bump in 1u64..5) {
        let db = random_log(seed, 90, &[3, 3, 2]);
        let (lo, slo) = mine_eclat(&db, &cfg(Algorithm::Eclat, kappa)).unwrap();
        let (hi, _) = mine_eclat(&db, &cfg(Algorithm::Eclat, kappa + bump)).unwrap();
        let lo: HashSet<_> = lo.into_iter().collect();
        prop_assert!(hi.iter().all(|r| lo.contains(r)));
        let (_, scc) = mine_eclat_cc(&db, &cfg(Algorithm::EclatCc, kappa)).unwrap();
        prop_assert!(scc.tidlist_intersections <= slo.tidlist_intersections);
    }
}
