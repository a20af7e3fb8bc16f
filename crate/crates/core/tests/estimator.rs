mod common;

use audience_core::copula::{generate, CopulaSpec, MarginalSpec, make_scenario, CorrelationLevel, MarginalShape, ScenarioConfig, TimestampPlan};
use audience_core::data::{ItemCode, TargetDefinition, TimeWindow, TransactionLog, DAY};
use audience_core::estimator::*;
use audience_core::ets::forecast_hours;
use audience_core::mining::{brute_force_mine, Itemset};
use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stream(corr: CorrelationLevel, shape: MarginalShape, k: usize, values: usize, n: usize, seed: u64) -> TransactionLog {
    let cfg = ScenarioConfig::new(k, corr, shape, n, seed).with_values(values);
    let spec = make_scenario(&cfg).unwrap();
    generate(&spec, n, seed, TimestampPlan::DailySine { start: 0, days: 7, amplitude: 0.5 }).unwrap()
}

fn train() -> TimeWindow {
    TimeWindow::new(0, 6 * DAY).unwrap()
}

fn test_day() -> TimeWindow {
    TimeWindow::new(6 * DAY, 7 * DAY).unwrap()
}

fn target(k: usize, items: &[ItemCode]) -> TargetDefinition {
    TargetDefinition::from_items(k, items).unwrap()
}

/// Ten rows spread over two days so the window is hour aligned.
fn tiny() -> TransactionLog {
    let rows: [[u32; 2]; 10] = [[0, 0], [0, 1], [1, 0], [0, 0], [2, 1], [0, 1], [1, 1], [0, 0], [1, 0], [0, 2]];
    let ts = (0..10).map(|i| i * 3 * 3600 + 17).collect();
    TransactionLog::from_raw(common::schema(&[3, 3]), ts, rows.concat()).unwrap()
}

#[test]
fn kappa_one_keeps_every_observed_value() {
    let db = tiny();
    let w = TimeWindow::new(0, 2 * DAY).unwrap();
    let (store, uset) = build_store(&db, w, 1).unwrap();
    // observed: a0 in {0,1,2}, a1 in {0,1,2}
    assert_eq!(uset.len(), 6);
    assert_eq!(store.n_train(), 10);
    assert_eq!(uset.global().support, 10);
    assert_eq!(uset.get(ItemCode::new(0, 0)).unwrap().support, 6);
}

#[test]
fn kappa_above_singletons_leaves_only_global() {
    let db = tiny();
    let w = TimeWindow::new(0, 2 * DAY).unwrap();
    let (store, uset) = build_store(&db, w, 7).unwrap();
    assert!(uset.is_empty());
    assert!(store.is_empty());
    let est = Estimator::new(&store, &uset);
    let t = target(2, &[ItemCode::new(0, 0), ItemCode::new(1, 1)]);
    let e = est.estimate(&t, TimeWindow::new(2 * DAY, 3 * DAY).unwrap()).unwrap();
    assert_eq!(e.chosen_univariate, None);
    assert_eq!(e.method, Method::ThresholdBoundMix);
    assert_eq!(e.multiplier, (7.0 / 10.0) * (7.0 / 10.0));
}

#[test]
fn build_rejects_empty_and_unaligned_windows() {
    let db = tiny();
    assert!(build_store(&db, TimeWindow::new(30 * DAY, 31 * DAY).unwrap(), 1).is_err());
    assert!(build_store(&db, TimeWindow::new(1, DAY).unwrap(), 1).is_err());
}

#[test]
fn univariates_match_oracle_singletons() {
    let db = stream(CorrelationLevel::High, MarginalShape::Steep, 4, 6, 20_000, 3);
    let kappa = 150;
    let (_, uset) = build_store(&db, train(), kappa).unwrap();
    let oracle = brute_force_mine(db.window(train()), kappa).unwrap();
    let singles: Vec<_> = oracle.iter().filter(|r| r.itemset.len() == 1).collect();
    assert_eq!(uset.len(), singles.len());
    for r in singles {
        assert_eq!(uset.get(r.itemset.items()[0]).unwrap().support, r.support);
    }
}

#[test]
fn conditional_multiplier_examples() {
    // half of the a0=v0 rows carry a1=v1
    let mut rows = Vec::new();
    for i in 0..40u32 {
        rows.push([0, i % 2]);
        rows.push([1, 2]);
    }
    let ts = (0..rows.len() as i64).map(|i| i * 900).collect();
    let db = TransactionLog::from_raw(common::schema(&[2, 3]), ts, rows.concat()).unwrap();
    let w = TimeWindow::new(0, 20 * 3600).unwrap();
    let (store, uset) = build_store(&db, w, 5).unwrap();
    let est = Estimator::new(&store, &uset);
    let u = ItemCode::new(0, 0);
    let t = target(2, &[u, ItemCode::new(1, 1)]);
    let oracle = db.count_in_window(&t, w) as f64 / db.count_in_window(&target(2, &[u]), w) as f64;
    assert_eq!(oracle, 0.5);
    assert_eq!(est.conditional_multiplier(&t, Some(u)).unwrap(), oracle);
    assert_eq!(est.conditional_multiplier(&target(2, &[u]), Some(u)).unwrap(), 1.0);
    // U not in T, and an infrequent T
    assert!(est.conditional_multiplier(&t, Some(ItemCode::new(1, 2))).is_err());
    let rare = target(2, &[ItemCode::new(1, 0), ItemCode::new(0, 1)]);
    assert!(est.conditional_multiplier(&rare, Some(ItemCode::new(1, 0))).is_err());
}

struct Fixture {
    db: TransactionLog,
    store: FISStore,
    uset: UnivariateSet,
}

fn fixture(corr: CorrelationLevel, k: usize, values: usize, n: usize, kappa: u64, seed: u64) -> Fixture {
    let db = stream(corr, MarginalShape::Steep, k, values, n, seed);
    let (store, uset) = build_store(&db, train(), kappa).unwrap();
    Fixture { db, store, uset }
}

#[test]
fn frequent_estimates_obey_the_multiplier_identity() {
    let f = fixture(CorrelationLevel::High, 5, 5, 60_000, 200, 11);
    let est = Estimator::new(&f.store, &f.uset);
    let k = f.db.schema().k();
    let mut seen = 0;
    for r in f.store.records() {
        let t = target(k, r.itemset.items());
        let e = est.estimate_frequent(&t, test_day()).unwrap();
        assert_eq!(e.method, Method::FrequentMultiplier);
        let u = f.uset.get(e.chosen_univariate.unwrap()).unwrap();
        assert_eq!(e.multiplier, r.support as f64 / u.support as f64);
        assert!(e.multiplier > 0.0 && e.multiplier <= 1.0);
        assert_eq!(e.point, e.multiplier * e.univariate_forecast);
        let fc = forecast_hours(&u.params, test_day().start_hour(), 24).unwrap();
        assert_eq!(e.univariate_forecast, fc.total());
        assert!(e.point >= 0.0 && e.sigma >= 0.0);
        seen += 1;
    }
    assert!(seen > 20);
}

#[test]
fn univariate_collapses_to_its_own_forecast() {
    let f = fixture(CorrelationLevel::High, 4, 5, 30_000, 100, 5);
    let est = Estimator::new(&f.store, &f.uset);
    for u in f.uset.members() {
        let t = target(4, &[u.item.unwrap()]);
        let e = est.estimate(&t, test_day()).unwrap();
        assert_eq!(e.chosen_univariate, u.item);
        assert_eq!(e.multiplier, 1.0);
        let fc = forecast_hours(&u.params, test_day().start_hour(), 24).unwrap();
        assert_eq!(e.point, fc.total());
        assert_eq!(e.hourly, fc.points);
    }
    // the all-wildcard target takes the global path
    let g = est.estimate(&TargetDefinition::global(4), test_day()).unwrap();
    assert_eq!(g.chosen_univariate, None);
    assert_eq!(g.multiplier, 1.0);
}

#[test]
fn chosen_univariate_minimises_sigma() {
    let f = fixture(CorrelationLevel::High, 5, 5, 60_000, 200, 17);
    let est = Estimator::new(&f.store, &f.uset);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let recs: Vec<_> = f.store.records().iter().filter(|r| r.itemset.len() >= 2).collect();
    for r in recs.choose_multiple(&mut rng, 40) {
        let t = target(5, r.itemset.items());
        let (u, e) = est.choose_best_univariate(&t, test_day()).unwrap();
        let all: Vec<Estimate> = r
            .itemset
            .items()
            .iter()
            .map(|&it| est.estimate_with(&t, Some(it), test_day()).unwrap())
            .collect();
        let min = all.iter().map(|x| x.sigma).fold(f64::INFINITY, f64::min);
        assert_eq!(e.sigma, min);
        let ties: Vec<_> = all.iter().filter(|x| x.sigma == min).collect();
        let best_support = ties.iter().map(|x| f.uset.get(x.chosen_univariate.unwrap()).unwrap().support).max().unwrap();
        assert_eq!(f.uset.get(u.unwrap()).unwrap().support, best_support);
    }
}

#[test]
fn frequent_estimates_cover_held_out_counts() {
    let f = fixture(CorrelationLevel::High, 4, 5, 200_000, 2_000, 23);
    let est = Estimator::new(&f.store, &f.uset);
    let (mut inside, mut total) = (0, 0);
    for r in f.store.records() {
        let t = target(4, r.itemset.items());
        let e = est.estimate_frequent(&t, test_day()).unwrap();
        let actual = f.db.count_in_window(&t, test_day()) as f64;
        total += 1;
        if (actual - e.point).abs() <= 2.0 * e.sigma {
            inside += 1;
        }
    }
    let rate = inside as f64 / total as f64;
    assert!(total > 30 && rate >= 0.9, "{inside}/{total}");
}

#[test]
fn independence_product_tracks_truth_under_independence() {
    // identity correlation with flat three-value marginals: every pair is
    // frequent at this threshold, no triple is
    let spec = CopulaSpec::new(DMatrix::identity(4, 4), (0..4).map(|_| MarginalSpec::flat(3).unwrap()).collect()).unwrap();
    let db = generate(&spec, 400_000, 9, TimestampPlan::DailySine { start: 0, days: 7, amplitude: 0.5 }).unwrap();
    let (store, uset) = build_store(&db, train(), 20_000).unwrap();
    let est = Estimator::new(&store, &uset);
    let mut checked = 0;
    for code in 0..81u32 {
        let vals: Vec<u32> = (0..4).map(|a| code / 3u32.pow(a) % 3).collect();
        for mask in 1..16u32 {
            if mask.count_ones() < 3 {
                continue;
            }
            let cons = (0..4).map(|a| (mask >> a & 1 == 1).then_some(vals[a])).collect();
            let t = TargetDefinition::from_constraints(cons);
            let e = est.estimate_infrequent(&t, test_day()).unwrap();
            assert_eq!(e.method, Method::IndependenceProduct);
            let actual = db.count_in_window(&t, test_day()) as f64;
            if actual / 24.0 < 20.0 {
                continue;
            }
            assert!((e.point - actual).abs() <= 0.25 * actual, "{t}: {} vs {actual}", e.point);
            checked += 1;
        }
    }
    assert!(checked >= 100, "only {checked} targets checked");
}

#[test]
fn all_bound_factors_follow_the_formula() {
    let f = fixture(CorrelationLevel::High, 4, 6, 30_000, 300, 2);
    let est = Estimator::new(&f.store, &f.uset);
    // rarest value of every attribute: pairs with anything are infrequent
    let rare: Vec<ItemCode> = (0..4).map(|a| ItemCode::new(a, 5)).collect();
    let g = f.uset.global();
    for n_fixed in 1..=4 {
        let t = target(4, &rare[..n_fixed]);
        if est.is_frequent(&t).unwrap() {
            continue;
        }
        let e = est.estimate_infrequent(&t, test_day()).unwrap();
        let u = match e.chosen_univariate {
            Some(it) => f.uset.get(it).unwrap(),
            None => g,
        };
        let others = if u.item.is_some() { n_fixed - 1 } else { n_fixed };
        let expected = (f.store.kappa() as f64 / u.support as f64).powi(others as i32);
        assert_eq!(e.method, Method::ThresholdBoundMix);
        assert!((e.multiplier - expected).abs() <= 1e-15 * expected);
        assert_eq!(e.point, e.multiplier * e.univariate_forecast);
    }
}

#[test]
fn independence_factors_are_bounded_and_monotone() {
    let f = fixture(CorrelationLevel::High, 5, 5, 60_000, 400, 31);
    let est = Estimator::new(&f.store, &f.uset);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    use rand::Rng;
    for _ in 0..200 {
        let vals: Vec<u32> = (0..5).map(|_| rng.random_range(0..5)).collect();
        let full = TargetDefinition::from_constraints(vals.iter().map(|&v| Some(v)).collect());
        // each single-item univariate: adding constraints never raises its product
        for &u in &full.items() {
            if f.uset.get(u).is_none() {
                continue;
            }
            let mut prev = f64::INFINITY;
            let mut cons = vec![None; 5];
            cons[u.attr as usize] = Some(u.value);
            for a in 0..5 {
                if a == u.attr as usize {
                    continue;
                }
                cons[a] = Some(vals[a]);
                let t = TargetDefinition::from_constraints(cons.clone());
                let e = est.estimate_with(&t, Some(u), test_day()).unwrap();
                assert!(e.multiplier > 0.0 && e.multiplier <= 1.0);
                if e.method != Method::FrequentMultiplier {
                    assert!(e.multiplier <= prev + 1e-15);
                    prev = e.multiplier;
                } else {
                    prev = f64::INFINITY;
                }
            }
        }
    }
}

#[test]
fn train_and_test_ratios_agree() {
    let db = stream(CorrelationLevel::High, MarginalShape::Steep, 5, 5, 300_000, 41);
    let kappa = (db.window(train()).len() as f64 * 0.001).ceil() as u64;
    let (store, uset) = build_store(&db, train(), kappa).unwrap();
    let test = db.window(test_day());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for r in store.records().iter().filter(|r| r.itemset.len() >= 2) {
        let t = target(5, r.itemset.items());
        for &it in r.itemset.items() {
            let u = uset.get(it).unwrap();
            xs.push(r.support as f64 / u.support as f64);
            let su = test.count(&target(5, &[it]));
            ys.push(test.count(&t) as f64 / su.max(1) as f64);
        }
    }
    let corr = pearson(&xs, &ys);
    assert!(corr > 0.95, "correlation {corr} over {} pairs", xs.len());
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[test]
fn persisted_store_reproduces_estimates() {
    let f = fixture(CorrelationLevel::High, 4, 5, 30_000, 150, 8);
    let dir = tempfile::tempdir().unwrap();
    let (fis, params) = (dir.path().join("store.fis"), dir.path().join("store.params"));
    save_store(&f.store, &f.uset, &fis, &params).unwrap();
    let (store2, uset2) = load_store(&fis, &params).unwrap();
    assert_eq!(store2.records(), f.store.records());
    assert_eq!(store2.kappa(), f.store.kappa());
    assert_eq!(store2.window(), f.store.window());
    let (a, b) = (Estimator::new(&f.store, &f.uset), Estimator::new(&store2, &uset2));
    for r in f.store.records().iter().take(50) {
        let t = target(4, r.itemset.items());
        let (ea, eb) = (a.estimate(&t, test_day()).unwrap(), b.estimate(&t, test_day()).unwrap());
        assert_eq!(ea.point, eb.point);
        assert_eq!(ea.sigma, eb.sigma);
        assert_eq!(ea.chosen_univariate, eb.chosen_univariate);
    }
    // saving again is byte-identical
    let again = render_params(&store2, &uset2);
    assert_eq!(again, std::fs::read_to_string(&params).unwrap());
    assert!(store2.support(&Itemset::new(vec![])).is_some());
}

#[test]
fn horizon_must_be_aligned() {
    let f = fixture(CorrelationLevel::High, 4, 5, 20_000, 100, 1);
    let est = Estimator::new(&f.store, &f.uset);
    let bad = TimeWindow::new(6 * DAY + 10, 7 * DAY).unwrap();
    assert!(est.estimate(&TargetDefinition::global(4), bad).is_err());
}
