use std::cmp::Ordering;
use std::fmt;

use super::store::{FISStore, Univariate, UnivariateSet};
use crate::data::{ItemCode, TargetDefinition, TimeWindow};
use crate::ets::{forecast_hours, ForecastResult};
use crate::error::{Error, Result};
use crate::mining::Itemset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Target frequent: empirical ratio `s(T) / s(U)`.
    FrequentMultiplier,
    /// Target infrequent: product of per-attribute conditionals, all from stored itemsets.
    IndependenceProduct,
    /// Independence product where at least one factor is the `κ / s(U)` bound.
    ThresholdBoundMix,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::FrequentMultiplier => "frequent-multiplier",
            Method::IndependenceProduct => "independence-product",
            Method::ThresholdBoundMix => "threshold-bound-mix",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Audience forecast for one target over one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub target: TargetDefinition,
    pub horizon: TimeWindow,
    /// Expected count over the horizon: `multiplier * univariate_forecast`.
    pub point: f64,
    pub sigma: f64,
    /// `None` when the global series was used.
    pub chosen_univariate: Option<ItemCode>,
    pub method: Method,
    pub multiplier: f64,
    /// Sum of the chosen univariate's hourly forecasts over the horizon.
    pub univariate_forecast: f64,
    /// `multiplier * forecast(hour)` for each hour of the horizon.
    pub hourly: Vec<f64>,
}

/// Standard error of `p̂ · ŝ(U)` by the delta method: the forecast variance
/// scaled by `p̂²` plus binomial sampling variance of the multiplier,
/// `p̂(1 − p̂) / s_train(U)`, scaled by `ŝ(U)²`.
pub fn estimate_sigma(multiplier: f64, support_u: u64, forecast_total: f64, forecast_variance: f64) -> f64 {
    let var_p = if support_u == 0 { 0.0 } else { multiplier * (1.0 - multiplier) / support_u as f64 };
    (multiplier * multiplier * forecast_variance + forecast_total * forecast_total * var_p.max(0.0)).sqrt()
}

/// Read-only estimation over a store and its univariates.
#[derive(Debug, Clone, Copy)]
pub struct Estimator<'a> {
    store: &'a FISStore,
    uset: &'a UnivariateSet,
}

struct Factors {
    product: f64,
    used_bound: bool,
}

impl<'a> Estimator<'a> {
    pub fn new(store: &'a FISStore, uset: &'a UnivariateSet) -> Self {
        Estimator { store, uset }
    }

    pub fn store(&self) -> &'a FISStore {
        self.store
    }

    pub fn univariates(&self) -> &'a UnivariateSet {
        self.uset
    }

    fn target_itemset(&self, target: &TargetDefinition) -> Result<Itemset> {
        if target.k() != self.store.schema().k() {
            return Err(Error::InvalidTarget(format!(
                "target has {} positions, schema has {} attributes",
                target.k(),
                self.store.schema().k()
            )));
        }
        Ok(Itemset::new(target.items()))
    }

    pub fn is_frequent(&self, target: &TargetDefinition) -> Result<bool> {
        Ok(self.store.is_frequent(&self.target_itemset(target)?))
    }

    /// Empirical `P̂(T | U) = s(T) / s(U)` over the training window.
    ///
    /// Fails when `T` is infrequent (the caller should take the independence
    /// path) or when `U` is not a stored univariate contained in `T`.
    pub fn conditional_multiplier(&self, target: &TargetDefinition, u: Option<ItemCode>) -> Result<f64> {
        let t = self.target_itemset(target)?;
        let s_u = self.univariate(u)?.support;
        if let Some(item) = u {
            if !t.contains(item) {
                return Err(Error::Estimation(format!("univariate {item} is not part of target {target}")));
            }
        }
        let s_t = self
            .store
            .support(&t)
            .ok_or_else(|| Error::Estimation(format!("target {target} is not frequent")))?;
        Ok(s_t as f64 / s_u as f64)
    }

    fn univariate(&self, u: Option<ItemCode>) -> Result<&'a Univariate> {
        match u {
            None => Ok(self.uset.global()),
            Some(item) => self
                .uset
                .get(item)
                .ok_or_else(|| Error::Estimation(format!("univariate {item} is not in the store"))),
        }
    }

    /// Per-attribute conditionals given `U`: the pair `{t_i, u}` (or `{t_i}` for
    /// the global series) when stored, else the bound `κ / s(U)`; `U`'s own
    /// attribute contributes 1.
    fn independence_factors(&self, target: &TargetDefinition, u: &Univariate) -> Factors {
        let s_u = u.support as f64;
        let bound = self.store.kappa() as f64 / s_u;
        let mut product = 1.0;
        let mut used_bound = false;
        for item in target.items() {
            if Some(item) == u.item {
                continue;
            }
            let pair = match u.item {
                Some(ui) => Itemset::new(vec![item, ui]),
                None => Itemset::singleton(item),
            };
            match self.store.support(&pair) {
                Some(s) => product *= s as f64 / s_u,
                None => {
                    used_bound = true;
                    product *= bound;
                }
            }
        }
        Factors { product, used_bound }
    }

    /// Estimate of `target` through one specific univariate.
    pub fn estimate_with(&self, target: &TargetDefinition, u: Option<ItemCode>, horizon: TimeWindow) -> Result<Estimate> {
        horizon.require_hour_aligned()?;
        let t = self.target_itemset(target)?;
        let uni = self.univariate(u)?;
        if let Some(item) = u {
            if !t.contains(item) {
                return Err(Error::Estimation(format!("univariate {item} is not part of target {target}")));
            }
        }
        let (multiplier, method) = match self.store.support(&t) {
            Some(s_t) => (s_t as f64 / uni.support as f64, Method::FrequentMultiplier),
            None => {
                let f = self.independence_factors(target, uni);
                (f.product, if f.used_bound { Method::ThresholdBoundMix } else { Method::IndependenceProduct })
            }
        };
        let fc = forecast_hours(&uni.params, horizon.start_hour(), horizon.hour_count())?;
        Ok(assemble(target, horizon, uni, multiplier, method, &fc))
    }

    fn candidates(&self, target: &TargetDefinition) -> Vec<Option<ItemCode>> {
        let members: Vec<Option<ItemCode>> =
            target.items().into_iter().filter(|it| self.uset.get(*it).is_some()).map(Some).collect();
        if members.is_empty() {
            vec![None]
        } else {
            members
        }
    }

    /// Evaluates every univariate whose item appears in `target` (or the
    /// global series when none does) and keeps the smallest sigma; ties go
    /// to the larger training support, then to the smaller item.
    pub fn choose_best_univariate(&self, target: &TargetDefinition, horizon: TimeWindow) -> Result<(Option<ItemCode>, Estimate)> {
        let mut best: Option<Estimate> = None;
        for u in self.candidates(target) {
            let est = self.estimate_with(target, u, horizon)?;
            let replace = match &best {
                None => true,
                Some(b) => self.prefer(&est, b) == Ordering::Less,
            };
            if replace {
                best = Some(est);
            }
        }
        let best = best.expect("at least one candidate");
        Ok((best.chosen_univariate, best))
    }

    fn prefer(&self, a: &Estimate, b: &Estimate) -> Ordering {
        let support = |e: &Estimate| self.univariate(e.chosen_univariate).map_or(0, |u| u.support);
        a.sigma
            .total_cmp(&b.sigma)
            .then_with(|| support(b).cmp(&support(a)))
            .then_with(|| match (a.chosen_univariate, b.chosen_univariate) {
                (Some(x), Some(y)) => x.cmp(&y),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            })
    }

    /// Estimate for a frequent target.
    pub fn estimate_frequent(&self, target: &TargetDefinition, horizon: TimeWindow) -> Result<Estimate> {
        if !self.is_frequent(target)? {
            return Err(Error::Estimation(format!("target {target} is not frequent")));
        }
        Ok(self.choose_best_univariate(target, horizon)?.1)
    }

    /// Estimate for an infrequent target with at least one fixed attribute.
    pub fn estimate_infrequent(&self, target: &TargetDefinition, horizon: TimeWindow) -> Result<Estimate> {
        if target.is_global() {
            return Err(Error::Estimation("the global target is always frequent".into()));
        }
        if self.is_frequent(target)? {
            return Err(Error::Estimation(format!("target {target} is frequent")));
        }
        Ok(self.choose_best_univariate(target, horizon)?.1)
    }

    /// Routes any target: the global target uses the global series directly.
    pub fn estimate(&self, target: &TargetDefinition, horizon: TimeWindow) -> Result<Estimate> {
        if target.is_global() {
            return self.estimate_with(target, None, horizon);
        }
        Ok(self.choose_best_univariate(target, horizon)?.1)
    }
}

fn assemble(
    target: &TargetDefinition,
    horizon: TimeWindow,
    uni: &Univariate,
    multiplier: f64,
    method: Method,
    fc: &ForecastResult,
) -> Estimate {
    let univariate_forecast = fc.total();
    let point = multiplier * univariate_forecast;
    let sigma = estimate_sigma(multiplier, uni.support, univariate_forecast, fc.total_variance());
    Estimate {
        target: target.clone(),
        horizon,
        point,
        sigma,
        chosen_univariate: uni.item,
        method,
        multiplier,
        univariate_forecast,
        hourly: fc.points.iter().map(|p| multiplier * p).collect(),
    }
}
