//! Shared machinery for the α-schedule algorithms (edge arrival and
//! hypergraph arrival).
//!
//! Both algorithms look the same from a distance: items arrive in random
//! order; after an exploration prefix, the arriving item is offered if it
//! belongs to the current optimum and the resources it needs are still free,
//! and it is then accepted with probability `α_t / x_t`, where `x_t` is the
//! probability (over the order of the earlier items and the algorithm's
//! coins) that those resources are free. A model supplies the items, the
//! resources each optimum item would occupy, and the schedule.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{stream_rng, Estimate, KahanSum, Stream};

/// Bitmask of arrived items.
pub type ItemSet = u64;

/// Largest horizon any oracle accepts (item sets are 64-bit masks).
pub const MAX_ITEMS: usize = 64;
/// Default horizon limit of the exact availability oracle.
pub const EXACT_ORACLE_LIMIT: usize = 14;
/// Horizon limit of full order enumeration.
pub const ENUMERATION_LIMIT: usize = 8;

/// An item of the current optimum and what taking it would consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumItem {
    pub item: usize,
    pub resources: u128,
    pub weight: f64,
}

/// A random-order arrival problem with an α acceptance schedule.
pub trait ArrivalModel: Sync {
    /// Number of arriving items `m`.
    fn horizon(&self) -> usize;
    /// Last exploration step: nothing is accepted for `t ≤ cutoff`.
    fn cutoff(&self) -> usize;
    /// `α_t` at index `t - 1`.
    fn schedule(&self) -> &[f64];
    /// Items of the (unique) optimum on the arrived set.
    fn optimum(&self, arrived: ItemSet) -> Vec<OptimumItem>;
}

/// `α_t = 0` for `t ≤ cutoff`, `α_t = max(0, 1 - d Σ_{i<t} α_i / i)` after,
/// accumulated with compensated summation.
pub fn recursive_schedule(m: usize, cutoff: usize, d: usize) -> Vec<f64> {
    let mut alpha = vec![0.0; m];
    let mut sum = KahanSum::new();
    for t in cutoff + 1..=m {
        let a = (1.0 - d as f64 * sum.value()).max(0.0);
        alpha[t - 1] = a;
        sum.add(a / t as f64);
    }
    alpha
}

pub(crate) fn check_horizon(m: usize, limit: usize, what: &'static str) -> Result<()> {
    if m > limit {
        return Err(Error::Capacity {
            what,
            got: m,
            limit,
            hint: "; use the Monte Carlo oracle for larger instances",
        });
    }
    Ok(())
}

fn bits(set: ItemSet) -> impl Iterator<Item = usize> {
    let mut s = set;
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let i = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(i)
        }
    })
}

fn find(opt: &[OptimumItem], item: usize) -> Option<OptimumItem> {
    opt.iter().copied().find(|o| o.item == item)
}

/// Source of availability probabilities `x(Q, e)`: the probability that the
/// resources `e` would take are free after the items of `Q` arrived in
/// random order and were processed by the algorithm.
pub trait Availability {
    /// `None` when `e` is not in the optimum of `Q ∪ {e}` (no decision).
    fn availability(&mut self, before: ItemSet, item: usize) -> Result<Option<f64>>;
}

/// Probability distribution over sets of used resources.
type Dist = Vec<(u128, f64)>;

fn free_mass(dist: &Dist, resources: u128) -> f64 {
    let mut s = KahanSum::new();
    for &(mask, p) in dist {
        if mask & resources == 0 {
            s.add(p);
        }
    }
    s.value()
}

/// Acceptance probability `α / x`, clamped to 1 (flagged) when `x < α`.
fn acceptance(alpha: f64, x: f64) -> (f64, bool) {
    if alpha <= 0.0 {
        (0.0, false)
    } else if x < alpha {
        (1.0, true)
    } else {
        (alpha / x, false)
    }
}

/// Exact oracle: distribution of used resources for every arrived set,
/// built bottom-up over subsets. `D(S)` averages, over the last arrival `e`
/// of `S`, the transition of `D(S \ e)` under the step-`|S|` decision.
#[derive(Debug)]
pub struct ExactOracle {
    m: usize,
    dists: Vec<Dist>,
    optima: Vec<Vec<OptimumItem>>,
}

impl ExactOracle {
    pub fn build<M: ArrivalModel + ?Sized>(model: &M) -> Result<Self> {
        Self::build_with_limit(model, EXACT_ORACLE_LIMIT)
    }

    pub fn build_with_limit<M: ArrivalModel + ?Sized>(model: &M, limit: usize) -> Result<Self> {
        let m = model.horizon();
        check_horizon(m, limit.min(MAX_ITEMS), "horizon for the exact oracle")?;
        let alpha = model.schedule();
        let cutoff = model.cutoff();
        let size = 1usize << m;
        let optima: Vec<Vec<OptimumItem>> = (0..size as u64).map(|s| model.optimum(s)).collect();
        let mut dists: Vec<Dist> = Vec::with_capacity(size);
        dists.push(vec![(0, 1.0)]);
        for s in 1..size as u64 {
            let t = s.count_ones() as usize;
            if t <= cutoff {
                dists.push(vec![(0, 1.0)]);
                continue;
            }
            let mut acc: BTreeMap<u128, f64> = BTreeMap::new();
            let share = 1.0 / t as f64;
            for e in bits(s) {
                let before = &dists[(s & !(1 << e)) as usize];
                match find(&optima[s as usize], e) {
                    Some(o) => {
                        let x = free_mass(before, o.resources);
                        let (a, _) = acceptance(alpha[t - 1], x);
                        for &(mask, p) in before {
                            if mask & o.resources == 0 {
                                *acc.entry(mask | o.resources).or_default() += share * p * a;
                                *acc.entry(mask).or_default() += share * p * (1.0 - a);
                            } else {
                                *acc.entry(mask).or_default() += share * p;
                            }
                        }
                    }
                    None => {
                        for &(mask, p) in before {
                            *acc.entry(mask).or_default() += share * p;
                        }
                    }
                }
            }
            dists.push(acc.into_iter().filter(|&(_, p)| p > 0.0).collect());
        }
        Ok(ExactOracle { m, dists, optima })
    }

    pub fn horizon(&self) -> usize {
        self.m
    }

    /// Optimum on an arrived set, as cached during the build.
    pub fn optimum(&self, arrived: ItemSet) -> &[OptimumItem] {
        &self.optima[arrived as usize]
    }

    /// Distribution of used resources after `arrived` was processed.
    pub fn used_distribution(&self, arrived: ItemSet) -> &[(u128, f64)] {
        &self.dists[arrived as usize]
    }

    /// `x(Q, e)`; `None` if `e` is not in the optimum of `Q ∪ {e}`.
    pub fn x(&self, before: ItemSet, item: usize) -> Option<f64> {
        let s = before | (1 << item);
        find(&self.optima[s as usize], item).map(|o| free_mass(&self.dists[before as usize], o.resources))
    }
}

impl Availability for ExactOracle {
    fn availability(&mut self, before: ItemSet, item: usize) -> Result<Option<f64>> {
        check_query(self.m, before, item)?;
        Ok(self.x(before, item))
    }
}

impl Availability for &ExactOracle {
    fn availability(&mut self, before: ItemSet, item: usize) -> Result<Option<f64>> {
        check_query(self.m, before, item)?;
        Ok(self.x(before, item))
    }
}

fn check_query(m: usize, before: ItemSet, item: usize) -> Result<()> {
    if item >= m || before >> m != 0 || before & (1 << item) != 0 {
        return Err(Error::input(format!(
            "availability query needs item < {m} outside the arrived set"
        )));
    }
    Ok(())
}

/// A Monte Carlo estimate whose standard error exceeded the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WideEstimate {
    pub before: ItemSet,
    pub item: usize,
    pub estimate: Estimate,
}

/// Nested Monte Carlo oracle: `x(Q, e)` is the frequency with which the
/// resources of `e` are free after simulating the algorithm on random
/// orders of `Q`; the decisions inside a simulation use inner estimates of
/// the same kind, cached per `(Q, e)`. Each state's seed is derived from the
/// master seed and the state, so results do not depend on query order.
pub struct McOracle<'a, M: ArrivalModel + ?Sized> {
    model: &'a M,
    seed: u64,
    outer_trials: u64,
    inner_trials: u64,
    threshold: f64,
    cache: HashMap<(ItemSet, usize), Estimate>,
    optima: HashMap<ItemSet, Vec<OptimumItem>>,
    wide: Vec<WideEstimate>,
}

impl<'a, M: ArrivalModel + ?Sized> McOracle<'a, M> {
    /// `outer_trials` are used for queries issued by the caller's run loop,
    /// `inner_trials` for the nested estimates.
    pub fn new(model: &'a M, outer_trials: u64, inner_trials: u64, seed: u64) -> Result<Self> {
        check_horizon(model.horizon(), MAX_ITEMS, "horizon")?;
        if outer_trials == 0 || inner_trials == 0 {
            return Err(Error::input("Monte Carlo oracle needs at least one trial"));
        }
        Ok(McOracle {
            model,
            seed,
            outer_trials,
            inner_trials,
            threshold: 0.05,
            cache: HashMap::new(),
            optima: HashMap::new(),
            wide: Vec::new(),
        })
    }

    /// Standard error above which an estimate is reported as wide.
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Estimates flagged so far.
    pub fn wide_estimates(&self) -> &[WideEstimate] {
        &self.wide
    }

    fn optimum(&mut self, arrived: ItemSet) -> Vec<OptimumItem> {
        let model = self.model;
        self.optima
            .entry(arrived)
            .or_insert_with(|| model.optimum(arrived))
            .clone()
    }

    /// Estimate of `x(Q, e)` with `trials` samples; `None` if `e` is not in
    /// the optimum of `Q ∪ {e}`.
    pub fn estimate(&mut self, before: ItemSet, item: usize, trials: u64) -> Result<Option<Estimate>> {
        check_query(self.model.horizon(), before, item)?;
        let Some(target) = find(&self.optimum(before | (1 << item)), item) else {
            return Ok(None);
        };
        if let Some(e) = self.cache.get(&(before, item)) {
            if e.trials >= trials {
                return Ok(Some(*e));
            }
        }
        let est = if before.count_ones() as usize <= self.model.cutoff() {
            Estimate {
                mean: 1.0,
                stderr: 0.0,
                trials,
            }
        } else {
            let items: Vec<usize> = bits(before).collect();
            let state = splitmix(splitmix(before) ^ item as u64);
            let mut order_rng = stream_rng(self.seed ^ state, 0, Stream::Oracle);
            let mut coins = stream_rng(self.seed ^ state, 1, Stream::Oracle);
            let mut hits = 0u64;
            let mut order = items.clone();
            for _ in 0..trials {
                order.shuffle(&mut order_rng);
                let used = self.simulate(&order, &mut coins)?;
                if used & target.resources == 0 {
                    hits += 1;
                }
            }
            Estimate::binomial(hits, trials)
        };
        if est.stderr > self.threshold {
            self.wide.push(WideEstimate {
                before,
                item,
                estimate: est,
            });
        }
        self.cache.insert((before, item), est);
        Ok(Some(est))
    }

    fn simulate<R: Rng>(&mut self, order: &[usize], coins: &mut R) -> Result<u128> {
        let alpha = self.model.schedule();
        let cutoff = self.model.cutoff();
        let mut arrived: ItemSet = 0;
        let mut used = 0u128;
        for (i, &e) in order.iter().enumerate() {
            let t = i + 1;
            let before = arrived;
            arrived |= 1 << e;
            if t <= cutoff {
                continue;
            }
            let Some(o) = find(&self.optimum(arrived), e) else {
                continue;
            };
            if used & o.resources != 0 {
                continue;
            }
            let x = self
                .estimate(before, e, self.inner_trials)?
                .map_or(1.0, |est| est.mean);
            let (a, _) = acceptance(alpha[t - 1], x);
            if coins.gen::<f64>() < a {
                used |= o.resources;
            }
        }
        Ok(used)
    }
}

impl<M: ArrivalModel + ?Sized> Availability for McOracle<'_, M> {
    fn availability(&mut self, before: ItemSet, item: usize) -> Result<Option<f64>> {
        let trials = self.outer_trials;
        Ok(self.estimate(before, item, trials)?.map(|e| e.mean))
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// One exploitation step of an α-schedule run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalStep {
    pub t: usize,
    pub item: usize,
    pub in_optimum: bool,
    pub available: bool,
    pub alpha: f64,
    /// availability used for the decision (only when offered)
    pub x: Option<f64>,
    pub accepted: bool,
    /// `x < α`: the acceptance probability was clamped to 1
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalTrace {
    /// accepted items in acceptance order
    pub accepted: Vec<usize>,
    pub weight: f64,
    pub steps: Vec<ArrivalStep>,
}

pub(crate) fn check_order(order: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if order.len() != m {
        return Err(Error::input(format!(
            "order has {} entries, expected {m}",
            order.len()
        )));
    }
    for &e in order {
        if e >= m || std::mem::replace(&mut seen[e], true) {
            return Err(Error::input("order is not a permutation of the items"));
        }
    }
    Ok(())
}

/// Run the α-schedule algorithm on a fixed order. Coins come from `coins`;
/// one uniform draw is consumed per offered item.
pub fn run_arrival<M, O, R>(model: &M, order: &[usize], oracle: &mut O, coins: &mut R) -> Result<ArrivalTrace>
where
    M: ArrivalModel + ?Sized,
    O: Availability + ?Sized,
    R: Rng + ?Sized,
{
    let m = model.horizon();
    check_order(order, m)?;
    let alpha = model.schedule();
    let cutoff = model.cutoff();
    let mut arrived: ItemSet = 0;
    let mut used = 0u128;
    let mut trace = ArrivalTrace {
        accepted: Vec::new(),
        weight: 0.0,
        steps: Vec::new(),
    };
    for (i, &e) in order.iter().enumerate() {
        let t = i + 1;
        let before = arrived;
        arrived |= 1 << e;
        if t <= cutoff {
            continue;
        }
        let cand = find(&model.optimum(arrived), e);
        let mut step = ArrivalStep {
            t,
            item: e,
            in_optimum: cand.is_some(),
            available: false,
            alpha: alpha[t - 1],
            x: None,
            accepted: false,
            clamped: false,
        };
        if let Some(o) = cand {
            step.available = used & o.resources == 0;
            if step.available {
                let x = oracle.availability(before, e)?.unwrap_or(1.0);
                let (a, clamped) = acceptance(alpha[t - 1], x);
                step.x = Some(x);
                step.clamped = clamped;
                if coins.gen::<f64>() < a {
                    step.accepted = true;
                    used |= o.resources;
                    trace.accepted.push(e);
                    trace.weight += o.weight;
                }
            }
        }
        trace.steps.push(step);
    }
    Ok(trace)
}

/// Result of enumerating every arrival order and coin outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub expected_weight: f64,
    /// `Pr[e_t in optimum]` at index `t - 1`
    pub offered_mass: Vec<f64>,
    /// `Pr[e_t in optimum and accepted]` at index `t - 1`
    pub accepted_mass: Vec<f64>,
    /// smallest `x - α` over all reachable decisions
    pub min_slack: f64,
}

/// Exact expectation of the α-schedule algorithm by depth-first enumeration
/// of all `m!` orders, branching on every coin, with `x` from `oracle`.
pub fn enumerate_exact<M: ArrivalModel + ?Sized>(model: &M, oracle: &ExactOracle) -> Result<Enumeration> {
    let m = model.horizon();
    check_horizon(m, ENUMERATION_LIMIT, "horizon for full enumeration")?;
    if oracle.horizon() != m {
        return Err(Error::input("oracle was built for a different instance"));
    }
    let mut out = Enumeration {
        expected_weight: 0.0,
        offered_mass: vec![0.0; m],
        accepted_mass: vec![0.0; m],
        min_slack: f64::INFINITY,
    };
    let mut sum = KahanSum::new();
    dfs(model, oracle, 0, 0, 1.0, &mut sum, &mut out);
    out.expected_weight = sum.value();
    Ok(out)
}

fn dfs<M: ArrivalModel + ?Sized>(
    model: &M,
    oracle: &ExactOracle,
    arrived: ItemSet,
    used: u128,
    prob: f64,
    sum: &mut KahanSum,
    out: &mut Enumeration,
) {
    let m = model.horizon();
    let t = arrived.count_ones() as usize + 1;
    if t > m {
        return;
    }
    let p_next = prob / (m - t + 1) as f64;
    let alpha = model.schedule()[t - 1];
    for e in 0..m {
        if arrived & (1 << e) != 0 {
            continue;
        }
        let now = arrived | (1 << e);
        let cand = if t > model.cutoff() {
            find(oracle.optimum(now), e)
        } else {
            None
        };
        match cand {
            Some(o) => {
                out.offered_mass[t - 1] += p_next;
                if used & o.resources == 0 {
                    let x = oracle.x(arrived, e).expect("candidate is in the optimum");
                    out.min_slack = out.min_slack.min(x - alpha);
                    let (a, _) = acceptance(alpha, x);
                    if a > 0.0 {
                        out.accepted_mass[t - 1] += p_next * a;
                        sum.add(p_next * a * o.weight);
                        dfs(model, oracle, now, used | o.resources, p_next * a, sum, out);
                    }
                    if a < 1.0 {
                        dfs(model, oracle, now, used, p_next * (1.0 - a), sum, out);
                    }
                } else {
                    dfs(model, oracle, now, used, p_next, sum, out);
                }
            }
            None => dfs(model, oracle, now, used, p_next, sum, out),
        }
    }
}

/// Every `(Q, e)` with `|Q| ≥ cutoff` at which the algorithm consults the
/// oracle, with its exact `x` and `α_{|Q|+1}`.
pub fn decision_states(
    oracle: &ExactOracle,
    model: &(impl ArrivalModel + ?Sized),
) -> Vec<(ItemSet, usize, f64, f64)> {
    let m = model.horizon();
    let mut out = Vec::new();
    for s in 1..(1u64 << m) {
        let t = s.count_ones() as usize;
        if t <= model.cutoff() {
            continue;
        }
        for e in bits(s) {
            let before = s & !(1 << e);
            if let Some(x) = oracle.x(before, e) {
                out.push((before, e, x, model.schedule()[t - 1]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Items are single resources with weights; the optimum on an arrived
    /// set is its heaviest item alone when all items share one resource.
    struct SharedSlot {
        w: Vec<f64>,
        alpha: Vec<f64>,
    }

    impl SharedSlot {
        fn new(w: Vec<f64>) -> Self {
            let m = w.len();
            SharedSlot {
                alpha: recursive_schedule(m, m / 2, 2),
                w,
            }
        }
    }

    impl ArrivalModel for SharedSlot {
        fn horizon(&self) -> usize {
            self.w.len()
        }
        fn cutoff(&self) -> usize {
            self.w.len() / 2
        }
        fn schedule(&self) -> &[f64] {
            &self.alpha
        }
        fn optimum(&self, arrived: ItemSet) -> Vec<OptimumItem> {
            bits(arrived)
                .max_by(|&a, &b| self.w[a].total_cmp(&self.w[b]))
                .map(|i| {
                    vec![OptimumItem {
                        item: i,
                        resources: 1,
                        weight: self.w[i],
                    }]
                })
                .unwrap_or_default()
        }
    }

    #[test]
    fn schedule_small_cases() {
        let a = recursive_schedule(10, 5, 2);
        assert_eq!(&a[..5], &[0.0; 5]);
        assert_eq!(a[5], 1.0);
        assert!((a[6] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(recursive_schedule(1, 0, 2), vec![1.0]);
        // early clamp once the sum overshoots
        let a = recursive_schedule(4, 1, 3);
        assert_eq!(a, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn first_exploitation_step_sees_everything_free() {
        let model = SharedSlot::new(vec![3.0, 1.0, 2.0, 5.0, 4.0]);
        let oracle = ExactOracle::build(&model).unwrap();
        for (before, _, x, _) in decision_states(&oracle, &model) {
            if before.count_ones() as usize == model.cutoff() {
                assert_eq!(x, 1.0);
            }
        }
    }

    #[test]
    fn enumeration_accepts_with_probability_alpha() {
        let model = SharedSlot::new(vec![3.0, 1.0, 2.0, 5.0, 4.0, 0.5]);
        let oracle = ExactOracle::build(&model).unwrap();
        let en = enumerate_exact(&model, &oracle).unwrap();
        for t in 0..6 {
            let want = model.alpha[t] * en.offered_mass[t];
            assert!((en.accepted_mass[t] - want).abs() < 1e-12, "t = {}", t + 1);
        }
        assert!(en.min_slack >= -1e-12);
    }

    #[test]
    fn mc_matches_exact() {
        let model = SharedSlot::new(vec![3.0, 1.0, 2.0, 5.0, 4.0]);
        let exact = ExactOracle::build(&model).unwrap();
        let mut mc = McOracle::new(&model, 20_000, 2_000, 9).unwrap();
        for (before, e, x, _) in decision_states(&exact, &model) {
            let est = mc.estimate(before, e, 20_000).unwrap().unwrap();
            assert!(
                (est.mean - x).abs() <= 4.0 * est.stderr + 0.02,
                "{before:b} {e}: {est:?} vs {x}"
            );
        }
    }

    #[test]
    fn run_loop_records_steps() {
        let model = SharedSlot::new(vec![1.0, 2.0]);
        let mut oracle = ExactOracle::build(&model).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tr = run_arrival(&model, &[0, 1], &mut oracle, &mut rng).unwrap();
        assert_eq!(tr.accepted, vec![1]);
        assert_eq!(tr.weight, 2.0);
        let tr = run_arrival(&model, &[1, 0], &mut oracle, &mut rng).unwrap();
        assert!(tr.accepted.is_empty());
        assert!(!tr.steps[0].in_optimum);
        assert!(run_arrival(&model, &[1, 1], &mut oracle, &mut rng).is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        let model = SharedSlot::new(vec![1.0; 15]);
        assert!(matches!(ExactOracle::build(&model), Err(Error::Capacity { .. })));
        let model = SharedSlot::new(vec![1.0; 9]);
        let oracle = ExactOracle::build(&model).unwrap();
        assert!(matches!(
            enumerate_exact(&model, &oracle),
            Err(Error::Capacity { .. })
        ));
    }
}
