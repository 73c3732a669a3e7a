//! Vertex arrival: the drop-one-vertex algorithm, its greedy (ordinal)
//! variant, the match probability p(k, t) and auxiliary-vertex padding.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{greedy_pairs, positive_matching, MatchScratch, Matching, WeightedGraph};
use crate::stats::{stream_rng, Estimate, Stream};

/// A weighted graph whose vertices arrive in random order.
#[derive(Debug, Clone)]
pub struct VertexInstance {
    pub graph: WeightedGraph,
}

impl VertexInstance {
    pub fn new(graph: WeightedGraph) -> Self {
        VertexInstance { graph }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// Arrival order `v_1, ..., v_n` as a permutation of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrivalOrder(Vec<usize>);

impl ArrivalOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::input("arrival order is not a permutation"));
            }
        }
        Ok(ArrivalOrder(order))
    }

    pub fn identity(n: usize) -> Self {
        ArrivalOrder((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        ArrivalOrder(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One exploitation step of a vertex-arrival run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexStep {
    pub t: usize,
    pub arrived: usize,
    /// `r_t` (1-based arrival position of the dropped vertex) on odd steps
    pub dropped: Option<usize>,
    /// partner of the arriving vertex in `μ_t`
    pub partner: Option<usize>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexRunTrace {
    pub matching: Matching,
    pub steps: Vec<VertexStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Solver {
    Exact,
    Greedy,
}

/// Fenwick tree over vertex ids, used to find a vertex's neighbour in the
/// ascending list of vertices left over for zero-weight padding.
struct Fenwick {
    tree: Vec<i32>,
    log: u32,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
            log: usize::BITS - n.leading_zeros(),
        }
    }

    fn add(&mut self, v: usize, delta: i32) {
        let mut i = v + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Members with id ≤ v.
    fn rank(&self, v: usize) -> usize {
        let mut i = v + 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s as usize
    }

    /// Id of the `k`-th smallest member (1-based), if any.
    fn select(&self, mut k: usize) -> Option<usize> {
        let mut pos = 0;
        for b in (0..self.log).rev() {
            let next = pos + (1 << b);
            if next < self.tree.len() && (self.tree[next] as usize) < k {
                pos = next;
                k -= self.tree[next] as usize;
            }
        }
        (pos < self.tree.len() - 1 && k == 1).then_some(pos)
    }
}

struct Runner<'a> {
    g: &'a WeightedGraph,
    solver: Solver,
    in_set: Vec<bool>,
    members: Fenwick,
    arrived_support: Vec<usize>,
    verts: Vec<usize>,
    used: Vec<bool>,
    scratch: MatchScratch,
}

impl<'a> Runner<'a> {
    fn new(g: &'a WeightedGraph, solver: Solver) -> Self {
        let n = g.n();
        Runner {
            g,
            solver,
            in_set: vec![false; n],
            members: Fenwick::new(n),
            arrived_support: Vec::new(),
            verts: Vec::new(),
            used: vec![false; n],
            scratch: MatchScratch::new(n),
        }
    }

    fn insert(&mut self, v: usize) {
        self.in_set[v] = true;
        self.members.add(v, 1);
    }

    fn remove(&mut self, v: usize) {
        self.in_set[v] = false;
        self.members.add(v, -1);
    }

    fn arrive(&mut self, v: usize) {
        self.insert(v);
        if !self.g.neighbors(v).is_empty() {
            let pos = self.arrived_support.binary_search(&v).unwrap_err();
            self.arrived_support.insert(pos, v);
        }
    }

    /// Partner of `v` in the padded optimum on the current vertex set.
    fn partner(&mut self, v: usize) -> Option<usize> {
        self.verts.clear();
        let in_set = &self.in_set;
        self.verts
            .extend(self.arrived_support.iter().copied().filter(|&u| in_set[u]));
        let pairs = match self.solver {
            Solver::Exact => positive_matching(self.g, &self.verts, &self.in_set, &mut self.scratch),
            Solver::Greedy => {
                let p = greedy_pairs(self.g, &self.in_set, &mut self.used);
                for &(a, b) in &p {
                    self.used[a] = false;
                    self.used[b] = false;
                }
                p
            }
        };
        for &(a, b) in &pairs {
            if a == v {
                return Some(b);
            }
            if b == v {
                return Some(a);
            }
        }
        for &(a, b) in &pairs {
            self.members.add(a, -1);
            self.members.add(b, -1);
        }
        let r = self.members.rank(v);
        let mate = if r % 2 == 1 {
            self.members.select(r + 1)
        } else {
            self.members.select(r - 1)
        };
        for &(a, b) in &pairs {
            self.members.add(a, 1);
            self.members.add(b, 1);
        }
        mate
    }
}

fn run_core(
    inst: &VertexInstance,
    order: &ArrivalOrder,
    k: usize,
    until: usize,
    solver: Solver,
    draw: &mut dyn FnMut(usize) -> Result<usize>,
) -> Result<VertexRunTrace> {
    let n = inst.n();
    if order.len() != n {
        return Err(Error::input(format!(
            "arrival order has {} entries, instance has {n} vertices",
            order.len()
        )));
    }
    if k > n {
        return Err(Error::input(format!(
            "exploration length k = {k} exceeds n = {n}"
        )));
    }
    let v = order.as_slice();
    let mut runner = Runner::new(&inst.graph, solver);
    let mut available = vec![true; n];
    let mut matching = Matching::empty();
    let mut steps = Vec::with_capacity(until.saturating_sub(k));
    for &u in &v[..k] {
        runner.arrive(u);
    }
    for t in k + 1..=until {
        let vt = v[t - 1];
        runner.arrive(vt);
        let dropped = if t % 2 == 1 && t > 1 {
            let r = draw(t)?;
            runner.remove(v[r - 1]);
            Some(r)
        } else {
            None
        };
        let partner = runner.partner(vt);
        if let Some(r) = dropped {
            runner.insert(v[r - 1]);
        }
        let matched = match partner {
            Some(p) if available[p] => {
                available[p] = false;
                available[vt] = false;
                matching.insert(vt, p)?;
                true
            }
            _ => false,
        };
        steps.push(VertexStep {
            t,
            arrived: vt,
            dropped,
            partner,
            matched,
        });
    }
    Ok(VertexRunTrace { matching, steps })
}

fn random_draws<R: Rng + ?Sized>(rng: &mut R) -> impl FnMut(usize) -> Result<usize> + '_ {
    move |t| Ok(rng.gen_range(1..t))
}

/// Run the vertex-arrival algorithm with exploration length `k`. On each odd
/// step `t > 1` a uniformly random earlier arrival `r_t ∈ {1..t-1}` is drawn
/// from `rng` and left out of `μ_t`.
pub fn run_vertex_algorithm<R: Rng + ?Sized>(
    inst: &VertexInstance,
    order: &ArrivalOrder,
    k: usize,
    rng: &mut R,
) -> Result<VertexRunTrace> {
    run_core(inst, order, k, inst.n(), Solver::Exact, &mut random_draws(rng))
}

/// Same control flow with `μ_t` built greedily from pairwise comparisons.
pub fn run_vertex_ordinal_greedy<R: Rng + ?Sized>(
    inst: &VertexInstance,
    order: &ArrivalOrder,
    k: usize,
    rng: &mut R,
) -> Result<VertexRunTrace> {
    run_core(inst, order, k, inst.n(), Solver::Greedy, &mut random_draws(rng))
}

/// Deterministic replay with explicit drops: `draws[j]` is `r_t` for the
/// `j`-th odd exploitation step with `t > 1`.
pub fn replay_vertex_algorithm(
    inst: &VertexInstance,
    order: &ArrivalOrder,
    k: usize,
    draws: &[usize],
) -> Result<VertexRunTrace> {
    let mut it = draws.iter().copied();
    let mut draw = |t: usize| match it.next() {
        Some(r) if (1..t).contains(&r) => Ok(r),
        Some(r) => Err(Error::input(format!("drop r_{t} = {r} outside 1..={}", t - 1))),
        None => Err(Error::input(format!("no drop supplied for step {t}"))),
    };
    run_core(inst, order, k, inst.n(), Solver::Exact, &mut draw)
}

/// `p(k, t)` by the recursion `p(k,k) = 0`, `p(k,t) = 2/t + (t-3)/t · p(k,t-1)`.
pub fn p_recursive(k: usize, t: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::input("p(k, t) needs k >= 1"));
    }
    if t < k {
        return Err(Error::input(format!(
            "p(k, t) needs t >= k, got k = {k}, t = {t}"
        )));
    }
    let mut p = 0.0;
    for s in k + 1..=t {
        let s = s as f64;
        p = 2.0 / s + (s - 3.0) / s * p;
    }
    Ok(p)
}

/// Closed form `(2/3)(1 - k(k-1)(k-2) / (t(t-1)(t-2)))`, defined for `t ≥ k ≥ 3`.
pub fn p_closed(k: usize, t: usize) -> Result<f64> {
    if k < 3 || t < k {
        return Err(Error::input(format!(
            "closed form needs t >= k >= 3, got k = {k}, t = {t}"
        )));
    }
    let (k, t) = (k as f64, t as f64);
    let ratio = (k / t) * ((k - 1.0) / (t - 1.0)) * ((k - 2.0) / (t - 2.0));
    Ok(2.0 / 3.0 * (1.0 - ratio))
}

/// Append `m_aux` vertices with zero weight to everything.
pub fn pad_with_auxiliary(inst: &VertexInstance, m_aux: usize) -> VertexInstance {
    VertexInstance::new(inst.graph.with_extra_vertices(m_aux))
}

/// Monte Carlo frequency of "u is matched by time t" given that `u` is among
/// the first `t` arrivals. Orders with `u` arriving later are rejected and
/// redrawn; `trials` counts accepted orders.
pub fn estimate_match_probability(
    inst: &VertexInstance,
    k: usize,
    t: usize,
    u: usize,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let n = inst.n();
    if !(k <= t && t <= n) || u >= n || trials == 0 {
        return Err(Error::input(format!(
            "need k <= t <= n, u < n and trials >= 1 (k = {k}, t = {t}, n = {n}, u = {u})"
        )));
    }
    let hits: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut order_rng = stream_rng(seed, i, Stream::Order);
            let mut coins = stream_rng(seed, i, Stream::Coins);
            let order = loop {
                let o = ArrivalOrder::random(n, &mut order_rng);
                if o.as_slice()[..t].contains(&u) {
                    break o;
                }
            };
            let trace = run_core(inst, &order, k, t, Solver::Exact, &mut random_draws(&mut coins))?;
            Ok(trace.matching.is_matched(u))
        })
        .collect();
    let hits = hits?.into_iter().filter(|&h| h).count() as u64;
    Ok(Estimate::binomial(hits, trials))
}
