//! Edge arrival: the positive-weight edges of a graph arrive in random order
//! and the α-schedule algorithm accepts current-optimum edges.

use rand::Rng;

use crate::arrival::{
    self, check_horizon, recursive_schedule, ArrivalModel, ArrivalTrace, Availability, ExactOracle, ItemSet,
    McOracle, OptimumItem, MAX_ITEMS,
};
use crate::error::{Error, Result};
use crate::graph::{max_weight_matching_edges, WeightedGraph};
use crate::stats::Estimate;

/// Edge-arrival instance. Items are the positive-weight edges of the graph
/// in lexicographic order; zero-weight pairs never arrive.
#[derive(Debug, Clone)]
pub struct EdgeInstance {
    graph: WeightedGraph,
    edges: Vec<(usize, usize, f64)>,
    /// endpoint bits of each edge over a compact relabelling of the vertices
    masks: Vec<u128>,
    alpha: Vec<f64>,
}

impl EdgeInstance {
    pub fn new(graph: WeightedGraph) -> Result<Self> {
        let edges: Vec<_> = graph.edges().into_iter().filter(|e| e.2 > 0.0).collect();
        check_horizon(edges.len(), MAX_ITEMS, "edge count")?;
        let mut ids: Vec<usize> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let bit = |x: usize| 1u128 << ids.binary_search(&x).unwrap();
        let masks = edges.iter().map(|&(u, v, _)| bit(u) | bit(v)).collect();
        let alpha = alpha_recursive(edges.len());
        Ok(EdgeInstance {
            graph,
            edges,
            masks,
            alpha,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// The arriving edges `(u, v, w)`, indexed by item id.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Weight of the maximum matching on all edges.
    pub fn optimum_weight(&self) -> f64 {
        let all = if self.m() == 64 {
            u64::MAX
        } else {
            (1u64 << self.m()) - 1
        };
        self.optimum(all).iter().map(|o| o.weight).sum()
    }

    fn members(&self, set: ItemSet) -> Vec<usize> {
        (0..self.m()).filter(|&i| set & (1 << i) != 0).collect()
    }
}

impl ArrivalModel for EdgeInstance {
    fn horizon(&self) -> usize {
        self.edges.len()
    }

    fn cutoff(&self) -> usize {
        self.edges.len() / 2
    }

    fn schedule(&self) -> &[f64] {
        &self.alpha
    }

    fn optimum(&self, arrived: ItemSet) -> Vec<OptimumItem> {
        let ids = self.members(arrived);
        let list: Vec<_> = ids.iter().map(|&i| self.edges[i]).collect();
        max_weight_matching_edges(&list, self.graph.fixed_point_scale())
            .into_iter()
            .map(|k| OptimumItem {
                item: ids[k],
                resources: self.masks[ids[k]],
                weight: list[k].2,
            })
            .collect()
    }
}

/// `α_t = 0` for `t ≤ ⌊m/2⌋`, else `1 - 2 Σ_{i<t} α_i / i`; index `t - 1`.
pub fn alpha_recursive(m: usize) -> Vec<f64> {
    recursive_schedule(m, m / 2, 2)
}

/// `⌊m/2⌋ ⌊(m-2)/2⌋ / ((t-1)(t-2))` for `⌊m/2⌋ < t ≤ m`; exactly 1 at the
/// first exploitation step.
pub fn alpha_closed(m: usize, t: usize) -> Result<f64> {
    let c = m / 2;
    if t <= c || t > m {
        return Err(Error::input(format!(
            "closed form needs m/2 < t <= m, got m = {m}, t = {t}"
        )));
    }
    if t == c + 1 {
        return Ok(1.0);
    }
    let num = (c * (c - 1)) as f64;
    Ok(num / ((t - 1) as f64 * (t - 2) as f64))
}

/// Lower-bound coefficient of the telescoped sum,
/// `⌊m/2⌋ ⌊(m-2)/2⌋ (1/(⌊m/2⌋-1) - 1/(m-1)) / m`, defined for `m ≥ 4`.
pub fn telescoping_coefficient(m: usize) -> Result<f64> {
    if m < 4 {
        return Err(Error::input("telescoping coefficient needs m >= 4"));
    }
    let c = (m / 2) as f64;
    let m = m as f64;
    Ok(c * (c - 1.0) * (1.0 / (c - 1.0) - 1.0 / (m - 1.0)) / m)
}

/// Exact availability `x(Q, e)`; `None` if `e` is not in the optimum of
/// `Q ∪ {e}`. Builds the subset oracle, so the instance must have at most
/// [`arrival::EXACT_ORACLE_LIMIT`] edges.
pub fn exact_availability(inst: &EdgeInstance, q: &[usize], e: usize) -> Result<Option<f64>> {
    let before = item_set(inst.m(), q)?;
    ExactOracle::build(inst)?.availability(before, e)
}

/// Nested Monte Carlo estimate of `x(Q, e)`.
pub fn mc_availability(
    inst: &EdgeInstance,
    q: &[usize],
    e: usize,
    trials: u64,
    inner_trials: u64,
    seed: u64,
) -> Result<Option<Estimate>> {
    let before = item_set(inst.m(), q)?;
    McOracle::new(inst, trials, inner_trials, seed)?.estimate(before, e, trials)
}

pub(crate) fn item_set(m: usize, items: &[usize]) -> Result<ItemSet> {
    let mut s: ItemSet = 0;
    for &i in items {
        if i >= m || s & (1 << i) != 0 {
            return Err(Error::input(format!("item {i} is out of range or repeated")));
        }
        s |= 1 << i;
    }
    Ok(s)
}

/// Run the edge-arrival algorithm on a fixed edge order.
pub fn run_edge_algorithm<O: Availability + ?Sized, R: Rng + ?Sized>(
    inst: &EdgeInstance,
    order: &[usize],
    oracle: &mut O,
    rng: &mut R,
) -> Result<ArrivalTrace> {
    arrival::run_arrival(inst, order, oracle, rng)
}

/// Exact expected weight of the algorithm's matching (`m ≤ 8`).
pub fn exact_expected_value(inst: &EdgeInstance) -> Result<f64> {
    check_horizon(
        inst.m(),
        arrival::ENUMERATION_LIMIT,
        "edge count for full enumeration",
    )?;
    let oracle = ExactOracle::build(inst)?;
    Ok(arrival::enumerate_exact(inst, &oracle)?.expected_weight)
}

/// `Σ_{e ∋ u, e ∈ Q} Pr[e ∈ μ*_i | e arrives at i]`, where the first `i`
/// arrivals form a uniform `i`-subset of `Q` containing `e`. At most
/// `|Q| / i` for every instance.
pub fn edge_in_optimum_mass(inst: &EdgeInstance, q: &[usize], u: usize, i: usize) -> Result<f64> {
    let set = item_set(inst.m(), q)?;
    check_horizon(q.len(), arrival::EXACT_ORACLE_LIMIT, "edge set size")?;
    if i == 0 || i > q.len() {
        return Err(Error::input(format!("need 1 <= i <= |Q|, got i = {i}")));
    }
    let members = inst.members(set);
    let incident: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&k| inst.edges[k].0 == u || inst.edges[k].1 == u)
        .collect();
    if incident.is_empty() {
        return Ok(0.0);
    }
    let mut hits = vec![0u64; inst.m()];
    let mut total = 0u64;
    // all i-subsets of Q via bit tricks on the local index space
    let k = members.len();
    let mut local: u64 = (1u64 << i) - 1;
    while local < (1u64 << k) {
        let mut s: ItemSet = 0;
        for (j, &item) in members.iter().enumerate() {
            if local & (1 << j) != 0 {
                s |= 1 << item;
            }
        }
        total += 1;
        for o in inst.optimum(s) {
            hits[o.item] += 1;
        }
        let c = local & local.wrapping_neg();
        let r = local + c;
        local = (((r ^ local) >> 2) / c) | r;
    }
    // each e lies in C(k-1, i-1) = total * i / k of the subsets
    let containing = total as f64 * i as f64 / k as f64;
    Ok(incident.iter().map(|&e| hits[e] as f64 / containing).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, edges: &[(usize, usize, f64)]) -> EdgeInstance {
        EdgeInstance::new(WeightedGraph::new(n, edges.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_recursive(10);
        assert_eq!(&a[..5], &[0.0; 5]);
        assert_eq!(a[5], 1.0);
        assert!((a[6] - 2.0 / 3.0).abs() < 1e-15);
        assert!((alpha_closed(10, 7).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((alpha_closed(10, 10).unwrap() - 5.0 / 18.0).abs() < 1e-15);
        assert!((a[9] - 5.0 / 18.0).abs() < 1e-15);
        assert_eq!(alpha_closed(10, 6).unwrap(), 1.0);
        assert!(alpha_closed(10, 5).is_err());
        assert_eq!(alpha_recursive(1), vec![1.0]);
    }

    #[test]
    fn telescoping_small() {
        assert!((telescoping_coefficient(4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(telescoping_coefficient(3).is_err());
    }

    #[test]
    fn single_edge_always_taken() {
        let e = inst(2, &[(0, 1, 2.5)]);
        assert_eq!(exact_expected_value(&e).unwrap(), 2.5);
    }

    #[test]
    fn two_edge_examples() {
        let star = inst(3, &[(0, 1, 2.0), (0, 2, 1.0)]);
        assert!((exact_expected_value(&star).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(exact_availability(&star, &[0], 1).unwrap(), None);
        assert_eq!(exact_availability(&star, &[1], 0).unwrap(), Some(1.0));
        let pairs = inst(4, &[(0, 1, 2.0), (2, 3, 1.0)]);
        assert!((exact_expected_value(&pairs).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_pairs_do_not_arrive() {
        let e = inst(3, &[(0, 1, 2.0), (1, 2, 0.0)]);
        assert_eq!(e.m(), 1);
    }

    #[test]
    fn optimum_mass_examples() {
        let p = inst(5, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (3, 4, 4.0)]);
        assert_eq!(edge_in_optimum_mass(&p, &[0, 2], 1, 1).unwrap(), 1.0);
        assert_eq!(edge_in_optimum_mass(&p, &[0, 2], 4, 1).unwrap(), 0.0);
        // u = 1 in {e0, e1}: sets of size 2 contain both, only e1 is optimal
        assert_eq!(edge_in_optimum_mass(&p, &[0, 1], 1, 2).unwrap(), 1.0);
        assert!(edge_in_optimum_mass(&p, &[0, 1], 1, 3).is_err());
    }
}
