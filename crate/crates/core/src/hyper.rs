//! Online bipartite hypergraph matching: online vertices arrive in random
//! order, each with hyperedges `(v, S)` into a fixed offline set `R`,
//! `|S| ≤ d`. Exploration covers the first `⌊f_d m⌋` arrivals with
//! `f_d = d^{-1/(d-1)}`.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arrival::{
    self, check_horizon, recursive_schedule, ArrivalModel, ArrivalTrace, Availability, ExactOracle, ItemSet,
    OptimumItem, MAX_ITEMS,
};
use crate::edge::EdgeInstance;
use crate::error::{Error, Result};

/// Largest offline side handled by the subset-mask matcher.
pub const OFFLINE_LIMIT: usize = 20;

const FIXED_POINT_UNITS: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperEdge {
    pub v: usize,
    pub s: Vec<usize>,
    pub w: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct HypergraphFile {
    m: usize,
    r: usize,
    d: usize,
    edges: Vec<HyperEdge>,
}

/// Bipartite hypergraph with `m` online and `r` offline vertices.
#[derive(Debug, Clone)]
pub struct BipartiteHypergraph {
    m: usize,
    r: usize,
    d: usize,
    edges: Vec<HyperEdge>,
    masks: Vec<u32>,
    fixed: Vec<i64>,
    by_vertex: Vec<Vec<usize>>,
    schedule: HyperAlphaSchedule,
}

/// Selected hyperedges, as ascending indices into the edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HyperMatching {
    pub edges: Vec<usize>,
}

impl HyperMatching {
    pub fn weight(&self, h: &BipartiteHypergraph) -> f64 {
        self.edges.iter().map(|&j| h.edges[j].w).sum()
    }
}

/// `f_d = d^{-1/(d-1)}`.
pub fn f_d(d: usize) -> f64 {
    (d as f64).powf(-1.0 / (d as f64 - 1.0))
}

/// Exploration length `⌊f_d m⌋`.
pub fn hyper_cutoff(m: usize, d: usize) -> usize {
    (f_d(d) * m as f64).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperAlphaSchedule {
    pub m: usize,
    pub d: usize,
    pub f_d: f64,
    pub cutoff: usize,
    /// `α_t` at index `t - 1`
    pub alpha: Vec<f64>,
}

/// `α_t = 0` for `t ≤ f_d m`, else `1 - d Σ_{i<t} α_i / i`, floored at 0.
/// The floor only matters when `⌊f_d m⌋ ≤ d - 2`.
pub fn hyper_alpha_recursive(m: usize, d: usize) -> Result<HyperAlphaSchedule> {
    if d < 2 {
        return Err(Error::input(format!("d must be at least 2, got {d}")));
    }
    let cutoff = hyper_cutoff(m, d);
    Ok(HyperAlphaSchedule {
        m,
        d,
        f_d: f_d(d),
        cutoff,
        alpha: recursive_schedule(m, cutoff, d),
    })
}

/// `Π_{i=1}^{d} (⌊f_d m⌋ + 1 - i) / (t - i)` for `⌊f_d m⌋ < t ≤ m`.
pub fn hyper_alpha_closed(m: usize, d: usize, t: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::input(format!("d must be at least 2, got {d}")));
    }
    let c = hyper_cutoff(m, d);
    if t <= c || t > m {
        return Err(Error::input(format!(
            "closed form needs floor(f_d m) < t <= m, got m = {m}, d = {d}, t = {t}"
        )));
    }
    if t == c + 1 {
        return Ok(1.0);
    }
    if c + 1 < d {
        return Err(Error::input(format!(
            "product form needs floor(f_d m) >= d - 1 beyond the first step, got {c} for d = {d}"
        )));
    }
    Ok((1..=d).map(|i| (c + 1 - i) as f64 / (t - i) as f64).product())
}

/// Lower-bound coefficient
/// `(1/m) Π_{i≤d}(c+1-i) · (1/(d-1)) (Π_{i<d} 1/(c-i) - Π_{i<d} 1/(m-i))`
/// with `c = ⌊f_d m⌋ > d`.
pub fn hyper_coefficient(m: usize, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::input(format!("d must be at least 2, got {d}")));
    }
    let c = hyper_cutoff(m, d);
    if c <= d {
        return Err(Error::input(format!(
            "coefficient needs floor(f_d m) > d, got {c} for m = {m}, d = {d}"
        )));
    }
    let head: f64 = (1..=d).map(|i| (c + 1 - i) as f64).product();
    let a: f64 = (1..d).map(|i| 1.0 / (c - i) as f64).product();
    let b: f64 = (1..d).map(|i| 1.0 / (m - i) as f64).product();
    Ok(head / m as f64 / (d - 1) as f64 * (a - b))
}

impl BipartiteHypergraph {
    pub fn new(m: usize, r: usize, d: usize, edges: Vec<HyperEdge>) -> Result<Self> {
        if d < 2 {
            return Err(Error::input(format!("d must be at least 2, got {d}")));
        }
        check_horizon(m, MAX_ITEMS, "online vertex count")?;
        if r > OFFLINE_LIMIT {
            return Err(Error::Capacity {
                what: "offline vertex count",
                got: r,
                limit: OFFLINE_LIMIT,
                hint: "",
            });
        }
        let mut masks = Vec::with_capacity(edges.len());
        let mut by_vertex = vec![Vec::new(); m];
        for (j, e) in edges.iter().enumerate() {
            if e.v >= m {
                return Err(Error::input(format!(
                    "edge {j}: online vertex {} out of range",
                    e.v
                )));
            }
            if e.s.is_empty() || e.s.len() > d {
                return Err(Error::input(format!(
                    "edge {j}: |S| = {} outside 1..={d}",
                    e.s.len()
                )));
            }
            if !e.w.is_finite() || e.w <= 0.0 {
                return Err(Error::input(format!(
                    "edge {j}: weight must be positive and finite"
                )));
            }
            let mut mask = 0u32;
            for &x in &e.s {
                if x >= r || mask & (1 << x) != 0 {
                    return Err(Error::input(format!(
                        "edge {j}: offline vertex {x} out of range or repeated"
                    )));
                }
                mask |= 1 << x;
            }
            masks.push(mask);
            by_vertex[e.v].push(j);
        }
        let max_w = edges.iter().map(|e| e.w).fold(0.0, f64::max);
        let scale = if max_w > 0.0 {
            FIXED_POINT_UNITS / max_w
        } else {
            1.0
        };
        let fixed = edges.iter().map(|e| (e.w * scale).round() as i64).collect();
        Ok(BipartiteHypergraph {
            m,
            r,
            d,
            edges,
            masks,
            fixed,
            by_vertex,
            schedule: hyper_alpha_recursive(m, d)?,
        })
    }

    /// Hypergraph with one online vertex per edge of `inst` and the graph's
    /// (compactly relabelled) vertices as the offline side, `d = 2`.
    pub fn from_edge_instance(inst: &EdgeInstance) -> Result<Self> {
        let mut ids: Vec<usize> = inst.edges().iter().flat_map(|&(u, v, _)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let local = |x: usize| ids.binary_search(&x).unwrap();
        let edges = inst
            .edges()
            .iter()
            .enumerate()
            .map(|(i, &(u, v, w))| HyperEdge {
                v: i,
                s: vec![local(u), local(v)],
                w,
            })
            .collect();
        Self::new(inst.m(), ids.len(), 2, edges)
    }

    /// Same hypergraph with `extra` online vertices that have no edges.
    pub fn pad(&self, extra: usize) -> Result<Self> {
        Self::new(self.m + extra, self.r, self.d, self.edges.clone())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn alpha_schedule(&self) -> &HyperAlphaSchedule {
        &self.schedule
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: HypergraphFile = serde_json::from_str(s)?;
        Self::new(f.m, f.r, f.d, f.edges)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&HypergraphFile {
            m: self.m,
            r: self.r,
            d: self.d,
            edges: self.edges.clone(),
        })
        .expect("hypergraph serializes")
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }

    fn matching_on(&self, arrived: ItemSet) -> Vec<usize> {
        let verts: Vec<usize> = (0..self.m)
            .filter(|&v| arrived & (1 << v) != 0 && !self.by_vertex[v].is_empty())
            .collect();
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        let mut used = 0u32;
        for i in 0..verts.len() {
            let best = self.best(&verts, i, used, &mut memo);
            let skip = self.best(&verts, i + 1, used, &mut memo);
            let pick = self.by_vertex[verts[i]].iter().copied().find(|&j| {
                self.masks[j] & used == 0
                    && self.fixed[j] + self.best(&verts, i + 1, used | self.masks[j], &mut memo) == best
            });
            match pick {
                Some(j) => {
                    used |= self.masks[j];
                    out.push(j);
                }
                None => debug_assert_eq!(skip, best),
            }
        }
        out.sort_unstable();
        out
    }

    fn best(&self, verts: &[usize], i: usize, used: u32, memo: &mut HashMap<(usize, u32), i64>) -> i64 {
        if i == verts.len() {
            return 0;
        }
        if let Some(&b) = memo.get(&(i, used)) {
            return b;
        }
        let mut b = self.best(verts, i + 1, used, memo);
        for &j in &self.by_vertex[verts[i]] {
            if self.masks[j] & used == 0 {
                b = b.max(self.fixed[j] + self.best(verts, i + 1, used | self.masks[j], memo));
            }
        }
        memo.insert((i, used), b);
        b
    }
}

impl ArrivalModel for BipartiteHypergraph {
    fn horizon(&self) -> usize {
        self.m
    }

    fn cutoff(&self) -> usize {
        self.schedule.cutoff
    }

    fn schedule(&self) -> &[f64] {
        &self.schedule.alpha
    }

    fn optimum(&self, arrived: ItemSet) -> Vec<OptimumItem> {
        self.matching_on(arrived)
            .into_iter()
            .map(|j| OptimumItem {
                item: self.edges[j].v,
                resources: self.masks[j] as u128,
                weight: self.edges[j].w,
            })
            .collect()
    }
}

/// Maximum-weight matching on the arrived online vertices `arrived` and all
/// of `R`. Among optimal matchings, vertices are decided in ascending order,
/// each taking its smallest-index optimal edge before considering a skip.
pub fn max_weight_hyper_matching(h: &BipartiteHypergraph, arrived: &[usize]) -> Result<HyperMatching> {
    let set = crate::edge::item_set(h.m, arrived)?;
    Ok(HyperMatching {
        edges: h.matching_on(set),
    })
}

/// Run the hypergraph algorithm on a fixed arrival order of `L`.
pub fn run_hypergraph_algorithm<O: Availability + ?Sized, R: Rng + ?Sized>(
    h: &BipartiteHypergraph,
    order: &[usize],
    oracle: &mut O,
    rng: &mut R,
) -> Result<ArrivalTrace> {
    arrival::run_arrival(h, order, oracle, rng)
}

/// Exact expected weight by enumeration (`m ≤ 8`).
pub fn exact_expected_value(h: &BipartiteHypergraph) -> Result<f64> {
    check_horizon(
        h.m,
        arrival::ENUMERATION_LIMIT,
        "online vertex count for full enumeration",
    )?;
    let oracle = ExactOracle::build(h)?;
    Ok(arrival::enumerate_exact(h, &oracle)?.expected_weight)
}

/// Weight of the offline optimum on all online vertices.
pub fn optimum_weight(h: &BipartiteHypergraph) -> f64 {
    let all = if h.m == 64 { u64::MAX } else { (1u64 << h.m) - 1 };
    HyperMatching {
        edges: h.matching_on(all),
    }
    .weight(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    fn he(v: usize, s: &[usize], w: f64) -> HyperEdge {
        HyperEdge { v, s: s.to_vec(), w }
    }

    #[test]
    fn schedule_examples() {
        let s = hyper_alpha_recursive(10, 2).unwrap();
        assert_eq!(s.f_d, 0.5);
        assert_eq!(&s.alpha[..5], &[0.0; 5]);
        assert_eq!(s.alpha[5], 1.0);
        assert!((s.alpha[6] - 2.0 / 3.0).abs() < 1e-15);
        let s = hyper_alpha_recursive(100, 3).unwrap();
        assert!((s.f_d - 0.577_350_269_189_625_7).abs() < 1e-15);
        assert_eq!(s.cutoff, 57);
        assert_eq!(s.alpha[57], 1.0);
        let want = 57.0 * 56.0 * 55.0 / (59.0 * 58.0 * 57.0);
        assert!((hyper_alpha_closed(100, 3, 60).unwrap() - want).abs() < 1e-15);
        assert!((s.alpha[59] - want).abs() < 1e-12);
        assert!(hyper_alpha_recursive(10, 1).is_err());
        assert!(hyper_alpha_closed(10, 2, 5).is_err());
        assert_eq!(hyper_alpha_closed(10, 2, 6).unwrap(), 1.0);
    }

    #[test]
    fn coefficient_d2_m10() {
        let c = hyper_coefficient(10, 2).unwrap();
        assert!((c - 0.5 * (1.0 - 4.0 / 9.0)).abs() < 1e-15);
        assert!(hyper_coefficient(4, 3).is_err());
    }

    #[test]
    fn matcher_examples() {
        let h = BipartiteHypergraph::new(1, 2, 2, vec![he(0, &[0, 1], 5.0)]).unwrap();
        assert_eq!(max_weight_hyper_matching(&h, &[0]).unwrap().edges, vec![0]);
        let h = BipartiteHypergraph::new(2, 3, 2, vec![he(0, &[0, 1], 3.0), he(1, &[1, 2], 2.0)]).unwrap();
        let mu = max_weight_hyper_matching(&h, &[0, 1]).unwrap();
        assert_eq!(mu.edges, vec![0]);
        assert_eq!(mu.weight(&h), 3.0);
        assert_eq!(max_weight_hyper_matching(&h, &[1]).unwrap().edges, vec![1]);
        assert!(max_weight_hyper_matching(&h, &[]).unwrap().edges.is_empty());
    }

    #[test]
    fn ties_take_the_smallest_index_edge() {
        let h = BipartiteHypergraph::new(1, 2, 2, vec![he(0, &[0], 1.0), he(0, &[1], 1.0)]).unwrap();
        assert_eq!(max_weight_hyper_matching(&h, &[0]).unwrap().edges, vec![0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BipartiteHypergraph::new(1, 2, 2, vec![he(0, &[0, 0], 1.0)]).is_err());
        assert!(BipartiteHypergraph::new(1, 3, 2, vec![he(0, &[0, 1, 2], 1.0)]).is_err());
        assert!(BipartiteHypergraph::new(1, 2, 2, vec![he(1, &[0], 1.0)]).is_err());
        assert!(BipartiteHypergraph::new(1, 2, 2, vec![he(0, &[0], 0.0)]).is_err());
        assert!(matches!(
            BipartiteHypergraph::new(1, 21, 2, vec![]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn single_vertex_takes_best_edge() {
        let h = BipartiteHypergraph::new(1, 3, 2, vec![he(0, &[0], 1.0), he(0, &[1, 2], 4.0)]).unwrap();
        assert_eq!(exact_expected_value(&h).unwrap(), 4.0);
    }

    #[test]
    fn json_round_trip_and_padding() {
        let h = BipartiteHypergraph::new(2, 3, 2, vec![he(0, &[0, 1], 3.0), he(1, &[2], 2.0)]).unwrap();
        let back = BipartiteHypergraph::from_json_str(&h.to_json_string()).unwrap();
        assert_eq!(back.edges(), h.edges());
        let p = h.pad(8).unwrap();
        assert_eq!(p.m(), 10);
        assert_eq!(optimum_weight(&p), optimum_weight(&h));
    }

    #[test]
    fn embedding_matches_edge_schedule() {
        let g = WeightedGraph::new(4, [(0, 1, 2.0), (1, 2, 1.0), (2, 3, 3.0)]).unwrap();
        let inst = EdgeInstance::new(g).unwrap();
        let h = BipartiteHypergraph::from_edge_instance(&inst).unwrap();
        assert_eq!(h.alpha_schedule().alpha, crate::edge::alpha_recursive(3));
        assert_eq!(
            exact_expected_value(&h).unwrap().to_bits(),
            crate::edge::exact_expected_value(&inst).unwrap().to_bits()
        );
    }
}
