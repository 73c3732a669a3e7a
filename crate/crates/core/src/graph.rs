//! Weighted general graphs, exact and greedy matchings, and the zero-weight
//! completion that makes every even vertex set perfectly matchable.
//!
//! Absent pairs have weight 0. Only positive-weight edges are stored in the
//! adjacency lists; a maximum matching is computed on the positive part and
//! the remaining vertices of the subset are then paired up with zero-weight
//! edges in ascending id order.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blossom;
use crate::error::{Error, Result};

/// Fixed-point resolution used by the exact solver: the heaviest edge of a
/// graph maps to this many units.
const FIXED_POINT_UNITS: f64 = (1u64 << 40) as f64;

/// Neighbours kept per vertex in the first sparse solve before the dual
/// certificate is checked against the full induced subgraph.
const CANDIDATES_PER_VERTEX: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Neighbor {
    pub v: u32,
    pub w: f64,
    pub wi: i64,
}

/// Undirected graph on `0..n` with nonnegative weights; absent pairs weigh 0.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    weights: HashMap<(u32, u32), f64>,
    /// positive-weight neighbours, heaviest first, ties by id
    adj: Vec<Vec<Neighbor>>,
    /// positive-weight edges, heaviest first, ties lexicographic
    by_weight: Vec<(usize, usize, f64)>,
    support: Vec<usize>,
    scale: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Build a graph from `(u, v, w)` triples. Self-loops, duplicate pairs,
    /// out-of-range ids and negative or non-finite weights are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("graph must have at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(Error::input("too many vertices"));
        }
        let mut weights = HashMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) has weight {w}; weights must be finite and nonnegative"
                )));
            }
            let key = (u.min(v) as u32, u.max(v) as u32);
            if weights.insert(key, w).is_some() {
                return Err(Error::input(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
        }
        Ok(Self::from_map(n, weights))
    }

    fn from_map(n: usize, weights: HashMap<(u32, u32), f64>) -> Self {
        let max_w = weights.values().copied().fold(0.0_f64, f64::max);
        let scale = if max_w > 0.0 {
            FIXED_POINT_UNITS / max_w
        } else {
            1.0
        };
        let mut adj = vec![Vec::new(); n];
        let mut by_weight = Vec::new();
        for (&(u, v), &w) in &weights {
            if w > 0.0 {
                let wi = (w * scale).round() as i64;
                adj[u as usize].push(Neighbor { v, w, wi });
                adj[v as usize].push(Neighbor { v: u, w, wi });
                by_weight.push((u as usize, v as usize, w));
            }
        }
        for list in &mut adj {
            list.sort_by(|a, b| b.w.total_cmp(&a.w).then(a.v.cmp(&b.v)));
        }
        by_weight.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        let support = (0..n).filter(|&v| !adj[v].is_empty()).collect();
        WeightedGraph {
            n,
            weights,
            adj,
            by_weight,
            support,
            scale,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of the pair `{u, v}`; 0 when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.weights.get(&key).copied().unwrap_or(0.0)
    }

    /// All stored pairs (including explicit zero weights), sorted by `(u, v)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<_> = self
            .weights
            .iter()
            .map(|(&(u, v), &w)| (u as usize, v as usize, w))
            .collect();
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    /// Positive-weight edges, heaviest first.
    pub fn positive_edges(&self) -> &[(usize, usize, f64)] {
        &self.by_weight
    }

    /// Vertices with at least one positive-weight edge, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub(crate) fn neighbors(&self, v: usize) -> &[Neighbor] {
        &self.adj[v]
    }

    pub(crate) fn fixed_point_scale(&self) -> f64 {
        self.scale
    }

    /// Copy of this graph with `extra` isolated vertices appended.
    pub fn with_extra_vertices(&self, extra: usize) -> Self {
        Self::from_map(self.n + extra, self.weights.clone())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s)?;
        Self::new(file.n, file.edges)
    }

    pub fn to_json_string(&self) -> String {
        let file = GraphFile {
            n: self.n,
            edges: self.edges(),
        };
        serde_json::to_string(&file).expect("graph serializes")
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }
}

/// An ordered list of distinct vertex ids of some graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSubset(Vec<usize>);

impl VertexSubset {
    pub fn new(ids: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &v in &ids {
            if v >= n {
                return Err(Error::input(format!("vertex {v} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::input(format!("vertex {v} listed twice")));
            }
        }
        Ok(VertexSubset(ids))
    }

    pub fn all(n: usize) -> Self {
        VertexSubset((0..n).collect())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }
}

/// A set of vertex-disjoint pairs, stored sorted with `u < v` in each pair.
/// Serializes as a bare list of `[u, v]` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct Matching {
    edges: Vec<(usize, usize)>,
    mate: BTreeMap<usize, usize>,
}

impl TryFrom<Vec<(usize, usize)>> for Matching {
    type Error = Error;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self> {
        Matching::from_pairs(pairs)
    }
}

impl From<Matching> for Vec<(usize, usize)> {
    fn from(m: Matching) -> Self {
        m.edges
    }
}

impl Matching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from arbitrary pairs; fails if two pairs share a vertex.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut m = Matching::empty();
        for (u, v) in pairs {
            m.insert(u, v)?;
        }
        Ok(m)
    }

    pub(crate) fn insert(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::input(format!("pair ({u}, {u}) is a self-loop")));
        }
        if self.mate.contains_key(&u) || self.mate.contains_key(&v) {
            return Err(Error::input(format!("pair ({u}, {v}) overlaps the matching")));
        }
        self.mate.insert(u, v);
        self.mate.insert(v, u);
        let e = (u.min(v), u.max(v));
        let pos = self.edges.binary_search(&e).unwrap_err();
        self.edges.insert(pos, e);
        Ok(())
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn partner(&self, v: usize) -> Option<usize> {
        self.mate.get(&v).copied()
    }

    pub fn is_matched(&self, v: usize) -> bool {
        self.mate.contains_key(&v)
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.partner(u) == Some(v)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Total weight, summed in sorted edge order.
    pub fn weight(&self, g: &WeightedGraph) -> f64 {
        matching_weight(self, g)
    }
}

/// Sum of `w_e` over the matching, accumulated in sorted edge order so the
/// result is bit-identical for equal matchings.
pub fn matching_weight(mu: &Matching, g: &WeightedGraph) -> f64 {
    mu.edges.iter().map(|&(u, v)| g.weight(u, v)).sum()
}

/// Edges of `mu` with both endpoints in `subset`.
pub fn restrict_matching(mu: &Matching, subset: &VertexSubset) -> Matching {
    let keep: std::collections::HashSet<usize> = subset.ids().iter().copied().collect();
    Matching::from_pairs(
        mu.edges
            .iter()
            .copied()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v)),
    )
    .expect("subset of a matching is a matching")
}

/// Seed for a warm solve: doubled vertex duals and tight matched edges.
type WarmSeed = (Vec<i64>, Vec<(usize, usize, i64)>);

/// Most vertices a warm solve may add relative to the previous one; beyond
/// this a cold start is cheaper than seeding the duals.
const MAX_WARM_NEW: usize = 4;

/// Reusable buffers for repeated solves on one graph. Also keeps the last
/// certified optimum (flattened duals and tight matched pairs, by global
/// id) so the next solve on a nearby vertex set can start from it.
#[derive(Debug)]
pub(crate) struct MatchScratch {
    local: Vec<u32>,
    member: Vec<bool>,
    members: Vec<usize>,
    dual: Vec<i64>,
    mate: Vec<(u32, i64)>,
}

impl MatchScratch {
    pub fn new(n: usize) -> Self {
        MatchScratch {
            local: vec![u32::MAX; n],
            member: vec![false; n],
            members: Vec::new(),
            dual: vec![0; n],
            mate: vec![(u32::MAX, 0); n],
        }
    }

    /// Duals and matched candidate edges for a warm start on `verts`, or
    /// `None` if too much changed. Duals of new vertices are raised just
    /// enough to cover every edge into the known part.
    fn warm_seed(&self, g: &WeightedGraph, verts: &[usize], in_set: &[bool]) -> Option<WarmSeed> {
        let fresh = verts.iter().filter(|&&v| !self.member[v]).count();
        if self.members.is_empty() || fresh > MAX_WARM_NEW {
            return None;
        }
        let mut known: Vec<bool> = verts.iter().map(|&v| self.member[v]).collect();
        let mut duals: Vec<i64> = verts
            .iter()
            .map(|&v| if self.member[v] { self.dual[v] } else { 0 })
            .collect();
        let mut pairs = Vec::new();
        for (i, &v) in verts.iter().enumerate() {
            if !known[i] {
                let mut best = 0;
                for nb in &g.adj[v] {
                    if 2 * nb.wi <= best {
                        break;
                    }
                    let u = nb.v as usize;
                    if in_set[u] {
                        let j = self.local[u] as usize;
                        if known[j] {
                            best = best.max(2 * nb.wi - duals[j]);
                        }
                    }
                }
                duals[i] = best;
                known[i] = true;
            } else {
                let (m, w) = self.mate[v];
                if m != u32::MAX && v < m as usize && in_set[m as usize] && self.member[m as usize] {
                    let j = self.local[m as usize];
                    if j != u32::MAX {
                        pairs.push((i, j as usize, w));
                    }
                }
            }
        }
        Some((duals, pairs))
    }

    fn remember(&mut self, verts: &[usize], duals: &[i64], pairs: &[(usize, usize, i64)]) {
        for &v in &self.members {
            self.member[v] = false;
            self.mate[v] = (u32::MAX, 0);
        }
        self.members.clear();
        for (i, &v) in verts.iter().enumerate() {
            self.member[v] = true;
            self.members.push(v);
            self.dual[v] = duals[i];
        }
        for &(i, j, w) in pairs {
            self.mate[verts[i]] = (verts[j] as u32, w);
            self.mate[verts[j]] = (verts[i] as u32, w);
        }
    }
}

/// Maximum-weight matching on the positive edges among `verts`.
///
/// `verts` must be ascending and `in_set[v]` must be true exactly for the
/// members of the induced vertex set (which may contain vertices outside
/// `verts` that have no positive edges into the set). The solver starts from
/// a sparse candidate subgraph and adds every edge whose reduced cost under
/// the returned duals is negative, until the certificate covers all edges.
/// When the previous call on the same scratch saw a nearby vertex set, its
/// optimum seeds the duals.
pub(crate) fn positive_matching(
    g: &WeightedGraph,
    verts: &[usize],
    in_set: &[bool],
    scratch: &mut MatchScratch,
) -> Vec<(usize, usize)> {
    if verts.len() < 2 {
        scratch.remember(&[], &[], &[]);
        return Vec::new();
    }
    for (i, &v) in verts.iter().enumerate() {
        scratch.local[v] = i as u32;
    }
    let seed = scratch.warm_seed(g, verts, in_set);
    let mut cand: Vec<(usize, usize, i64)> = Vec::new();
    for (i, &v) in verts.iter().enumerate() {
        let mut taken = 0;
        for nb in &g.adj[v] {
            if taken == CANDIDATES_PER_VERTEX {
                break;
            }
            if in_set[nb.v as usize] {
                let j = scratch.local[nb.v as usize] as usize;
                cand.push((i.min(j), i.max(j), nb.wi));
                taken += 1;
            }
        }
    }
    if let Some((_, pairs)) = &seed {
        cand.extend(pairs.iter().copied());
    }
    cand.sort_unstable();
    cand.dedup();
    let index_of = |cand: &[(usize, usize, i64)], e: &(usize, usize, i64)| {
        cand.binary_search(e).expect("pair is a candidate")
    };

    let (all_pairs, (duals, pairs)) = loop {
        // the seed duals cover every edge, so retries can reuse them
        let sol = match &seed {
            Some((duals, pairs)) => {
                let matched: Vec<usize> = pairs.iter().map(|e| index_of(&cand, e)).collect();
                blossom::solve_warm(verts.len(), &cand, duals, &matched)
            }
            None => blossom::solve(verts.len(), &cand),
        };
        let min_dual = sol.min_vertex_dual();
        let mut missing = Vec::new();
        for (i, &v) in verts.iter().enumerate() {
            let dv = sol.vertex_dual(i);
            for nb in &g.adj[v] {
                if 2 * nb.wi <= dv + min_dual {
                    break;
                }
                let u = nb.v as usize;
                if !in_set[u] {
                    continue;
                }
                let j = scratch.local[u] as usize;
                if j <= i {
                    continue;
                }
                if sol.reduced_cost2(i, j, nb.wi) < 0 {
                    missing.push((i, j, nb.wi));
                }
            }
        }
        if missing.is_empty() {
            break (sol.pairs(), sol.flatten());
        }
        cand.extend(missing);
        cand.sort_unstable();
        cand.dedup();
    };

    let weighted: Vec<(usize, usize, i64)> = pairs
        .iter()
        .map(|&(i, j)| {
            let k = cand.partition_point(|e| (e.0, e.1) < (i, j));
            cand[k]
        })
        .collect();
    scratch.remember(verts, &duals, &weighted);
    for &v in verts {
        scratch.local[v] = u32::MAX;
    }
    all_pairs.into_iter().map(|(i, j)| (verts[i], verts[j])).collect()
}

fn subset_mask(g: &WeightedGraph, subset: &VertexSubset) -> Vec<bool> {
    let mut in_set = vec![false; g.n()];
    for &v in subset.ids() {
        in_set[v] = true;
    }
    in_set
}

/// Complete `pairs` to a perfect matching of `subset` (minus one vertex when
/// its size is odd) by pairing the leftover vertices in ascending id order.
fn pad(subset: &VertexSubset, pairs: Vec<(usize, usize)>) -> Matching {
    let mut mu = Matching::from_pairs(pairs).expect("solver returns a matching");
    let mut rest: Vec<usize> = subset
        .ids()
        .iter()
        .copied()
        .filter(|&v| !mu.is_matched(v))
        .collect();
    rest.sort_unstable();
    for pair in rest.chunks_exact(2) {
        mu.insert(pair[0], pair[1]).expect("leftovers are unmatched");
    }
    mu
}

fn check_subset(g: &WeightedGraph, subset: &VertexSubset) -> Result<()> {
    if let Some(&v) = subset.ids().iter().find(|&&v| v >= g.n()) {
        return Err(Error::input(format!("vertex {v} out of range for n = {}", g.n())));
    }
    Ok(())
}

/// Maximum-weight matching of the subgraph induced by `subset`, completed to
/// a perfect matching with zero-weight pairs when `|subset|` is even.
pub fn max_weight_matching(g: &WeightedGraph, subset: &VertexSubset) -> Result<Matching> {
    check_subset(g, subset)?;
    let in_set = subset_mask(g, subset);
    let mut verts: Vec<usize> = subset
        .ids()
        .iter()
        .copied()
        .filter(|&v| !g.adj[v].is_empty())
        .collect();
    verts.sort_unstable();
    let mut scratch = MatchScratch::new(g.n());
    let pairs = positive_matching(g, &verts, &in_set, &mut scratch);
    Ok(pad(subset, pairs))
}

/// Greedy matching: repeatedly take the heaviest remaining edge with both
/// endpoints free, then pad with zero-weight pairs. Weight is at least half
/// the optimum.
pub fn greedy_matching(g: &WeightedGraph, subset: &VertexSubset) -> Result<Matching> {
    check_subset(g, subset)?;
    let in_set = subset_mask(g, subset);
    let mut used = vec![false; g.n()];
    Ok(pad(subset, greedy_pairs(g, &in_set, &mut used)))
}

/// Greedy positive part; `used` must be all false on entry for the subset's
/// vertices and is left marking the matched ones.
pub(crate) fn greedy_pairs(g: &WeightedGraph, in_set: &[bool], used: &mut [bool]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for &(u, v, _) in &g.by_weight {
        if in_set[u] && in_set[v] && !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            pairs.push((u, v));
        }
    }
    pairs
}

/// Maximum-weight matching over an explicit edge list (no completion).
/// Returns indices into `edges` of the chosen edges, ascending. Weights are
/// converted to fixed point with `scale` units per unit weight.
pub fn max_weight_matching_edges(edges: &[(usize, usize, f64)], scale: f64) -> Vec<usize> {
    let mut ids: Vec<usize> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let local = |x: usize| ids.binary_search(&x).unwrap();
    let int_edges: Vec<(usize, usize, i64)> = edges
        .iter()
        .map(|&(u, v, w)| (local(u), local(v), (w * scale).round() as i64))
        .collect();
    let sol = blossom::solve(ids.len(), &int_edges);
    let mut chosen: Vec<usize> = int_edges
        .iter()
        .enumerate()
        .filter(|(_, &(i, j, _))| sol.partner(i) == Some(j))
        .map(|(k, _)| k)
        .collect();
    // parallel edges can both look matched; keep the first
    let mut seen = vec![false; ids.len()];
    chosen.retain(|&k| {
        let (i, j, _) = int_edges[k];
        if seen[i] || seen[j] {
            false
        } else {
            seen[i] = true;
            seen[j] = true;
            true
        }
    });
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> WeightedGraph {
        // 1-based labels of the worked example mapped to 0..4
        WeightedGraph::new(
            4,
            [
                (0, 1, 10.0),
                (2, 3, 10.0),
                (0, 2, 1.0),
                (0, 3, 2.0),
                (1, 2, 3.0),
                (1, 3, 4.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn k4_example() {
        let g = k4();
        let mu = max_weight_matching(&g, &VertexSubset::all(4)).unwrap();
        assert_eq!(mu.edges(), &[(0, 1), (2, 3)]);
        assert_eq!(matching_weight(&mu, &g), 20.0);
    }

    #[test]
    fn single_pair_and_empty_subset() {
        let g = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        let mu = max_weight_matching(&g, &VertexSubset::all(2)).unwrap();
        assert_eq!(mu.edges(), &[(0, 1)]);
        assert_eq!(mu.weight(&g), 5.0);
        let empty = VertexSubset::new(vec![], 2).unwrap();
        let mu = max_weight_matching(&g, &empty).unwrap();
        assert!(mu.is_empty());
        assert_eq!(mu.weight(&g), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WeightedGraph::new(3, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, f64::NAN)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 3, 1.0)]).is_err());
        assert!(VertexSubset::new(vec![0, 0], 3).is_err());
        assert!(VertexSubset::new(vec![5], 3).is_err());
        let g = k4();
        assert!(max_weight_matching(&g, &VertexSubset(vec![7])).is_err());
    }

    #[test]
    fn restrict_examples() {
        let mu = Matching::from_pairs([(0, 1), (2, 3)]).unwrap();
        let t = VertexSubset::new(vec![0, 1, 2], 4).unwrap();
        assert_eq!(restrict_matching(&mu, &t).edges(), &[(0, 1)]);
        let t = VertexSubset::new(vec![0, 2], 4).unwrap();
        assert!(restrict_matching(&mu, &t).is_empty());
        assert!(restrict_matching(&Matching::empty(), &t).is_empty());
    }

    #[test]
    fn matching_rejects_overlap() {
        assert!(Matching::from_pairs([(0, 1), (1, 2)]).is_err());
        let mu = Matching::from_pairs([(3, 1)]).unwrap();
        assert_eq!(mu.partner(1), Some(3));
        assert_eq!(mu.partner(3), Some(1));
        assert_eq!(mu.edges(), &[(1, 3)]);
    }

    #[test]
    fn greedy_examples() {
        let path = WeightedGraph::new(4, [(0, 1, 3.0), (1, 2, 2.0), (2, 3, 3.0)]).unwrap();
        let mu = greedy_matching(&path, &VertexSubset::all(4)).unwrap();
        assert_eq!(mu.edges(), &[(0, 1), (2, 3)]);
        assert_eq!(mu.weight(&path), 6.0);

        let tri = WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let mu = greedy_matching(&tri, &VertexSubset::all(3)).unwrap();
        assert_eq!(mu.edges(), &[(0, 1)]);

        let empty = VertexSubset::new(vec![], 3).unwrap();
        assert!(greedy_matching(&tri, &empty).unwrap().is_empty());
    }

    #[test]
    fn padding_is_perfect_on_even_sets() {
        let g = WeightedGraph::new(6, [(1, 4, 1.0)]).unwrap();
        let mu = max_weight_matching(&g, &VertexSubset::all(6)).unwrap();
        assert_eq!(mu.edges(), &[(0, 2), (1, 4), (3, 5)]);
        let t = VertexSubset::new(vec![5, 0, 3], 6).unwrap();
        let mu = max_weight_matching(&g, &t).unwrap();
        assert_eq!(mu.edges(), &[(0, 3)]);
    }

    #[test]
    fn json_round_trip() {
        let g = k4();
        let back = WeightedGraph::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert!(WeightedGraph::from_json_str(r#"{"n": 2, "edges": [[0, 1, 1.0], [1, 0, 1.0]]}"#).is_err());
        assert!(WeightedGraph::from_json_str(r#"{"n": 2, "edges": [[1, 1, 1.0]]}"#).is_err());
    }

    #[test]
    fn edge_list_matching() {
        let edges = [(10, 11, 2.0), (10, 12, 1.0)];
        assert_eq!(max_weight_matching_edges(&edges, 1e6), vec![0]);
        let edges = [(0, 1, 2.0), (2, 3, 1.0)];
        assert_eq!(max_weight_matching_edges(&edges, 1e6), vec![0, 1]);
        assert!(max_weight_matching_edges(&[], 1.0).is_empty());
    }

    #[test]
    fn warm_solves_track_cold_optimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(6..40);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, rng.gen::<f64>()));
                    }
                }
            }
            let g = WeightedGraph::new(n, edges).unwrap();
            let mut warm = MatchScratch::new(n);
            let mut in_set = vec![false; n];
            for _ in 0..3 * n {
                let v = rng.gen_range(0..n);
                in_set[v] = !in_set[v] || rng.gen_bool(0.3);
                let verts: Vec<usize> = (0..n).filter(|&u| in_set[u] && !g.adj[u].is_empty()).collect();
                let got = positive_matching(&g, &verts, &in_set, &mut warm);
                let want = positive_matching(&g, &verts, &in_set, &mut MatchScratch::new(n));
                let total = |p: &[(usize, usize)]| p.iter().map(|&(a, b)| g.weight(a, b)).sum::<f64>();
                assert!((total(&got) - total(&want)).abs() < 1e-9);
            }
        }
    }
}
