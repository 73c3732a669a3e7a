use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::hyper::{BipartiteHypergraph, HyperEdge};
use crate::ordinal::RankInstance;
use crate::stats::{stream_rng, Stream};

/// Instance families of the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// complete graph, weights U(0, 1)
    UniformComplete,
    /// each pair present with probability `p`, weights U(0, 1)
    SparseRandom,
    /// vertex 0 joined to all others, weights U(0, 1)
    Star,
    /// `n/2` disjoint edges, weights U(0, 1)
    DisjointPairs,
    /// random rank permutation standing in for weights `n^{3(i+j)}`
    HardOrdinal,
    /// random bipartite hypergraph
    HypergraphRandom,
    /// triangle with one unit edge and two zero edges, plus `m_aux`
    /// isolated auxiliary vertices
    PaddedTriangle,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::UniformComplete,
        FamilyKind::SparseRandom,
        FamilyKind::Star,
        FamilyKind::DisjointPairs,
        FamilyKind::HardOrdinal,
        FamilyKind::HypergraphRandom,
        FamilyKind::PaddedTriangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::UniformComplete => "uniform-complete",
            FamilyKind::SparseRandom => "sparse-random",
            FamilyKind::Star => "star",
            FamilyKind::DisjointPairs => "disjoint-pairs",
            FamilyKind::HardOrdinal => "hard-ordinal",
            FamilyKind::HypergraphRandom => "hypergraph-random",
            FamilyKind::PaddedTriangle => "padded-triangle",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::input(format!("unknown family '{s}'")))
    }
}

/// A family with its size parameters. Unused parameters are ignored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceFamily {
    pub kind: FamilyKind,
    /// vertex count (graph families, hard-ordinal)
    pub n: usize,
    /// online vertex count (hypergraph)
    pub m: usize,
    /// offline vertex count (hypergraph)
    pub r: usize,
    /// hyperedge size bound
    pub d: usize,
    /// edge probability (sparse-random)
    pub p: f64,
    /// hyperedges per online vertex (hypergraph)
    pub degree: usize,
    /// auxiliary vertices (padded-triangle)
    pub m_aux: usize,
}

impl InstanceFamily {
    pub fn new(kind: FamilyKind) -> Self {
        InstanceFamily {
            kind,
            n: 10,
            m: 6,
            r: 6,
            d: 2,
            p: 0.3,
            degree: 2,
            m_aux: 0,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::input(format!("{}: {msg}", self.kind)));
        match self.kind {
            FamilyKind::UniformComplete | FamilyKind::Star | FamilyKind::HardOrdinal if self.n < 2 => {
                bad(format!("needs n >= 2, got {}", self.n))
            }
            FamilyKind::SparseRandom if self.n < 2 || !(0.0..=1.0).contains(&self.p) => bad(format!(
                "needs n >= 2 and p in [0, 1], got n = {}, p = {}",
                self.n, self.p
            )),
            FamilyKind::DisjointPairs if self.n < 2 || self.n % 2 == 1 => {
                bad(format!("needs an even n >= 2, got {}", self.n))
            }
            FamilyKind::HypergraphRandom if self.m == 0 || self.r == 0 || self.d < 2 || self.degree == 0 => {
                bad("needs m, r, degree >= 1 and d >= 2".into())
            }
            _ => Ok(()),
        }
    }
}

/// A generated instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Graph(WeightedGraph),
    Ranks(RankInstance),
    Hyper(BipartiteHypergraph),
}

/// Deterministic instance for `(family, seed, index)`; `index` selects one
/// of many instances drawn from the same master seed.
pub fn generate_instance(family: &InstanceFamily, seed: u64, index: u64) -> Result<Instance> {
    family.validate()?;
    let mut rng = stream_rng(seed, index, Stream::Instance);
    let n = family.n;
    let inst = match family.kind {
        FamilyKind::UniformComplete => {
            let mut edges = Vec::with_capacity(n * (n - 1) / 2);
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v, rng.gen::<f64>()));
                }
            }
            Instance::Graph(WeightedGraph::new(n, edges)?)
        }
        FamilyKind::SparseRandom => {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < family.p {
                        edges.push((u, v, rng.gen::<f64>()));
                    }
                }
            }
            Instance::Graph(WeightedGraph::new(n, edges)?)
        }
        FamilyKind::Star => Instance::Graph(WeightedGraph::new(n, (1..n).map(|v| (0, v, rng.gen::<f64>())))?),
        FamilyKind::DisjointPairs => Instance::Graph(WeightedGraph::new(
            n,
            (0..n / 2).map(|i| (2 * i, 2 * i + 1, rng.gen::<f64>())),
        )?),
        FamilyKind::HardOrdinal => {
            let mut ranks: Vec<usize> = (1..=n).collect();
            ranks.shuffle(&mut rng);
            Instance::Ranks(RankInstance::new(ranks)?)
        }
        FamilyKind::HypergraphRandom => {
            let offline: Vec<usize> = (0..family.r).collect();
            let mut edges = Vec::new();
            for v in 0..family.m {
                for _ in 0..family.degree {
                    let size = rng.gen_range(1..=family.d.min(family.r));
                    let mut s: Vec<usize> = offline.choose_multiple(&mut rng, size).copied().collect();
                    s.sort_unstable();
                    edges.push(HyperEdge {
                        v,
                        s,
                        w: rng.gen::<f64>(),
                    });
                }
            }
            Instance::Hyper(BipartiteHypergraph::new(family.m, family.r, family.d, edges)?)
        }
        FamilyKind::PaddedTriangle => {
            let g = WeightedGraph::new(3 + family.m_aux, [(0, 1, 1.0), (1, 2, 0.0), (0, 2, 0.0)])?;
            Instance::Graph(g)
        }
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let fam = InstanceFamily::new(FamilyKind::UniformComplete).with_n(4);
        let (Instance::Graph(a), Instance::Graph(b)) = (
            generate_instance(&fam, 5, 0).unwrap(),
            generate_instance(&fam, 5, 0).unwrap(),
        ) else {
            panic!()
        };
        assert_eq!(a.edges(), b.edges());
        let Instance::Graph(c) = generate_instance(&fam, 5, 1).unwrap() else {
            panic!()
        };
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn disjoint_pairs_shape() {
        let fam = InstanceFamily::new(FamilyKind::DisjointPairs).with_n(6);
        let Instance::Graph(g) = generate_instance(&fam, 1, 0).unwrap() else {
            panic!()
        };
        let e = g.edges();
        assert_eq!(e.len(), 3);
        assert!(e
            .iter()
            .enumerate()
            .all(|(i, &(u, v, _))| u == 2 * i && v == 2 * i + 1));
        assert!(generate_instance(&fam.clone().with_n(5), 1, 0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("nope".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn hypergraph_family_respects_bounds() {
        let mut fam = InstanceFamily::new(FamilyKind::HypergraphRandom);
        fam.d = 3;
        let Instance::Hyper(h) = generate_instance(&fam, 2, 0).unwrap() else {
            panic!()
        };
        assert_eq!(h.edges().len(), fam.m * fam.degree);
        assert!(h.edges().iter().all(|e| !e.s.is_empty() && e.s.len() <= 3));
    }
}
