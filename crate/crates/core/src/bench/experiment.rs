use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::instances::{generate_instance, FamilyKind, Instance, InstanceFamily};
use super::report::ReportRow;
use crate::arrival::{run_arrival, ArrivalModel, ExactOracle, McOracle};
use crate::edge::EdgeInstance;
use crate::error::{Error, Result};
use crate::graph::{max_weight_matching, VertexSubset};
use crate::hyper::{optimum_weight, BipartiteHypergraph};
use crate::ordinal::{one_run, OrdinalPolicy};
use crate::stats::{stream_rng, Estimate, Stream};
use crate::vertex::{run_vertex_algorithm, run_vertex_ordinal_greedy, ArrivalOrder, VertexInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Vertex,
    VertexOrdinalGreedy,
    Edge,
    Hypergraph,
    Ordinal,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Vertex,
        Algorithm::VertexOrdinalGreedy,
        Algorithm::Edge,
        Algorithm::Hypergraph,
        Algorithm::Ordinal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Vertex => "vertex",
            Algorithm::VertexOrdinalGreedy => "vertex-ordinal-greedy",
            Algorithm::Edge => "edge",
            Algorithm::Hypergraph => "hypergraph",
            Algorithm::Ordinal => "ordinal",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::input(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    Exact,
    Mc,
}

impl FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OracleMode::Exact),
            "mc" => Ok(OracleMode::Mc),
            _ => Err(Error::input(format!(
                "unknown oracle '{s}' (expected exact or mc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub family: InstanceFamily,
    /// exploration length (vertex) or threshold (ordinal); defaults to ⌊n/2⌋
    pub k_or_l: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    pub oracle: OracleMode,
    /// Monte Carlo oracle budget for queries made by the run loop
    pub outer_trials: u64,
    /// Monte Carlo oracle budget for nested queries
    pub inner_trials: u64,
    /// draw a fresh instance for every trial instead of one fixed instance
    pub resample: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, family: InstanceFamily, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            algorithm,
            family,
            k_or_l: None,
            trials,
            seed,
            oracle: OracleMode::Exact,
            outer_trials: 1000,
            inner_trials: 200,
            resample: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        let graph_family = !matches!(
            self.family.kind,
            FamilyKind::HardOrdinal | FamilyKind::HypergraphRandom
        );
        let ok = match self.algorithm {
            Algorithm::Vertex | Algorithm::VertexOrdinalGreedy | Algorithm::Edge => graph_family,
            Algorithm::Hypergraph => self.family.kind == FamilyKind::HypergraphRandom,
            Algorithm::Ordinal => self.family.kind == FamilyKind::HardOrdinal,
        };
        if !ok {
            return Err(Error::input(format!(
                "algorithm {} cannot run on family {}",
                self.algorithm, self.family.kind
            )));
        }
        Ok(())
    }
}

/// Aggregated ratio of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEstimate {
    /// `E[ALG]/OPT` for a fixed instance, mean of per-trial ratios otherwise
    pub mean: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
    /// smallest single-trial ratio (resampled runs only)
    pub min_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub estimate: RatioEstimate,
    pub row: ReportRow,
}

/// Per-trial output: algorithm value and offline optimum (the ordinal
/// family scores the top-two indicator against 1).
type Sample = (f64, f64);

/// Run an experiment. Trials run in parallel with streams derived from
/// `(seed, trial)`; samples are reduced in trial order, so results do not
/// depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let fixed = if cfg.resample {
        None
    } else {
        Some(Prepared::new(cfg, generate_instance(&cfg.family, cfg.seed, 0)?)?)
    };
    let samples: Vec<Sample> = match (&fixed, cfg.oracle, cfg.algorithm) {
        // the Monte Carlo oracle carries a cache; trials share it in order
        (Some(p), OracleMode::Mc, Algorithm::Edge | Algorithm::Hypergraph) => {
            let mut out = Vec::with_capacity(cfg.trials as usize);
            let mut oracle = p.mc_oracle(cfg)?;
            for i in 0..cfg.trials {
                out.push(p.trial_mc(i, cfg, &mut oracle).map_err(|e| wrap(i, e))?);
            }
            out
        }
        _ => (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let res = match &fixed {
                    Some(p) => p.trial(i, cfg),
                    None => generate_instance(&cfg.family, cfg.seed, i)
                        .and_then(|inst| Prepared::new(cfg, inst))
                        .and_then(|p| p.trial(i, cfg)),
                };
                res.map_err(|e| wrap(i, e))
            })
            .collect::<Result<_>>()?,
    };
    let estimate = aggregate(&samples, cfg.resample);
    let row = ReportRow::new(cfg, fixed.as_ref().map(|p| p.shape()), &estimate);
    Ok(ExperimentResult { estimate, row })
}

fn wrap(trial: u64, e: Error) -> Error {
    Error::Trial {
        trial,
        source: Box::new(e),
    }
}

fn ratio(alg: f64, opt: f64) -> f64 {
    // an instance without positive weight is solved by anything
    if opt > 0.0 {
        alg / opt
    } else {
        1.0
    }
}

fn aggregate(samples: &[Sample], resample: bool) -> RatioEstimate {
    let (est, min_ratio) = if resample {
        let ratios: Vec<f64> = samples.iter().map(|&(a, o)| ratio(a, o)).collect();
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        (Estimate::from_samples(&ratios), Some(min))
    } else {
        let opt = samples.first().map_or(0.0, |s| s.1);
        let algs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let e = Estimate::from_samples(&algs);
        let scaled = if opt > 0.0 {
            Estimate {
                mean: e.mean / opt,
                stderr: e.stderr / opt,
                trials: e.trials,
            }
        } else {
            Estimate {
                mean: 1.0,
                stderr: 0.0,
                trials: e.trials,
            }
        };
        (scaled, None)
    };
    let (ci_lo, ci_hi) = est.ci95();
    RatioEstimate {
        mean: est.mean,
        stderr: est.stderr,
        ci_lo,
        ci_hi,
        trials: est.trials,
        min_ratio,
    }
}

/// Sizes reported in the CSV row.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Shape {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k_or_l: usize,
}

/// An instance with everything that is shared across its trials.
enum Prepared {
    Vertex {
        inst: VertexInstance,
        opt: f64,
        k: usize,
    },
    Edge {
        inst: EdgeInstance,
        oracle: Option<ExactOracle>,
        opt: f64,
    },
    Hyper {
        inst: BipartiteHypergraph,
        oracle: Option<ExactOracle>,
        opt: f64,
    },
    Ordinal {
        policy: OrdinalPolicy,
        l: usize,
    },
}

impl Prepared {
    fn new(cfg: &ExperimentConfig, inst: Instance) -> Result<Self> {
        let exact = cfg.oracle == OracleMode::Exact;
        Ok(match (cfg.algorithm, inst) {
            (Algorithm::Vertex | Algorithm::VertexOrdinalGreedy, Instance::Graph(g)) => {
                let n = g.n();
                let k = cfg.k_or_l.unwrap_or(n / 2);
                if k > n {
                    return Err(Error::input(format!("k = {k} exceeds n = {n}")));
                }
                let opt = max_weight_matching(&g, &VertexSubset::all(n))?.weight(&g);
                Prepared::Vertex {
                    inst: VertexInstance::new(g),
                    opt,
                    k,
                }
            }
            (Algorithm::Edge, Instance::Graph(g)) => {
                let inst = EdgeInstance::new(g)?;
                let oracle = if exact {
                    Some(ExactOracle::build(&inst)?)
                } else {
                    None
                };
                let opt = inst.optimum_weight();
                Prepared::Edge { inst, oracle, opt }
            }
            (Algorithm::Hypergraph, Instance::Hyper(h)) => {
                let oracle = if exact {
                    Some(ExactOracle::build(&h)?)
                } else {
                    None
                };
                let opt = optimum_weight(&h);
                Prepared::Hyper { inst: h, oracle, opt }
            }
            (Algorithm::Ordinal, Instance::Ranks(r)) => {
                let n = r.n();
                let l = cfg.k_or_l.unwrap_or(n / 2).max(1);
                Prepared::Ordinal {
                    policy: OrdinalPolicy::threshold(n, l)?,
                    l,
                }
            }
            _ => return Err(Error::input("instance does not fit the algorithm")),
        })
    }

    fn shape(&self) -> Shape {
        match self {
            Prepared::Vertex { inst, k, .. } => Shape {
                n: inst.n(),
                m: inst.graph.positive_edges().len(),
                d: 2,
                k_or_l: *k,
            },
            Prepared::Edge { inst, .. } => Shape {
                n: inst.graph().n(),
                m: inst.m(),
                d: 2,
                k_or_l: inst.cutoff(),
            },
            Prepared::Hyper { inst, .. } => Shape {
                n: inst.r(),
                m: inst.m(),
                d: inst.d(),
                k_or_l: inst.cutoff(),
            },
            Prepared::Ordinal { policy, l } => Shape {
                n: policy.n(),
                m: 0,
                d: 2,
                k_or_l: *l,
            },
        }
    }

    fn trial(&self, i: u64, cfg: &ExperimentConfig) -> Result<Sample> {
        let mut order_rng = stream_rng(cfg.seed, i, Stream::Order);
        let mut coins = stream_rng(cfg.seed, i, Stream::Coins);
        match self {
            Prepared::Vertex { inst, opt, k } => {
                let order = ArrivalOrder::random(inst.n(), &mut order_rng);
                let trace = if cfg.algorithm == Algorithm::Vertex {
                    run_vertex_algorithm(inst, &order, *k, &mut coins)?
                } else {
                    run_vertex_ordinal_greedy(inst, &order, *k, &mut coins)?
                };
                Ok((trace.matching.weight(&inst.graph), *opt))
            }
            Prepared::Edge { inst, oracle, opt } => {
                let order = random_items(inst.m(), &mut order_rng);
                let weight = match oracle.as_ref() {
                    Some(mut o) => run_arrival(inst, &order, &mut o, &mut coins)?.weight,
                    None => {
                        let mut o = McOracle::new(inst, cfg.outer_trials, cfg.inner_trials, cfg.seed ^ i)?;
                        run_arrival(inst, &order, &mut o, &mut coins)?.weight
                    }
                };
                Ok((weight, *opt))
            }
            Prepared::Hyper { inst, oracle, opt } => {
                let order = random_items(inst.m(), &mut order_rng);
                let weight = match oracle.as_ref() {
                    Some(mut o) => run_arrival(inst, &order, &mut o, &mut coins)?.weight,
                    None => {
                        let mut o = McOracle::new(inst, cfg.outer_trials, cfg.inner_trials, cfg.seed ^ i)?;
                        run_arrival(inst, &order, &mut o, &mut coins)?.weight
                    }
                };
                Ok((weight, *opt))
            }
            Prepared::Ordinal { policy, .. } => {
                let (hit, _) = one_run(policy, &mut order_rng, &mut coins);
                Ok((hit as u8 as f64, 1.0))
            }
        }
    }

    fn mc_oracle<'a>(&'a self, cfg: &ExperimentConfig) -> Result<McOracle<'a, dyn ArrivalModel + 'a>> {
        let model: &dyn ArrivalModel = match self {
            Prepared::Edge { inst, .. } => inst,
            Prepared::Hyper { inst, .. } => inst,
            _ => {
                return Err(Error::input(
                    "Monte Carlo oracle applies to edge and hypergraph runs",
                ))
            }
        };
        McOracle::new(model, cfg.outer_trials, cfg.inner_trials, cfg.seed)
    }

    fn trial_mc(
        &self,
        i: u64,
        cfg: &ExperimentConfig,
        oracle: &mut McOracle<'_, dyn ArrivalModel + '_>,
    ) -> Result<Sample> {
        let mut order_rng = stream_rng(cfg.seed, i, Stream::Order);
        let mut coins = stream_rng(cfg.seed, i, Stream::Coins);
        let (model, opt): (&dyn ArrivalModel, f64) = match self {
            Prepared::Edge { inst, opt, .. } => (inst, *opt),
            Prepared::Hyper { inst, opt, .. } => (inst, *opt),
            _ => unreachable!("checked when the oracle was built"),
        };
        let order = random_items(model.horizon(), &mut order_rng);
        Ok((run_arrival(model, &order, oracle, &mut coins)?.weight, opt))
    }
}

fn random_items<R: rand::Rng>(m: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..m).collect();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_ratio_is_one() {
        let fam = InstanceFamily::new(FamilyKind::DisjointPairs).with_n(2);
        for alg in [Algorithm::Edge, Algorithm::Vertex] {
            let cfg = ExperimentConfig::new(alg, fam.clone(), 50, 3);
            let r = run_experiment(&cfg).unwrap();
            assert_eq!(r.estimate.mean, 1.0);
            assert_eq!(r.estimate.stderr, 0.0);
        }
    }

    #[test]
    fn mismatched_family_is_rejected() {
        let fam = InstanceFamily::new(FamilyKind::HardOrdinal);
        let cfg = ExperimentConfig::new(Algorithm::Edge, fam, 5, 1);
        assert!(run_experiment(&cfg).unwrap_err().is_input());
    }

    #[test]
    fn capacity_errors_carry_the_trial() {
        let fam = InstanceFamily::new(FamilyKind::UniformComplete).with_n(8);
        let mut cfg = ExperimentConfig::new(Algorithm::Edge, fam, 3, 1);
        cfg.resample = true;
        match run_experiment(&cfg) {
            Err(Error::Trial { source, .. }) => assert!(matches!(*source, Error::Capacity { .. })),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mc_oracle_runs_on_small_instances() {
        let mut fam = InstanceFamily::new(FamilyKind::SparseRandom).with_n(5);
        fam.p = 0.6;
        let mut cfg = ExperimentConfig::new(Algorithm::Edge, fam, 20, 4);
        cfg.oracle = OracleMode::Mc;
        cfg.outer_trials = 200;
        cfg.inner_trials = 50;
        let r = run_experiment(&cfg).unwrap();
        assert!((0.0..=1.0).contains(&r.estimate.mean));
    }
}
