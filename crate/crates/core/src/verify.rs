//! Fast invariant suites behind `secmatch verify`. Each check is small
//! enough to run in a second or two; the thorough versions live in the
//! test suite.

use rand::Rng;
use serde::Serialize;

use crate::arrival::{enumerate_exact, ExactOracle};
use crate::edge::{
    alpha_closed, alpha_recursive, exact_expected_value, telescoping_coefficient, EdgeInstance,
};
use crate::error::Result;
use crate::graph::{max_weight_matching, VertexSubset, WeightedGraph};
use crate::hyper::{hyper_alpha_closed, hyper_alpha_recursive, hyper_coefficient};
use crate::ordinal::{best_binary_policies, is_threshold, objective, threshold_value, OrdinalPolicy};
use crate::stats::{stream_rng, Stream};
use crate::vertex::{p_closed, p_recursive};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const SUITES: [&str; 5] = ["graph", "vertex", "edge", "hyper", "ordinal"];

/// Run the named suites (all of them when `only` is empty).
pub fn run_suites(only: &[String], seed: u64) -> Result<Vec<CheckOutcome>> {
    if let Some(bad) = only.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(crate::Error::input(format!(
            "unknown suite '{bad}' (expected one of {})",
            SUITES.join(", ")
        )));
    }
    let mut out = Vec::new();
    for suite in SUITES {
        if !only.is_empty() && !only.iter().any(|s| s == suite) {
            continue;
        }
        match suite {
            "graph" => graph_suite(seed, &mut out)?,
            "vertex" => vertex_suite(&mut out)?,
            "edge" => edge_suite(seed, &mut out)?,
            "hyper" => hyper_suite(&mut out)?,
            _ => ordinal_suite(&mut out)?,
        }
    }
    Ok(out)
}

fn push(out: &mut Vec<CheckOutcome>, suite: &'static str, check: &'static str, failure: Option<String>) {
    out.push(CheckOutcome {
        suite,
        check,
        passed: failure.is_none(),
        detail: failure.unwrap_or_default(),
    });
}

fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v, rng.gen_range(0.0..1.0)));
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// Best matching weight by recursion on the lowest free vertex.
fn brute_matching(g: &WeightedGraph, free: &mut Vec<bool>) -> f64 {
    let Some(u) = free.iter().position(|&f| f) else {
        return 0.0;
    };
    free[u] = false;
    let mut best = brute_matching(g, free);
    for v in u + 1..free.len() {
        if free[v] && g.weight(u, v) > 0.0 {
            free[v] = false;
            best = best.max(g.weight(u, v) + brute_matching(g, free));
            free[v] = true;
        }
    }
    free[u] = true;
    best
}

fn graph_suite(seed: u64, out: &mut Vec<CheckOutcome>) -> Result<()> {
    let mut fail = None;
    for i in 0..200 {
        let mut rng = stream_rng(seed, i, Stream::Instance);
        let n = rng.gen_range(1..=8);
        let g = random_graph(n, 0.6, &mut rng)?;
        let got = max_weight_matching(&g, &VertexSubset::all(n))?.weight(&g);
        let want = brute_matching(&g, &mut vec![true; n]);
        if (got - want).abs() > 1e-9 {
            fail = Some(format!("instance {i}: matcher {got}, brute force {want}"));
            break;
        }
    }
    push(out, "graph", "max-weight matching equals brute force", fail);
    Ok(())
}

fn vertex_suite(out: &mut Vec<CheckOutcome>) -> Result<()> {
    let mut fail = None;
    'outer: for t in 3..=200 {
        for k in 3..=t {
            let (a, b) = (p_recursive(k, t)?, p_closed(k, t)?);
            if (a - b).abs() > 1e-12 {
                fail = Some(format!("p({k},{t}): recursion {a}, closed form {b}"));
                break 'outer;
            }
        }
    }
    push(out, "vertex", "p(k,t) closed form equals recursion", fail);
    Ok(())
}

fn edge_suite(seed: u64, out: &mut Vec<CheckOutcome>) -> Result<()> {
    let mut fail = None;
    for m in 1..=300 {
        let rec = alpha_recursive(m);
        for t in m / 2 + 1..=m {
            let c = alpha_closed(m, t)?;
            if (rec[t - 1] - c).abs() > 1e-12 {
                fail = Some(format!(
                    "alpha(m={m}, t={t}): recursion {}, closed form {c}",
                    rec[t - 1]
                ));
            }
        }
    }
    push(out, "edge", "alpha closed form equals recursion", fail);

    let fail = (4..=10_000)
        .map(|m| (m, telescoping_coefficient(m)))
        .find(|(_, c)| !matches!(c, Ok(c) if *c > 0.25))
        .map(|(m, c)| format!("m = {m}: {c:?}"));
    push(out, "edge", "telescoping coefficient above 1/4", fail);

    let mut avail = None;
    let mut ratio = None;
    for i in 0..30 {
        let mut rng = stream_rng(seed, 1000 + i, Stream::Instance);
        let n = rng.gen_range(3..=5);
        let inst = EdgeInstance::new(random_graph(n, 0.7, &mut rng)?)?;
        if inst.m() == 0 || inst.m() > 7 {
            continue;
        }
        let oracle = ExactOracle::build(&inst)?;
        let en = enumerate_exact(&inst, &oracle)?;
        if en.min_slack < -1e-12 && avail.is_none() {
            avail = Some(format!("instance {i}: x - alpha = {}", en.min_slack));
        }
        let (alg, opt) = (exact_expected_value(&inst)?, inst.optimum_weight());
        if alg < opt / 4.0 - 1e-12 && ratio.is_none() {
            ratio = Some(format!("instance {i}: E[ALG] = {alg}, OPT = {opt}"));
        }
    }
    push(out, "edge", "availability never below alpha", avail);
    push(out, "edge", "expected value at least OPT/4", ratio);
    Ok(())
}

fn hyper_suite(out: &mut Vec<CheckOutcome>) -> Result<()> {
    let mut fail = None;
    for d in 2..=4 {
        for m in [20, 50, 200, 500] {
            let s = hyper_alpha_recursive(m, d)?;
            for t in s.cutoff + 1..=m {
                let c = hyper_alpha_closed(m, d, t)?;
                if (s.alpha[t - 1] - c).abs() > 1e-12 {
                    fail = Some(format!(
                        "d={d} m={m} t={t}: recursion {}, closed form {c}",
                        s.alpha[t - 1]
                    ));
                }
            }
        }
    }
    push(out, "hyper", "alpha closed form equals recursion", fail);

    let mut fail = None;
    'outer: for d in 2..=6 {
        let bound = (d as f64).powf(-(d as f64) / (d as f64 - 1.0));
        for m in 20..=2000 {
            let c = hyper_coefficient(m, d)?;
            if c < bound {
                fail = Some(format!("d={d} m={m}: {c} < {bound}"));
                break 'outer;
            }
        }
    }
    push(out, "hyper", "coefficient at least d^(-d/(d-1))", fail);
    Ok(())
}

fn ordinal_suite(out: &mut Vec<CheckOutcome>) -> Result<()> {
    let mut fail = None;
    'outer: for n in 3..=40 {
        for l in 1..=n {
            let (a, b) = (
                threshold_value(n, l)?,
                objective(&OrdinalPolicy::threshold(n, l)?),
            );
            if (a - b).abs() > 1e-12 {
                fail = Some(format!("n={n} l={l}: closed form {a}, recursion {b}"));
                break 'outer;
            }
        }
    }
    push(
        out,
        "ordinal",
        "threshold value closed form equals recursion",
        fail,
    );

    let mut fail = None;
    for n in 2..=7 {
        let (_, winners) = best_binary_policies(n)?;
        if !winners.iter().any(|c| is_threshold(c)) {
            fail = Some(format!("n = {n}: no threshold policy among {winners:?}"));
            break;
        }
    }
    push(
        out,
        "ordinal",
        "a threshold policy is optimal among 0/1 policies",
        fail,
    );
    Ok(())
}
