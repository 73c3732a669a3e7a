//! Closed-form tables next to their recursive definitions.

use std::io::Write;

use crate::edge::{alpha_closed, alpha_recursive};
use crate::error::{Error, Result};
use crate::hyper::{hyper_alpha_closed, hyper_alpha_recursive};
use crate::ordinal::{optimal_threshold, threshold_value};
use crate::vertex::{p_closed, p_recursive};

/// A CSV-ready table of formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Empty cell where the closed form is undefined.
fn cell(v: Result<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `p(k, t)` for `t ∈ [k, t_max]`.
pub fn p_table(k: usize, t_max: usize) -> Result<Table> {
    if k == 0 || t_max < k {
        return Err(Error::input(format!(
            "need 1 <= k <= t_max, got k = {k}, t_max = {t_max}"
        )));
    }
    let mut t = Table::new(&["k", "t", "p_recursive", "p_closed"]);
    for step in k..=t_max {
        t.rows.push(vec![
            k.to_string(),
            step.to_string(),
            p_recursive(k, step)?.to_string(),
            cell(p_closed(k, step)),
        ]);
    }
    Ok(t)
}

/// Edge-arrival `α_t` for `t ∈ [1, m]`.
pub fn edge_alpha_table(m: usize) -> Result<Table> {
    if m == 0 {
        return Err(Error::input("m must be at least 1"));
    }
    let rec = alpha_recursive(m);
    let mut t = Table::new(&["m", "t", "alpha_recursive", "alpha_closed"]);
    for step in 1..=m {
        let closed = if step <= m / 2 {
            Ok(0.0)
        } else {
            alpha_closed(m, step)
        };
        t.rows.push(vec![
            m.to_string(),
            step.to_string(),
            rec[step - 1].to_string(),
            cell(closed),
        ]);
    }
    Ok(t)
}

/// Hypergraph `α_t` for `t ∈ [1, m]`.
pub fn hyper_alpha_table(m: usize, d: usize) -> Result<Table> {
    if m == 0 {
        return Err(Error::input("m must be at least 1"));
    }
    let sched = hyper_alpha_recursive(m, d)?;
    let mut t = Table::new(&["m", "d", "t", "alpha_recursive", "alpha_closed"]);
    for step in 1..=m {
        let closed = if step <= sched.cutoff {
            Ok(0.0)
        } else {
            hyper_alpha_closed(m, d, step)
        };
        t.rows.push(vec![
            m.to_string(),
            d.to_string(),
            step.to_string(),
            sched.alpha[step - 1].to_string(),
            cell(closed),
        ]);
    }
    Ok(t)
}

/// `ALG(ℓ)` of every threshold policy on `n` vertices.
pub fn threshold_table(n: usize) -> Result<Table> {
    let mut t = Table::new(&["n", "l", "value"]);
    for l in 1..=n {
        t.rows.push(vec![
            n.to_string(),
            l.to_string(),
            threshold_value(n, l)?.to_string(),
        ]);
    }
    Ok(t)
}

/// Best threshold per `n` and its distance below 5/12. Tied maximisers are
/// joined with `;`.
pub fn ordinal_sweep(ns: &[usize]) -> Result<Table> {
    let mut t = Table::new(&["n", "l_star", "value", "gap"]);
    for &n in ns {
        let o = optimal_threshold(n)?;
        let ls: Vec<String> = o.l_star.iter().map(|l| l.to_string()).collect();
        t.rows.push(vec![
            n.to_string(),
            ls.join(";"),
            o.value.to_string(),
            (5.0 / 12.0 - o.value).to_string(),
        ]);
    }
    Ok(t)
}
