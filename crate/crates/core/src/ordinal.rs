//! Ordinal setting: the algorithm sees only relative ranks and is scored on
//! whether the two globally best vertices end up matched to each other.
//!
//! A policy is a vector `c` where `c_i` is the probability of matching the
//! current top two at step `i` when the arriving vertex is one of them and
//! both are free. With `p_i` the probability that the current top vertex is
//! free after step `i`,
//!
//! ```text
//! p_1 = 1,  p_i = (1 + (i-1) p_{i-1} - 2 p_{i-1} c_i) / i,
//! ALG(c) = Σ_{i=2}^{n} (i-1) p_{i-1} c_i / C(n, 2).
//! ```

use std::path::Path;

use num_traits::{FromPrimitive, Num};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Matching;
use crate::stats::{stream_rng, Estimate, Stream};

/// Largest horizon for the exhaustive search over 0/1 policies.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Match-top-two probabilities `c_1..c_n` (`c_1` is stored but never read).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalPolicy {
    n: usize,
    c: Vec<f64>,
}

impl OrdinalPolicy {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::input("policy needs n >= 1"));
        }
        if let Some(x) = c.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::input(format!("policy entry {x} outside [0, 1]")));
        }
        Ok(OrdinalPolicy { n: c.len(), c })
    }

    /// `c_i = 0` for `i ≤ ℓ` and `1` afterwards, `1 ≤ ℓ ≤ n`.
    pub fn threshold(n: usize, l: usize) -> Result<Self> {
        if l == 0 || l > n {
            return Err(Error::input(format!(
                "threshold needs 1 <= l <= n, got l = {l}, n = {n}"
            )));
        }
        Ok(OrdinalPolicy {
            n,
            c: (1..=n).map(|i| if i > l { 1.0 } else { 0.0 }).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `c_i` for `i` in `1..=n`.
    pub fn c(&self, i: usize) -> f64 {
        self.c[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            n: usize,
            c: Vec<f64>,
        }
        let f: File = serde_json::from_str(s)?;
        if f.c.len() != f.n {
            return Err(Error::input(format!(
                "policy has n = {} but {} entries",
                f.n,
                f.c.len()
            )));
        }
        Self::new(f.c)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }
}

/// `p_i` and `q_i = i p_i` at index `i - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

pub fn policy_state(policy: &OrdinalPolicy) -> PolicyState {
    let p = top_free_probabilities(&policy.c);
    let q = p.iter().enumerate().map(|(i, &x)| (i + 1) as f64 * x).collect();
    PolicyState { p, q }
}

/// `p_1..p_n` for any numeric type (exact rationals in tests).
pub fn top_free_probabilities<T: Num + Clone + FromPrimitive>(c: &[T]) -> Vec<T> {
    let mut p = Vec::with_capacity(c.len());
    if c.is_empty() {
        return p;
    }
    p.push(T::one());
    for i in 2..=c.len() {
        let prev = p[i - 2].clone();
        let im1 = T::from_usize(i - 1).unwrap();
        let two = T::from_u8(2).unwrap();
        let num = T::one() + im1 * prev.clone() - two * prev * c[i - 1].clone();
        p.push(num / T::from_usize(i).unwrap());
    }
    p
}

/// `Σ_{i=2}^{n} (i-1) p_{i-1} c_i` without the `C(n, 2)` normalisation.
pub fn unnormalized_objective<T: Num + Clone + FromPrimitive>(c: &[T]) -> T {
    let p = top_free_probabilities(c);
    let mut f = T::zero();
    for i in 2..=c.len() {
        f = f + T::from_usize(i - 1).unwrap() * p[i - 2].clone() * c[i - 1].clone();
    }
    f
}

/// `ALG(c)` for a generic numeric type.
pub fn objective_of<T: Num + Clone + FromPrimitive>(c: &[T]) -> T {
    let n = c.len();
    if n < 2 {
        return T::zero();
    }
    unnormalized_objective(c) / T::from_usize(n * (n - 1) / 2).unwrap()
}

/// Probability that the top two vertices end matched to each other.
pub fn objective(policy: &OrdinalPolicy) -> f64 {
    objective_of(&policy.c)
}

/// Partial derivatives of the unnormalised objective `f = C(n,2) · ALG`:
/// `df/dc_i = q_{i-1} (1 - 2/(i-1) Σ_{j>i} c_j Π_{i<k<j} (1 - 2 c_k/(k-1)))`
/// at index `i - 1`; index 0 (for `c_1`) is 0.
pub fn gradient(policy: &OrdinalPolicy) -> Vec<f64> {
    let n = policy.n;
    let q = policy_state(policy).q;
    let mut g = vec![0.0; n];
    // tail = Σ_{j>i} c_j Π_{k=i+1}^{j-1} (1 - 2 c_k / (k-1)), built from i = n down
    let mut tail = 0.0;
    for i in (2..=n).rev() {
        g[i - 1] = q[i - 2] * (1.0 - 2.0 / (i - 1) as f64 * tail);
        let ci = policy.c(i);
        tail = ci + (1.0 - 2.0 * ci / (i - 1) as f64) * tail;
    }
    g
}

/// `q_i` of the threshold policy with cutoff `ℓ`, from the closed forms.
pub fn threshold_q(l: usize, i: usize) -> f64 {
    if i <= l {
        return i as f64;
    }
    match l {
        1 if i == 2 => 0.0,
        _ => {
            let (l, i) = (l as f64, i as f64);
            i / 3.0 + 2.0 * l * (l - 1.0) * (l - 2.0) / (3.0 * (i - 1.0) * (i - 2.0))
        }
    }
}

/// `ALG(ℓ) = Σ_{i=ℓ}^{n-1} q_i / C(n, 2)` in closed form.
pub fn threshold_value(n: usize, l: usize) -> Result<f64> {
    if n < 3 || l == 0 || l > n {
        return Err(Error::input(format!(
            "need n >= 3 and 1 <= l <= n, got n = {n}, l = {l}"
        )));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    if l == n {
        return Ok(0.0);
    }
    let (nf, lf) = (n as f64, l as f64);
    // Σ_{i=3}^{n-1} i/3
    let tail3 = (nf * nf - nf - 6.0) / 6.0;
    let sum = match l {
        1 => 1.0 + tail3,
        2 => 2.0 + tail3,
        _ => {
            (nf * nf - nf - lf * lf + lf) / 6.0
                + 2.0 / 3.0 * lf * (lf - 1.0) * (lf - 2.0) * (1.0 / (lf - 2.0) - 1.0 / (nf - 2.0))
        }
    };
    Ok(sum / pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdOptimum {
    pub n: usize,
    /// every maximising cutoff, ascending
    pub l_star: Vec<usize>,
    pub value: f64,
}

/// Best threshold by sweeping `ℓ ∈ [1, n]` with the closed form. Cutoffs
/// whose value is within `1e-15` (relative) of the maximum are all reported.
pub fn optimal_threshold(n: usize) -> Result<ThresholdOptimum> {
    let values: Vec<f64> = (1..=n).map(|l| threshold_value(n, l)).collect::<Result<_>>()?;
    let value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let l_star = (1..=n)
        .filter(|&l| values[l - 1] >= value - value.abs() * 1e-15)
        .collect();
    Ok(ThresholdOptimum { n, l_star, value })
}

/// `g(x) = 1/6 + x²/2 - 2x³/3`; `ALG(ℓ) ≤ 2 g(ℓ/n) + O(1/n)`.
pub fn g(x: f64) -> f64 {
    1.0 / 6.0 + x * x / 2.0 - 2.0 * x * x * x / 3.0
}

/// Exhaustive search over all 0/1 policies (`c_1` fixed at 0). Returns the
/// optimal value and every policy attaining it (to 1e-12).
pub fn best_binary_policies(n: usize) -> Result<(f64, Vec<Vec<u8>>)> {
    if n < 2 {
        return Err(Error::input("exhaustive search needs n >= 2"));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::Capacity {
            what: "horizon for exhaustive policy search",
            got: n,
            limit: EXHAUSTIVE_LIMIT,
            hint: "",
        });
    }
    let mut scored = Vec::with_capacity(1 << (n - 1));
    for bits in 0u32..(1 << (n - 1)) {
        let c: Vec<u8> = std::iter::once(0)
            .chain((0..n - 1).map(|j| ((bits >> j) & 1) as u8))
            .collect();
        let cf: Vec<f64> = c.iter().map(|&x| x as f64).collect();
        scored.push((objective_of(&cf), c));
    }
    let best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let winners = scored
        .into_iter()
        .filter(|s| s.0 >= best - 1e-12)
        .map(|s| s.1)
        .collect();
    Ok((best, winners))
}

/// Whether a 0/1 vector (ignoring `c_1`) is zero up to some `ℓ ≥ 1` and one
/// afterwards.
pub fn is_threshold(c: &[u8]) -> bool {
    c.len() >= 2 && c[1..].windows(2).all(|w| w[0] <= w[1])
}

/// Counters from simulating the ordinal process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrdinalSimulation {
    /// frequency of "the final top two are matched to each other"
    pub top_two: Estimate,
    /// frequency of "the current top vertex is free after step i", index i-1
    pub top_free: Vec<Estimate>,
}

/// Simulate the process on random rank permutations.
pub fn simulate_ordinal(policy: &OrdinalPolicy, trials: u64, seed: u64) -> Result<Estimate> {
    Ok(simulate_ordinal_detailed(policy, trials, seed)?.top_two)
}

pub fn simulate_ordinal_detailed(
    policy: &OrdinalPolicy,
    trials: u64,
    seed: u64,
) -> Result<OrdinalSimulation> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let n = policy.n;
    let (hits, free) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut order = stream_rng(seed, i, Stream::Order);
            let mut coins = stream_rng(seed, i, Stream::Coins);
            one_run(policy, &mut order, &mut coins)
        })
        .fold(
            || (0u64, vec![0u64; n]),
            |(h, mut f), (hit, top_free)| {
                for (acc, x) in f.iter_mut().zip(top_free) {
                    *acc += x as u64;
                }
                (h + hit as u64, f)
            },
        )
        .reduce(
            || (0u64, vec![0u64; n]),
            |(h1, mut f1), (h2, f2)| {
                for (a, b) in f1.iter_mut().zip(f2) {
                    *a += b;
                }
                (h1 + h2, f1)
            },
        );
    Ok(OrdinalSimulation {
        top_two: Estimate::binomial(hits, trials),
        top_free: free.into_iter().map(|h| Estimate::binomial(h, trials)).collect(),
    })
}

const FREE: usize = usize::MAX;

pub(crate) fn one_run<R: Rng>(policy: &OrdinalPolicy, order_rng: &mut R, coins: &mut R) -> (bool, Vec<bool>) {
    let n = policy.n;
    let mut values: Vec<usize> = (0..n).collect();
    values.shuffle(order_rng);
    let mut partner = vec![FREE; n];
    let mut top_free = Vec::with_capacity(n);
    let (mut first, mut second) = (values[0], FREE);
    top_free.push(true);
    for (idx, &v) in values.iter().enumerate().skip(1) {
        let t = idx + 1;
        let among_top = if v > first {
            second = first;
            first = v;
            true
        } else if second == FREE || v > second {
            second = v;
            true
        } else {
            false
        };
        if among_top && partner[first] == FREE && partner[second] == FREE && coins.gen::<f64>() < policy.c(t)
        {
            partner[first] = second;
            partner[second] = first;
        }
        top_free.push(partner[first] == FREE);
    }
    let hit = n >= 2 && partner[n - 1] == n - 2;
    (hit, top_free)
}

/// A permutation of value ranks `1..=n` assigned to vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankInstance {
    ranks: Vec<usize>,
}

impl RankInstance {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n + 1];
        for &r in &ranks {
            if r == 0 || r > n || std::mem::replace(&mut seen[r], true) {
                return Err(Error::input("ranks must be a permutation of 1..=n"));
            }
        }
        Ok(RankInstance { ranks })
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.ranks[v]
    }
}

/// Maximum matching of a vertex subset under weights `n^{3(i+j)}` for ranks
/// `i, j`: pair by descending rank, `(1st, 2nd), (3rd, 4th), ...`. Pairs are
/// returned as ranks.
pub fn hard_instance_matching(ranks: &[usize]) -> Result<Matching> {
    if ranks.len() % 2 == 1 {
        return Err(Error::input("hard-instance matching needs an even subset"));
    }
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Matching::from_pairs(sorted.chunks_exact(2).map(|p| (p[0], p[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_examples() {
        let zero = OrdinalPolicy::new(vec![0.0; 6]).unwrap();
        assert!(policy_state(&zero).p.iter().all(|&p| p == 1.0));
        assert_eq!(objective(&zero), 0.0);
        let s = policy_state(&OrdinalPolicy::new(vec![0.0, 1.0, 1.0]).unwrap());
        assert_eq!(s.p[1], 0.0);
        assert!((s.p[2] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.q[2] - 1.0).abs() < 1e-15);
        assert_eq!(objective(&OrdinalPolicy::new(vec![0.0, 1.0]).unwrap()), 1.0);
    }

    #[test]
    fn gradient_last_component_is_q() {
        let pol = OrdinalPolicy::new(vec![0.0, 0.3, 0.7, 0.2, 0.9]).unwrap();
        let g = gradient(&pol);
        let q = policy_state(&pol).q;
        assert_eq!(g[4], q[3]);
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn threshold_closed_form_matches_recursion_small() {
        for n in 3..40 {
            for l in 1..=n {
                let pol = OrdinalPolicy::threshold(n, l).unwrap();
                let a = threshold_value(n, l).unwrap();
                assert!((a - objective(&pol)).abs() < 1e-12, "n={n} l={l}");
                let q = policy_state(&pol).q;
                for i in 1..n {
                    assert!((threshold_q(l, i) - q[i - 1]).abs() < 1e-12, "n={n} l={l} i={i}");
                }
            }
        }
    }

    #[test]
    fn g_peaks_at_half() {
        assert!((g(0.5) - 5.0 / 24.0).abs() < 1e-15);
        assert!(g(0.49) < g(0.5) && g(0.51) < g(0.5));
    }

    #[test]
    fn simulation_trivial_cases() {
        let zero = OrdinalPolicy::new(vec![0.0; 5]).unwrap();
        assert_eq!(simulate_ordinal(&zero, 200, 1).unwrap().mean, 0.0);
        let two = OrdinalPolicy::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(simulate_ordinal(&two, 200, 1).unwrap().mean, 1.0);
    }

    #[test]
    fn hard_matching_pairs_by_rank() {
        assert_eq!(hard_instance_matching(&[1, 2]).unwrap().edges(), &[(1, 2)]);
        assert_eq!(
            hard_instance_matching(&[3, 1, 4, 2]).unwrap().edges(),
            &[(1, 2), (3, 4)]
        );
        assert!(hard_instance_matching(&[1, 2, 3]).is_err());
        assert!(RankInstance::new(vec![1, 1]).is_err());
    }

    #[test]
    fn threshold_detection() {
        assert!(is_threshold(&[0, 0, 1, 1]));
        assert!(!is_threshold(&[0, 1, 0, 1]));
        assert!(OrdinalPolicy::threshold(4, 0).is_err());
        assert!(OrdinalPolicy::new(vec![0.0, 1.5]).is_err());
    }
}
