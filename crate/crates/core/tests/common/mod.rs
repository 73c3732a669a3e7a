//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secmatch_core::edge::EdgeInstance;
use secmatch_core::graph::WeightedGraph;

pub type Q = Ratio<i128>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each pair present with probability `p`, weights in `(0, 1)`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(0.001..1.0)));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Edge instance with exactly `m` positive edges on a few vertices.
pub fn edge_instance_with<R: Rng>(m: usize, rng: &mut R) -> EdgeInstance {
    let mut lo = 2;
    while lo * (lo - 1) / 2 < m {
        lo += 1;
    }
    let n = rng.gen_range(lo..=lo + 2);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let edges = pairs[..m].iter().map(|&(u, v)| (u, v, rng.gen_range(0.01..1.0)));
    let inst = EdgeInstance::new(WeightedGraph::new(n, edges).unwrap()).unwrap();
    assert_eq!(inst.m(), m);
    inst
}

/// Best matching weight restricted to `verts`, by branching on the first
/// vertex: leave it unmatched or pair it with any later one.
pub fn brute_matching_weight(g: &WeightedGraph, verts: &[usize]) -> f64 {
    let Some((&u, rest)) = verts.split_first() else {
        return 0.0;
    };
    let mut best = brute_matching_weight(g, rest);
    for (j, &v) in rest.iter().enumerate() {
        let w = g.weight(u, v);
        if w > 0.0 {
            let others: Vec<usize> = rest
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &x)| x)
                .collect();
            best = best.max(w + brute_matching_weight(g, &others));
        }
    }
    best
}

/// `n^{3(i+j)}` for ranks `i, j`.
pub fn hard_weight(n: usize, i: usize, j: usize) -> BigUint {
    BigUint::from(n).pow((3 * (i + j)) as u32)
}

/// Largest total hard weight over perfect matchings of `ranks`.
pub fn brute_hard_matching(n: usize, ranks: &[usize]) -> BigUint {
    let Some((&u, rest)) = ranks.split_first() else {
        return BigUint::from(0u32);
    };
    let mut best = BigUint::from(0u32);
    for (j, &v) in rest.iter().enumerate() {
        let others: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &x)| x)
            .collect();
        let w = hard_weight(n, u, v) + brute_hard_matching(n, &others);
        if w > best {
            best = w;
        }
    }
    best
}

/// Probability that the two best vertices end matched to each other, by
/// enumerating every arrival order and every coin outcome exactly.
pub fn ordinal_brute_force(c: &[Q]) -> Q {
    let n = c.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Q::from_integer(0);
    let mut count = 0i128;
    permute(&mut perm, 0, &mut |order| {
        total += process(order, c, 1, vec![usize::MAX; n], (order[0], usize::MAX));
        count += 1;
    });
    total / Q::from_integer(count)
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Values are `0..n` with `n - 1` best; `idx` is the next position.
fn process(order: &[usize], c: &[Q], idx: usize, partner: Vec<usize>, top: (usize, usize)) -> Q {
    let n = order.len();
    if idx == n {
        return if n >= 2 && partner[n - 1] == n - 2 {
            Q::from_integer(1)
        } else {
            Q::from_integer(0)
        };
    }
    let v = order[idx];
    let (mut first, mut second) = top;
    let mut arrived_top = true;
    if v > first {
        second = first;
        first = v;
    } else if second == usize::MAX || v > second {
        second = v;
    } else {
        arrived_top = false;
    }
    let ci = c[idx];
    let next = (first, second);
    if arrived_top && partner[first] == usize::MAX && partner[second] == usize::MAX {
        let mut matched = partner.clone();
        matched[first] = second;
        matched[second] = first;
        let yes = process(order, c, idx + 1, matched, next);
        let no = process(order, c, idx + 1, partner, next);
        ci * yes + (Q::from_integer(1) - ci) * no
    } else {
        process(order, c, idx + 1, partner, next)
    }
}

/// `p(k, t)` from its defining recursion in exact arithmetic.
pub fn p_exact(k: usize, t: usize) -> Q {
    let mut p = Q::from_integer(0);
    for s in k + 1..=t {
        let s = s as i128;
        p = Q::new(2, s) + Q::new(s - 3, s) * p;
    }
    p
}
