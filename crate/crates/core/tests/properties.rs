mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use secmatch_core::arrival::ExactOracle;
use secmatch_core::bench::{write_rows, Format, ReportRow};
use secmatch_core::edge::{run_edge_algorithm, EdgeInstance};
use secmatch_core::graph::{greedy_matching, max_weight_matching, VertexSubset, WeightedGraph};
use secmatch_core::ordinal::{gradient, objective_of, threshold_value, OrdinalPolicy};
use secmatch_core::vertex::{p_recursive, run_vertex_algorithm, ArrivalOrder, VertexInstance};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], pairs).prop_map(move |ws| {
            let mut edges = Vec::new();
            let mut it = ws.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    let w = it.next().unwrap();
                    if w > 0.0 {
                        edges.push((u, v, w));
                    }
                }
            }
            WeightedGraph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matching_optimum_beats_greedy_and_matches_brute_force(g in graph_strategy(8)) {
        let all = VertexSubset::all(g.n());
        let best = max_weight_matching(&g, &all).unwrap();
        let greedy = greedy_matching(&g, &all).unwrap();
        let brute = brute_matching_weight(&g, all.ids());
        prop_assert!((best.weight(&g) - brute).abs() < 1e-9);
        prop_assert!(greedy.weight(&g) <= best.weight(&g) + 1e-9);
        prop_assert!(2.0 * greedy.weight(&g) >= best.weight(&g) - 1e-9);
        // padding leaves at most one vertex out
        prop_assert!(best.len() == g.n() / 2);
    }

    #[test]
    fn vertex_run_returns_a_matching_on_present_edges(g in graph_strategy(12), seed in any::<u64>(), kf in 0.0f64..1.0) {
        let n = g.n();
        let k = (kf * n as f64) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = ArrivalOrder::random(n, &mut rng);
        let inst = VertexInstance::new(g.clone());
        let trace = run_vertex_algorithm(&inst, &order, k, &mut rng).unwrap();
        let mut seen = vec![false; n];
        for &(u, v) in trace.matching.edges() {
            prop_assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
        }
        let opt = brute_matching_weight(&g, &(0..n).collect::<Vec<_>>());
        prop_assert!(trace.matching.weight(&g) <= opt + 1e-9);
        prop_assert_eq!(trace.steps.len(), n - k);
    }

    #[test]
    fn edge_run_accepts_disjoint_edges(seed in any::<u64>(), m in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst: EdgeInstance = edge_instance_with(m, &mut rng);
        let oracle = ExactOracle::build(&inst).unwrap();
        let order: Vec<usize> = {
            use rand::seq::SliceRandom;
            let mut o: Vec<usize> = (0..m).collect();
            o.shuffle(&mut rng);
            o
        };
        let trace = run_edge_algorithm(&inst, &order, &mut &oracle, &mut rng).unwrap();
        let mut used = std::collections::HashSet::new();
        let mut total = 0.0;
        for &e in &trace.accepted {
            let (u, v, w) = inst.edges()[e];
            prop_assert!(used.insert(u) && used.insert(v));
            total += w;
        }
        prop_assert!((total - trace.weight).abs() < 1e-9);
        prop_assert!(trace.weight <= inst.optimum_weight() + 1e-9);
    }

    #[test]
    fn match_probability_is_monotone_and_bounded(k in 1usize..50, extra in 0usize..200) {
        let t = k + extra;
        let p = p_recursive(k, t).unwrap();
        prop_assert!((0.0..=2.0 / 3.0 + 1e-12).contains(&p));
        prop_assert!(p_recursive(k, t + 1).unwrap() >= p - 1e-15);
    }

    #[test]
    fn ordinal_objective_is_a_probability(c in proptest::collection::vec(0.0f64..=1.0, 2..40)) {
        let v = objective_of(&c);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        let policy = OrdinalPolicy::new(c).unwrap();
        prop_assert_eq!(gradient(&policy).len(), policy.n());
    }

    #[test]
    fn thresholds_stay_below_five_twelfths_plus_slack(n in 3usize..2000, lf in 0.0f64..1.0) {
        let l = 1 + (lf * (n - 1) as f64) as usize;
        let v = threshold_value(n, l).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= 5.0 / 12.0 + 2.0 / n as f64);
    }

    #[test]
    fn csv_rows_have_twelve_fields(mean in 0.0f64..1.0, trials in 1u64..1_000_000, seed in any::<u64>()) {
        let row = ReportRow {
            algorithm: "vertex".into(),
            family: "uniform-complete".into(),
            n: 10, m: 0, d: 2, k_or_l: 3, trials, seed,
            mean_ratio: mean, stderr: 0.0, ci_lo: mean, ci_hi: mean,
        };
        let mut out = Vec::new();
        write_rows(&[row], Format::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        prop_assert_eq!(lines.len(), 2);
        prop_assert_eq!(lines[1].split(',').count(), 12);
        let parsed: f64 = lines[1].split(',').nth(8).unwrap().parse().unwrap();
        prop_assert_eq!(parsed, mean);
    }
}
