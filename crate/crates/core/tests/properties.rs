mod common;

use std::collections::BTreeSet;

use bplt_core::bp::{thresholds, BpOperator};
use bplt_core::kap::{self, KapParams};
use bplt_core::*;
use common::*;
use proptest::prelude::*;

/// `(n, edges)` with vertices in `0..n` and edge sizes `0..=max_size`.
fn hypergraph(max_n: usize, max_edges: usize, max_size: usize) -> impl Strategy<Value = Multihypergraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=max_size.min(n));
        proptest::collection::vec(edge, 0..=max_edges)
            .prop_map(move |edges| Multihypergraph::new(n, edges).unwrap())
    })
}

fn nonempty_edges(max_n: usize, max_edges: usize, max_size: usize) -> impl Strategy<Value = Multihypergraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=max_size.min(n));
        proptest::collection::vec(edge, 0..=max_edges)
            .prop_map(move |edges| Multihypergraph::new(n, edges).unwrap())
    })
}

fn subset_of(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn removal_matches_naive_filter(
        (g, u) in hypergraph(8, 8, 3).prop_flat_map(|g| { let n = g.num_vertices(); (Just(g), subset_of(n)) })
    ) {
        let (h, map) = g.remove_vertices(&u).unwrap();
        let kept: Vec<usize> = (0..g.num_vertices()).filter(|v| !u.contains(v)).collect();
        let naive: Vec<Vec<usize>> = g
            .edges()
            .iter()
            .filter(|e| e.iter().all(|v| !u.contains(v)))
            .map(|e| e.iter().map(|v| kept.iter().position(|k| k == v).unwrap()).collect())
            .collect();
        prop_assert_eq!(h.num_vertices(), kept.len());
        prop_assert_eq!(h.edges(), &naive[..]);
        for (new, &old) in kept.iter().enumerate() {
            prop_assert_eq!(map.get(old), Some(new));
        }
    }

    #[test]
    fn contraction_composes(
        (g, split) in hypergraph(8, 8, 4).prop_flat_map(|g| {
            let n = g.num_vertices();
            (Just(g), proptest::collection::vec(0u8..3, n))
        })
    ) {
        let u1: Vec<usize> = (0..split.len()).filter(|&v| split[v] == 1).collect();
        let u2: Vec<usize> = (0..split.len()).filter(|&v| split[v] == 2).collect();
        let (once, map1) = g.contract_vertices(&u1).unwrap();
        let u2_new: Vec<usize> = u2.iter().map(|&v| map1.get(v).unwrap()).collect();
        let (twice, _) = once.contract_vertices(&u2_new).unwrap();
        let mut both = u1.clone();
        both.extend(&u2);
        let (direct, _) = g.contract_vertices(&both).unwrap();
        prop_assert_eq!(twice, direct);
    }

    #[test]
    fn uniform_degree_sum(k in 1usize..4, n in 4usize..9, m in 0usize..10, seed in any::<u64>()) {
        let g = random_uniform(&mut rng(seed), n, m, k);
        prop_assert!(g.check_uniform(k).is_ok());
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), k * g.num_edges());
    }

    #[test]
    fn saws_in_linear_hypertree(seed in any::<u64>()) {
        let g = random_linear_hypertree(&mut rng(seed), 10);
        for v in 0..g.num_vertices() {
            prop_assert_eq!(g.enumerate_saws(v, None).unwrap().len(), g.num_vertices());
        }
    }

    #[test]
    fn marginals_dominated_by_product_measure(g in nonempty_edges(8, 8, 3), lambda in 0.01f64..5.0, zeta in 0.0f64..=1.0) {
        let s = summarize(&g, &ModelParams::new(lambda, zeta).unwrap()).unwrap();
        for m in s.marginals {
            prop_assert!(m <= lambda / (1.0 + lambda) + 1e-12);
        }
    }

    #[test]
    fn partition_function_monotone(g in nonempty_edges(7, 8, 3), lambda in 0.05f64..3.0) {
        let mut last = f64::INFINITY;
        for i in 0..=10 {
            let z = partition_function(&g, &ModelParams::new(lambda, i as f64 / 10.0).unwrap()).unwrap();
            prop_assert!(z <= last + 1e-12);
            last = z;
        }
        let mut last = f64::NEG_INFINITY;
        for i in 1..=10 {
            let z = partition_function(&g, &ModelParams::new(lambda * i as f64 / 5.0, 0.5).unwrap()).unwrap();
            prop_assert!(z >= last - 1e-12);
            last = z;
        }
    }

    #[test]
    fn log_derivative_is_mean_size(g in nonempty_edges(7, 8, 3), lambda in 0.1f64..3.0, zeta in 0.0f64..=1.0) {
        let h = 1e-5 * lambda;
        let lz = |l: f64| partition_function(&g, &ModelParams::new(l, zeta).unwrap()).unwrap();
        let numeric = (lz(lambda + h) - lz(lambda - h)) / (2.0 * h);
        let s = summarize(&g, &ModelParams::new(lambda, zeta).unwrap()).unwrap();
        let exact = s.mean_size / lambda;
        prop_assert!(rel(numeric, exact) < 1e-6 || (numeric - exact).abs() < 1e-9);
    }

    #[test]
    fn weitz_tree_shape(g in nonempty_edges(8, 7, 3), v_pick in any::<prop::sample::Index>()) {
        let v = v_pick.index(g.num_vertices());
        let t = build_weitz(&g, v, &WeitzOrders::identity(&g), TreeOptions::default()).unwrap();
        prop_assert!(t.to_multihypergraph().is_linear_hypertree());
        let k = g.edges().iter().map(Vec::len).max().unwrap_or(0);
        for w in 0..t.num_nodes() {
            prop_assert!(t.degree(w) <= g.max_degree());
        }
        for e in &t.edges {
            prop_assert!(e.size() <= k);
        }
    }

    #[test]
    fn weitz_equality_any_order(g in nonempty_edges(7, 6, 3), seed in any::<u64>(), lambda in 0.05f64..2.0, zeta in 0.0f64..=1.0) {
        use rand::seq::SliceRandom;
        let mut r = rng(seed);
        let params = ModelParams::new(lambda, zeta).unwrap();
        let v = 0;
        let mut orders = WeitzOrders::identity(&g);
        let base = verify_weitz_equality(&g, v, &params, &orders).unwrap();
        orders.vertices.shuffle(&mut r);
        orders.edges.shuffle(&mut r);
        let shuffled = verify_weitz_equality(&g, v, &params, &orders).unwrap();
        prop_assert!(base < 1e-10 && shuffled < 1e-10);
    }

    #[test]
    fn bp_fixed_point_is_stable(k in 2usize..4, n in 4usize..12, m in 1usize..15, seed in any::<u64>(), frac in 0.05f64..0.95, zeta in 0.05f64..=1.0) {
        let g = random_uniform(&mut rng(seed), n, m, k);
        let c = frac * (std::f64::consts::E / ((k - 1) as f64 * zeta)).powf(1.0 / (k - 1) as f64);
        let params = BPParams::new(k, c, zeta, g.max_degree() as f64).unwrap();
        let tol = 1e-12;
        let x = bp_fixed_point(&g, &params, tol, 100_000).unwrap();
        let again = bp_apply(&g, &params, &x).unwrap();
        prop_assert!(bplt_core::bp::log_sup_distance(&x, &again) < 2.0 * tol);
    }

    #[test]
    fn bethe_derivative_in_c(k in 2usize..4, n in 4usize..10, m in 1usize..12, seed in any::<u64>(), c in 0.2f64..1.0, zeta in 0.1f64..=1.0) {
        let g = random_uniform(&mut rng(seed), n, m, k);
        let delta = g.max_degree() as f64;
        let op = BpOperator::new(&g, k).unwrap();
        let b = |c: f64| {
            let p = BPParams::new(k, c, zeta, delta).unwrap();
            let x = op.fixed_point(&p, 1e-14, 100_000).unwrap();
            (bethe_free_energy(&g, &p, &x), x)
        };
        let h = 1e-5 * c;
        let numeric = (b(c + h).0 - b(c - h).0) / (2.0 * h);
        let x = b(c).1;
        let expected = x.iter().sum::<f64>() / c;
        prop_assert!(rel(numeric, expected) < 1e-6);
    }

    #[test]
    fn rate_gnp_monotone(k in 2usize..6, eta in 0.0f64..0.3) {
        let top = thresholds(k, eta).unwrap().c_bar.min(4.0);
        let mut last = f64::INFINITY;
        for i in 1..30 {
            let r = rate_gnp(k, top * i as f64 / 30.0, eta).unwrap();
            prop_assert!(r < last);
            last = r;
        }
        let c = 0.5 * top;
        prop_assert!(rate_gnp(k, c, eta).unwrap() < rate_gnp(k, c, eta + 0.05).unwrap());
    }

    #[test]
    fn functional_contraction(k in 3usize..5, frac in 0.1f64..0.95, zeta in 0.2f64..=1.0, seed in any::<u64>()) {
        use rand::Rng;
        let c = frac * (std::f64::consts::E / ((k - 1) as f64 * zeta)).powf(1.0 / (k - 1) as f64);
        let params = KapParams::new(k, c, zeta, 120).unwrap();
        let mut r = rng(seed);
        let mut random = || GridFunction::new((0..=120).map(|_| c * r.random_range(0.01..=1.0)).collect()).unwrap();
        let (f, g) = (random(), random());
        let f2 = functional_apply(&params, &functional_apply(&params, &f).unwrap()).unwrap();
        let g2 = functional_apply(&params, &functional_apply(&params, &g).unwrap()).unwrap();
        let factor = f2.log_distance(&g2) / f.log_distance(&g);
        prop_assert!(factor <= 1.0 - params.delta_contraction() + 1e-9);
    }
}

#[test]
fn hard_core_thresholds_meet_at_zero() {
    for k in 2..=6 {
        let t = thresholds(k, 0.0).unwrap();
        assert!(rel(t.c_small, t.c_bar) < 1e-15);
        for i in 1..20 {
            let eta = t.eta_star * i as f64 / 20.0;
            let t = thresholds(k, eta).unwrap();
            assert!(t.c_small < t.c_bar, "k={k} eta={eta}");
        }
    }
}

#[test]
fn subgraph_profiles_match_brute_force() {
    let names = ["K3", "K4", "K5", "C4", "C5", "C6", "paw", "diamond", "K2,3", "P4", "S3"];
    for name in names {
        let h = SimpleGraph::named(name).unwrap();
        let p = subgraph_profile(&h).unwrap();
        let (m2, strict) = brute_m2(&h);
        assert_eq!((*p.m2.numer(), *p.m2.denom()), m2, "{name}");
        assert_eq!(p.strictly_2_balanced, strict, "{name}");
        assert_eq!(p.aut, brute_aut(&h), "{name}");
        assert_eq!(p.chromatic_number, brute_chromatic(&h), "{name}");
    }
}

#[test]
fn subgraph_hypergraph_is_regular() {
    for name in ["K3", "C4", "paw"] {
        let h = SimpleGraph::named(name).unwrap();
        for n in h.num_vertices()..=7 {
            let g = build_subgraph_hypergraph(&h, n).unwrap();
            let d = delta_h(&h, n).unwrap() as usize;
            // every pair lies in the same number of copies
            assert!(g.degrees().iter().all(|&x| x == d), "{name} n={n}");
            let distinct: BTreeSet<_> = g.edges().iter().collect();
            assert_eq!(distinct.len(), g.num_edges());
        }
    }
}

#[test]
fn kap_max_degree_near_alpha_n() {
    let n = 100_000;
    for k in 3..=5 {
        let a = alpha_k(k).unwrap();
        let alpha = *a.numer() as f64 / *a.denom() as f64;
        let max = (1..=n).map(|t| kap_degree(k, n, t)).max().unwrap();
        assert!((max as f64 / (alpha * n as f64) - 1.0).abs() < 0.02, "k={k}");
    }
}

#[test]
fn discrete_profile_flattens_as_n_doubles() {
    let a = kap::discrete_vs_continuum(3, 0.8, 250, 500, 1e-10).unwrap();
    let b = kap::discrete_vs_continuum(3, 0.8, 500, 500, 1e-10).unwrap();
    assert!(b.discrete_max_jump < a.discrete_max_jump);
    assert!(b.sup_gap < 0.02);
}
