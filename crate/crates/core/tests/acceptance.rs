//! Acceptance suite: one PASS/FAIL line per criterion. Built without the
//! libtest harness so the lines always reach stdout.

mod common;

use std::time::Instant;

use bplt_core::bp::{log_sup_distance, thresholds, BpOperator};
use bplt_core::gibbs::lower_tail_threshold;
use bplt_core::kap::{self, KapParams, MarginalMode};
use bplt_core::*;
use common::*;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    pass: bool,
    gating: bool,
    detail: String,
}

fn gate(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        gating: true,
        detail,
    }
}

fn report(detail: String) -> Outcome {
    Outcome {
        pass: true,
        gating: false,
        detail,
    }
}

/// Weitz equality on random multihypergraphs with random orders.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    let mut largest_tree = 0;
    for _ in 0..100 {
        let g = random_multihypergraph(&mut rng, 9, 8, 1, 3);
        let params = ModelParams::new(rng.random_range(0.05..3.0), rng.random_range(0.0..=1.0)).unwrap();
        let v = rng.random_range(0..g.num_vertices());
        let mut orders = WeitzOrders::identity(&g);
        orders.vertices.shuffle(&mut rng);
        orders.edges.shuffle(&mut rng);
        let t = build_weitz(&g, v, &orders, TreeOptions::default()).unwrap();
        largest_tree = largest_tree.max(t.num_nodes());
        let exact = brute_marginals(&g, params.lambda, params.zeta)[v];
        worst = worst.max((exact - tree_marginal(&t, &params)).abs());
        worst = worst.max(verify_weitz_equality(&g, v, &params, &orders).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    gate(
        worst < 1e-10 && secs < 60.0,
        format!("max |marginal gap| = {worst:.3e} (< 1e-10), largest tree {largest_tree} nodes, {secs:.1} s (< 60 s)"),
    )
}

/// The four deletion/contraction identities.
fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let mut worst = [0.0f64; 4];
    for _ in 0..500 {
        let mut g = random_multihypergraph(&mut rng, 10, 10, 1, 4);
        if g.num_edges() == 0 {
            g = Multihypergraph::new(g.num_vertices(), vec![vec![0]]).unwrap();
        }
        let params = ModelParams::new(rng.random_range(0.05..3.0), rng.random_range(0.0..=1.0)).unwrap();
        let v = rng.random_range(0..g.num_vertices());
        let e = rng.random_range(0..g.num_edges());
        let r = verify_identities(&g, &params, v, e).unwrap();
        for (w, x) in worst.iter_mut().zip(r.as_array()) {
            *w = w.max(x);
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    gate(
        max < 1e-12,
        format!(
            "max residuals in/out/edge/conditional = {:.2e}/{:.2e}/{:.2e}/{:.2e} (< 1e-12)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// Tree recursion on linear hypertrees.
fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    let mut sizes = 0;
    for _ in 0..100 {
        let g = random_linear_hypertree(&mut rng, 14);
        sizes = sizes.max(g.num_vertices());
        let params = ModelParams::new(rng.random_range(0.05..3.0), rng.random_range(0.0..=1.0)).unwrap();
        let v = rng.random_range(0..g.num_vertices());
        let tree = hypertree_ratio(&g, v, &params).unwrap();
        let (z, inside) = brute_sums(&g, params.lambda, params.zeta);
        let exact = inside[v] / (z - inside[v]);
        worst = worst.max(rel(tree, exact));
        let lib = summarize(&g, &params).unwrap().ratio(v).unwrap();
        worst = worst.max(rel(tree, lib));
    }
    gate(
        worst < 1e-12,
        format!("max relative ratio gap = {worst:.3e} (< 1e-12), up to N = {sizes}"),
    )
}

/// Hard-core bridge `P(X = 0) = (1-p)^N Z(p/(1-p), 1)`.
fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = random_multihypergraph(&mut rng, 12, 12, 1, 4);
        let p = rng.random_range(0.01..0.95);
        let n = g.num_vertices() as f64;
        let tail = lower_tail_exact(&g, p, 0).unwrap();
        let log_z = partition_function(&g, &ModelParams::hard_core_from_p(p).unwrap()).unwrap();
        let bridge = (n * (-p).ln_1p() + log_z).exp();
        worst = worst.max(rel(tail, bridge));
        worst = worst.max(rel(tail, brute_lower_tail(&g, p, 0)));
    }
    gate(worst < 1e-12, format!("max relative gap = {worst:.3e} (< 1e-12)"))
}

/// Two BP steps shrink log-sup distances by `1 - delta`.
fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_factor = 0.0f64;
    for _ in 0..200 {
        let k = rng.random_range(2..=4);
        let n = rng.random_range(k..=12);
        let m = rng.random_range(1..=20);
        let g = random_uniform(&mut rng, n, m, k);
        let delta = g.max_degree() as f64;
        // (k-1) zeta c^(k-1) < e
        let zeta = rng.random_range(0.05..=1.0);
        let c_max = (std::f64::consts::E / ((k - 1) as f64 * zeta)).powf(1.0 / (k - 1) as f64);
        let c = rng.random_range(0.05..0.999) * c_max;
        let params = BPParams::new(k, c, zeta, delta).unwrap();
        let op = BpOperator::new(&g, k).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..=1.0) * c).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..=1.0) * c).collect();
        let before = log_sup_distance(&x, &y);
        let after = log_sup_distance(&op.apply(&params, &op.apply(&params, &x)), &op.apply(&params, &op.apply(&params, &y)));
        let bound = 1.0 - params.delta_contraction();
        if before > 0.0 {
            worst_factor = worst_factor.max(after / before);
            worst_excess = worst_excess.max(after / before - bound);
        }
    }
    gate(
        worst_excess <= 1e-12,
        format!("max (factor - (1 - delta)) = {worst_excess:.3e} (<= 1e-12), max factor {worst_factor:.4}"),
    )
}

fn regular_instances() -> Vec<(String, Multihypergraph, usize, f64)> {
    let mut out = Vec::new();
    for n in 4..=8 {
        let g = build_subgraph_hypergraph(&SimpleGraph::complete(3), n).unwrap();
        out.push((format!("G^K3 n={n}"), g, 3, (n - 2) as f64));
    }
    out.push(("Fano".into(), fano(), 3, 3.0));
    out.push(("K4^(3)".into(), k4_3(), 3, 3.0));
    out
}

/// BP on exactly regular instances against the closed form.
fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let (mut fp, mut bethe) = (0.0f64, 0.0f64);
    for (_, g, k, delta) in regular_instances() {
        for _ in 0..10 {
            let zeta = rng.random_range(0.0..=1.0);
            let c = rng.random_range(0.05..1.15);
            let params = BPParams::new(k, c, zeta, delta).unwrap();
            if params.check_contraction().is_err() {
                continue;
            }
            let x = bp_fixed_point(&g, &params, 1e-14, 100_000).unwrap();
            let xs = x_star_regular(k, c, zeta).unwrap();
            fp = fp.max(x.iter().map(|v| (v - xs).abs()).fold(0.0, f64::max));
            let b = bethe_free_energy(&g, &params, &x) / g.num_vertices() as f64;
            let closed = xs + zeta * (1.0 - 1.0 / k as f64) * xs.powi(k as i32);
            bethe = bethe.max((b - closed).abs());
        }
    }
    gate(
        fp < 1e-8 && bethe < 1e-10,
        format!("sup |x - x*| = {fp:.3e} (< 1e-8), |B/N - closed form| = {bethe:.3e} (< 1e-10)"),
    )
}

/// Scalar and vector zeta solvers, and monotonicity of `zeta c^(k-1)`.
fn criterion_7() -> Outcome {
    let mut scalar = 0.0f64;
    for k in 2..=5 {
        for &eta in &[0.05, 0.2, 0.4, 0.7, 0.95] {
            let th = thresholds(k, eta).unwrap();
            let top = th.c_bar.min(3.0);
            for i in 1..=20 {
                let c = top * i as f64 / 21.0;
                let (zeta, _) = solve_zeta_regular(k, c, eta).unwrap();
                let x = x_star_regular(k, c, zeta).unwrap();
                scalar = scalar.max(((1.0 - zeta) * x.powi(k as i32) - eta * c.powi(k as i32)).abs());
            }
        }
    }

    let mut rng = rng(7);
    let mut vector = 0.0f64;
    let mut solved = 0;
    for _ in 0..30 {
        let k = rng.random_range(2..=3);
        let n = rng.random_range(k + 2..=10);
        let m = rng.random_range(2..=12);
        let g = random_uniform(&mut rng, n, m, k);
        let eta = rng.random_range(0.05..0.9);
        let th = thresholds(k, eta).unwrap();
        let c = rng.random_range(0.1..0.9) * th.c_small;
        let delta = g.max_degree() as f64;
        let (zeta, x) = solve_zeta(&g, k, c, eta, delta, 1e-12, ZetaMode::General).unwrap();
        let sum: f64 = g.edges().iter().map(|e| e.iter().map(|&u| x[u]).product::<f64>()).sum();
        let scale = c.powi(k as i32) * g.num_edges() as f64;
        vector = vector.max(((1.0 - zeta) * sum - eta * scale).abs() / scale);
        solved += 1;
    }

    let mut monotone = true;
    for k in 2..=4 {
        for &eta in &[0.1, 0.5, 0.9] {
            let top = thresholds(k, eta).unwrap().c_bar.min(5.0);
            let mut last = f64::NEG_INFINITY;
            for i in 1..=50 {
                let c = top * i as f64 / 51.0;
                let (zeta, _) = solve_zeta_regular(k, c, eta).unwrap();
                let v = zeta * c.powi(k as i32 - 1);
                monotone &= v > last;
                last = v;
            }
        }
    }
    gate(
        scalar < 1e-10 && vector < 1e-8 && monotone,
        format!(
            "scalar residual {scalar:.2e} (< 1e-10), vector residual / (c^k |E|) {vector:.2e} (< 1e-8) over {solved} graphs, zeta c^(k-1) increasing: {monotone}"
        ),
    )
}

/// Closed-form rates.
fn criterion_8() -> Outcome {
    let mut gnm = 0.0f64;
    for k in 2..=6 {
        for i in 1..20 {
            let b = i as f64 / 20.0 * (1.0 / (k - 1) as f64).powf(1.0 / (k - 1) as f64);
            let target = -b.powi(k as i32) / k as f64;
            gnm = gnm.max(rel(rate_gnm(k, b, 0.0).unwrap(), target));
        }
    }
    let mut gnp = 0.0f64;
    for k in 2..=6 {
        let top = (std::f64::consts::E / (k - 1) as f64).powf(1.0 / (k - 1) as f64);
        for i in 1..20 {
            let c = top * i as f64 / 20.0;
            let w = lambert_w0((k - 1) as f64 * c.powi(k as i32 - 1)).unwrap();
            let x = c * (-w / (k - 1) as f64).exp();
            let closed = x + (1.0 - 1.0 / k as f64) * x.powi(k as i32) - c;
            gnp = gnp.max((rate_gnp(k, c, 0.0).unwrap() - closed).abs());
        }
    }
    let mut bp = 0.0f64;
    for (_, g, k, delta) in regular_instances() {
        for &eta in &[0.0, 0.1, 0.3, 0.6] {
            for &c in &[0.3, 0.7, 1.0] {
                if c >= thresholds(k, eta).unwrap().c_bar {
                    continue;
                }
                let closed = rate_gnp(k, c, eta).unwrap();
                let r = rate_lower_tail_bp(&g, k, c, eta, delta, ZetaMode::NearRegular).unwrap();
                bp = bp.max((closed - r.rate).abs());
            }
        }
    }
    gate(
        gnm < 1e-15 && gnp < 1e-12 && bp < 1e-8,
        format!("G(n,m) rel {gnm:.2e} (< 1e-15), G(n,p) eta=0 {gnp:.2e} (< 1e-12), vs BP on regular {bp:.2e} (< 1e-8)"),
    )
}

/// Subgraph profile against brute-force oracles, and regularity of `G^K3`.
fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (h, expect) in [
        (SimpleGraph::complete(3), ((2, 1), true, 6u64, 3usize)),
        (SimpleGraph::complete(4), ((5, 2), true, 24, 4)),
    ] {
        let p = subgraph_profile(&h).unwrap();
        let oracle = (brute_m2(&h).0, brute_m2(&h).1, brute_aut(&h), brute_chromatic(&h));
        let got = ((*p.m2.numer(), *p.m2.denom()), p.strictly_2_balanced, p.aut, p.chromatic_number);
        ok &= got == expect && oracle == expect;
        notes.push(format!("K{}: {:?}", h.num_vertices(), got));
    }
    for n in 3..=8 {
        let g = build_subgraph_hypergraph(&SimpleGraph::complete(3), n).unwrap();
        let d = delta_h(&SimpleGraph::complete(3), n).unwrap() as usize;
        ok &= g.degrees().iter().all(|&x| x == d);
        ok &= brute_triangles_through_pairs(n).iter().all(|&x| x == d);
    }
    gate(ok, format!("{}; G^K3 is Delta_H-regular for n = 3..8", notes.join(", ")))
}

/// k-AP suite.
fn criterion_10() -> Outcome {
    let start = Instant::now();
    let tol = kap::DEFAULT_TOL;
    let m = kap::DEFAULT_GRID;
    let alphas = alpha_k(3).unwrap() == Ratio::new(1, 1) && alpha_k(4).unwrap() == Ratio::new(5, 6);

    let mut degrees = true;
    for k in 3..=5 {
        for n in k..=500 {
            let mut count = vec![0usize; n + 1];
            for d in 1..=(n - 1) / (k - 1) {
                for a in 1..=n - (k - 1) * d {
                    for i in 0..k {
                        count[a + i * d] += 1;
                    }
                }
            }
            degrees &= (1..=n).all(|t| kap_degree(k, n, t) == count[t]);
        }
    }

    let f = kap_fixed_point(&KapParams::new(3, 1.0, 1.0, m).unwrap(), tol, 20_000).unwrap();
    let sym = f.symmetry_gap();
    let centre_min = f.argmin() == m / 2;

    let mut routes = 0.0f64;
    for &(k, c) in &[(3, 1.0), (4, 0.6)] {
        let a = phi_fixed_point(k, c, tol, m).unwrap();
        let b = phi_fixed_point_direct(k, c, tol, m).unwrap();
        routes = routes.max(a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }

    let mut agree = 0.0f64;
    let mut refine = 0.0f64;
    for &(k, c) in &[(3, 0.5), (3, 0.9), (4, 0.6)] {
        let r = kap_rate(k, c, kap::DEFAULT_QUAD_NODES, m).unwrap();
        let b = kap_rate_bethe(k, c, m).unwrap();
        let b2 = kap_rate_bethe(k, c, 2 * m).unwrap();
        agree = agree.max((r - b).abs());
        refine = refine.max((b2 - b).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    gate(
        alphas && degrees && sym < 10.0 * tol && centre_min && routes < 10.0 * tol && agree < 1e-4 && refine < 1e-5 && secs < 600.0,
        format!(
            "alpha exact {alphas}, degree formula {degrees}, symmetry {sym:.2e} (< 1e-11), centre minimum {centre_min}, \
             route gap {routes:.2e} (< 1e-11), rate vs Bethe {agree:.2e} (< 1e-4), M->2M {refine:.2e} (< 1e-5), {secs:.0} s (< 600 s)"
        ),
    )
}

/// Finite-n diagnostics; printed, not gated.
fn criterion_11() -> Outcome {
    let mut parts = Vec::new();
    for n in [1000, 2000] {
        let gap = kap::discrete_vs_continuum(3, 1.0, n, 2000, 1e-10).unwrap();
        parts.push(format!(
            "n={n}: sup gap {:.4} (target 0.02), max jump {:.2e}",
            gap.sup_gap, gap.discrete_max_jump
        ));
    }
    for n in [12, 18, 24] {
        let t = kap_marginal_check(3, 1.0, n, MarginalMode::Exact, 2000).unwrap();
        parts.push(format!("marginals n={n}: mean gap {:.4}, max gap {:.4}", t.mean_gap(), t.max_gap()));
    }
    let g = build_subgraph_hypergraph(&SimpleGraph::complete(3), 7).unwrap();
    let delta = g.max_degree() as f64;
    let params = BPParams::new(3, 1.0, 1.0, delta).unwrap();
    let bp = log_z_bp(&g, &params, 32).unwrap();
    let lambda = delta.powf(-0.5);
    let exact = partition_function(&g, &ModelParams::new(lambda, 1.0).unwrap()).unwrap();
    parts.push(format!(
        "G^K3 n=7: exact log Z {exact:.6}, Bethe {:.6} (rel {:.3}), integral {:.6} (rel {:.3})",
        bp.log_z,
        rel(bp.log_z, exact),
        bp.log_z_integral,
        rel(bp.log_z_integral, exact)
    ));
    report(parts.join("; "))
}

/// Monte Carlo against exact values.
fn criterion_12() -> Outcome {
    let mut rng = rng(12);
    let samples = 100_000;
    let mut worst_z = 0.0f64;
    for i in 0..20 {
        let g = random_multihypergraph(&mut rng, 10, 10, 2, 3);
        let p = rng.random_range(0.1..0.7);
        let eta = rng.random_range(0.0..0.9);
        let exact = lower_tail_exact(&g, p, lower_tail_threshold(&g, p, eta)).unwrap();
        let (est, _) = mc_lower_tail(&g, p, eta, samples, i).unwrap();
        let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
        let z = if sigma > 0.0 { (est - exact).abs() / sigma } else if (est - exact).abs() < 1e-12 { 0.0 } else { f64::INFINITY };
        worst_z = worst_z.max(z);
    }

    let mut glauber_z = 0.0f64;
    let replicas = 20_000;
    for i in 0..3 {
        let g = random_multihypergraph(&mut rng, 6, 6, 2, 3);
        let params = ModelParams::new(rng.random_range(0.3..2.0), rng.random_range(0.3..=1.0)).unwrap();
        let exact = brute_marginals(&g, params.lambda, params.zeta);
        let est = glauber_marginals(&g, &params, 200 * g.num_vertices(), replicas, 100 + i);
        for (e, x) in est.iter().zip(&exact) {
            let sigma = (x * (1.0 - x) / replicas as f64).sqrt();
            glauber_z = glauber_z.max((e - x).abs() / sigma);
        }
    }
    gate(
        worst_z <= 3.0 && glauber_z <= 3.0,
        format!("lower tail max |z| = {worst_z:.2} (<= 3) over 20 graphs, Glauber marginals max |z| = {glauber_z:.2} (<= 3)"),
    )
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let out = run();
        let tag = match (out.pass, out.gating) {
            (true, true) => "PASS",
            (true, false) => "PASS (diagnostic)",
            (false, _) => "FAIL",
        };
        println!("criterion {id:>2}: {tag}: {}", out.detail);
        if !out.pass && out.gating {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
