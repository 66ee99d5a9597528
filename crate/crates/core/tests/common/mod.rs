//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's enumeration code.

#![allow(dead_code)]

use bplt_core::{Multihypergraph, SimpleGraph};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random multihypergraph with `1..=max_n` vertices and up to `max_edges`
/// edges of sizes `min_size..=max_size`; repeated edges are allowed.
pub fn random_multihypergraph(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_edges: usize,
    min_size: usize,
    max_size: usize,
) -> Multihypergraph {
    let n = rng.random_range(max_size.max(1)..=max_n);
    let m = rng.random_range(0..=max_edges);
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(m);
    let vertices: Vec<usize> = (0..n).collect();
    for _ in 0..m {
        if !edges.is_empty() && rng.random_bool(0.15) {
            let copy: Vec<usize> = edges[rng.random_range(0..edges.len())].clone();
            edges.push(copy);
            continue;
        }
        let size = rng.random_range(min_size..=max_size.min(n));
        let e: Vec<usize> = vertices.choose_multiple(rng, size).copied().collect();
        edges.push(e);
    }
    Multihypergraph::new(n, edges).unwrap()
}

pub fn random_uniform(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Multihypergraph {
    let vertices: Vec<usize> = (0..n).collect();
    let edges = (0..m)
        .map(|_| vertices.choose_multiple(rng, k).copied().collect())
        .collect();
    Multihypergraph::new(n, edges).unwrap()
}

/// Random linear hypertree: each new edge shares exactly one vertex with the
/// existing tree and brings the rest fresh.
pub fn random_linear_hypertree(rng: &mut ChaCha8Rng, max_n: usize) -> Multihypergraph {
    let mut n = 1;
    let mut edges: Vec<Vec<usize>> = Vec::new();
    loop {
        let size = rng.random_range(2..=4);
        if n + size - 1 > max_n {
            break;
        }
        let anchor = rng.random_range(0..n);
        let mut e = vec![anchor];
        e.extend(n..n + size - 1);
        n += size - 1;
        edges.push(e);
        if rng.random_bool(0.1) {
            break;
        }
    }
    Multihypergraph::new(n, edges).unwrap()
}

/// Plain loop over all `2^N` subsets.
pub fn brute_log_z(g: &Multihypergraph, lambda: f64, zeta: f64) -> f64 {
    brute_sums(g, lambda, zeta).0.ln()
}

/// `(Z, vector of sum of weights of subsets containing v)`.
pub fn brute_sums(g: &Multihypergraph, lambda: f64, zeta: f64) -> (f64, Vec<f64>) {
    let n = g.num_vertices();
    let mut z = 0.0;
    let mut inside = vec![0.0; n];
    for mask in 0u64..1 << n {
        let size = mask.count_ones() as i32;
        let induced = g
            .edges()
            .iter()
            .filter(|e| e.iter().all(|&u| mask >> u & 1 == 1))
            .count() as i32;
        let w = lambda.powi(size) * (1.0 - zeta).powi(induced);
        z += w;
        for (v, acc) in inside.iter_mut().enumerate() {
            if mask >> v & 1 == 1 {
                *acc += w;
            }
        }
    }
    (z, inside)
}

pub fn brute_marginals(g: &Multihypergraph, lambda: f64, zeta: f64) -> Vec<f64> {
    let (z, inside) = brute_sums(g, lambda, zeta);
    inside.into_iter().map(|w| w / z).collect()
}

/// `P(X <= threshold)` for the `p`-random subset, summed subset by subset.
pub fn brute_lower_tail(g: &Multihypergraph, p: f64, threshold: usize) -> f64 {
    let n = g.num_vertices();
    let mut total = 0.0;
    for mask in 0u64..1 << n {
        let induced = g
            .edges()
            .iter()
            .filter(|e| e.iter().all(|&u| mask >> u & 1 == 1))
            .count();
        if induced <= threshold {
            let s = mask.count_ones() as i32;
            total += p.powi(s) * (1.0 - p).powi(n as i32 - s);
        }
    }
    total
}

/// All permutations of `0..n` by Heap's algorithm.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn edge_set(h: &SimpleGraph) -> std::collections::BTreeSet<(usize, usize)> {
    h.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
}

/// Permutations mapping the edge set onto itself.
pub fn brute_aut(h: &SimpleGraph) -> u64 {
    let edges = edge_set(h);
    permutations(h.num_vertices())
        .into_iter()
        .filter(|p| {
            edges.iter().all(|&(a, b)| {
                let (x, y) = (p[a], p[b]);
                edges.contains(&(x.min(y), x.max(y)))
            })
        })
        .count() as u64
}

/// `(m2 as (num, den), strictly 2-balanced)` from every pair (vertex set W
/// with |W| >= 3, edge subset inside W).
pub fn brute_m2(h: &SimpleGraph) -> ((i64, i64), bool) {
    let n = h.num_vertices();
    let edges: Vec<(usize, usize)> = h.edges().to_vec();
    let full = ((edges.len() as i64 - 1), (n as i64 - 2));
    let mut best = full;
    let mut ties = 0;
    for w in 0u32..1 << n {
        let v = w.count_ones() as i64;
        if v < 3 {
            continue;
        }
        let inside: Vec<usize> = (0..edges.len())
            .filter(|&i| w >> edges[i].0 & 1 == 1 && w >> edges[i].1 & 1 == 1)
            .collect();
        for sub in 0u32..1 << inside.len() {
            let e = sub.count_ones() as i64;
            let d = (e - 1, v - 2);
            // compare d with best and with the full density as fractions
            if d.0 * best.1 > best.0 * d.1 {
                best = d;
            }
            let is_full = w.count_ones() as usize == n && e as usize == edges.len();
            if !is_full && d.0 * full.1 >= full.0 * d.1 {
                ties += 1;
            }
        }
    }
    let g = gcd(best.0.abs(), best.1);
    ((best.0 / g, best.1 / g), ties == 0 && edges.len() >= 3)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Chromatic number by trying every colouring with `q` colours.
pub fn brute_chromatic(h: &SimpleGraph) -> usize {
    let n = h.num_vertices();
    for q in 1..=n {
        let total = q.pow(n as u32);
        for code in 0..total {
            let mut col = vec![0; n];
            let mut c = code;
            for slot in col.iter_mut() {
                *slot = c % q;
                c /= q;
            }
            if h.edges().iter().all(|&(a, b)| col[a] != col[b]) {
                return q;
            }
        }
    }
    n
}

/// Triangles of `K_n` through each pair, counted by a triple loop.
pub fn brute_triangles_through_pairs(n: usize) -> Vec<usize> {
    let mut counts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            counts.push((0..n).filter(|&l| l != i && l != j).count());
        }
    }
    counts
}

/// The Fano plane: 7 points, 7 lines of size 3, 3-regular and linear.
pub fn fano() -> Multihypergraph {
    let lines = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    Multihypergraph::new(7, lines.iter().map(|l| l.to_vec()).collect()).unwrap()
}

/// Complete 3-uniform hypergraph on 4 vertices, 3-regular.
pub fn k4_3() -> Multihypergraph {
    Multihypergraph::new(4, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
        .unwrap()
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}
