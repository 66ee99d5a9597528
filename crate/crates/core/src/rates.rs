//! Closed-form lower-tail rates for regular hypergraphs, and the subgraph
//! toolkit: 2-density, automorphisms, chromatic number, and the hypergraph
//! whose vertices are the edges of `K_n` and whose edges are copies of `H`.

use std::collections::BTreeSet;
use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::bp::{solve_zeta_regular, thresholds, x_star_regular};
use crate::error::{Error, Result};
use crate::hypergraph::Multihypergraph;

/// Largest pattern graph accepted by the exhaustive routines.
pub const MAX_PATTERN_VERTICES: usize = 10;

/// Cap on the number of injective maps tried when listing copies of `H`.
pub const MAX_COPY_MAPS: u128 = 50_000_000;

/// Lower-tail rate for `p = c Delta^(-1/(k-1))` on a regular, tree-like
/// k-uniform sequence:
/// `x* + (x*)^k (1 - 1/k) zeta - log(1 - zeta) eta c^k / k - c`, where `zeta`
/// solves `(1 - zeta) (x*)^k = eta c^k` and `x* = x*_k(c, zeta)`.
pub fn rate_gnp(k: usize, c: f64, eta: f64) -> Result<f64> {
    let th = thresholds(k, eta)?;
    if !(c > 0.0 && c < th.c_bar) {
        return Err(Error::OutOfRange(format!(
            "c = {c} is outside 0 < c < {} (k = {k}, eta = {eta}); at eta = 0 the \
             bound is (e/(k-1))^(1/(k-1))",
            th.c_bar
        )));
    }
    let (zeta, _) = solve_zeta_regular(k, c, eta)?;
    let x = x_star_regular(k, c, zeta)?;
    let kf = k as f64;
    let mut rate = x + x.powi(k as i32) * (1.0 - 1.0 / kf) * zeta - c;
    if eta > 0.0 {
        rate -= (-zeta).ln_1p() * eta * c.powi(k as i32) / kf;
    }
    Ok(rate)
}

/// Lower-tail rate at a fixed number of elements,
/// `-b^k (1 - eta + eta log eta) / k`, valid for `(k-1) b^(k-1) (1-eta) < 1`.
pub fn rate_gnm(k: usize, b: f64, eta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta must lie in [0, 1), got {eta}")));
    }
    let cond = (k - 1) as f64 * b.powi(k as i32 - 1) * (1.0 - eta);
    if !(b > 0.0 && cond < 1.0) {
        return Err(Error::OutOfRange(format!(
            "need b > 0 and (k-1) b^(k-1) (1-eta) < 1, got b = {b} with value {cond}"
        )));
    }
    let poisson = if eta == 0.0 {
        1.0
    } else {
        1.0 - eta + eta * eta.ln()
    };
    Ok(-(b.powi(k as i32) * poisson) / k as f64)
}

/// Simple graph used as a subgraph pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("loop at vertex {a}")));
            }
            let (a, b) = (a.min(b), a.max(b));
            if b >= num_vertices {
                return Err(Error::VertexOutOfRange {
                    vertex: b,
                    num_vertices,
                });
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidParameter(format!("repeated edge {{{a}, {b}}}")));
            }
            canonical.push((a, b));
        }
        Ok(Self {
            num_vertices,
            edges: canonical,
        })
    }

    pub fn complete(r: usize) -> Self {
        let edges = (0..r).flat_map(|a| (a + 1..r).map(move |b| (a, b))).collect();
        Self::new(r, edges).expect("valid")
    }

    pub fn cycle(l: usize) -> Result<Self> {
        if l < 3 {
            return Err(Error::InvalidParameter(format!("a cycle needs >= 3 vertices, got {l}")));
        }
        Self::new(l, (0..l).map(|i| (i, (i + 1) % l)).collect())
    }

    pub fn path(l: usize) -> Self {
        Self::new(l, (1..l).map(|i| (i - 1, i)).collect()).expect("valid")
    }

    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()).expect("valid")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect();
        Self::new(a + b, edges).expect("valid")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::new(10, edges).expect("valid")
    }

    /// Looks up a named pattern: `K<r>`, `C<l>`, `P<l>`, `S<l>`, `K<a>,<b>`,
    /// `petersen`, `paw` (triangle with a pendant edge), `diamond` (`K4`
    /// minus an edge).
    pub fn named(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        let unknown = || Error::InvalidParameter(format!("unknown graph name {name:?}"));
        let num = |s: &str| s.parse::<usize>().map_err(|_| unknown());
        match lower.as_str() {
            "petersen" => return Ok(Self::petersen()),
            "paw" => return Self::new(4, vec![(0, 1), (1, 2), (0, 2), (2, 3)]),
            "diamond" => return Self::new(4, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]),
            _ => {}
        }
        let (head, rest) = lower.split_at(1.min(lower.len()));
        match head {
            "k" => match rest.split_once(',') {
                Some((a, b)) => Ok(Self::complete_bipartite(num(a)?, num(b)?)),
                None => Ok(Self::complete(num(rest)?)),
            },
            "c" => Self::cycle(num(rest)?),
            "p" => Ok(Self::path(num(rest)?)),
            "s" => Ok(Self::star(num(rest)?)),
            _ => Err(unknown()),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.num_vertices]; self.num_vertices];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in 0..self.num_vertices {
                if adj[v][u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn check_size(&self) -> Result<()> {
        if self.num_vertices > MAX_PATTERN_VERTICES {
            return Err(Error::GraphTooLarge(format!(
                "pattern has {} vertices; the exhaustive routines stop at {MAX_PATTERN_VERTICES}",
                self.num_vertices
            )));
        }
        Ok(())
    }
}

impl FromStr for SimpleGraph {
    type Err = Error;

    /// Accepts the hypergraph text format with every edge of size 2, or a
    /// library name.
    fn from_str(s: &str) -> Result<Self> {
        let has_header = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty())
            .is_some_and(|l| l.split_whitespace().count() == 2 && l.split_whitespace().all(|t| t.parse::<usize>().is_ok()));
        if !has_header {
            return Self::named(s);
        }
        let h: Multihypergraph = s.parse()?;
        let mut edges = Vec::with_capacity(h.num_edges());
        for (id, e) in h.edges().iter().enumerate() {
            if e.len() != 2 {
                return Err(Error::NotUniform {
                    k: 2,
                    edge_id: id,
                    size: e.len(),
                });
            }
            edges.push((e[0], e[1]));
        }
        Self::new(h.num_vertices(), edges)
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.num_vertices, self.edges.len())?;
        for (a, b) in &self.edges {
            write!(f, "\n{a} {b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphProfile {
    /// `max (e(F) - 1) / (v(F) - 2)` over subgraphs with at least 3 vertices.
    pub m2: Ratio<i64>,
    pub strictly_2_balanced: bool,
    pub aut: u64,
    pub chromatic_number: usize,
}

/// Exhaustive profile of a pattern with 3 to 10 vertices. The densest
/// subgraph on a vertex set is the induced one, so `m2` is a maximum over
/// vertex subsets; strict balance asks that every proper subset of size at
/// least 3 falls strictly below the full graph.
pub fn subgraph_profile(h: &SimpleGraph) -> Result<SubgraphProfile> {
    h.check_size()?;
    let n = h.num_vertices;
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "the 2-density needs at least 3 vertices, got {n}"
        )));
    }
    let full: u32 = (1u32 << n) - 1;
    let density = |mask: u32| {
        let e = h
            .edges
            .iter()
            .filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .count() as i64;
        Ratio::new(e - 1, mask.count_ones() as i64 - 2)
    };
    let whole = density(full);
    let mut m2 = whole;
    let mut unique = true;
    for mask in 0..full {
        if mask.count_ones() < 3 {
            continue;
        }
        let d = density(mask);
        if d >= whole {
            unique = false;
        }
        if d > m2 {
            m2 = d;
        }
    }
    Ok(SubgraphProfile {
        m2,
        strictly_2_balanced: unique && h.num_edges() >= 3,
        aut: automorphism_count(h),
        chromatic_number: chromatic_number(h),
    })
}

/// Number of automorphisms, by backtracking over partial maps that preserve
/// adjacency and degree.
pub fn automorphism_count(h: &SimpleGraph) -> u64 {
    let adj = h.adjacency();
    let deg: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let n = h.num_vertices;
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        adj: &[Vec<bool>],
        deg: &[usize],
        image: &mut [usize],
        used: &mut [bool],
    ) -> u64 {
        let n = adj.len();
        if i == n {
            return 1;
        }
        let mut total = 0;
        for t in 0..n {
            if used[t] || deg[t] != deg[i] {
                continue;
            }
            if (0..i).any(|j| adj[i][j] != adj[t][image[j]]) {
                continue;
            }
            used[t] = true;
            image[i] = t;
            total += extend(i + 1, adj, deg, image, used);
            used[t] = false;
        }
        total
    }
    extend(0, &adj, &deg, &mut image, &mut used)
}

/// Smallest number of colours in a proper colouring.
pub fn chromatic_number(h: &SimpleGraph) -> usize {
    let n = h.num_vertices;
    if n == 0 {
        return 0;
    }
    let adj = h.adjacency();

    fn colour(v: usize, q: usize, adj: &[Vec<bool>], col: &mut [usize]) -> bool {
        if v == adj.len() {
            return true;
        }
        // colours above the largest used so far are interchangeable
        let used_max = col[..v].iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..q.min(used_max + 1) {
            if (0..v).all(|u| !adj[v][u] || col[u] != c) {
                col[v] = c;
                if colour(v + 1, q, adj, col) {
                    return true;
                }
            }
        }
        false
    }
    let mut col = vec![0; n];
    (1..=n)
        .find(|&q| colour(0, q, &adj, &mut col))
        .expect("n colours always suffice")
}

fn falling(n: u128, j: u128) -> u128 {
    (0..j).map(|i| n - i).product()
}

/// `Delta_H = 2k (n-2)_(h-2) / |aut(H)|`, the number of copies of `H` in `K_n`
/// through a fixed edge.
pub fn delta_h(h: &SimpleGraph, n: usize) -> Result<u128> {
    h.check_size()?;
    let hv = h.num_vertices;
    if hv < 2 || n < hv {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= h <= n, got h = {hv}, n = {n}"
        )));
    }
    let aut = automorphism_count(h) as u128;
    let num = 2 * h.num_edges() as u128 * falling(n as u128 - 2, hv as u128 - 2);
    if num % aut != 0 {
        return Err(Error::Divisibility(format!("{num} is not divisible by {aut}")));
    }
    Ok(num / aut)
}

/// Index of the pair `{i, j}` among the edges of `K_n` in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Hypergraph on the `C(n, 2)` edges of `K_n` with one `|E(H)|`-edge per copy
/// of `H`. Copies are images of injective vertex maps, deduplicated.
pub fn build_subgraph_hypergraph(h: &SimpleGraph, n: usize) -> Result<Multihypergraph> {
    h.check_size()?;
    let hv = h.num_vertices;
    if n < hv {
        return Err(Error::InvalidParameter(format!("need n >= h, got n = {n}, h = {hv}")));
    }
    let maps = falling(n as u128, hv as u128);
    if maps > MAX_COPY_MAPS {
        return Err(Error::GraphTooLarge(format!(
            "{maps} vertex maps exceed the cap of {MAX_COPY_MAPS}"
        )));
    }
    let copies: BTreeSet<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut found = BTreeSet::new();
            let mut image = vec![first];
            let mut used = vec![false; n];
            used[first] = true;
            collect_copies(h, n, &mut image, &mut used, &mut found);
            found
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let aut = automorphism_count(h) as u128;
    if copies.len() as u128 * aut != maps {
        return Err(Error::Divisibility(format!(
            "{} copies times {aut} automorphisms is not {maps}",
            copies.len()
        )));
    }
    Multihypergraph::new(n * (n - 1) / 2, copies.into_iter().collect())
}

fn collect_copies(
    h: &SimpleGraph,
    n: usize,
    image: &mut Vec<usize>,
    used: &mut [bool],
    found: &mut BTreeSet<Vec<usize>>,
) {
    if image.len() == h.num_vertices {
        let mut e: Vec<usize> = h
            .edges
            .iter()
            .map(|&(a, b)| pair_index(n, image[a], image[b]))
            .collect();
        e.sort_unstable();
        found.insert(e);
        return;
    }
    for t in 0..n {
        if used[t] {
            continue;
        }
        used[t] = true;
        image.push(t);
        collect_copies(h, n, image, used, found);
        image.pop();
        used[t] = false;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Each edge of `K_n` kept independently with `p = c Delta_H^(-1/(k-1))`.
    Gnp,
    /// Exactly `m = b Delta_H^(-1/(k-1)) C(n, 2)` edges.
    Gnm,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gnp" => Ok(Model::Gnp),
            "gnm" => Ok(Model::Gnm),
            _ => Err(Error::InvalidParameter(format!("model must be gnp or gnm, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphRate {
    /// `lim Delta_H^(1/(k-1)) C(n,2)^(-1) log P(X_H <= eta E X_H)`.
    pub rate: f64,
    pub k: usize,
    pub profile: SubgraphProfile,
    /// `1/(k-1)`, the exponent of `Delta_H` in the scaling.
    pub delta_exponent: f64,
    /// How `p` (or `m`) depends on `n`, in both common forms.
    pub parameterization: String,
}

pub fn rate_h(h: &SimpleGraph, param: f64, eta: f64, model: Model) -> Result<SubgraphRate> {
    let profile = subgraph_profile(h)?;
    if !profile.strictly_2_balanced {
        return Err(Error::InvalidParameter(
            "H is not strictly 2-balanced, so the critical-regime formula does not apply".into(),
        ));
    }
    let k = h.num_edges();
    let rate = match model {
        Model::Gnp => rate_gnp(k, param, eta)?,
        Model::Gnm => rate_gnm(k, param, eta)?,
    };
    let km1 = (k - 1) as f64;
    let lead = (profile.aut as f64 / (2.0 * k as f64)).powf(1.0 / km1);
    let parameterization = match model {
        Model::Gnp => format!(
            "p ~ c Delta_H^(-1/{k1}) ~ {c} * {lead} * n^(-1/m2) = {scaled} n^(-{inv}) with m2 = {m2}",
            k1 = k - 1,
            c = param,
            scaled = param * lead,
            inv = profile.m2.recip(),
            m2 = profile.m2,
        ),
        Model::Gnm => format!(
            "m ~ b Delta_H^(-1/{k1}) C(n,2) ~ {b} * {lead} * n^(2-1/m2) = {scaled} n^(2-{inv}) with m2 = {m2}",
            k1 = k - 1,
            b = param,
            scaled = param * lead,
            inv = profile.m2.recip(),
            m2 = profile.m2,
        ),
    };
    Ok(SubgraphRate {
        rate,
        k,
        profile,
        delta_exponent: 1.0 / km1,
        parameterization,
    })
}

/// Rate of being `(chi - 1)`-partite in the same scaling, a lower bound on the
/// `H`-free rate: `-c/r` for `G(n,p)` and `b log(1 - 1/r)` for `G(n,m)`,
/// with `r = chi(H) - 1`.
pub fn partite_bound(h: &SimpleGraph, param: f64, model: Model) -> Result<f64> {
    h.check_size()?;
    let chi = chromatic_number(h);
    if chi < 3 {
        return Err(Error::InvalidParameter(format!(
            "the partite bound needs chromatic number >= 3, got {chi}"
        )));
    }
    let r = (chi - 1) as f64;
    Ok(match model {
        Model::Gnp => -param / r,
        Model::Gnm => param * (-1.0 / r).ln_1p(),
    })
}

/// Upper end of the valid `c` range for [`rate_gnp`] at `eta = 0`.
pub fn c_limit_hard_core(k: usize) -> f64 {
    (E / (k - 1) as f64).powf(1.0 / (k - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::lambert_w0;

    #[test]
    fn gnp_examples() {
        let w = lambert_w0(1.0).unwrap();
        let r = rate_gnp(2, 1.0, 0.0).unwrap();
        assert!((r - (w + w * w / 2.0 - 1.0)).abs() < 1e-15);
        assert!((r + 0.272_031).abs() < 1e-6);

        // small c: -c^k/k to leading order
        let c = 1e-3;
        let r = rate_gnp(3, c, 0.0).unwrap();
        assert!(r < 0.0);
        assert!((r / (-c.powi(3) / 3.0) - 1.0).abs() < 1e-3);

        assert!(rate_gnp(3, 2.0, 0.0).is_err());
        assert!(rate_gnp(3, 0.0, 0.0).is_err());
    }

    #[test]
    fn gnm_examples() {
        assert_eq!(rate_gnm(3, 0.5, 0.0).unwrap(), -0.125 / 3.0);
        assert!(rate_gnm(3, 0.5, 1.0 - 1e-9).unwrap().abs() < 1e-15);
        assert!(rate_gnm(3, 1.0, 0.0).is_err());
        let eta: f64 = 0.4;
        let r = rate_gnm(2, 0.6, eta).unwrap();
        assert!((r + 0.36 * (1.0 - eta + eta * eta.ln()) / 2.0).abs() < 1e-16);
    }

    #[test]
    fn named_graphs() {
        assert_eq!(SimpleGraph::named("K4").unwrap().num_edges(), 6);
        assert_eq!(SimpleGraph::named("C5").unwrap().num_edges(), 5);
        assert_eq!(SimpleGraph::named("K2,3").unwrap().num_edges(), 6);
        assert_eq!(SimpleGraph::named("petersen").unwrap().num_edges(), 15);
        assert!(SimpleGraph::named("X9").is_err());
        let g: SimpleGraph = "3 3\n0 1\n0 2\n1 2\n".parse().unwrap();
        assert_eq!(g, SimpleGraph::complete(3));
        assert_eq!("paw".parse::<SimpleGraph>().unwrap().num_edges(), 4);
    }

    #[test]
    fn profiles() {
        let k3 = subgraph_profile(&SimpleGraph::complete(3)).unwrap();
        assert_eq!(k3.m2, Ratio::new(2, 1));
        assert!(k3.strictly_2_balanced);
        assert_eq!((k3.aut, k3.chromatic_number), (6, 3));

        let paw = subgraph_profile(&SimpleGraph::named("paw").unwrap()).unwrap();
        assert!(!paw.strictly_2_balanced);
        assert_eq!(paw.m2, Ratio::new(2, 1));

        let c4 = subgraph_profile(&SimpleGraph::cycle(4).unwrap()).unwrap();
        assert!(c4.strictly_2_balanced);
        assert_eq!(c4.m2, Ratio::new(3, 2));
        assert_eq!((c4.aut, c4.chromatic_number), (8, 2));

        let pet = subgraph_profile(&SimpleGraph::petersen()).unwrap();
        assert_eq!((pet.aut, pet.chromatic_number), (120, 3));
    }

    #[test]
    fn delta_h_examples() {
        let k3 = SimpleGraph::complete(3);
        for n in 3..12 {
            assert_eq!(delta_h(&k3, n).unwrap(), n as u128 - 2);
        }
        let c4 = SimpleGraph::cycle(4).unwrap();
        assert_eq!(delta_h(&c4, 4).unwrap(), 2 * 4 * 2 / 8);
    }

    #[test]
    fn subgraph_hypergraph_examples() {
        let k3 = SimpleGraph::complete(3);
        let g = build_subgraph_hypergraph(&k3, 4).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (6, 4));
        let g6 = build_subgraph_hypergraph(&k3, 6).unwrap();
        assert!(g6.degrees().iter().all(|&d| d == 4));
        let c4 = build_subgraph_hypergraph(&SimpleGraph::cycle(4).unwrap(), 5).unwrap();
        // 5 choose 4 vertex sets, 3 four-cycles on each
        assert_eq!(c4.num_edges(), 15);
    }

    #[test]
    fn rate_h_examples() {
        let k3 = SimpleGraph::complete(3);
        let r = rate_h(&k3, 1.0, 0.0, Model::Gnp).unwrap();
        assert_eq!(r.rate, rate_gnp(3, 1.0, 0.0).unwrap());
        assert!(r.parameterization.contains("n^(-1/2)"));
        let c4 = SimpleGraph::cycle(4).unwrap();
        assert_eq!(rate_h(&c4, 0.9, 0.0, Model::Gnp).unwrap().k, 4);
        assert!(rate_h(&c4, c_limit_hard_core(4) + 0.01, 0.0, Model::Gnp).is_err());
        assert!(rate_h(&SimpleGraph::named("paw").unwrap(), 0.5, 0.0, Model::Gnp).is_err());
    }

    #[test]
    fn partite_bounds() {
        let k3 = SimpleGraph::complete(3);
        assert_eq!(partite_bound(&k3, 1.0, Model::Gnp).unwrap(), -0.5);
        assert!((partite_bound(&k3, 0.3, Model::Gnm).unwrap() - 0.3 * 0.5f64.ln()).abs() < 1e-16);
        assert!(partite_bound(&SimpleGraph::cycle(4).unwrap(), 1.0, Model::Gnp).is_err());
    }
}
