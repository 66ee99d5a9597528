//! Multihypergraphs and the structural operations used throughout the crate.
//!
//! Vertices are dense indices `0..num_vertices`. Edges are stored in a vector
//! and identified by their position (the edge id), so copies of the same
//! vertex set stay distinguishable. Every edge keeps its vertices sorted.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multihypergraph {
    num_vertices: usize,
    edges: Vec<Vec<VertexId>>,
}

/// Old-to-new vertex index map returned by operations that drop vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    pub old_to_new: Vec<Option<VertexId>>,
    pub new_to_old: Vec<VertexId>,
}

impl VertexMap {
    fn dropping(num_vertices: usize, dropped: &[bool]) -> Self {
        let mut old_to_new = vec![None; num_vertices];
        let mut new_to_old = Vec::with_capacity(num_vertices);
        for (v, slot) in old_to_new.iter_mut().enumerate() {
            if !dropped[v] {
                *slot = Some(new_to_old.len());
                new_to_old.push(v);
            }
        }
        Self {
            old_to_new,
            new_to_old,
        }
    }

    pub fn get(&self, old: VertexId) -> Option<VertexId> {
        self.old_to_new.get(old).copied().flatten()
    }
}

/// A self-avoiding walk `(v_1, e_1, v_2, ..., e_l, v_{l+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Saw {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Saw {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("a walk has at least one vertex")
    }
}

/// Degree and codegree statistics of a k-uniform hypergraph, together with the
/// quotients that measure how close it is to a regular linear hypertree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeLikeReport {
    pub k: usize,
    pub delta: usize,
    pub delta_min: usize,
    /// Maximum `l`-degree for `l = 2..k-1`.
    pub delta_ell: BTreeMap<usize, usize>,
    /// Maximum (k-1)-codegree over distinct vertex pairs.
    pub gamma: usize,
    pub edge_vertex_ratio: f64,
    pub ratios: TreeLikeRatios,
}

/// Finite-instance versions of the tree-likeness conditions. Thresholds are
/// left to the caller. Quotients with a zero denominator are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeLikeRatios {
    /// `Delta_l / Delta^((k-l)/(k-1))` for `l = 2..k-1`; should tend to 0.
    pub ell: BTreeMap<usize, Option<f64>>,
    /// `Gamma / Delta`; should tend to 0.
    pub gamma: Option<f64>,
    /// `(|E|/|V|) / Delta`; should stay bounded away from 0.
    pub density: Option<f64>,
    /// `delta_min / Delta`; tends to 1 for approximately regular sequences.
    pub regularity: Option<f64>,
}

impl Multihypergraph {
    /// Builds a multihypergraph, sorting each edge. Edge order (and thus edge
    /// ids) follows the input.
    pub fn new(num_vertices: usize, edges: Vec<Vec<VertexId>>) -> Result<Self> {
        let mut canonical = Vec::with_capacity(edges.len());
        for mut edge in edges {
            edge.sort_unstable();
            for w in edge.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::RepeatedVertex {
                        vertex: w[0],
                        edge,
                    });
                }
            }
            if let Some(&v) = edge.last() {
                if v >= num_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        num_vertices,
                    });
                }
            }
            canonical.push(edge);
        }
        Ok(Self {
            num_vertices,
            edges: canonical,
        })
    }

    pub fn edgeless(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<VertexId>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &[VertexId] {
        &self.edges[id]
    }

    /// Multiplicity of the vertex set `edge` (given in any order).
    pub fn multiplicity(&self, edge: &[VertexId]) -> usize {
        let mut key = edge.to_vec();
        key.sort_unstable();
        self.edges.iter().filter(|e| **e == key).count()
    }

    /// Edge multiset in sorted order; equal for hypergraphs that differ only in
    /// edge ids.
    pub fn canonical_edges(&self) -> Vec<Vec<VertexId>> {
        let mut edges = self.edges.clone();
        edges.sort();
        edges
    }

    /// Incident edge ids for every vertex, in increasing id order.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (id, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v].push(id);
            }
        }
        inc
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for edge in &self.edges {
            for &v in edge {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Checks that every edge has exactly `k` vertices.
    pub fn check_uniform(&self, k: usize) -> Result<()> {
        match self.edges.iter().position(|e| e.len() != k) {
            None => Ok(()),
            Some(edge_id) => Err(Error::NotUniform {
                k,
                edge_id,
                size: self.edges[edge_id].len(),
            }),
        }
    }

    fn check_vertices(&self, vertices: &[VertexId]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.num_vertices];
        for &v in vertices {
            if v >= self.num_vertices {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    num_vertices: self.num_vertices,
                });
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Sub-multihypergraph induced by `V \ U`: edges meeting `U` are dropped.
    pub fn remove_vertices(&self, removed: &[VertexId]) -> Result<(Self, VertexMap)> {
        let mask = self.check_vertices(removed)?;
        let map = VertexMap::dropping(self.num_vertices, &mask);
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| !mask[v]))
            .map(|e| e.iter().map(|&v| map.old_to_new[v].unwrap()).collect())
            .collect();
        let g = Self {
            num_vertices: map.new_to_old.len(),
            edges,
        };
        Ok((g, map))
    }

    /// Removes `U` from every edge. Edges keep their ids and may shrink to the
    /// empty edge.
    pub fn contract_vertices(&self, contracted: &[VertexId]) -> Result<(Self, VertexMap)> {
        let mask = self.check_vertices(contracted)?;
        let map = VertexMap::dropping(self.num_vertices, &mask);
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().filter_map(|&v| map.old_to_new[v]).collect())
            .collect();
        let g = Self {
            num_vertices: map.new_to_old.len(),
            edges,
        };
        Ok((g, map))
    }

    /// Deletes the edge multiset `removed`; for repeated edges the
    /// lowest-id copies go first. Remaining edges keep their relative order.
    pub fn remove_edges(&self, removed: &[Vec<VertexId>]) -> Result<Self> {
        let mut gone = vec![false; self.edges.len()];
        for edge in removed {
            let mut key = edge.clone();
            key.sort_unstable();
            let hit = self
                .edges
                .iter()
                .enumerate()
                .position(|(id, e)| !gone[id] && *e == key);
            match hit {
                Some(id) => gone[id] = true,
                None => return Err(Error::EdgeNotPresent { edge: key }),
            }
        }
        Ok(self.keep_edges(|id| !gone[id]))
    }

    /// Deletes edges by id.
    pub fn remove_edge_ids(&self, ids: &[EdgeId]) -> Result<Self> {
        let mut gone = vec![false; self.edges.len()];
        for &id in ids {
            if id >= self.edges.len() {
                return Err(Error::EdgeIdOutOfRange {
                    edge_id: id,
                    num_edges: self.edges.len(),
                });
            }
            gone[id] = true;
        }
        Ok(self.keep_edges(|id| !gone[id]))
    }

    fn keep_edges(&self, keep: impl Fn(EdgeId) -> bool) -> Self {
        Self {
            num_vertices: self.num_vertices,
            edges: self
                .edges
                .iter()
                .enumerate()
                .filter(|(id, _)| keep(*id))
                .map(|(_, e)| e.clone())
                .collect(),
        }
    }

    /// Degree, `l`-degree and codegree statistics. Every count is exact: the
    /// `l`-degrees are read off a hash table of the `l`-subsets of each edge
    /// (memory `O(|E| * C(k, l))`), and the codegrees off the table of
    /// `(k-1)`-subsets, so subsets not inside an edge are never visited.
    pub fn degree_stats(&self, k: usize) -> Result<TreeLikeReport> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
        }
        self.check_uniform(k)?;
        let degrees = self.degrees();
        let delta = degrees.iter().copied().max().unwrap_or(0);
        let delta_min = degrees.iter().copied().min().unwrap_or(0);

        let mut delta_ell = BTreeMap::new();
        for ell in 2..k {
            let mut counts: HashMap<Vec<VertexId>, usize> = HashMap::new();
            for edge in &self.edges {
                for_each_subset(edge, ell, |s| *counts.entry(s.to_vec()).or_insert(0) += 1);
            }
            delta_ell.insert(ell, counts.values().copied().max().unwrap_or(0));
        }

        // (k-1)-subset S -> distinct completions x with S + {x} an edge.
        let mut completions: HashMap<Vec<VertexId>, Vec<VertexId>> = HashMap::new();
        for edge in &self.edges {
            for skip in 0..k {
                let s: Vec<VertexId> = edge
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                completions.entry(s).or_default().push(edge[skip]);
            }
        }
        let mut pair_counts: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        for xs in completions.values_mut() {
            xs.sort_unstable();
            xs.dedup();
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    *pair_counts.entry((xs[i], xs[j])).or_insert(0) += 1;
                }
            }
        }
        let gamma = pair_counts.values().copied().max().unwrap_or(0);

        let edge_vertex_ratio = if self.num_vertices == 0 {
            0.0
        } else {
            self.edges.len() as f64 / self.num_vertices as f64
        };
        let per_delta = |x: f64| (delta > 0).then(|| x / delta as f64);
        let ell_ratios = delta_ell
            .iter()
            .map(|(&ell, &d)| {
                let scale = (delta as f64).powf((k - ell) as f64 / (k - 1) as f64);
                (ell, (delta > 0).then(|| d as f64 / scale))
            })
            .collect();
        let ratios = TreeLikeRatios {
            ell: ell_ratios,
            gamma: per_delta(gamma as f64),
            density: per_delta(edge_vertex_ratio),
            regularity: per_delta(delta_min as f64),
        };
        Ok(TreeLikeReport {
            k,
            delta,
            delta_min,
            delta_ell,
            gamma,
            edge_vertex_ratio,
            ratios,
        })
    }

    /// All self-avoiding walks from `start` of length at most `max_len`
    /// (unbounded when `None`), in depth-first order starting with `(start)`.
    pub fn enumerate_saws(&self, start: VertexId, max_len: Option<usize>) -> Result<Vec<Saw>> {
        self.check_vertices(&[start])?;
        let inc = self.incidence();
        let mut out = Vec::new();
        let mut walk = Saw {
            vertices: vec![start],
            edges: Vec::new(),
        };
        let mut visited = vec![false; self.num_vertices];
        let mut used = vec![false; self.edges.len()];
        visited[start] = true;
        self.saw_dfs(&inc, max_len, &mut walk, &mut visited, &mut used, &mut out);
        Ok(out)
    }

    fn saw_dfs(
        &self,
        inc: &[Vec<EdgeId>],
        max_len: Option<usize>,
        walk: &mut Saw,
        visited: &mut [bool],
        used: &mut [bool],
        out: &mut Vec<Saw>,
    ) {
        out.push(walk.clone());
        if max_len.is_some_and(|m| walk.len() >= m) {
            return;
        }
        let x = walk.end();
        for &h in &inc[x] {
            if used[h] {
                continue;
            }
            for &y in &self.edges[h] {
                if visited[y] {
                    continue;
                }
                used[h] = true;
                visited[y] = true;
                walk.edges.push(h);
                walk.vertices.push(y);
                self.saw_dfs(inc, max_len, walk, visited, used, out);
                walk.vertices.pop();
                walk.edges.pop();
                visited[y] = false;
                used[h] = false;
            }
        }
    }

    /// True iff the hypergraph is linear and every pair of distinct vertices
    /// is joined by exactly one self-avoiding walk. Edges of size 0 or 1 (with
    /// any multiplicity) do not affect the answer.
    ///
    /// Equivalent test: the vertex/edge incidence graph restricted to edges of
    /// size at least 2 is a spanning tree.
    pub fn is_linear_hypertree(&self) -> bool {
        let n = self.num_vertices;
        if n == 0 {
            return true;
        }
        let big: Vec<&Vec<VertexId>> = self.edges.iter().filter(|e| e.len() >= 2).collect();
        let incidences: usize = big.iter().map(|e| e.len()).sum();
        if incidences + 1 != n + big.len() {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &big {
            let r0 = find(&mut parent, e[0]);
            for &v in &e[1..] {
                let r = find(&mut parent, v);
                if r == r0 {
                    // a cycle in the incidence graph
                    return false;
                }
                parent[r] = r0;
            }
        }
        let root = find(&mut parent, 0);
        (1..n).all(|v| find(&mut parent, v) == root)
    }

    /// Text form: a header `N M`, then one line per edge listing its sorted
    /// vertices separated by single spaces (an empty line is the empty edge).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.num_vertices, self.edges.len());
        for edge in &self.edges {
            let mut first = true;
            for v in edge {
                if !first {
                    s.push(' ');
                }
                first = false;
                let _ = write!(s, "{v}");
            }
            s.push('\n');
        }
        s
    }
}

impl FromStr for Multihypergraph {
    type Err = Error;

    /// Parses the text form. Lines whose first non-blank character is `#` are
    /// comments; a `#` after edge content starts a trailing comment. Before
    /// the header blank lines are ignored; after it each blank line is an
    /// empty edge, until `M` edges have been read.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        let (header_line, header) = loop {
            match lines.next() {
                None => return Err(parse_err(0, "missing header `N M`".into())),
                Some((i, raw)) => {
                    let body = strip_comment(raw);
                    if body.trim().is_empty() {
                        continue;
                    }
                    break (i, body);
                }
            }
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(header_line, "header must be `N M`".into()));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(header_line, format!("bad vertex count {:?}", fields[0])))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(header_line, format!("bad edge count {:?}", fields[1])))?;

        let mut edges = Vec::with_capacity(m);
        for (i, raw) in lines.by_ref() {
            if edges.len() == m {
                if !strip_comment(raw).trim().is_empty() {
                    return Err(parse_err(i, format!("more than {m} edge lines")));
                }
                continue;
            }
            if raw.trim_start().starts_with('#') {
                continue;
            }
            let body = strip_comment(raw);
            let edge = body
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| parse_err(i, format!("bad vertex {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            edges.push(edge);
        }
        if edges.len() != m {
            return Err(parse_err(
                text.lines().count(),
                format!("expected {m} edge lines, found {}", edges.len()),
            ));
        }
        Multihypergraph::new(n, edges)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// Calls `f` on every `size`-subset of the sorted slice `items`, in
/// lexicographic order.
pub(crate) fn for_each_subset(items: &[usize], size: usize, mut f: impl FnMut(&[usize])) {
    let n = items.len();
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf = vec![0; size];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = items[i];
        }
        f(&buf);
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - size {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
