//! Self-avoiding-walk hypertrees and the pruned Weitz hypertree, whose root
//! marginal equals the marginal of the distinguished vertex in the source
//! hypergraph.
//!
//! The tree is built from walks out of the root vertex. A node `w` whose walk
//! ends at `x` gets one child edge for every source edge `h` that contains `x`
//! and is not used by the walk. The edge holds `w` together with one child
//! `(w, h, y)` for each `y` in `h` not yet visited, so an edge that closes a
//! cycle shrinks, possibly down to `{w}`. It keeps `h` as its label.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gibbs::{ExactOracle, ModelParams};
use crate::hypergraph::{EdgeId, Multihypergraph, VertexId};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub parent_edge: Option<usize>,
    pub depth: usize,
    pub label: VertexId,
}

/// A tree edge: its parent node `head` plus the child nodes in `members`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub head: usize,
    pub members: Vec<usize>,
    pub label: EdgeId,
}

impl TreeEdge {
    pub fn size(&self) -> usize {
        self.members.len() + 1
    }
}

/// Rooted linear hypertree with nodes labelled by source vertices and edges
/// labelled by source edge ids. Nodes are numbered in depth-first preorder
/// with the root at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledHypertree {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
    child_edges: Vec<Vec<usize>>,
}

impl LabeledHypertree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges whose head is `node`.
    pub fn child_edges(&self, node: usize) -> &[usize] {
        &self.child_edges[node]
    }

    /// Degree of `node` in the tree (parent edge included).
    pub fn degree(&self, node: usize) -> usize {
        self.child_edges[node].len() + usize::from(self.nodes[node].parent_edge.is_some())
    }

    pub fn to_multihypergraph(&self) -> Multihypergraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut all = vec![e.head];
                all.extend(&e.members);
                all
            })
            .collect();
        Multihypergraph::new(self.nodes.len(), edges).expect("tree edges are valid")
    }

    /// Text dump: a header `nodes N edges M`, then one line per node
    /// `node_id parent_id parent_edge_id depth label` (`-1` for the root's
    /// missing parent) and one line per edge
    /// `edge_id size node_ids... source_label` with the head listed first.
    pub fn dump(&self) -> String {
        let mut s = format!("nodes {} edges {}\n", self.nodes.len(), self.edges.len());
        let opt = |x: Option<usize>| x.map_or_else(|| "-1".to_string(), |i| i.to_string());
        for (id, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                s,
                "{id} {} {} {} {}",
                opt(n.parent),
                opt(n.parent_edge),
                n.depth,
                n.label
            );
        }
        for (id, e) in self.edges.iter().enumerate() {
            let _ = write!(s, "{id} {} {}", e.size(), e.head);
            for m in &e.members {
                let _ = write!(s, " {m}");
            }
            let _ = writeln!(s, " {}", e.label);
        }
        s
    }
}

/// Total orders on the vertices and edges of the source hypergraph, listed
/// from smallest to largest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeitzOrders {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl WeitzOrders {
    pub fn identity(g: &Multihypergraph) -> Self {
        Self {
            vertices: (0..g.num_vertices()).collect(),
            edges: (0..g.num_edges()).collect(),
        }
    }

    fn ranks(&self, g: &Multihypergraph) -> Result<(Vec<usize>, Vec<usize>)> {
        let v = permutation_ranks(&self.vertices, g.num_vertices())
            .ok_or_else(|| Error::InvalidOrder("vertex order is not a permutation".into()))?;
        let e = permutation_ranks(&self.edges, g.num_edges())
            .ok_or_else(|| Error::InvalidOrder("edge order is not a permutation".into()))?;
        Ok((v, e))
    }
}

fn permutation_ranks(order: &[usize], n: usize) -> Option<Vec<usize>> {
    if order.len() != n {
        return None;
    }
    let mut rank = vec![usize::MAX; n];
    for (i, &x) in order.iter().enumerate() {
        if x >= n || rank[x] != usize::MAX {
            return None;
        }
        rank[x] = i;
    }
    Some(rank)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeOptions {
    /// Nodes deeper than this are not built.
    pub depth_limit: Option<usize>,
    pub node_cap: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        Self {
            depth_limit: None,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// Unpruned walk tree with preorder subtree ranges.
struct RawTree {
    label: Vec<VertexId>,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// Subtree of node `i` is `i..end[i]`.
    end: Vec<usize>,
    edges: Vec<TreeEdge>,
    child_edges: Vec<Vec<usize>>,
}

struct RawBuilder<'a> {
    g: &'a Multihypergraph,
    inc: Vec<Vec<EdgeId>>,
    visited: Vec<bool>,
    used: Vec<bool>,
    options: TreeOptions,
    tree: RawTree,
}

impl RawBuilder<'_> {
    fn add_node(
        &mut self,
        label: VertexId,
        parent: Option<usize>,
        parent_edge: Option<usize>,
        depth: usize,
    ) -> Result<usize> {
        if self.tree.label.len() >= self.options.node_cap {
            return Err(Error::TreeTooLarge {
                cap: self.options.node_cap,
            });
        }
        let t = &mut self.tree;
        t.label.push(label);
        t.parent.push(parent);
        t.parent_edge.push(parent_edge);
        t.depth.push(depth);
        t.end.push(0);
        t.child_edges.push(Vec::new());
        Ok(t.label.len() - 1)
    }

    fn grow(&mut self, node: usize) -> Result<()> {
        let x = self.tree.label[node];
        let depth = self.tree.depth[node];
        if self.options.depth_limit.is_none_or(|l| depth < l) {
            for i in 0..self.inc[x].len() {
                let h = self.inc[x][i];
                if self.used[h] {
                    continue;
                }
                let edge_id = self.tree.edges.len();
                self.tree.edges.push(TreeEdge {
                    head: node,
                    members: Vec::new(),
                    label: h,
                });
                self.tree.child_edges[node].push(edge_id);
                let targets: Vec<VertexId> = self
                    .g
                    .edge(h)
                    .iter()
                    .copied()
                    .filter(|&y| !self.visited[y])
                    .collect();
                self.used[h] = true;
                for y in targets {
                    let child = self.add_node(y, Some(node), Some(edge_id), depth + 1)?;
                    self.tree.edges[edge_id].members.push(child);
                    self.visited[y] = true;
                    self.grow(child)?;
                    self.visited[y] = false;
                }
                self.used[h] = false;
            }
        }
        self.tree.end[node] = self.tree.label.len();
        Ok(())
    }
}

fn build_raw(g: &Multihypergraph, v: VertexId, options: TreeOptions) -> Result<RawTree> {
    if v >= g.num_vertices() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            num_vertices: g.num_vertices(),
        });
    }
    let mut b = RawBuilder {
        g,
        inc: g.incidence(),
        visited: vec![false; g.num_vertices()],
        used: vec![false; g.num_edges()],
        options,
        tree: RawTree {
            label: Vec::new(),
            parent: Vec::new(),
            parent_edge: Vec::new(),
            depth: Vec::new(),
            end: Vec::new(),
            edges: Vec::new(),
            child_edges: Vec::new(),
        },
    };
    let root = b.add_node(v, None, None, 0)?;
    b.visited[v] = true;
    b.grow(root)?;
    Ok(b.tree)
}

/// Component of the root after removing `deleted` edges and contracting
/// `occupied` nodes, renumbered in preorder.
fn extract(raw: &RawTree, occupied: &[bool], deleted: &[bool]) -> LabeledHypertree {
    let mut out = LabeledHypertree {
        nodes: Vec::new(),
        edges: Vec::new(),
        child_edges: Vec::new(),
    };
    // (raw node, new parent, new parent edge)
    let mut stack = vec![(0usize, None, None)];
    while let Some((r, parent, parent_edge)) = stack.pop() {
        let id = out.nodes.len();
        out.nodes.push(TreeNode {
            parent,
            parent_edge,
            depth: raw.depth[r],
            label: raw.label[r],
        });
        out.child_edges.push(Vec::new());
        if let (Some(p), Some(pe)) = (parent, parent_edge) {
            debug_assert!(out.edges[pe].head == p);
            out.edges[pe].members.push(id);
        }
        let mut pending = Vec::new();
        for &re in &raw.child_edges[r] {
            if deleted[re] {
                continue;
            }
            let eid = out.edges.len();
            out.edges.push(TreeEdge {
                head: id,
                members: Vec::new(),
                label: raw.edges[re].label,
            });
            out.child_edges[id].push(eid);
            for &c in &raw.edges[re].members {
                if !occupied[c] {
                    pending.push((c, Some(id), Some(eid)));
                }
            }
        }
        // reversed so the first child is popped first
        stack.extend(pending.into_iter().rev());
    }
    out
}

/// The tree of self-avoiding walks from `v`, unpruned.
pub fn build_tsaw(
    g: &Multihypergraph,
    v: VertexId,
    options: TreeOptions,
) -> Result<LabeledHypertree> {
    let raw = build_raw(g, v, options)?;
    Ok(extract(
        &raw,
        &vec![false; raw.label.len()],
        &vec![false; raw.edges.len()],
    ))
}

/// The Weitz hypertree of `g` at `v` for the given orders.
///
/// At every non-root node `w` that is still free, in breadth-first order, with
/// parent node `w'` and parent edge labelled `h`:
/// every descendant of `w` labelled by some `u` in `h` with `u < label(w)` is
/// set occupied, and every edge in the subtree of `w` whose label is an edge
/// of `g` through `label(w')` ordered before `h` is deleted. Both operations
/// act inside the subtree of `w` only, which is a contiguous preorder range.
pub fn build_weitz(
    g: &Multihypergraph,
    v: VertexId,
    orders: &WeitzOrders,
    options: TreeOptions,
) -> Result<LabeledHypertree> {
    let (vrank, erank) = orders.ranks(g)?;
    let raw = build_raw(g, v, options)?;
    let n = raw.label.len();
    let mut occupied = vec![false; n];
    let mut deleted = vec![false; raw.edges.len()];

    let mut bfs: Vec<usize> = (1..n).collect();
    bfs.sort_by_key(|&w| raw.depth[w]);
    let inc = g.incidence();
    for w in bfs {
        if occupied[w] {
            continue;
        }
        let x = raw.label[w];
        let pe = raw.parent_edge[w].expect("non-root");
        let h = raw.edges[pe].label;
        let parent_label = raw.label[raw.parent[w].expect("non-root")];
        let hv = g.edge(h);
        for d in w + 1..raw.end[w] {
            let u = raw.label[d];
            if vrank[u] < vrank[x] && hv.binary_search(&u).is_ok() {
                occupied[d] = true;
            }
        }
        let earlier: BTreeSet<EdgeId> = inc[parent_label]
            .iter()
            .copied()
            .filter(|&f| erank[f] < erank[h])
            .collect();
        if earlier.is_empty() {
            continue;
        }
        for node in w..raw.end[w] {
            for &e in &raw.child_edges[node] {
                if earlier.contains(&raw.edges[e].label) {
                    deleted[e] = true;
                }
            }
        }
    }
    Ok(extract(&raw, &occupied, &deleted))
}

/// Root occupation ratio by the bottom-up recursion
/// `R_w = lambda * prod_e (1 - zeta * prod_{u in e, u != w} R_u / (1 + R_u))`.
pub fn tree_ratio(t: &LabeledHypertree, params: &ModelParams) -> f64 {
    tree_marginals_from_leaves(t, params)[t.root()]
}

/// Root marginal `R / (1 + R)` of [`tree_ratio`].
pub fn tree_marginal(t: &LabeledHypertree, params: &ModelParams) -> f64 {
    let r = tree_ratio(t, params);
    r / (1.0 + r)
}

/// Ratio of every node in the subtree hanging below it.
fn tree_marginals_from_leaves(t: &LabeledHypertree, params: &ModelParams) -> Vec<f64> {
    let mut ratio = vec![0.0; t.num_nodes()];
    for w in (0..t.num_nodes()).rev() {
        let mut r = params.lambda;
        for &e in t.child_edges(w) {
            let occupied: f64 = t.edges[e]
                .members
                .iter()
                .map(|&u| ratio[u] / (1.0 + ratio[u]))
                .product();
            r *= 1.0 - params.zeta * occupied;
        }
        ratio[w] = r;
    }
    ratio
}

/// Occupation ratio of `v` in a linear hypertree, by the tree recursion.
pub fn hypertree_ratio(g: &Multihypergraph, v: VertexId, params: &ModelParams) -> Result<f64> {
    if !g.is_linear_hypertree() {
        return Err(Error::NotLinearHypertree);
    }
    let t = build_tsaw(g, v, TreeOptions::default())?;
    Ok(tree_ratio(&t, params))
}

/// `|mu_G(v in S) - mu_T(root in S)|` with the left side from exhaustive
/// enumeration and the right from the recursion on the Weitz hypertree.
pub fn verify_weitz_equality(
    g: &Multihypergraph,
    v: VertexId,
    params: &ModelParams,
    orders: &WeitzOrders,
) -> Result<f64> {
    let exact = ExactOracle::default().summarize(g, params)?.marginals[v];
    let t = build_weitz(g, v, orders, TreeOptions::default())?;
    Ok((exact - tree_marginal(&t, params)).abs())
}

/// Per-depth structure of the Weitz hypertree of `g ⊖ U` at `v`, comparing each
/// node's tree neighbourhood with the source neighbourhood of its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthStats {
    pub depth: usize,
    pub nodes: usize,
    /// Max of `|labels of tree edges at w  Δ  edges of g at label(w)|`.
    pub max_discrepancy: usize,
    /// Max of `deg_g(label(w)) - deg_T(w)`.
    pub max_degree_deficit: usize,
    /// For each size `l = 2..k-1`, the max number of incident tree edges of
    /// size `l`.
    pub max_short_edges: BTreeMap<usize, usize>,
    /// Max number of tree neighbours lying in a size-1 edge.
    pub max_size_one_neighbors: usize,
}

pub fn weitz_structure_report(
    g: &Multihypergraph,
    v: VertexId,
    contracted: &[VertexId],
    depth: usize,
    node_cap: usize,
) -> Result<Vec<DepthStats>> {
    if contracted.contains(&v) {
        return Err(Error::InvalidParameter(
            "the root vertex may not be contracted".into(),
        ));
    }
    let (h, map) = g.contract_vertices(contracted)?;
    let root = map.get(v).ok_or(Error::VertexOutOfRange {
        vertex: v,
        num_vertices: g.num_vertices(),
    })?;
    let k = g.edges().iter().map(|e| e.len()).max().unwrap_or(0);
    // Size-1 edges at neighbours of depth-`depth` nodes sit two levels down.
    let options = TreeOptions {
        depth_limit: Some(depth + 2),
        node_cap,
    };
    let t = build_weitz(&h, root, &WeitzOrders::identity(&h), options)?;
    let g_inc = g.incidence();

    let in_size_one: Vec<bool> = (0..t.num_nodes())
        .map(|w| t.child_edges(w).iter().any(|&e| t.edges[e].members.is_empty()))
        .collect();

    let mut stats: Vec<DepthStats> = (0..=depth)
        .map(|d| DepthStats {
            depth: d,
            nodes: 0,
            max_discrepancy: 0,
            max_degree_deficit: 0,
            max_short_edges: (2..k).map(|l| (l, 0)).collect(),
            max_size_one_neighbors: 0,
        })
        .collect();
    let mut queue = VecDeque::from([t.root()]);
    while let Some(w) = queue.pop_front() {
        let node = t.nodes[w];
        if node.depth > depth {
            continue;
        }
        let mut incident: Vec<usize> = t.child_edges(w).to_vec();
        if let Some(pe) = node.parent_edge {
            incident.push(pe);
        }
        let tree_labels: BTreeSet<EdgeId> = incident.iter().map(|&e| t.edges[e].label).collect();
        let source: BTreeSet<EdgeId> = g_inc[map.new_to_old[node.label]].iter().copied().collect();
        let discrepancy = tree_labels.symmetric_difference(&source).count();
        let deficit = source.len().saturating_sub(incident.len());

        let mut short: BTreeMap<usize, usize> = BTreeMap::new();
        let mut neighbours = BTreeSet::new();
        for &e in &incident {
            let edge = &t.edges[e];
            *short.entry(edge.size()).or_insert(0) += 1;
            neighbours.insert(edge.head);
            neighbours.extend(&edge.members);
        }
        neighbours.remove(&w);
        let size_one = neighbours.iter().filter(|&&u| in_size_one[u]).count();

        let s = &mut stats[node.depth];
        s.nodes += 1;
        s.max_discrepancy = s.max_discrepancy.max(discrepancy);
        s.max_degree_deficit = s.max_degree_deficit.max(deficit);
        for (l, m) in s.max_short_edges.iter_mut() {
            *m = (*m).max(short.get(l).copied().unwrap_or(0));
        }
        s.max_size_one_neighbors = s.max_size_one_neighbors.max(size_one);

        for &e in t.child_edges(w) {
            queue.extend(&t.edges[e].members);
        }
    }
    Ok(stats)
}
