//! Exact and Monte Carlo computations for the edge-penalty model, which gives a
//! vertex subset `S` the weight `lambda^|S| (1-zeta)^|E(S)|`. `E(S)` counts
//! induced edges with multiplicity, and the empty edge is induced by every `S`.
//!
//! The exact side walks all subsets in Gray-code order and records a census
//! `count[s][m]`: the number of subsets with `s` vertices that induce `m`
//! edges. The census is exact integer data, so partition functions for any
//! `(lambda, zeta)` and lower-tail probabilities for any `p` are read off it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Multihypergraph, VertexId};

/// Default cap on the number of free vertices in an exact enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 26;

/// Hard ceiling imposed by the 64-bit subset masks.
const MASK_BITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub lambda: f64,
    pub zeta: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, zeta: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::InvalidParameter(format!(
                "zeta must lie in [0, 1], got {zeta}"
            )));
        }
        Ok(Self { lambda, zeta })
    }

    /// Hard-core activity `p/(1-p)` with `zeta = 1`.
    pub fn hard_core_from_p(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(p / (1.0 - p), 1.0)
    }

    /// Log-weight of a subset with `s` vertices and `m` induced edges, or
    /// `None` when the weight is zero.
    fn log_weight(&self, s: usize, m: usize) -> Option<f64> {
        let mut lw = 0.0;
        if s > 0 {
            if self.lambda == 0.0 {
                return None;
            }
            lw += s as f64 * self.lambda.ln();
        }
        if m > 0 {
            if self.zeta == 1.0 {
                return None;
            }
            lw += m as f64 * (-self.zeta).ln_1p();
        }
        Some(lw)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsSummary {
    pub log_z: f64,
    pub marginals: Vec<f64>,
    pub mean_size: f64,
    pub var_size: f64,
    pub mean_edges: f64,
    pub var_edges: f64,
}

impl GibbsSummary {
    /// Occupation ratio `R_v = mu(v in S) / mu(v not in S)`.
    pub fn ratio(&self, v: VertexId) -> Result<f64> {
        let m = self.marginals[v];
        if m >= 1.0 {
            return Err(Error::SaturatedMarginal { vertex: v });
        }
        Ok(m / (1.0 - m))
    }
}

/// Subset counts by size and induced edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    num_vertices: usize,
    stride: usize,
    counts: Vec<u64>,
}

impl Census {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Largest possible induced edge count (the number of edges).
    pub fn max_edges(&self) -> usize {
        self.stride - 1
    }

    pub fn count(&self, size: usize, edges: usize) -> u64 {
        if size > self.num_vertices || edges >= self.stride {
            return 0;
        }
        self.counts[size * self.stride + edges]
    }

    /// Non-zero entries as `(size, edges, count)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (i / self.stride, i % self.stride, c))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `log sum_S lambda^|S| (1-zeta)^|E(S)|`; `-inf` when every term vanishes.
    pub fn log_weight_sum(&self, params: &ModelParams) -> f64 {
        log_sum_exp(
            self.entries()
                .filter_map(|(s, m, c)| params.log_weight(s, m).map(|lw| lw + (c as f64).ln())),
        )
    }

    /// `P(m <= threshold)` when each vertex is kept independently with
    /// probability `p`.
    pub fn lower_tail(&self, p: f64, threshold: usize) -> f64 {
        let n = self.num_vertices as f64;
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let lse = log_sum_exp(
            self.entries()
                .filter(|&(_, m, _)| m <= threshold)
                .map(|(s, _, c)| (c as f64).ln() + s as f64 * lp + (n - s as f64) * lq),
        );
        lse.exp().min(1.0)
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Exhaustive enumeration over subsets, with a size guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOracle {
    pub limit: usize,
}

impl Default for ExactOracle {
    fn default() -> Self {
        Self {
            limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

/// Raw output of one enumeration.
struct Walked {
    census: Census,
    /// Normalised weight of the subsets containing each vertex (zeros when no
    /// parameters were given).
    vertex_weight: Vec<f64>,
    /// `log` of the normalisation applied to the weights.
    shift: f64,
    weights: Vec<f64>,
}

impl Walked {
    fn total_weight(&self) -> f64 {
        self.census
            .counts
            .iter()
            .zip(&self.weights)
            .map(|(&c, &w)| c as f64 * w)
            .sum()
    }
}

impl ExactOracle {
    pub fn with_limit(limit: usize) -> Self {
        Self { limit }
    }

    fn guard(&self, free: usize) -> Result<()> {
        if free > self.limit.min(MASK_BITS) {
            return Err(Error::EnumerationGuard {
                num_vertices: free,
                limit: self.limit.min(MASK_BITS),
            });
        }
        Ok(())
    }

    /// Census of the subsets `S` with `forced ⊆ S`.
    pub fn census(&self, g: &Multihypergraph, forced: &[VertexId]) -> Result<Census> {
        Ok(self.walk(g, forced, None)?.census)
    }

    fn walk(
        &self,
        g: &Multihypergraph,
        forced: &[VertexId],
        params: Option<&ModelParams>,
    ) -> Result<Walked> {
        let n = g.num_vertices();
        let mut forced_mask = 0u64;
        let mut is_forced = vec![false; n];
        for &u in forced {
            if u >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: u,
                    num_vertices: n,
                });
            }
            is_forced[u] = true;
        }
        let free: Vec<VertexId> = (0..n).filter(|&v| !is_forced[v]).collect();
        self.guard(free.len())?;
        if n > MASK_BITS {
            return Err(Error::EnumerationGuard {
                num_vertices: n,
                limit: MASK_BITS,
            });
        }
        for (v, &f) in is_forced.iter().enumerate() {
            if f {
                forced_mask |= 1 << v;
            }
        }

        let stride = g.num_edges() + 1;
        let (weights, shift) = match params {
            Some(p) => {
                let shift = n as f64 * p.lambda.ln().max(0.0);
                let mut w = vec![0.0; (n + 1) * stride];
                for s in 0..=n {
                    for m in 0..stride {
                        if let Some(lw) = p.log_weight(s, m) {
                            w[s * stride + m] = (lw - shift).exp();
                        }
                    }
                }
                (w, shift)
            }
            None => (Vec::new(), 0.0),
        };
        let nbytes = n.div_ceil(8);

        let high_bits = if free.len() >= 16 { 6 } else { 0 };
        let low = free.len() - high_bits;
        let inc = g.incidence();
        let sizes: Vec<usize> = g.edges().iter().map(|e| e.len()).collect();
        let ctx = BlockContext {
            g,
            inc: &inc,
            sizes: &sizes,
            free: &free,
            low,
            forced_mask,
            stride,
            weights: &weights,
            nbytes,
        };
        let blocks: Vec<BlockResult> = (0..1usize << high_bits)
            .into_par_iter()
            .map(|b| ctx.run(b))
            .collect();

        let mut counts = vec![0u64; (n + 1) * stride];
        let mut hist = vec![0.0; nbytes * 256];
        for block in &blocks {
            for (c, x) in counts.iter_mut().zip(&block.counts) {
                *c += x;
            }
            for (h, x) in hist.iter_mut().zip(&block.hist) {
                *h += x;
            }
        }
        let mut vertex_weight = vec![0.0; n];
        if !weights.is_empty() {
            for (v, vw) in vertex_weight.iter_mut().enumerate() {
                let (byte, bit) = (v / 8, v % 8);
                *vw = (0..256usize)
                    .filter(|val| val >> bit & 1 == 1)
                    .map(|val| hist[byte * 256 + val])
                    .sum();
            }
        }
        Ok(Walked {
            census: Census {
                num_vertices: n,
                stride,
                counts,
            },
            vertex_weight,
            shift,
            weights,
        })
    }

    /// `log Z_G(lambda, zeta)`; `-inf` if every subset has weight zero.
    pub fn partition_function(&self, g: &Multihypergraph, params: &ModelParams) -> Result<f64> {
        Ok(self.census(g, &[])?.log_weight_sum(params))
    }

    /// `log` of the total weight of subsets containing `forced`.
    pub fn log_z_in(
        &self,
        g: &Multihypergraph,
        params: &ModelParams,
        forced: &[VertexId],
    ) -> Result<f64> {
        Ok(self.census(g, forced)?.log_weight_sum(params))
    }

    pub fn summarize(&self, g: &Multihypergraph, params: &ModelParams) -> Result<GibbsSummary> {
        self.summarize_given(g, params, &[])
    }

    /// Summary of the measure conditioned on `given ⊆ S`.
    pub fn summarize_given(
        &self,
        g: &Multihypergraph,
        params: &ModelParams,
        given: &[VertexId],
    ) -> Result<GibbsSummary> {
        let walked = self.walk(g, given, Some(params))?;
        let z = walked.total_weight();
        if z == 0.0 {
            return Err(Error::InvalidParameter(
                "every subset has weight zero (an empty edge with zeta = 1)".into(),
            ));
        }
        let marginals = walked
            .vertex_weight
            .iter()
            .map(|w| (w / z).clamp(0.0, 1.0))
            .collect();
        let (mut es, mut es2, mut em, mut em2) = (0.0, 0.0, 0.0, 0.0);
        for ((i, &c), &w) in walked.census.counts.iter().enumerate().zip(&walked.weights) {
            if c == 0 {
                continue;
            }
            let (s, m) = ((i / walked.census.stride) as f64, (i % walked.census.stride) as f64);
            let q = c as f64 * w / z;
            es += q * s;
            es2 += q * s * s;
            em += q * m;
            em2 += q * m * m;
        }
        Ok(GibbsSummary {
            log_z: z.ln() + walked.shift,
            marginals,
            mean_size: es,
            var_size: (es2 - es * es).max(0.0),
            mean_edges: em,
            var_edges: (em2 - em * em).max(0.0),
        })
    }

    /// Exact `P(X <= threshold)` for the `p`-random vertex subset, where `X`
    /// is its induced edge count.
    pub fn lower_tail_exact(&self, g: &Multihypergraph, p: f64, threshold: usize) -> Result<f64> {
        check_probability(p)?;
        Ok(self.census(g, &[])?.lower_tail(p, threshold))
    }

    /// Residuals of the four deletion/contraction identities at vertex `v`
    /// and edge `e`. Every side comes from its own enumeration.
    pub fn verify_identities(
        &self,
        g: &Multihypergraph,
        params: &ModelParams,
        v: VertexId,
        e: EdgeId,
    ) -> Result<IdentityResiduals> {
        if v >= g.num_vertices() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                num_vertices: g.num_vertices(),
            });
        }
        if e >= g.num_edges() {
            return Err(Error::EdgeIdOutOfRange {
                edge_id: e,
                num_edges: g.num_edges(),
            });
        }
        let full = self.walk(g, &[], Some(params))?;
        let z = full.total_weight();
        let z_in = full.vertex_weight[v];
        let log_z = z.ln() + full.shift;
        let log_z_in = z_in.ln() + full.shift;
        let log_z_out = (z - z_in).max(0.0).ln() + full.shift;

        let (contracted, cmap) = g.contract_vertices(&[v])?;
        let (deleted, _) = g.remove_vertices(&[v])?;
        let log_in_rhs = params.lambda.ln() + self.partition_function(&contracted, params)?;
        let log_out_rhs = self.partition_function(&deleted, params)?;

        let without_e = g.remove_edge_ids(&[e])?;
        let z_minus = self.partition_function(&without_e, params)?.exp();
        let z_minus_in = self.log_z_in(&without_e, params, g.edge(e))?.exp();
        let edge_rhs = z_minus - params.zeta * z_minus_in;

        let mut conditional = 0.0f64;
        if z_in > 0.0 {
            let given = self.summarize_given(g, params, &[v])?;
            match self.summarize(&contracted, params) {
                Ok(reference) => {
                    for u in (0..g.num_vertices()).filter(|&u| u != v) {
                        let w = cmap.get(u).expect("only v is contracted");
                        conditional =
                            conditional.max((given.marginals[u] - reference.marginals[w]).abs());
                    }
                }
                Err(_) => conditional = f64::INFINITY,
            }
        }

        Ok(IdentityResiduals {
            in_contraction: log_relative_gap(log_z_in, log_in_rhs),
            out_deletion: log_relative_gap(log_z_out, log_out_rhs),
            edge_deletion: relative_gap(log_z.exp(), edge_rhs),
            conditional,
        })
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// [`relative_gap`] of two positive numbers given by their logs.
fn log_relative_gap(la: f64, lb: f64) -> f64 {
    if la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY {
        return 0.0;
    }
    -(-(la - lb).abs()).exp_m1()
}

/// Relative residuals of the partition-function identities
/// `Z_in_v = lambda Z(G ⊖ v)`, `Z_out_v = Z(G - v)` and
/// `Z(G) = Z(G - e) - zeta Z_in_e(G - e)`, and the absolute residual of
/// `mu_G(u | v in S) = mu_{G ⊖ v}(u)` maximised over `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub in_contraction: f64,
    pub out_deletion: f64,
    pub edge_deletion: f64,
    pub conditional: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.in_contraction
            .max(self.out_deletion)
            .max(self.edge_deletion)
            .max(self.conditional)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.in_contraction,
            self.out_deletion,
            self.edge_deletion,
            self.conditional,
        ]
    }
}

struct BlockContext<'a> {
    g: &'a Multihypergraph,
    inc: &'a [Vec<EdgeId>],
    sizes: &'a [usize],
    free: &'a [VertexId],
    low: usize,
    forced_mask: u64,
    stride: usize,
    weights: &'a [f64],
    nbytes: usize,
}

struct BlockResult {
    counts: Vec<u64>,
    hist: Vec<f64>,
}

impl BlockContext<'_> {
    /// Gray-code walk over the low free vertices with the high free vertices
    /// fixed by the bits of `block`.
    fn run(&self, block: usize) -> BlockResult {
        let n = self.g.num_vertices();
        let mut mask = self.forced_mask;
        for (i, &v) in self.free[self.low..].iter().enumerate() {
            if block >> i & 1 == 1 {
                mask |= 1 << v;
            }
        }
        let mut occ: Vec<usize> = self
            .g
            .edges()
            .iter()
            .map(|e| e.iter().filter(|&&u| mask >> u & 1 == 1).count())
            .collect();
        let mut m = occ.iter().zip(self.sizes).filter(|(o, s)| o == s).count();
        let mut s = mask.count_ones() as usize;

        let mut counts = vec![0u64; (n + 1) * self.stride];
        let weighted = !self.weights.is_empty();
        let mut hist = vec![0.0; if weighted { self.nbytes * 256 } else { 0 }];
        let mut record = |mask: u64, s: usize, m: usize| {
            let idx = s * self.stride + m;
            counts[idx] += 1;
            if weighted {
                let w = self.weights[idx];
                if w != 0.0 {
                    for b in 0..self.nbytes {
                        hist[b * 256 + (mask >> (8 * b) & 0xff) as usize] += w;
                    }
                }
            }
        };
        record(mask, s, m);
        for i in 1u64..1u64 << self.low {
            let v = self.free[i.trailing_zeros() as usize];
            if mask >> v & 1 == 0 {
                mask |= 1 << v;
                s += 1;
                for &e in &self.inc[v] {
                    occ[e] += 1;
                    if occ[e] == self.sizes[e] {
                        m += 1;
                    }
                }
            } else {
                mask &= !(1 << v);
                s -= 1;
                for &e in &self.inc[v] {
                    if occ[e] == self.sizes[e] {
                        m -= 1;
                    }
                    occ[e] -= 1;
                }
            }
            record(mask, s, m);
        }
        BlockResult { counts, hist }
    }
}

pub fn partition_function(g: &Multihypergraph, params: &ModelParams) -> Result<f64> {
    ExactOracle::default().partition_function(g, params)
}

pub fn summarize(g: &Multihypergraph, params: &ModelParams) -> Result<GibbsSummary> {
    ExactOracle::default().summarize(g, params)
}

pub fn lower_tail_exact(g: &Multihypergraph, p: f64, threshold: usize) -> Result<f64> {
    ExactOracle::default().lower_tail_exact(g, p, threshold)
}

pub fn verify_identities(
    g: &Multihypergraph,
    params: &ModelParams,
    v: VertexId,
    e: EdgeId,
) -> Result<IdentityResiduals> {
    ExactOracle::default().verify_identities(g, params, v, e)
}

/// `E X = sum_e p^|e|` for the `p`-random vertex subset.
pub fn expected_edges(g: &Multihypergraph, p: f64) -> f64 {
    g.edges().iter().map(|e| p.powi(e.len() as i32)).sum()
}

/// Largest integer `t` with `t <= eta * E X`.
pub fn lower_tail_threshold(g: &Multihypergraph, p: f64, eta: f64) -> usize {
    (eta * expected_edges(g, p)).floor() as usize
}

/// Heat-bath Glauber dynamics with a systematic scan, started from the empty
/// set.
pub struct GlauberChain<'a> {
    g: &'a Multihypergraph,
    params: ModelParams,
    inc: Vec<Vec<EdgeId>>,
    state: Vec<bool>,
    occ: Vec<usize>,
    next: usize,
    rng: ChaCha8Rng,
}

impl<'a> GlauberChain<'a> {
    pub fn new(g: &'a Multihypergraph, params: ModelParams, seed: u64) -> Self {
        Self::with_stream(g, params, seed, 0)
    }

    /// Chains sharing a seed but using different streams are independent.
    pub fn with_stream(g: &'a Multihypergraph, params: ModelParams, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            g,
            params,
            inc: g.incidence(),
            state: vec![false; g.num_vertices()],
            occ: vec![0; g.num_edges()],
            next: 0,
            rng,
        }
    }

    pub fn state(&self) -> &[bool] {
        &self.state
    }

    /// One heat-bath update of the next vertex in scan order.
    pub fn step(&mut self) {
        let n = self.g.num_vertices();
        if n == 0 {
            return;
        }
        let v = self.next;
        self.next = (v + 1) % n;
        let here = usize::from(self.state[v]);
        // edges that would be fully occupied with v in S
        let t = self.inc[v]
            .iter()
            .filter(|&&e| self.occ[e] - here + 1 == self.g.edge(e).len())
            .count();
        let a = if t > 0 && self.params.zeta == 1.0 {
            0.0
        } else {
            self.params.lambda * (1.0 - self.params.zeta).powi(t as i32)
        };
        let occupy = self.rng.random::<f64>() < a / (1.0 + a);
        if occupy != self.state[v] {
            self.state[v] = occupy;
            for &e in &self.inc[v] {
                if occupy {
                    self.occ[e] += 1;
                } else {
                    self.occ[e] -= 1;
                }
            }
        }
    }

    pub fn run(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step();
        }
    }
}

/// State of a fresh chain after `steps` single-site updates, as a sorted
/// vertex list.
pub fn glauber_sample(
    g: &Multihypergraph,
    params: &ModelParams,
    steps: usize,
    seed: u64,
) -> Vec<VertexId> {
    let mut chain = GlauberChain::new(g, *params, seed);
    chain.run(steps);
    occupied(chain.state())
}

fn occupied(state: &[bool]) -> Vec<VertexId> {
    state
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| v)
        .collect()
}

/// Empirical marginals over `replicas` independent chains, each run for
/// `steps` updates. Replicas run in parallel on separate streams of `seed`.
pub fn glauber_marginals(
    g: &Multihypergraph,
    params: &ModelParams,
    steps: usize,
    replicas: usize,
    seed: u64,
) -> Vec<f64> {
    let n = g.num_vertices();
    let hits = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut chain = GlauberChain::with_stream(g, *params, seed, r);
            chain.run(steps);
            chain.state().iter().map(|&b| u64::from(b)).collect::<Vec<_>>()
        })
        .reduce(|| vec![0u64; n], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    hits.iter().map(|&h| h as f64 / replicas.max(1) as f64).collect()
}

/// Monte Carlo estimate of `P(X <= eta E X)` from `samples` independent
/// `p`-random subsets, with its binomial standard error.
pub fn mc_lower_tail(
    g: &Multihypergraph,
    p: f64,
    eta: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_probability(p)?;
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta must lie in [0, 1), got {eta}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let threshold = eta * expected_edges(g, p);
    if threshold >= g.num_edges() as f64 {
        return Ok((1.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![false; g.num_vertices()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for k in keep.iter_mut() {
            *k = rng.random::<f64>() < p;
        }
        let x = g
            .edges()
            .iter()
            .filter(|e| e.iter().all(|&u| keep[u]))
            .count();
        if x as f64 <= threshold {
            hits += 1;
        }
    }
    let est = hits as f64 / samples as f64;
    Ok((est, (est * (1.0 - est) / samples as f64).sqrt()))
}
