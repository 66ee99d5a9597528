//! Arithmetic progressions: the hypergraph of k-term APs in `[n]`, its
//! continuum BP operator discretized on `[0, 1]`, the limiting marginal
//! profile `x*_{k,c}`, and the two rate formulas for `P(no k-AP)`.

use num_rational::Ratio;

use crate::bp::{BPParams, BpOperator};
use crate::error::{Error, Result};
use crate::gauss::gauss_legendre_on;
use crate::gibbs::{glauber_marginals, ExactOracle, ModelParams};
use crate::hypergraph::Multihypergraph;

pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 20_000;
pub const DEFAULT_QUAD_NODES: usize = 64;
/// Largest `n` for which conditional marginals are enumerated exactly.
pub const EXACT_MARGINAL_LIMIT: usize = 24;

/// `alpha_k = 1/2 sum_i min(1/(i-1), 1/(k-i))`, reading `1/0` as infinity.
pub fn alpha_k(k: usize) -> Result<Ratio<i64>> {
    check_k(k)?;
    let k = k as i64;
    let sum: Ratio<i64> = (1..=k)
        .map(|i| {
            let d = if i == 1 {
                k - i
            } else if i == k {
                i - 1
            } else {
                (i - 1).max(k - i)
            };
            Ratio::new(1, d)
        })
        .sum();
    Ok(sum / 2)
}

fn alpha_f64(k: usize) -> Result<f64> {
    let a = alpha_k(k)?;
    Ok(*a.numer() as f64 / *a.denom() as f64)
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k must be >= 3, got {k}")));
    }
    Ok(())
}

/// Upper end `(e / ((k-1) alpha_k))^(1/(k-1))` of the admissible `c`.
pub fn c_limit(k: usize) -> Result<f64> {
    let a = alpha_f64(k)?;
    Ok((std::f64::consts::E / ((k - 1) as f64 * a)).powf(1.0 / (k - 1) as f64))
}

/// All k-term APs `{a, a+d, ..., a+(k-1)d}` in `{1..n}` with `d >= 1`.
/// Vertex `j - 1` stands for the integer `j`.
pub fn build_kap_hypergraph(k: usize, n: usize) -> Result<Multihypergraph> {
    check_k(k)?;
    if n < k {
        return Err(Error::InvalidParameter(format!("need n >= k, got n = {n}, k = {k}")));
    }
    let mut edges = Vec::new();
    for d in 1..=(n - 1) / (k - 1) {
        for a in 0..n - (k - 1) * d {
            edges.push((0..k).map(|i| a + i * d).collect());
        }
    }
    Multihypergraph::new(n, edges)
}

/// Number of k-APs in `{1..n}` containing `t`:
/// `sum_i min(floor((t-1)/(i-1)), floor((n-t)/(k-i)))`.
pub fn kap_degree(k: usize, n: usize, t: usize) -> usize {
    debug_assert!((1..=n).contains(&t));
    (1..=k)
        .map(|i| {
            let left = if i == 1 { usize::MAX } else { (t - 1) / (i - 1) };
            let right = if i == k { usize::MAX } else { (n - t) / (k - i) };
            left.min(right)
        })
        .sum()
}

/// Values of a function on the grid `i/M`, `i = 0..=M`, read between grid
/// points by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter("a grid function needs at least 2 points".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "grid values must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { values })
    }

    pub fn constant(grid_size: usize, c: f64) -> Self {
        Self {
            values: vec![c; grid_size + 1],
        }
    }

    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, t: f64) -> f64 {
        interpolate(&self.values, t * self.grid_size() as f64)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `max_i |f(i/M) - f(1 - i/M)|`.
    pub fn symmetry_gap(&self) -> f64 {
        self.values
            .iter()
            .zip(self.values.iter().rev())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }

    pub fn argmin(&self) -> usize {
        arg_by(&self.values, |a, b| a < b)
    }

    pub fn argmax(&self) -> usize {
        arg_by(&self.values, |a, b| a > b)
    }

    /// Composite trapezoid rule over `[0, 1]`.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values)
    }

    /// `max_i |log f_i - log g_i|`; grids must match.
    pub fn log_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grid sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.ln() - b.ln()).abs())
            .fold(0.0, f64::max)
    }
}

fn arg_by(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

fn trapezoid(v: &[f64]) -> f64 {
    let m = v.len() - 1;
    let inner: f64 = v[1..m].iter().sum();
    (inner + 0.5 * (v[0] + v[m])) / m as f64
}

/// `v` at fractional grid position `pos`, clamped to the grid.
fn interpolate(v: &[f64], pos: f64) -> f64 {
    let m = v.len() - 1;
    let pos = pos.clamp(0.0, m as f64);
    let lo = (pos.floor() as usize).min(m - 1);
    let w = pos - lo as f64;
    v[lo] * (1.0 - w) + v[lo + 1] * w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KapParams {
    pub k: usize,
    pub c: f64,
    pub zeta: f64,
    pub grid_size: usize,
}

impl KapParams {
    pub fn new(k: usize, c: f64, zeta: f64, grid_size: usize) -> Result<Self> {
        check_k(k)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(Error::InvalidParameter(format!("zeta must lie in (0, 1], got {zeta}")));
        }
        if grid_size < k {
            return Err(Error::InvalidParameter(format!(
                "grid size must be at least k = {k}, got {grid_size}"
            )));
        }
        Ok(Self {
            k,
            c,
            zeta,
            grid_size,
        })
    }

    /// `zeta (k-1) c^(k-1)`, which must stay below `e`.
    pub fn contraction_value(&self) -> f64 {
        self.zeta * (self.k - 1) as f64 * self.c.powi(self.k as i32 - 1)
    }

    /// `1 - zeta (k-1) c^(k-1) / e`.
    pub fn delta_contraction(&self) -> f64 {
        1.0 - self.contraction_value() / std::f64::consts::E
    }

    pub fn check_contraction(&self) -> Result<()> {
        let value = self.contraction_value();
        if value < std::f64::consts::E {
            Ok(())
        } else {
            Err(Error::ContractionCondition { value })
        }
    }
}

/// One trapezoid line `s -> prod_q f(t_i + q s)`, `s` in `[0, (steps + frac)/M]`.
#[derive(Debug, Clone)]
struct Stencil {
    offsets: Vec<isize>,
    steps: usize,
    frac: f64,
}

impl Stencil {
    /// Upper limit `min(a1/b1, a2/b2)` in grid units, `None` meaning infinity.
    fn new(offsets: Vec<isize>, left: Option<(usize, usize)>, right: Option<(usize, usize)>) -> Self {
        let (a, b) = match (left, right) {
            (Some(l), Some(r)) => {
                if l.0 * r.1 <= r.0 * l.1 {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => (0, 1),
        };
        Self {
            offsets,
            steps: a / b,
            frac: (a % b) as f64 / b as f64,
        }
    }

    /// Integral in grid units (multiply by `1/M` for the true value).
    fn integrate(&self, v: &[f64], i: usize) -> f64 {
        let at = |j: usize| -> f64 {
            self.offsets
                .iter()
                .map(|&q| v[(i as isize + q * j as isize) as usize])
                .product()
        };
        let last = at(self.steps);
        let mut sum = 0.0;
        if self.steps > 0 {
            sum = 0.5 * (at(0) + last);
            for j in 1..self.steps {
                sum += at(j);
            }
        }
        if self.frac > 0.0 {
            let s = self.steps as f64 + self.frac;
            let end: f64 = self
                .offsets
                .iter()
                .map(|&q| interpolate(v, i as f64 + q as f64 * s))
                .product();
            sum += 0.5 * self.frac * (last + end);
        }
        sum
    }
}

/// `f -> c exp(-coef sum_l int_0^{w(t,l)} prod_{i in I_l} f(t + i s) ds)` on a
/// fixed grid, with `I_l = {-l+1..k-l} \ {0}` and
/// `w(t,l) = min(t/(l-1), (1-t)/(k-l))`.
#[derive(Debug, Clone)]
struct GridOperator {
    c: f64,
    coef: f64,
    grid: usize,
    stencils: Vec<Vec<Stencil>>,
}

impl GridOperator {
    fn new(k: usize, c: f64, coef: f64, grid: usize) -> Self {
        let stencils = (0..=grid)
            .map(|i| {
                (1..=k)
                    .map(|l| {
                        let offsets = (1..=k as isize)
                            .map(|j| j - l as isize)
                            .filter(|&q| q != 0)
                            .collect();
                        let left = (l > 1).then_some((i, l - 1));
                        let right = (l < k).then_some((grid - i, k - l));
                        Stencil::new(offsets, left, right)
                    })
                    .collect()
            })
            .collect();
        Self {
            c,
            coef,
            grid,
            stencils,
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let h = 1.0 / self.grid as f64;
        self.stencils
            .iter()
            .enumerate()
            .map(|(i, lines)| {
                let total: f64 = lines.iter().map(|s| s.integrate(v, i)).sum();
                self.c * (-self.coef * h * total).exp()
            })
            .collect()
    }

    /// Damped iteration `x <- sqrt(x F(x))` from `start`, stopped once
    /// `||log F(x) - log x||_inf < tol`.
    fn fixed_point(&self, start: Vec<f64>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let mut x = start;
        let mut residual = f64::INFINITY;
        for _ in 0..max_iter {
            let fx = self.apply(&x);
            residual = x
                .iter()
                .zip(&fx)
                .map(|(a, b)| (a.ln() - b.ln()).abs())
                .fold(0.0, f64::max);
            if residual < tol {
                return Ok(fx);
            }
            for (a, b) in x.iter_mut().zip(&fx) {
                *a = (*a * b).sqrt();
            }
        }
        Err(Error::NotConverged {
            iterations: max_iter,
            residual,
        })
    }
}

fn f_operator(params: &KapParams) -> Result<GridOperator> {
    let coef = params.zeta / alpha_f64(params.k)?;
    Ok(GridOperator::new(params.k, params.c, coef, params.grid_size))
}

fn phi_operator(k: usize, c: f64, grid: usize) -> Result<GridOperator> {
    KapParams::new(k, c, 1.0, grid)?;
    Ok(GridOperator::new(k, c, 1.0, grid))
}

fn check_grid(f: &GridFunction, grid: usize) -> Result<()> {
    if f.grid_size() != grid {
        return Err(Error::InvalidParameter(format!(
            "grid function has M = {}, expected {grid}",
            f.grid_size()
        )));
    }
    Ok(())
}

/// The operator `F^(k)_{c,zeta}` on a grid function.
pub fn functional_apply(params: &KapParams, f: &GridFunction) -> Result<GridFunction> {
    check_grid(f, params.grid_size)?;
    Ok(GridFunction {
        values: f_operator(params)?.apply(&f.values),
    })
}

/// The operator `Phi^(k)_c` (coefficient 1 in place of `zeta/alpha_k`).
pub fn phi_apply(k: usize, c: f64, x: &GridFunction) -> Result<GridFunction> {
    let op = phi_operator(k, c, x.grid_size())?;
    Ok(GridFunction {
        values: op.apply(&x.values),
    })
}

/// `||log Phi x - log x||_inf`.
pub fn phi_residual(k: usize, c: f64, x: &GridFunction) -> Result<f64> {
    Ok(phi_apply(k, c, x)?.log_distance(x))
}

/// Fixed point of `F^(k)_{c,zeta}`, iterated from `f = c`.
pub fn kap_fixed_point(params: &KapParams, tol: f64, max_iter: usize) -> Result<GridFunction> {
    params.check_contraction()?;
    let op = f_operator(params)?;
    let start = vec![params.c; params.grid_size + 1];
    Ok(GridFunction {
        values: op.fixed_point(start, tol, max_iter)?,
    })
}

/// `gamma = alpha_k^(1/(k-1))`: `f*` of `F` at `zeta = 1, c' = gamma c` is
/// `gamma x*_{k,c}`.
pub fn phi_scaling(k: usize) -> Result<f64> {
    Ok(alpha_f64(k)?.powf(1.0 / (k - 1) as f64))
}

fn check_phi_range(k: usize, c: f64) -> Result<()> {
    let limit = c_limit(k)?;
    if !(c > 0.0 && c < limit) {
        return Err(Error::OutOfRange(format!(
            "c = {c} is outside 0 < c < (e/((k-1) alpha_k))^(1/(k-1)) = {limit} for k = {k}"
        )));
    }
    Ok(())
}

/// `x*_{k,c}` through the fixed point of `F` at `c' = gamma c`, rescaled.
pub fn phi_fixed_point(k: usize, c: f64, tol: f64, grid: usize) -> Result<GridFunction> {
    check_phi_range(k, c)?;
    let gamma = phi_scaling(k)?;
    let params = KapParams::new(k, gamma * c, 1.0, grid)?;
    Ok(kap_fixed_point(&params, tol, DEFAULT_MAX_ITER)?.scaled(1.0 / gamma))
}

/// `x*_{k,c}` by iterating `Phi` itself.
pub fn phi_fixed_point_direct(k: usize, c: f64, tol: f64, grid: usize) -> Result<GridFunction> {
    check_phi_range(k, c)?;
    let op = phi_operator(k, c, grid)?;
    Ok(GridFunction {
        values: op.fixed_point(vec![c; grid + 1], tol, DEFAULT_MAX_ITER)?,
    })
}

/// `int_0^1 int_0^c x*_{k,t}(s)/t dt ds - c`, with Gauss-Legendre nodes in `t`
/// (each solved warm from the previous one) and the trapezoid rule in `s`.
pub fn kap_rate(k: usize, c: f64, quad_nodes: usize, grid: usize) -> Result<f64> {
    check_phi_range(k, c)?;
    let gamma = phi_scaling(k)?;
    let coef = 1.0 / alpha_f64(k)?;
    let mut nodes = gauss_legendre_on(quad_nodes, 0.0, c)?;
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut previous: Option<(f64, Vec<f64>)> = None;
    let mut total = 0.0;
    for (t, w) in nodes {
        let op = GridOperator::new(k, gamma * t, coef, grid);
        let start = match previous.take() {
            Some((tp, x)) => x.into_iter().map(|v| v * t / tp).collect(),
            None => vec![gamma * t; grid + 1],
        };
        let f = op.fixed_point(start, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        total += w * trapezoid(&f) / (gamma * t);
        previous = Some((t, f));
    }
    Ok(total - c)
}

/// Bethe form of the same limit, using only `x* = x*_{k,c}`:
/// `-int_0^1 int_0^{(1-t)/(k-1)} prod_{i<k} x*(t+is) ds dt
///  - int_0^1 x*(t) (log(x*(t)/c) - 1) dt - c`.
pub fn kap_rate_bethe(k: usize, c: f64, grid: usize) -> Result<f64> {
    let x = phi_fixed_point(k, c, DEFAULT_TOL, grid)?;
    Ok(bethe_from_profile(k, c, &x))
}

fn bethe_from_profile(k: usize, c: f64, x: &GridFunction) -> f64 {
    let grid = x.grid_size();
    let v = &x.values;
    let offsets: Vec<isize> = (0..k as isize).collect();
    let lines: Vec<f64> = (0..=grid)
        .map(|i| {
            Stencil::new(offsets.clone(), None, Some((grid - i, k - 1))).integrate(v, i)
                / grid as f64
        })
        .collect();
    let energy = trapezoid(&lines);
    let entropy: Vec<f64> = v.iter().map(|&y| y * ((y / c).ln() - 1.0)).collect();
    -energy - trapezoid(&entropy) - c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalMode {
    /// Full enumeration, `n <= 24`.
    Exact,
    /// Independent Glauber replicas.
    Glauber { steps: usize, replicas: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalRow {
    /// The integer `j` in `1..=n`.
    pub j: usize,
    pub t: f64,
    /// `n^(1/(k-1)) P(j in [n]_p | no k-AP)`.
    pub observed: f64,
    /// Standard error of `observed`; zero in exact mode.
    pub std_err: f64,
    /// `x*_{k,c}(j/n)`.
    pub predicted: f64,
}

impl MarginalRow {
    pub fn gap(&self) -> f64 {
        (self.observed - self.predicted).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable {
    pub k: usize,
    pub c: f64,
    pub n: usize,
    pub p: f64,
    pub rows: Vec<MarginalRow>,
}

impl MarginalTable {
    pub fn mean_gap(&self) -> f64 {
        self.rows.iter().map(MarginalRow::gap).sum::<f64>() / self.rows.len() as f64
    }

    pub fn max_gap(&self) -> f64 {
        self.rows.iter().map(MarginalRow::gap).fold(0.0, f64::max)
    }
}

/// Conditional marginals of `[n]_p` given no k-AP, `p = c n^(-1/(k-1))`,
/// next to the limiting profile.
pub fn kap_marginal_check(
    k: usize,
    c: f64,
    n: usize,
    mode: MarginalMode,
    grid: usize,
) -> Result<MarginalTable> {
    let g = build_kap_hypergraph(k, n)?;
    let scale = (n as f64).powf(1.0 / (k - 1) as f64);
    let p = c / scale;
    let params = ModelParams::hard_core_from_p(p)?;
    let (marginals, errors) = match mode {
        MarginalMode::Exact => {
            if n > EXACT_MARGINAL_LIMIT {
                return Err(Error::EnumerationGuard {
                    num_vertices: n,
                    limit: EXACT_MARGINAL_LIMIT,
                });
            }
            let s = ExactOracle::with_limit(EXACT_MARGINAL_LIMIT).summarize(&g, &params)?;
            (s.marginals, vec![0.0; n])
        }
        MarginalMode::Glauber {
            steps,
            replicas,
            seed,
        } => {
            if replicas == 0 {
                return Err(Error::InvalidParameter("need at least one replica".into()));
            }
            let m = glauber_marginals(&g, &params, steps, replicas, seed);
            let se = m
                .iter()
                .map(|q| (q * (1.0 - q) / replicas as f64).sqrt())
                .collect();
            (m, se)
        }
    };
    let profile = phi_fixed_point(k, c, DEFAULT_TOL, grid)?;
    let rows = (1..=n)
        .map(|j| {
            let t = j as f64 / n as f64;
            MarginalRow {
                j,
                t,
                observed: scale * marginals[j - 1],
                std_err: scale * errors[j - 1],
                predicted: profile.at(t),
            }
        })
        .collect();
    Ok(MarginalTable { k, c, n, p, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumGap {
    pub n: usize,
    pub max_degree: usize,
    /// `max_j |f_n(j) - f*(j/n)|` for the fixed points of `F` at `c' = gamma c`.
    pub sup_gap: f64,
    /// Largest difference between neighbouring entries of the discrete fixed point.
    pub discrete_max_jump: f64,
}

/// Compares the BP fixed point on the k-AP hypergraph of `[n]`, with `Delta`
/// its maximum degree, to the continuum fixed point at `zeta = 1`.
pub fn discrete_vs_continuum(k: usize, c: f64, n: usize, grid: usize, tol: f64) -> Result<ContinuumGap> {
    check_phi_range(k, c)?;
    let c_prime = phi_scaling(k)? * c;
    let g = build_kap_hypergraph(k, n)?;
    let max_degree = g.max_degree();
    let bp = BPParams::new(k, c_prime, 1.0, max_degree as f64)?;
    let discrete = BpOperator::new(&g, k)?.fixed_point(&bp, tol, DEFAULT_MAX_ITER)?;
    let continuum = kap_fixed_point(&KapParams::new(k, c_prime, 1.0, grid)?, tol, DEFAULT_MAX_ITER)?;
    let sup_gap = discrete
        .iter()
        .enumerate()
        .map(|(v, &x)| (x - continuum.at((v + 1) as f64 / n as f64)).abs())
        .fold(0.0, f64::max);
    let discrete_max_jump = discrete
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    Ok(ContinuumGap {
        n,
        max_degree,
        sup_gap,
        discrete_max_jump,
    })
}
