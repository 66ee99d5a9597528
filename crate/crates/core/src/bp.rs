//! The scaled belief-propagation operator
//! `F(x)_v = c * exp(-(zeta/Delta) * sum_{e ∋ v} prod_{u in e, u != v} x_u)`,
//! its fixed point, the Bethe free energy, and the closed forms that hold on
//! regular hypergraphs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauss::gauss_legendre_on;
use crate::hypergraph::{EdgeId, Multihypergraph};

use std::f64::consts::E;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
const BISECTION_STEPS: usize = 200;

/// Principal branch of the Lambert W function on `[-1/e, inf)`.
pub fn lambert_w0(y: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if y.is_nan() || y < branch - 4.0 * f64::EPSILON {
        return Err(Error::OutOfRange(format!(
            "Lambert W0 needs y >= -1/e, got {y}"
        )));
    }
    if y <= branch {
        return Ok(-1.0);
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if y < -0.25 {
        // series about the branch point
        let p = (2.0 * (E * y + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if y < 3.0 {
        y.ln_1p() * (1.0 - y.ln_1p() / (2.0 + y.ln_1p()))
    } else {
        let l = y.ln();
        l - l.ln() + l.ln() / l
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - y;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

/// The constant fixed point `x = c * exp(-zeta * x^(k-1))` of the operator on a
/// regular hypergraph, `c * exp(-W((k-1) c^(k-1) zeta) / (k-1))`.
pub fn x_star_regular(k: usize, c: f64, zeta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    if !(c > 0.0) || !(0.0..=1.0).contains(&zeta) {
        return Err(Error::InvalidParameter(format!(
            "need c > 0 and zeta in [0, 1], got c = {c}, zeta = {zeta}"
        )));
    }
    let km1 = (k - 1) as f64;
    let w = lambert_w0(km1 * c.powi(k as i32 - 1) * zeta)?;
    Ok(c * (-w / km1).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub eta_star: f64,
    /// Range limit for regular-like hypergraphs; infinite when
    /// `eta >= eta_star`.
    pub c_bar: f64,
    /// Range limit for arbitrary hypergraphs.
    pub c_small: f64,
}

pub fn eta_star(k: usize) -> f64 {
    (-(k as f64) / (k as f64 - 1.0)).exp()
}

pub fn thresholds(k: usize, eta: f64) -> Result<Thresholds> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    check_eta(eta)?;
    let km1 = (k - 1) as f64;
    let es = eta_star(k);
    let c_bar = if eta < es {
        (E / (km1 * (1.0 - eta / es))).powf(1.0 / km1)
    } else {
        f64::INFINITY
    };
    let c_small = (E / ((1.0 - eta) * km1)).powf(1.0 / km1);
    Ok(Thresholds {
        eta_star: es,
        c_bar,
        c_small,
    })
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eta must lie in [0, 1), got {eta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BPParams {
    pub k: usize,
    pub c: f64,
    pub zeta: f64,
    /// Degree scaling, usually the maximum degree.
    pub delta: f64,
}

impl BPParams {
    pub fn new(k: usize, c: f64, zeta: f64, delta: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::InvalidParameter(format!(
                "zeta must lie in [0, 1], got {zeta}"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(Self { k, c, zeta, delta })
    }

    /// `(k-1) * zeta * c^(k-1)`; the solver needs it below `e`.
    pub fn contraction_value(&self) -> f64 {
        (self.k - 1) as f64 * self.zeta * self.c.powi(self.k as i32 - 1)
    }

    /// `delta = 1 - (k-1) zeta c^(k-1) / e`; two steps of the operator shrink
    /// log-sup distances by at least `1 - delta`.
    pub fn delta_contraction(&self) -> f64 {
        1.0 - self.contraction_value() / E
    }

    pub fn check_contraction(&self) -> Result<()> {
        let value = self.contraction_value();
        if value < E {
            Ok(())
        } else {
            Err(Error::ContractionCondition { value })
        }
    }

    /// Lower bound `c * exp(-zeta c^(k-1) deg/Delta)` on any image entry at a
    /// vertex of degree `deg`.
    pub fn floor(&self, deg: usize) -> f64 {
        self.c * (-self.zeta * self.c.powi(self.k as i32 - 1) * deg as f64 / self.delta).exp()
    }
}

/// The operator bound to one hypergraph, with its incidence lists cached.
pub struct BpOperator<'a> {
    g: &'a Multihypergraph,
    inc: Vec<Vec<EdgeId>>,
}

impl<'a> BpOperator<'a> {
    pub fn new(g: &'a Multihypergraph, k: usize) -> Result<Self> {
        g.check_uniform(k)?;
        Ok(Self {
            g,
            inc: g.incidence(),
        })
    }

    pub fn graph(&self) -> &Multihypergraph {
        self.g
    }

    pub fn apply(&self, params: &BPParams, x: &[f64]) -> Vec<f64> {
        let scale = params.zeta / params.delta;
        self.inc
            .par_iter()
            .enumerate()
            .map(|(v, edges)| {
                let s: f64 = edges
                    .iter()
                    .map(|&e| {
                        self.g
                            .edge(e)
                            .iter()
                            .filter(|&&u| u != v)
                            .map(|&u| x[u])
                            .product::<f64>()
                    })
                    .sum();
                params.c * (-scale * s).exp()
            })
            .collect()
    }

    /// Iterates from `start` until `||log F(x) - log x||_inf < tol`.
    pub fn fixed_point_from(
        &self,
        params: &BPParams,
        start: Vec<f64>,
        tol: f64,
        max_iter: usize,
    ) -> Result<Vec<f64>> {
        params.check_contraction()?;
        let mut x = start;
        let mut residual = f64::INFINITY;
        for _ in 0..max_iter {
            let next = self.apply(params, &x);
            residual = log_sup_distance(&next, &x);
            x = next;
            if residual < tol {
                return Ok(x);
            }
        }
        Err(Error::NotConverged {
            iterations: max_iter,
            residual,
        })
    }

    pub fn fixed_point(&self, params: &BPParams, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let start = vec![params.c; self.g.num_vertices()];
        self.fixed_point_from(params, start, tol, max_iter)
    }
}

/// `max_v |log a_v - log b_v|`.
pub fn log_sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.ln() - y.ln()).abs())
        .fold(0.0, f64::max)
}

pub fn bp_apply(g: &Multihypergraph, params: &BPParams, x: &[f64]) -> Result<Vec<f64>> {
    Ok(BpOperator::new(g, params.k)?.apply(params, x))
}

pub fn bp_fixed_point(
    g: &Multihypergraph,
    params: &BPParams,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    params.check_contraction()?;
    BpOperator::new(g, params.k)?.fixed_point(params, tol, max_iter)
}

/// `B(x) = -(zeta/Delta) sum_e prod_{u in e} x_u - sum_v x_v (log(x_v/c) - 1)`.
pub fn bethe_free_energy(g: &Multihypergraph, params: &BPParams, x: &[f64]) -> f64 {
    let edge_term: f64 = g
        .edges()
        .iter()
        .map(|e| e.iter().map(|&u| x[u]).product::<f64>())
        .sum();
    let vertex_term: f64 = x.iter().map(|&xv| xv * ((xv / params.c).ln() - 1.0)).sum();
    -params.zeta / params.delta * edge_term - vertex_term
}

/// How far `zeta` may be pushed while solving for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZetaMode {
    /// Up to `1 - eta`; needs `c < c_small(eta)`.
    #[default]
    General,
    /// The caller vouches that the hypergraph is close to regular, so the wider
    /// range `c < c_bar(eta)` is allowed. The bracket is capped just inside the
    /// contraction condition.
    NearRegular,
}

/// Finds `zeta` with `(1 - zeta) sum_e prod_{u in e} x*_u = eta c^k |E|`, where
/// `x*` is the fixed point at `zeta`. Returns `zeta` and that fixed point.
pub fn solve_zeta(
    g: &Multihypergraph,
    k: usize,
    c: f64,
    eta: f64,
    delta: f64,
    tol: f64,
    mode: ZetaMode,
) -> Result<(f64, Vec<f64>)> {
    let th = thresholds(k, eta)?;
    let limit = match mode {
        ZetaMode::General => th.c_small,
        ZetaMode::NearRegular => th.c_bar,
    };
    if !(c > 0.0 && c < limit) {
        return Err(Error::OutOfRange(format!(
            "c = {c} must lie in (0, {limit}) for k = {k}, eta = {eta}"
        )));
    }
    let op = BpOperator::new(g, k)?;
    let solve = |zeta: f64, start: Vec<f64>| {
        let p = BPParams::new(k, c, zeta, delta)?;
        op.fixed_point_from(&p, start, DEFAULT_TOL, DEFAULT_MAX_ITER)
    };
    let ones = vec![c; g.num_vertices()];
    if eta == 0.0 {
        return Ok((1.0, solve(1.0, ones)?));
    }
    let kf = k as i32;
    let target = eta * c.powi(kf) * g.num_edges() as f64;
    let gap = |zeta: f64, x: &[f64]| {
        let sum: f64 = g
            .edges()
            .iter()
            .map(|e| e.iter().map(|&u| x[u]).product::<f64>())
            .sum();
        (1.0 - zeta) * sum - target
    };
    let scale = c.powi(kf) * g.num_edges() as f64;
    if scale == 0.0 {
        return Err(Error::Bracket("the hypergraph has no edges".into()));
    }

    let mut hi = 1.0 - eta;
    if mode == ZetaMode::NearRegular {
        let cap = (1.0 - 1e-9) * E / ((k - 1) as f64 * c.powi(kf - 1));
        hi = hi.min(cap);
    }
    let x_hi = solve(hi, ones.clone())?;
    if gap(hi, &x_hi) > 0.0 {
        return Err(Error::Bracket(format!(
            "no sign change on [0, {hi}]; the hypergraph may be too irregular for this c"
        )));
    }
    let (mut lo, mut x) = (0.0, ones);
    let mut best = (hi, x_hi);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + best.0);
        let xm = solve(mid, x.clone())?;
        let gm = gap(mid, &xm);
        if gm.abs() < tol * scale {
            return Ok((mid, xm));
        }
        if gm > 0.0 {
            lo = mid;
            x = xm;
        } else {
            best = (mid, xm);
        }
        if best.0 - lo <= f64::EPSILON * best.0 {
            break;
        }
    }
    let r = gap(best.0, &best.1).abs();
    if r < tol * scale {
        Ok(best)
    } else {
        Err(Error::Bracket(format!(
            "bisection stalled with residual {r:e}"
        )))
    }
}

/// Solution of the scalar equation `(1 - zeta) (x*_k(c, zeta) / c)^k = eta`
/// on `[0, 1]`, and whether it satisfies `(k-1) zeta c^(k-1) < e`.
pub fn solve_zeta_regular(k: usize, c: f64, eta: f64) -> Result<(f64, bool)> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta must lie in [0, 1], got {eta}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let certified = |zeta: f64| (k - 1) as f64 * zeta * c.powi(k as i32 - 1) < E;
    if eta == 0.0 {
        return Ok((1.0, certified(1.0)));
    }
    if eta == 1.0 {
        return Ok((0.0, true));
    }
    let h = |zeta: f64| -> Result<f64> {
        let x = x_star_regular(k, c, zeta)?;
        Ok((1.0 - zeta) * (x / c).powi(k as i32) - eta)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let zeta = if h(lo)?.abs() <= h(hi)?.abs() { lo } else { hi };
    Ok((zeta, certified(zeta)))
}

/// BP estimates of `log Z_G(lambda, zeta)` at `lambda = c Delta^(-1/(k-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpLogZ {
    pub x_star: Vec<f64>,
    pub bethe: f64,
    /// `Delta^(-1/(k-1)) B(x*)`.
    pub log_z: f64,
    /// `Delta^(-1/(k-1)) sum_v int_0^c x*_v(t)/t dt` by Gauss-Legendre.
    pub log_z_integral: f64,
}

pub fn log_z_bp(g: &Multihypergraph, params: &BPParams, nodes: usize) -> Result<BpLogZ> {
    let op = BpOperator::new(g, params.k)?;
    let x_star = op.fixed_point(params, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let bethe = bethe_free_energy(g, params, &x_star);
    let scale = params.delta.powf(-1.0 / (params.k - 1) as f64);

    // x*_v(t)/t -> 1 as t -> 0, so the first eps contributes eps per vertex.
    let eps = params.c * 1e-6;
    let terms = gauss_legendre_on(nodes, eps, params.c)?
        .par_iter()
        .map(|&(t, weight)| {
            let p = BPParams { c: t, ..*params };
            let x = op.fixed_point(&p, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
            Ok(weight * x.iter().sum::<f64>() / t)
        })
        .collect::<Result<Vec<f64>>>()?;
    let integral = terms.iter().sum::<f64>() + eps * g.num_vertices() as f64;
    Ok(BpLogZ {
        x_star,
        bethe,
        log_z: scale * bethe,
        log_z_integral: scale * integral,
    })
}

/// BP lower-tail rate `lim Delta^(1/(k-1)) |V|^(-1) log P(X <= eta E X)` at
/// `p = c Delta^(-1/(k-1))`:
/// `B(x*)/|V| - log(1 - zeta) eta c^k |E| / (Delta |V|) - c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpRate {
    pub rate: f64,
    pub zeta: f64,
    pub bethe: f64,
    pub x_star: Vec<f64>,
}

pub fn rate_lower_tail_bp(
    g: &Multihypergraph,
    k: usize,
    c: f64,
    eta: f64,
    delta: f64,
    mode: ZetaMode,
) -> Result<BpRate> {
    let (zeta, x_star) = solve_zeta(g, k, c, eta, delta, 1e-12, mode)?;
    let params = BPParams::new(k, c, zeta, delta)?;
    let bethe = bethe_free_energy(g, &params, &x_star);
    let n = g.num_vertices() as f64;
    let mut rate = bethe / n - c;
    if eta > 0.0 {
        rate -= (-zeta).ln_1p() * eta * c.powi(k as i32) * g.num_edges() as f64 / (delta * n);
    }
    Ok(BpRate {
        rate,
        zeta,
        bethe,
        x_star,
    })
}
