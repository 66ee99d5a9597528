use std::path::{Path, PathBuf};

use bplt_core::bp::{eta_star, log_sup_distance, thresholds};
use bplt_core::gibbs::{expected_edges, lower_tail_threshold, DEFAULT_ENUMERATION_LIMIT};
use bplt_core::kap::{self, DEFAULT_GRID, DEFAULT_QUAD_NODES, DEFAULT_TOL};
use bplt_core::rates::Model;
use bplt_core::weitz::DEFAULT_NODE_CAP;
use bplt_core::{
    bethe_free_energy, build_weitz, delta_h, log_z_bp, mc_lower_tail, partite_bound, rate_h,
    rate_lower_tail_bp, solve_zeta_regular, tree_marginal, x_star_regular, BPParams, BpOperator, ExactOracle,
    ModelParams, Multihypergraph, SimpleGraph, TreeOptions, WeitzOrders, ZetaMode,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::report::{float, Csv, Summary};
use crate::{
    BpSolveArgs, Context, ExactCheckArgs, KapProfileArgs, McEstimateArgs, RateGnmArgs, RateGnpArgs, RateKapArgs,
    RateSubgraphArgs, WeitzVerifyArgs,
};

/// Exact enumeration limit when `--unsafe-size` is given.
const UNSAFE_ENUMERATION_LIMIT: usize = 40;
const UNSAFE_NODE_CAP: usize = 100_000_000;

/// Out-of-domain results become `None`; numerical failures propagate.
fn domain<T>(r: bplt_core::Result<T>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_numerical() => Err(e.into()),
        Err(_) => Ok(None),
    }
}

/// A CSV that is the main product: written to `--output` (and the summary
/// printed) or, without `--output`, printed instead of the summary.
fn primary(ctx: &Context, mut summary: Summary, csv: Csv) -> CliResult<String> {
    match &ctx.output {
        Some(path) => {
            csv.write_to(Some(path))?;
            summary.text("output", path.display().to_string());
            Ok(summary.render(ctx.json))
        }
        None => Ok(csv.render()),
    }
}

/// A scalar result with an optional CSV artifact, written only to `--output`.
fn scalar(ctx: &Context, mut summary: Summary, csv: Option<Csv>) -> CliResult<String> {
    if let (Some(path), Some(csv)) = (&ctx.output, csv) {
        csv.write_to(Some(path))?;
        summary.text("output", path.display().to_string());
    }
    Ok(summary.render(ctx.json))
}

fn sweep_table(
    ctx: &Context,
    command: &str,
    formula: &str,
    params: &[(&str, String)],
    extra: &[&str],
    mut eval: impl FnMut(f64) -> CliResult<Option<Vec<f64>>>,
) -> CliResult<String> {
    let sweep = ctx.sweep.expect("called with a sweep");
    let mut columns = vec!["param", "rate", "in_domain"];
    columns.extend(extra);
    let mut echo = params.to_vec();
    echo.push(("sweep", format!("{}:{}:{}", sweep.lo, sweep.hi, sweep.steps)));
    let mut csv = Csv::new(formula, &echo, &columns);
    let mut inside = 0;
    for x in sweep.points() {
        let row = match eval(x)? {
            Some(values) => {
                inside += 1;
                let mut cells = vec![float(x), float(values[0]), "true".into()];
                cells.extend(values[1..].iter().map(|&v| float(v)));
                cells
            }
            None => {
                let mut cells = vec![float(x), String::new(), "false".into()];
                cells.extend(extra.iter().map(|_| String::new()));
                cells
            }
        };
        csv.row(row);
    }
    let mut summary = Summary::new(command);
    summary.int("points", sweep.steps as u64).int("in_domain", inside);
    primary(ctx, summary, csv)
}

fn enumeration_limit(ctx: &Context) -> usize {
    if ctx.unsafe_size {
        UNSAFE_ENUMERATION_LIMIT
    } else {
        DEFAULT_ENUMERATION_LIMIT
    }
}

fn read_hypergraph(ctx: &Context, flag: Option<PathBuf>) -> CliResult<Multihypergraph> {
    let path = ctx
        .settings
        .path(flag, "file")?
        .ok_or_else(|| CliError::validation("missing required parameter `--file`"))?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    text.parse()
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn no_sweep(ctx: &Context, command: &str) -> CliResult<()> {
    if ctx.sweep.is_some() {
        return Err(CliError::validation(format!("`{command}` does not take --sweep")));
    }
    Ok(())
}

const GNP_FORMULA: &str = "rate at p = c Delta^(-1/(k-1)): x* + (x*)^k (1 - 1/k) zeta - log(1 - zeta) eta c^k / k - c, \
                           where x* = c exp(-W((k-1) c^(k-1) zeta)/(k-1)) and (1 - zeta)(x*)^k = eta c^k";

pub fn rate_gnp(ctx: &Context, a: RateGnpArgs) -> CliResult<String> {
    let s = &ctx.settings;
    let k: usize = s.require(a.k, "k")?;
    let eta: f64 = s.or(a.eta, "eta", 0.0)?;
    if ctx.sweep.is_some() {
        let params = [("k", k.to_string()), ("eta", eta.to_string())];
        return sweep_table(ctx, "rate-gnp", GNP_FORMULA, &params, &[], |c| {
            Ok(domain(bplt_core::rate_gnp(k, c, eta))?.map(|r| vec![r]))
        });
    }
    let c: f64 = s.require(a.c, "c")?;
    let rate = bplt_core::rate_gnp(k, c, eta)?;
    let th = thresholds(k, eta)?;
    let (zeta, _) = solve_zeta_regular(k, c, eta)?;
    let x = x_star_regular(k, c, zeta)?;
    let mut sum = Summary::new("rate-gnp");
    sum.int("k", k as u64)
        .num("c", c)
        .num("eta", eta)
        .num("rate", rate)
        .num("zeta", zeta)
        .num("x_star", x)
        .num("c_bar", th.c_bar)
        .num("c_small", th.c_small)
        .num("eta_star", eta_star(k));
    let mut csv = Csv::new(GNP_FORMULA, &[("k", k.to_string()), ("c", c.to_string()), ("eta", eta.to_string())], &["param", "rate", "in_domain"]);
    csv.row(vec![float(c), float(rate), "true".into()]);
    scalar(ctx, sum, Some(csv))
}

const GNM_FORMULA: &str = "rate at m = b Delta^(-1/(k-1)) N elements: -b^k (1 - eta + eta log eta) / k, \
                           valid while (k-1) b^(k-1) (1 - eta) < 1";

pub fn rate_gnm(ctx: &Context, a: RateGnmArgs) -> CliResult<String> {
    let s = &ctx.settings;
    let k: usize = s.require(a.k, "k")?;
    let eta: f64 = s.or(a.eta, "eta", 0.0)?;
    if ctx.sweep.is_some() {
        let params = [("k", k.to_string()), ("eta", eta.to_string())];
        return sweep_table(ctx, "rate-gnm", GNM_FORMULA, &params, &[], |b| {
            Ok(domain(bplt_core::rate_gnm(k, b, eta))?.map(|r| vec![r]))
        });
    }
    let b: f64 = s.require(a.b, "b")?;
    let rate = bplt_core::rate_gnm(k, b, eta)?;
    let mut sum = Summary::new("rate-gnm");
    sum.int("k", k as u64).num("b", b).num("eta", eta).num("rate", rate);
    let mut csv = Csv::new(GNM_FORMULA, &[("k", k.to_string()), ("b", b.to_string()), ("eta", eta.to_string())], &["param", "rate", "in_domain"]);
    csv.row(vec![float(b), float(rate), "true".into()]);
    scalar(ctx, sum, Some(csv))
}

fn read_pattern(name: &str) -> CliResult<SimpleGraph> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return text
            .parse()
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())));
    }
    Ok(SimpleGraph::named(name)?)
}

pub fn rate_subgraph(ctx: &Context, a: RateSubgraphArgs) -> CliResult<String> {
    let s = &ctx.settings;
    let graph: String = s.require(a.graph, "graph")?;
    let h = read_pattern(&graph)?;
    let model_name: String = s.or(a.model, "model", "gnp".into())?;
    let model: Model = model_name.parse()?;
    let eta: f64 = s.or(a.eta, "eta", 0.0)?;
    let formula = format!(
        "lower-tail rate for copies of H = {graph} in G(n,{}) in the Delta_H^(1/(k-1)) C(n,2)^(-1) scaling; \
         partite_bound is the rate of being (chi(H)-1)-partite in the same scaling",
        if model == Model::Gnp { "p" } else { "m" }
    );
    if ctx.sweep.is_some() {
        let params = [("graph", graph.clone()), ("model", model_name.clone()), ("eta", eta.to_string())];
        return sweep_table(ctx, "rate-subgraph", &formula, &params, &["partite_bound"], |x| {
            let Some(r) = domain(rate_h(&h, x, eta, model))? else {
                return Ok(None);
            };
            let bound = partite_bound(&h, x, model).unwrap_or(f64::NAN);
            Ok(Some(vec![r.rate, bound]))
        });
    }
    let param: f64 = s.require(a.param, "param")?;
    let r = rate_h(&h, param, eta, model)?;
    let mut sum = Summary::new("rate-subgraph");
    sum.text("graph", graph.clone())
        .text("model", model_name.clone())
        .num("param", param)
        .num("eta", eta)
        .num("rate", r.rate)
        .int("k", r.k as u64)
        .text("m2", r.profile.m2.to_string())
        .boolean("strictly_2_balanced", r.profile.strictly_2_balanced)
        .int("aut", r.profile.aut)
        .int("chromatic_number", r.profile.chromatic_number as u64)
        .num("delta_exponent", r.delta_exponent)
        .text("parameterization", r.parameterization.clone());
    if let Ok(bound) = partite_bound(&h, param, model) {
        sum.num("partite_bound", bound);
    }
    if let Some(n) = s.get(a.n, "n")? {
        let d = delta_h(&h, n)?;
        let scale = (d as f64).powf(-r.delta_exponent);
        sum.int("n", n as u64).text("delta_h", d.to_string());
        match model {
            Model::Gnp => sum.num("p", param * scale),
            Model::Gnm => sum.num("m", param * scale * (n * (n - 1) / 2) as f64),
        };
    }
    let mut csv = Csv::new(&formula, &[("graph", graph), ("model", model_name), ("param", param.to_string()), ("eta", eta.to_string())], &["param", "rate", "in_domain"]);
    csv.row(vec![float(param), float(r.rate), "true".into()]);
    scalar(ctx, sum, Some(csv))
}

const KAP_INTEGRAL: &str = "k-AP rate: int_0^1 int_0^c x*_{k,t}(s)/t dt ds - c";
const KAP_BETHE: &str = "k-AP rate, Bethe form: -int_0^1 int_0^{(1-t)/(k-1)} prod_{i<k} x*(t+is) ds dt \
                         - int_0^1 x*(t) (log(x*(t)/c) - 1) dt - c";

pub fn rate_kap(ctx: &Context, a: RateKapArgs) -> CliResult<String> {
    let s = &ctx.settings;
    let k: usize = s.require(a.k, "k")?;
    let method: String = s.or(a.method, "method", "bethe".into())?;
    let nodes: usize = s.or(a.nodes, "nodes", DEFAULT_QUAD_NODES)?;
    let grid: usize = s.or(a.grid, "grid", DEFAULT_GRID)?;
    let (use_integral, use_bethe) = match method.as_str() {
        "bethe" => (false, true),
        "integral" => (true, false),
        "both" => (true, true),
        other => return Err(CliError::validation(format!("--method must be bethe, integral or both, got {other:?}"))),
    };
    let formula = match (use_integral, use_bethe) {
        (true, false) => KAP_INTEGRAL.to_string(),
        (false, true) => KAP_BETHE.to_string(),
        _ => format!("{KAP_INTEGRAL}; bethe column: {KAP_BETHE}"),
    };
    let eval = |c: f64| -> CliResult<Option<Vec<f64>>> {
        let mut out = Vec::new();
        if use_integral {
            match domain(kap::kap_rate(k, c, nodes, grid))? {
                Some(r) => out.push(r),
                None => return Ok(None),
            }
        }
        if use_bethe {
            match domain(kap::kap_rate_bethe(k, c, grid))? {
                Some(r) => out.push(r),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    };
    let params = [("k", k.to_string()), ("method", method.clone()), ("nodes", nodes.to_string()), ("grid", grid.to_string())];
    let extra: &[&str] = if use_integral && use_bethe { &["bethe"] } else { &[] };
    if ctx.sweep.is_some() {
        return sweep_table(ctx, "rate-kap", &formula, &params, extra, eval);
    }
    let c: f64 = s.require(a.c, "c")?;
    let mut values = Vec::new();
    if use_integral {
        values.push(kap::kap_rate(k, c, nodes, grid)?);
    }
    if use_bethe {
        values.push(kap::kap_rate_bethe(k, c, grid)?);
    }
    let mut sum = Summary::new("rate-kap");
    sum.int("k", k as u64).num("c", c).text("method", method.clone()).int("grid", grid as u64);
    let mut i = 0;
    if use_integral {
        sum.num("rate", values[i]).int("nodes", nodes as u64);
        i += 1;
    }
    if use_bethe {
        sum.num(if use_integral { "rate_bethe" } else { "rate" }, values[i]);
    }
    if use_integral && use_bethe {
        sum.num("difference", (values[0] - values[1]).abs());
    }
    sum.num("c_limit", kap::c_limit(k)?);
    let mut columns = vec!["param", "rate", "in_domain"];
    columns.extend(extra);
    let mut echo = params.to_vec();
    echo.push(("c", c.to_string()));
    let mut csv = Csv::new(&formula, &echo, &columns);
    let mut row = vec![float(c), float(values[0]), "true".into()];
    row.extend(values[1..].iter().map(|&v| float(v)));
    csv.row(row);
    scalar(ctx, sum, Some(csv))
}

pub fn kap_profile(ctx: &Context, a: KapProfileArgs) -> CliResult<String> {
    no_sweep(ctx, "kap-profile")?;
    let s = &ctx.settings;
    let k: usize = s.require(a.k, "k")?;
    let c: f64 = s.require(a.c, "c")?;
    let grid: usize = s.or(a.grid, "grid", DEFAULT_GRID)?;
    let tol: f64 = s.or(a.tol, "tol", DEFAULT_TOL)?;
    let x = kap::phi_fixed_point(k, c, tol, grid)?;
    let residual = kap::phi_residual(k, c, &x)?;
    let mut csv = Csv::new(
        "fixed point x*_{k,c} of Phi x(t) = c exp(-sum_j int prod_{i != j} x(t + (i-j)s) ds) on the grid t = i/M",
        &[("k", k.to_string()), ("c", c.to_string()), ("grid", grid.to_string()), ("tol", tol.to_string())],
        &["t", "x_star"],
    );
    for (i, v) in x.values().iter().enumerate() {
        csv.row(vec![float(i as f64 / grid as f64), float(*v)]);
    }
    let (lo, hi) = (x.argmin(), x.argmax());
    let mut sum = Summary::new("kap-profile");
    sum.int("k", k as u64)
        .num("c", c)
        .int("grid", grid as u64)
        .num("x_min", x.values()[lo])
        .num("t_min", lo as f64 / grid as f64)
        .num("x_max", x.values()[hi])
        .num("t_max", hi as f64 / grid as f64)
        .num("phi_residual", residual)
        .num("symmetry_gap", x.symmetry_gap());
    primary(ctx, sum, csv)
}

fn zeta_mode(name: &str) -> CliResult<ZetaMode> {
    match name {
        "general" => Ok(ZetaMode::General),
        "near-regular" | "near_regular" => Ok(ZetaMode::NearRegular),
        other => Err(CliError::validation(format!("--mode must be general or near-regular, got {other:?}"))),
    }
}

fn infer_k(g: &Multihypergraph, flag: Option<usize>) -> CliResult<usize> {
    let k = match flag {
        Some(k) => k,
        None => g
            .edges()
            .first()
            .map(Vec::len)
            .ok_or_else(|| CliError::validation("the hypergraph has no edges; pass --k"))?,
    };
    g.check_uniform(k)?;
    Ok(k)
}

pub fn bp_solve(ctx: &Context, a: BpSolveArgs) -> CliResult<String> {
    let s = &ctx.settings;
    let g = read_hypergraph(ctx, a.file)?;
    let k = infer_k(&g, s.get(a.k, "k")?)?;
    let zeta: f64 = s.or(a.zeta, "zeta", 1.0)?;
    let delta: f64 = s.or(a.delta, "delta", g.max_degree() as f64)?;
    let eta: Option<f64> = s.get(a.eta, "eta")?;
    let mode = zeta_mode(&s.or(a.mode, "mode", "general".to_string())?)?;
    let tol: f64 = s.or(a.tol, "tol", 1e-12)?;
    let max_iter: usize = s.or(a.max_iter, "max_iter", 100_000)?;
    let nodes: usize = s.or(a.nodes, "nodes", 32)?;

    if ctx.sweep.is_some() {
        let mut params = vec![("k", k.to_string()), ("zeta", zeta.to_string()), ("delta", delta.to_string())];
        return match eta {
            Some(eta) => {
                params.push(("eta", eta.to_string()));
                let formula = "BP rate: B(x*)/N - log(1 - zeta) eta c^k |E| / (Delta N) - c, zeta solved so that \
                               (1 - zeta) sum_e prod x* = eta c^k |E|";
                sweep_table(ctx, "bp-solve", formula, &params, &[], |c| {
                    Ok(domain(rate_lower_tail_bp(&g, k, c, eta, delta, mode))?.map(|r| vec![r.rate]))
                })
            }
            None => {
                let formula = "BP estimate of log Z at lambda = c Delta^(-1/(k-1)): Delta^(-1/(k-1)) B(x*), \
                               B = -(zeta/Delta) sum_e prod x* - sum_v x_v (log(x_v/c) - 1)";
                let op = BpOperator::new(&g, k)?;
                sweep_table(ctx, "bp-solve", formula, &params, &[], |c| {
                    let Some(p) = domain(BPParams::new(k, c, zeta, delta))? else {
                        return Ok(None);
                    };
                    let Some(x) = domain(op.fixed_point(&p, tol, max_iter))? else {
                        return Ok(None);
                    };
                    let scale = delta.powf(-1.0 / (k - 1) as f64);
                    Ok(Some(vec![scale * bethe_free_energy(&g, &p, &x)]))
                })
            }
        };
    }

    let c: f64 = s.require(a.c, "c")?;
    let params = BPParams::new(k, c, zeta, delta)?;
    params.check_contraction()?;
    let op = BpOperator::new(&g, k)?;
    let x = op.fixed_point(&params, tol, max_iter)?;
    let residual = log_sup_distance(&op.apply(&params, &x), &x);
    let logz = log_z_bp(&g, &params, nodes)?;
    let mut sum = Summary::new("bp-solve");
    sum.int("vertices", g.num_vertices() as u64)
        .int("edges", g.num_edges() as u64)
        .int("k", k as u64)
        .num("c", c)
        .num("zeta", zeta)
        .num("delta", delta)
        .num("contraction_delta", params.delta_contraction())
        .num("residual", residual)
        .num("x_min", x.iter().copied().fold(f64::INFINITY, f64::min))
        .num("x_max", x.iter().copied().fold(0.0, f64::max))
        .num("bethe", logz.bethe)
        .num("log_z", logz.log_z)
        .num("log_z_integral", logz.log_z_integral);
    if let Some(eta) = eta {
        let r = rate_lower_tail_bp(&g, k, c, eta, delta, mode)?;
        sum.num("eta", eta).num("rate", r.rate).num("zeta_solved", r.zeta);
    }
    let mut csv = Csv::new(
        "BP fixed point x*_v = c exp(-(zeta/Delta) sum_{e ∋ v} prod_{u in e - v} x*_u)",
        &[("k", k.to_string()), ("c", c.to_string()), ("zeta", zeta.to_string()), ("delta", delta.to_string()), ("tol", tol.to_string())],
        &["vertex", "x_star"],
    );
    for (v, xv) in x.iter().enumerate() {
        csv.row(vec![v.to_string(), float(*xv)]);
    }
    scalar(ctx, sum, Some(csv))
}

pub fn exact_check(ctx: &Context, a: ExactCheckArgs) -> CliResult<String> {
    no_sweep(ctx, "exact-check")?;
    let s = &ctx.settings;
    let g = read_hypergraph(ctx, a.file)?;
    let lambda: f64 = s.require(a.lambda, "lambda")?;
    let zeta: f64 = s.require(a.zeta, "zeta")?;
    let params = ModelParams::new(lambda, zeta)?;
    let oracle = ExactOracle::with_limit(enumeration_limit(ctx));
    let vertices: Vec<usize> = match s.get(a.vertex, "vertex")? {
        Some(v) => vec![v],
        None => (0..g.num_vertices()).collect(),
    };
    let edges: Vec<usize> = match s.get(a.edge, "edge")? {
        Some(e) => vec![e],
        None => (0..g.num_edges()).collect(),
    };
    let summary = oracle.summarize(&g, &params)?;
    let mut worst = [0.0f64; 4];
    let mut checked = 0u64;
    if !edges.is_empty() {
        for &v in &vertices {
            for &e in &edges {
                let r = oracle.verify_identities(&g, &params, v, e)?;
                for (w, x) in worst.iter_mut().zip(r.as_array()) {
                    *w = w.max(x);
                }
                checked += 1;
            }
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    let mut sum = Summary::new("exact-check");
    sum.int("vertices", g.num_vertices() as u64)
        .int("edges", g.num_edges() as u64)
        .num("lambda", lambda)
        .num("zeta", zeta)
        .num("log_z", summary.log_z)
        .num("mean_size", summary.mean_size)
        .num("mean_edges", summary.mean_edges)
        .int("pairs_checked", checked)
        .num("in_contraction", worst[0])
        .num("out_deletion", worst[1])
        .num("edge_deletion", worst[2])
        .num("conditional", worst[3])
        .boolean("within_1e-12", max < 1e-12);
    let mut csv = Csv::new(
        "exact marginals mu(v in S) under weight lambda^|S| (1 - zeta)^|E(S)|",
        &[("lambda", lambda.to_string()), ("zeta", zeta.to_string())],
        &["vertex", "marginal"],
    );
    for (v, m) in summary.marginals.iter().enumerate() {
        csv.row(vec![v.to_string(), float(*m)]);
    }
    scalar(ctx, sum, Some(csv))
}

pub fn mc_estimate(ctx: &Context, a: McEstimateArgs) -> CliResult<String> {
    no_sweep(ctx, "mc-estimate")?;
    let s = &ctx.settings;
    let g = read_hypergraph(ctx, a.file)?;
    let p: f64 = s.require(a.p, "p")?;
    let eta: f64 = s.or(a.eta, "eta", 0.0)?;
    let samples: usize = s.or(a.samples, "samples", 100_000)?;
    let (est, se) = mc_lower_tail(&g, p, eta, samples, ctx.seed)?;
    let threshold = lower_tail_threshold(&g, p, eta);
    let mut sum = Summary::new("mc-estimate");
    sum.int("vertices", g.num_vertices() as u64)
        .int("edges", g.num_edges() as u64)
        .num("p", p)
        .num("eta", eta)
        .num("expected_edges", expected_edges(&g, p))
        .int("threshold", threshold as u64)
        .int("samples", samples as u64)
        .int("seed", ctx.seed)
        .num("estimate", est)
        .num("std_err", se);
    if g.num_vertices() <= enumeration_limit(ctx) {
        let exact = ExactOracle::with_limit(enumeration_limit(ctx)).lower_tail_exact(&g, p, threshold)?;
        let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
        sum.num("exact", exact);
        if sigma > 0.0 {
            sum.num("z_score", (est - exact) / sigma);
        }
    }
    scalar(ctx, sum, None)
}

pub fn weitz_verify(ctx: &Context, a: WeitzVerifyArgs) -> CliResult<String> {
    no_sweep(ctx, "weitz-verify")?;
    let s = &ctx.settings;
    let g = read_hypergraph(ctx, a.file)?;
    let lambda: f64 = s.require(a.lambda, "lambda")?;
    let zeta: f64 = s.require(a.zeta, "zeta")?;
    let shuffles: usize = s.or(a.shuffles, "shuffles", 0)?;
    let dump: Option<PathBuf> = s.path(a.dump, "dump")?;
    let params = ModelParams::new(lambda, zeta)?;
    let exact = ExactOracle::with_limit(enumeration_limit(ctx)).summarize(&g, &params)?;
    let options = TreeOptions {
        depth_limit: None,
        node_cap: if ctx.unsafe_size { UNSAFE_NODE_CAP } else { DEFAULT_NODE_CAP },
    };
    let roots: Vec<usize> = match s.get(a.vertex, "vertex")? {
        Some(v) => vec![v],
        None => (0..g.num_vertices()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut csv = Csv::new(
        "Weitz hypertree root marginal against the exact marginal; order 0 is the identity order",
        &[("lambda", lambda.to_string()), ("zeta", zeta.to_string()), ("shuffles", shuffles.to_string()), ("seed", ctx.seed.to_string())],
        &["vertex", "order", "tree_nodes", "exact", "tree", "residual"],
    );
    let mut worst = 0.0f64;
    let mut largest = 0usize;
    for (i, &v) in roots.iter().enumerate() {
        let mut orders = WeitzOrders::identity(&g);
        for round in 0..=shuffles {
            if round > 0 {
                orders.vertices.shuffle(&mut rng);
                orders.edges.shuffle(&mut rng);
            }
            let t = build_weitz(&g, v, &orders, options)?;
            if i == 0 && round == 0 {
                if let Some(path) = &dump {
                    std::fs::write(path, t.dump())?;
                }
            }
            let tree = tree_marginal(&t, &params);
            let exact_v = *exact.marginals.get(v).ok_or(bplt_core::Error::VertexOutOfRange {
                vertex: v,
                num_vertices: g.num_vertices(),
            })?;
            let residual = (tree - exact_v).abs();
            worst = worst.max(residual);
            largest = largest.max(t.num_nodes());
            csv.row(vec![
                v.to_string(),
                round.to_string(),
                t.num_nodes().to_string(),
                float(exact_v),
                float(tree),
                float(residual),
            ]);
        }
    }
    let mut sum = Summary::new("weitz-verify");
    sum.int("vertices", g.num_vertices() as u64)
        .int("edges", g.num_edges() as u64)
        .num("lambda", lambda)
        .num("zeta", zeta)
        .int("roots", roots.len() as u64)
        .int("orders_per_root", shuffles as u64 + 1)
        .int("largest_tree", largest as u64)
        .num("max_residual", worst)
        .boolean("within_1e-10", worst < 1e-10);
    scalar(ctx, sum, Some(csv))
}
