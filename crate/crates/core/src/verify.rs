//! Invariant suites run by `bifract verify`. Each suite returns one
//! [`Check`] per assertion; a check either passes, fails with the offending
//! values in `detail`, or is skipped when the input lies outside the
//! hypotheses the assertion depends on.

use serde::Serialize;
use serde_json::{json, Value};

use crate::biaffine::{build_biaffine, consistency_defect, TrapezoidChain};
use crate::dimension::{box_count, cylinder_count, cylinder_study, gamma, recursion_bounds_check, DEFAULT_OVERSAMPLE};
use crate::error::Result;
use crate::ifs::{build_maps, contraction_audit, PlaneMap, TaxicabMetric};
use crate::io::Input;
use crate::operator::{exact_graph, OperatorContext};
use crate::problem::{InterpolationProblem, COLLINEAR_EPS};
use crate::rng::SeededRng;
use crate::sampled::{Lattice, SampledFunction};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub detail: Value,
}

impl Check {
    fn new(suite: &'static str, check: &'static str, pass: bool, detail: Value) -> Self {
        Self {
            suite,
            check,
            pass,
            skipped: None,
            detail,
        }
    }

    fn skip(suite: &'static str, check: &'static str, why: impl Into<String>) -> Self {
        Self {
            suite,
            check,
            pass: true,
            skipped: Some(why.into()),
            detail: Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    /// Largest resolution for the recursion suite; largest word length for
    /// the cylinder suite.
    pub r: u32,
    pub eta: Option<f64>,
    pub beta: Option<f64>,
    /// Address depth for sampled fixed points and audit lattices.
    pub depth: u32,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            r: 5,
            eta: None,
            beta: None,
            depth: 6,
            tol: 1e-12,
        }
    }
}

fn value_scale(problem: &InterpolationProblem) -> f64 {
    1.0 + problem.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Largest `d` with `N^{d+1} ≤ limit` (at least 0).
fn depth_for(problem: &InterpolationProblem, limit: u64) -> u32 {
    let n = problem.n_maps() as u64;
    let mut d = 0;
    while n.saturating_pow(d + 2) <= limit {
        d += 1;
    }
    d
}

/// Metric axioms of `d_q` (with `q` the interpolant) on random triples.
pub fn metric_suite(problem: &InterpolationProblem, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "metric";
    let q = exact_graph(problem, cfg.depth.min(depth_for(problem, 1 << 18)))?;
    let metric = TaxicabMetric::new(1.0, 0.7, q)?;
    let (lo, hi) = metric.domain();
    let spread = 1.0 + value_scale(problem);
    let mut rng = SeededRng::new(cfg.seed);
    let point = |rng: &mut SeededRng| -> Result<(f64, f64)> {
        let x = rng.range(lo, hi);
        Ok((x, metric.profile().value(x) + rng.range(-spread, spread)))
    };
    let (mut sym, mut ident, mut pos, mut tri) = (None, None, None, None);
    let mut worst_tri = f64::NEG_INFINITY;
    for _ in 0..cfg.trials {
        let (p, r, m) = (point(&mut rng)?, point(&mut rng)?, point(&mut rng)?);
        let dpr = metric.d_q(p, r)?;
        if dpr != metric.d_q(r, p)? && sym.is_none() {
            sym = Some(json!({"p": p, "r": r}));
        }
        if metric.d_q(p, p)? != 0.0 && ident.is_none() {
            ident = Some(json!({"p": p}));
        }
        if p != r && !(dpr > 0.0) && pos.is_none() {
            pos = Some(json!({"p": p, "r": r, "d": dpr}));
        }
        let rhs = metric.d_q(p, m)? + metric.d_q(m, r)?;
        let excess = dpr - rhs;
        worst_tri = worst_tri.max(excess);
        if excess > 1e-12 * rhs.max(1.0) && tri.is_none() {
            tri = Some(json!({"p": p, "m": m, "r": r, "excess": excess}));
        }
    }
    let outcome = |name, bad: Option<Value>| match bad {
        None => Check::new(SUITE, name, true, json!({"trials": cfg.trials})),
        Some(v) => Check::new(SUITE, name, false, v),
    };
    let mut out = vec![
        outcome("symmetry", sym),
        outcome("identity", ident),
        outcome("positivity", pos),
        outcome("triangle", tri),
    ];
    out[3].detail["worst_excess"] = json!(worst_tri);
    Ok(out)
}

/// A sample lattice mapped into itself by `L`.
fn invariant_lattice(problem: &InterpolationProblem, limit: u64) -> Result<Lattice> {
    Lattice::refined(problem, depth_for(problem, limit))
}

/// Random elements of `C*` on a lattice: values in `[−2, 2]` with the end
/// values pinned to `Y_0`, `Y_N`.
fn random_function(problem: &InterpolationProblem, lattice: &Lattice, rng: &mut SeededRng) -> Result<SampledFunction> {
    let pts = lattice.points();
    let last = pts.len() - 1;
    let n = problem.n_maps();
    let ys = (0..pts.len())
        .map(|i| match i {
            0 => problem.values()[0],
            i if i == last => problem.values()[n],
            _ => rng.range(-2.0, 2.0),
        })
        .collect();
    SampledFunction::new(pts.to_vec(), ys)
}

/// Sup-norm contraction of `T` and the sheared-metric contraction of the
/// graph maps.
pub fn contraction_suite(problem: &InterpolationProblem, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "contraction";
    let ctx = OperatorContext::new(problem.clone())?;
    let s = ctx.contraction_factor();
    let lattice = invariant_lattice(problem, 1 << 12)?;
    let mut rng = SeededRng::new(cfg.seed);
    let mut worst = f64::NEG_INFINITY;
    let mut failure = None;
    for _ in 0..100 {
        let g1 = random_function(problem, &lattice, &mut rng)?;
        let g2 = random_function(problem, &lattice, &mut rng)?;
        let before = g1.sup_distance(&g2);
        let after = ctx.rb_apply(&g1, &lattice)?.sup_distance(&ctx.rb_apply(&g2, &lattice)?);
        let excess = after - s * before;
        worst = worst.max(excess);
        if excess > 1e-12 && failure.is_none() {
            failure = Some(json!({"before": before, "after": after, "s": s}));
        }
    }
    let mut out = vec![match failure {
        None => Check::new(SUITE, "sup_norm", true, json!({"pairs": 100, "s": s, "worst_excess": worst})),
        Some(v) => Check::new(SUITE, "sup_norm", false, v),
    }];

    let audit = contraction_audit(problem, cfg.eta, cfg.beta, cfg.trials, cfg.seed, cfg.depth.min(depth_for(problem, 1 << 16)))?;
    let detail = serde_json::to_value(&audit)?;
    let in_window = audit.analysis.beta_max.is_none_or(|bm| audit.beta > 0.0 && audit.beta < bm);
    out.push(if !in_window {
        let mut c = Check::skip(SUITE, "sheared_metric", format!(
            "beta = {} is outside the admissible window (0, {})",
            audit.beta,
            audit.analysis.beta_max.unwrap_or(f64::INFINITY)
        ));
        c.detail = detail;
        c
    } else {
        Check::new(SUITE, "sheared_metric", audit.max_ratio <= audit.bound + 1e-9, detail)
    });
    Ok(out)
}

/// Fixed-point iteration: interpolation, residual and agreement with exact
/// address evaluation.
pub fn fixedpoint_suite(problem: &InterpolationProblem, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "fixedpoint";
    let ctx = OperatorContext::new(problem.clone())?;
    let depth = depth_for(problem, 1 << 16).min(cfg.depth.max(1));
    let lattice = Lattice::refined(problem, depth)?;
    let fp = ctx.fixed_point(&lattice, cfg.tol)?;
    let f = &fp.function;
    let scale = value_scale(problem);

    let mut misses = Vec::new();
    for (j, (&x, &y)) in problem.knots().iter().zip(problem.values()).enumerate() {
        match lattice.locate(x, 0.0) {
            Some(i) if f.ordinates()[i] == y => {}
            other => misses.push(json!({"j": j, "found": other.map(|i| f.ordinates()[i])})),
        }
    }
    let residual = ctx.rb_apply(f, &lattice)?.sup_distance(f);
    let exact = exact_graph(problem, depth)?;
    let gap = exact.sup_distance(f);
    Ok(vec![
        Check::new(SUITE, "interpolates", misses.is_empty(), json!({"misses": misses})),
        Check::new(
            SUITE,
            "residual",
            residual <= 1e-9 * scale,
            json!({"residual": residual, "iterations": fp.iterations, "error_bound": fp.error_bound}),
        ),
        Check::new(
            SUITE,
            "matches_exact",
            gap <= fp.error_bound + 1e-12 * scale,
            json!({"gap": gap, "error_bound": fp.error_bound}),
        ),
    ])
}

/// Join and endpoint identities of the graph maps and, for chain input, the
/// vertex conditions of the bi-affine maps.
pub fn vertices_suite(input: &Input, _cfg: &VerifyConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "vertices";
    let problem = input.problem();
    let scale = value_scale(&problem);
    let maps = build_maps(&problem)?;
    let probes: Vec<f64> = (-8..=8).map(|i| i as f64 * scale / 4.0).collect();
    let defect = maps.endpoint_defect(&problem, &probes);
    let (x0, xn) = problem.domain();
    let mut form_gap = 0.0_f64;
    for i in 0..=16 {
        let x = x0 + (xn - x0) * i as f64 / 16.0;
        for &y in &probes {
            for (k, m) in maps.maps.iter().enumerate() {
                let (u1, v1) = m.apply(x, y);
                let (u2, v2) = problem.graph_map(k + 1, x, y);
                form_gap = form_gap.max((u1 - u2).abs()).max((v1 - v2).abs());
            }
        }
    }
    let mut out = vec![
        Check::new(SUITE, "join_identities", defect <= 1e-12 * scale, json!({"defect": defect})),
        Check::new(
            SUITE,
            "coefficient_form",
            form_gap <= 1e-12 * scale * scale,
            json!({"gap": form_gap, "all_bilinear": maps.all_bilinear()}),
        ),
    ];
    match input {
        Input::Chain(chain) => out.extend(chain_checks(chain)?),
        Input::Problem(_) => out.push(Check::skip(SUITE, "trapezoid_vertices", "input is not a chain")),
    }
    Ok(out)
}

fn chain_checks(chain: &TrapezoidChain) -> Result<Vec<Check>> {
    const SUITE: &str = "vertices";
    let (x, lo, hi) = (chain.knots(), chain.lower(), chain.upper());
    let maps = build_biaffine(chain);
    let mut bad = Vec::new();
    let mut outside = None;
    for (i, m) in maps.iter().enumerate() {
        let n = i + 1;
        let want = [
            ((0.0, 0.0), (x[n - 1], lo[n - 1])),
            ((1.0, 0.0), (x[n], lo[n])),
            ((1.0, 1.0), (x[n], hi[n])),
            ((0.0, 1.0), (x[n - 1], hi[n - 1])),
        ];
        for ((u, v), expect) in want {
            let got = m.apply(u, v);
            if got != expect {
                bad.push(json!({"n": n, "corner": [u, v], "got": got, "expected": expect}));
            }
        }
        for a in 0..=32 {
            for b in 0..=32 {
                let (t, y) = (a as f64 / 32.0, b as f64 / 32.0);
                let (u, v) = m.apply(t, y);
                let floor = lo[n - 1] + (lo[n] - lo[n - 1]) * t;
                let ceil = hi[n - 1] + (hi[n] - hi[n - 1]) * t;
                let inside = x[n - 1] <= u && u <= x[n] && floor - 1e-15 <= v && v <= ceil + 1e-15;
                if !inside && outside.is_none() {
                    outside = Some(json!({"n": n, "at": [t, y], "image": [u, v]}));
                }
            }
        }
    }
    let gap = consistency_defect(chain, 32)?;
    Ok(vec![
        Check::new(SUITE, "trapezoid_vertices", bad.is_empty(), json!({"mismatches": bad})),
        Check::new(SUITE, "containment", outside.is_none(), outside.unwrap_or(Value::Null)),
        Check::new(SUITE, "consistency", gap <= 1e-12, json!({"gap": gap})),
    ])
}

fn dimension_hypotheses(problem: &InterpolationProblem) -> Option<String> {
    if !problem.has_unit_uniform_knots() {
        Some("needs knots j/N on [0, 1]".into())
    } else if problem.scalings().iter().any(|&s| s < 0.0) {
        Some("needs nonnegative scalings".into())
    } else {
        None
    }
}

/// Refinement bounds at every `r ≤ cfg.r`, plus monotone growth of `N(r)`
/// and, for `γ > 1` on non-collinear data, of `N(r)/N^r`.
pub fn recursion_suite(problem: &InterpolationProblem, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "recursion";
    if let Some(why) = dimension_hypotheses(problem) {
        return Ok(vec![Check::skip(SUITE, "refinement_bounds", why)]);
    }
    let mut out = Vec::new();
    for r in 0..=cfg.r {
        let audit = recursion_bounds_check(problem, r, DEFAULT_OVERSAMPLE)?;
        let pass = audit.violations == 0 && audit.aggregate_margin.is_none_or(|m| m <= 0.0);
        out.push(Check::new(SUITE, "refinement_bounds", pass, serde_json::to_value(&audit)?));
    }
    let totals: Vec<u64> = (0..=cfg.r + 1)
        .map(|r| box_count(problem, r, DEFAULT_OVERSAMPLE).map(|c| c.total))
        .collect::<Result<_>>()?;
    let monotone = totals.windows(2).all(|w| w[1] >= w[0]);
    out.push(Check::new(SUITE, "monotone_refinement", monotone, json!({"totals": totals})));
    if gamma(problem) > 1.0 && !problem.collinear(COLLINEAR_EPS) {
        let n = problem.n_maps() as f64;
        let per_column: Vec<f64> = totals
            .iter()
            .enumerate()
            .map(|(r, &t)| t as f64 / n.powi(r as i32))
            .collect();
        let growing = per_column.windows(2).all(|w| w[1] > w[0]);
        out.push(Check::new(SUITE, "unbounded_growth", growing, json!({"per_column": per_column})));
    }
    Ok(out)
}

/// Cylinder counts against `γ_{σ_1}···γ_{σ_r} N^{|σ|}` for seeded words.
pub fn cylinder_suite(problem: &InterpolationProblem, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "cylinder";
    if let Some(why) = dimension_hypotheses(problem) {
        return Ok(vec![Check::skip(SUITE, "cylinder_bounds", why)]);
    }
    if problem.scalings().windows(2).any(|w| w[0] + w[1] <= 0.0) {
        return Ok(vec![Check::skip(SUITE, "cylinder_bounds", "some growth factor gamma_n is zero")]);
    }
    let whole = cylinder_count(problem, &[], DEFAULT_OVERSAMPLE)?;
    let n0 = box_count(problem, 0, DEFAULT_OVERSAMPLE)?.total;
    let study = cylinder_study(problem, cfg.r.max(1) as usize, 8, cfg.seed, DEFAULT_OVERSAMPLE)?;
    let within = study
        .reports
        .iter()
        .all(|c| c.lower <= c.count as f64 && c.count as f64 <= c.upper);
    let finite = study.c_lower > 0.0 && study.c_upper.is_finite();
    Ok(vec![
        Check::new(SUITE, "empty_word", whole.count == n0, json!({"count": whole.count, "N0": n0})),
        Check::new(
            SUITE,
            "cylinder_bounds",
            within && finite,
            json!({"words": study.reports.len(), "c_lower": study.c_lower, "c_upper": study.c_upper}),
        ),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Contraction,
    Fixedpoint,
    Vertices,
    Recursion,
    Cylinder,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Metric,
        Suite::Contraction,
        Suite::Fixedpoint,
        Suite::Vertices,
        Suite::Recursion,
        Suite::Cylinder,
    ];
}

pub fn run_suite(suite: Suite, input: &Input, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let problem = input.problem();
    match suite {
        Suite::Metric => metric_suite(&problem, cfg),
        Suite::Contraction => contraction_suite(&problem, cfg),
        Suite::Fixedpoint => fixedpoint_suite(&problem, cfg),
        Suite::Vertices => vertices_suite(input, cfg),
        Suite::Recursion => recursion_suite(&problem, cfg),
        Suite::Cylinder => cylinder_suite(&problem, cfg),
    }
}
