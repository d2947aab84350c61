//! Box-counting dimension of the interpolant's graph.
//!
//! The graph is covered column by column with squares of side `N^{-r}`:
//! column `k` spans `[(k−1)/N^r, k/N^r]`, and by continuity the boxes that
//! meet the graph there form a contiguous stack, so only the `y`-extent of
//! `f` over the column is needed. That extent is read off exact samples of
//! `w_σ(Γ(f))`, where `σ` is the length-`r` address of the column.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::operator::exact_graph;
use crate::problem::{InterpolationProblem, COLLINEAR_EPS};
use crate::rng::SeededRng;

/// Extra refinement levels sampled inside every column.
pub const DEFAULT_OVERSAMPLE: u32 = 6;
/// Resolutions below this are left out of slope fits.
pub const DEFAULT_FIT_MIN_R: u32 = 4;
/// Column budget for one resolution.
pub const MAX_COLUMNS: u64 = 1 << 24;

/// `Σ_n (s_{n-1} + s_n) / 2`.
pub fn gamma(problem: &InterpolationProblem) -> f64 {
    problem.scalings().windows(2).map(|w| (w[0] + w[1]) / 2.0).sum()
}

/// Subtracts the end chord `b` from the data, leaving `Y_0 = Y_N = 0`.
/// Knots and scalings are unchanged; the graph moves by an affine shear,
/// which preserves box dimension.
pub fn normalize(problem: &InterpolationProblem) -> InterpolationProblem {
    let values = problem
        .knots()
        .iter()
        .zip(problem.values())
        .map(|(&x, &y)| y - problem.b(x))
        .collect();
    problem
        .with_values(values)
        .expect("shifting finite values keeps the problem valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub gamma: f64,
    pub dimension: f64,
    pub gamma_le_one: bool,
    pub collinear: bool,
}

/// `1 + log γ / log N` when `γ > 1` and the data are not collinear, else 1.
///
/// Only defined for uniform knots, `s_0 = s_N` and nonnegative scalings;
/// anything else is refused with [`Error::HypothesisViolated`].
pub fn closed_form_dimension(problem: &InterpolationProblem) -> Result<ClosedForm> {
    if !problem.has_uniform_knots() {
        return Err(Error::HypothesisViolated("knots are not uniformly spaced".into()));
    }
    let s = problem.scalings();
    let (first, last) = (s[0], s[s.len() - 1]);
    if (first - last).abs() > 1e-12 {
        return Err(Error::HypothesisViolated(format!(
            "s_0 = {first} differs from s_N = {last}"
        )));
    }
    if let Some(neg) = s.iter().find(|&&v| v < 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "negative scaling {neg}"
        )));
    }
    let g = gamma(problem);
    let collinear = problem.collinear(COLLINEAR_EPS);
    let gamma_le_one = g <= 1.0;
    let dimension = if gamma_le_one || collinear {
        1.0
    } else {
        1.0 + g.ln() / (problem.n_maps() as f64).ln()
    };
    Ok(ClosedForm {
        gamma: g,
        dimension,
        gamma_le_one,
        collinear,
    })
}

/// Column counts `N(r, k)`, `k = 1..=N^r` (stored at `k − 1`), and their
/// total `N(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnCounts {
    pub r: u32,
    pub columns: Vec<u64>,
    pub total: u64,
}

fn column_budget(n: usize, r: u32) -> Result<u64> {
    match (n as u64).checked_pow(r) {
        Some(c) if c <= MAX_COLUMNS => Ok(c),
        Some(c) => Err(Error::DepthTooLarge { columns: c }),
        None => Err(Error::DepthTooLarge { columns: u64::MAX }),
    }
}

fn require_unit_grid(problem: &InterpolationProblem) -> Result<()> {
    if problem.has_unit_uniform_knots() {
        Ok(())
    } else {
        Err(Error::NonUniformKnots)
    }
}

/// Exact graph samples `(x, f(x))` with `N^oversample + 1` points.
fn base_samples(problem: &InterpolationProblem, oversample: u32) -> Result<Vec<(f64, f64)>> {
    if oversample == 0 {
        return Err(Error::InvalidArgument("oversample must be at least 1".into()));
    }
    let g = exact_graph(problem, oversample - 1)?;
    Ok(g.abscissae().iter().copied().zip(g.ordinates().iter().copied()).collect())
}

/// `[min, max]` of the second coordinate over `w_σ(base)`, where the
/// `r`-letter word `σ` is encoded base-`N` in `column` (innermost letter in
/// the lowest digit).
fn column_extent(
    problem: &InterpolationProblem,
    base: &[(f64, f64)],
    column: u64,
    r: u32,
) -> (f64, f64) {
    let n = problem.n_maps() as u64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(x0, y0) in base {
        let (mut x, mut y) = (x0, y0);
        let mut code = column;
        for _ in 0..r {
            let letter = (code % n) as usize + 1;
            code /= n;
            (x, y) = problem.graph_map(letter, x, y);
        }
        lo = lo.min(y);
        hi = hi.max(y);
    }
    (lo, hi)
}

/// Boxes of side `1/scale` stacked over `[lo, hi]`: `⌊hi·scale⌋ − ⌊lo·scale⌋ + 1`.
/// A value exactly on a grid line is counted in the box above it.
#[inline]
pub fn boxes_spanned(lo: f64, hi: f64, scale: f64) -> u64 {
    ((hi * scale).floor() - (lo * scale).floor()) as u64 + 1
}

/// Per-column box counts at resolution `N^{-r}`. Requires knots `j/N` on
/// `[0, 1]`; `oversample` extra levels are sampled in each column.
pub fn box_count(problem: &InterpolationProblem, r: u32, oversample: u32) -> Result<ColumnCounts> {
    require_unit_grid(problem)?;
    let ncols = column_budget(problem.n_maps(), r)?;
    let base = base_samples(problem, oversample)?;
    let scale = (problem.n_maps() as f64).powi(r as i32);
    let columns: Vec<u64> = (0..ncols)
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = column_extent(problem, &base, k, r);
            boxes_spanned(lo, hi, scale)
        })
        .collect();
    let total = columns.iter().sum();
    Ok(ColumnCounts { r, columns, total })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval for the slope from the fit residuals.
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

/// Least-squares slope of `log N(r)` against `r log N`, using only
/// resolutions `r ≥ min_r`.
pub fn fit_dimension(n: usize, resolutions: &[u32], totals: &[u64], min_r: u32) -> Result<DimensionFit> {
    let pts: Vec<(f64, f64)> = resolutions
        .iter()
        .zip(totals)
        .filter(|(&r, _)| r >= min_r)
        .map(|(&r, &c)| (r as f64 * (n as f64).ln(), (c as f64).ln()))
        .collect();
    let m = pts.len();
    if m < 3 {
        return Err(Error::TooFewResolutions { got: m });
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = (ssr / (m - 2) as f64 / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, (m - 2) as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(DimensionFit {
        slope,
        intercept,
        ci_low: slope - t * se,
        ci_high: slope + t * se,
        points: m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub n: usize,
    pub resolutions: Vec<u32>,
    pub totals: Vec<u64>,
    #[serde(skip)]
    pub columns: Vec<Vec<u64>>,
    pub fit: DimensionFit,
    pub gamma: f64,
    /// `None` when the closed form was refused; see `refusal`.
    pub closed_form: Option<f64>,
    pub refusal: Option<String>,
    pub gamma_le_one: bool,
    pub collinear: bool,
}

impl DimensionReport {
    /// `log(N(r)/N(r−1)) / log N` between consecutive resolutions; `None`
    /// for the first row or a gap in `r`.
    pub fn partial_slopes(&self) -> Vec<Option<f64>> {
        let ln_n = (self.n as f64).ln();
        (0..self.resolutions.len())
            .map(|i| {
                (i > 0 && self.resolutions[i] == self.resolutions[i - 1] + 1).then(|| {
                    (self.totals[i] as f64 / self.totals[i - 1] as f64).ln() / ln_n
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub r_min: u32,
    pub r_max: u32,
    pub oversample: u32,
    pub fit_min_r: u32,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            r_min: 4,
            r_max: 10,
            oversample: DEFAULT_OVERSAMPLE,
            fit_min_r: DEFAULT_FIT_MIN_R,
        }
    }
}

/// Counts boxes for every `r` in `r_min..=r_max`, fits the slope and sets it
/// beside the closed form (when the closed form applies).
pub fn dimension_study(problem: &InterpolationProblem, cfg: &StudyConfig) -> Result<DimensionReport> {
    if cfg.r_min > cfg.r_max {
        return Err(Error::InvalidArgument(format!(
            "empty resolution range {}..={}",
            cfg.r_min, cfg.r_max
        )));
    }
    let mut resolutions = Vec::new();
    let mut totals = Vec::new();
    let mut columns = Vec::new();
    for r in cfg.r_min..=cfg.r_max {
        let c = box_count(problem, r, cfg.oversample)?;
        resolutions.push(r);
        totals.push(c.total);
        columns.push(c.columns);
    }
    let fit = fit_dimension(problem.n_maps(), &resolutions, &totals, cfg.fit_min_r)?;
    let g = gamma(problem);
    let (closed_form, refusal) = match closed_form_dimension(problem) {
        Ok(cf) => (Some(cf.dimension), None),
        Err(Error::HypothesisViolated(why)) => (None, Some(why)),
        Err(e) => return Err(e),
    };
    Ok(DimensionReport {
        n: problem.n_maps(),
        resolutions,
        totals,
        columns,
        fit,
        gamma: g,
        closed_form,
        refusal,
        gamma_le_one: g <= 1.0,
        collinear: problem.collinear(COLLINEAR_EPS),
    })
}

/// Result of checking measured column counts against the one-step
/// refinement bounds
///
/// `N(r+1, l(k,n)) ≤ N(s_{n-1} + Δs_n t⁺) N(r,k) + 2N(|a_n| + |Δs_n|) + 2`,
/// `N(r+1, l(k,n)) ≥ N(s_{n-1} + Δs_n t⁻) N(r,k) − 2N(|a_n| + |Δs_n|) − 2`,
///
/// with `l(k,n) = k + (n−1)N^r` and `(t⁺, t⁻) = (k/N^r, (k−1)/N^r)` when
/// `Δs_n ≥ 0`, swapped when `Δs_n < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionAudit {
    pub r: u32,
    pub cells: usize,
    pub violations: usize,
    /// Largest `measured − upper` or `lower − measured`; ≤ 0 when every cell
    /// is inside its bounds.
    pub worst_margin: f64,
    /// `(k, n, measured, lower, upper)` of the worst cell.
    pub worst_cell: (u64, usize, u64, f64, f64),
    /// `c_1 = Σ_n [2N(|a_n| + |Δs_n|) + |Δs_n|/N + 2]`.
    pub c1: f64,
    /// Largest `Σ_n N(r+1, l(k,n)) − (Nγ N(r,k) + c_1)` and
    /// `(Nγ N(r,k) − c_1) − Σ_n N(r+1, l(k,n))` over `k`; `None` unless
    /// `s_0 = s_N`, which the summed bounds rely on.
    pub aggregate_margin: Option<f64>,
}

/// Audits the refinement bounds between resolutions `r` and `r + 1`. The
/// counts are taken on the normalized problem (`Y_0 = Y_N = 0`), where the
/// maps take the form `Y_{n-1} + a_n x + (s_{n-1} + Δs_n x) y`.
pub fn recursion_bounds_check(problem: &InterpolationProblem, r: u32, oversample: u32) -> Result<RecursionAudit> {
    require_unit_grid(problem)?;
    if problem.scalings().iter().any(|&s| s < 0.0) {
        return Err(Error::HypothesisViolated(
            "refinement bounds assume nonnegative scalings".into(),
        ));
    }
    let p = normalize(problem);
    let coarse = box_count(&p, r, oversample)?;
    let fine = box_count(&p, r + 1, oversample)?;
    let nn = p.n_maps();
    let nf = nn as f64;
    let cols = coarse.columns.len() as u64;
    let width = cols as f64;
    let (y, s) = (p.values(), p.scalings());
    let a: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let ds: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let c1: f64 = (0..nn)
        .map(|i| 2.0 * nf * (a[i].abs() + ds[i].abs()) + ds[i].abs() / nf + 2.0)
        .sum();
    let g = gamma(&p);
    let mut audit = RecursionAudit {
        r,
        cells: 0,
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
        worst_cell: (0, 0, 0, 0.0, 0.0),
        c1,
        aggregate_margin: None,
    };
    let balanced = (s[0] - s[nn]).abs() <= 1e-12;
    let mut agg = f64::NEG_INFINITY;
    for k in 1..=cols {
        let nk = coarse.columns[(k - 1) as usize] as f64;
        let (hi_t, lo_t) = (k as f64 / width, (k - 1) as f64 / width);
        let mut sum = 0.0;
        for n in 1..=nn {
            let l = k + (n as u64 - 1) * cols;
            let measured = fine.columns[(l - 1) as usize];
            sum += measured as f64;
            let (tu, tl) = if ds[n - 1] >= 0.0 { (hi_t, lo_t) } else { (lo_t, hi_t) };
            let slack = 2.0 * nf * (a[n - 1].abs() + ds[n - 1].abs()) + 2.0;
            let upper = nf * (s[n - 1] + ds[n - 1] * tu) * nk + slack;
            let lower = nf * (s[n - 1] + ds[n - 1] * tl) * nk - slack;
            let m = measured as f64;
            let margin = f64::max(m - upper, lower - m);
            audit.cells += 1;
            if margin > 0.0 {
                audit.violations += 1;
            }
            if margin > audit.worst_margin {
                audit.worst_margin = margin;
                audit.worst_cell = (k, n, measured, lower, upper);
            }
        }
        let centre = nf * g * nk;
        agg = agg.max(sum - (centre + c1)).max((centre - c1) - sum);
    }
    if balanced {
        audit.aggregate_margin = Some(agg);
    }
    Ok(audit)
}

/// Box count of the cylinder piece `w_σ(Γ(f))` at resolution `N^{-|σ|}`,
/// beside the reference `γ_{σ_1}···γ_{σ_r} N^{|σ|}` with
/// `γ_n = (s_{n-1} + s_n)/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderReport {
    /// Outermost letter first.
    pub word: Vec<usize>,
    pub count: u64,
    pub reference: f64,
    pub ratio: f64,
    /// `c̲*·reference` and `c̅*·reference` for constants estimated over a
    /// study; equal to `count` for a single measurement.
    pub lower: f64,
    pub upper: f64,
}

pub fn cylinder_count(problem: &InterpolationProblem, word: &[usize], oversample: u32) -> Result<CylinderReport> {
    require_unit_grid(problem)?;
    let nn = problem.n_maps();
    let s = problem.scalings();
    let gammas: Vec<f64> = s.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    if let Some(g) = gammas.iter().find(|&&g| g <= 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "cylinder growth factor {g} is not positive"
        )));
    }
    if let Some(&bad) = word.iter().find(|&&c| c == 0 || c > nn) {
        return Err(Error::IndexOutOfRange { index: bad, max: nn });
    }
    let r = word.len() as u32;
    column_budget(nn, r)?;
    let column = word.iter().fold(0u64, |acc, &c| acc * nn as u64 + (c as u64 - 1));
    let base = base_samples(problem, oversample)?;
    let (lo, hi) = column_extent(problem, &base, column, r);
    let scale = (nn as f64).powi(r as i32);
    let count = boxes_spanned(lo, hi, scale);
    let reference = word.iter().map(|&c| gammas[c - 1]).product::<f64>() * scale;
    let ratio = count as f64 / reference;
    Ok(CylinderReport {
        word: word.to_vec(),
        count,
        reference,
        ratio,
        lower: count as f64,
        upper: count as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderStudy {
    pub reports: Vec<CylinderReport>,
    /// Smallest and largest observed `count / reference`: empirical stand-ins
    /// for the constants `c̲*`, `c̅*`.
    pub c_lower: f64,
    pub c_upper: f64,
}

/// Counts `per_length` seeded random words of every length `1..=max_len`
/// and fills in each report's bounds from the extreme ratios.
pub fn cylinder_study(
    problem: &InterpolationProblem,
    max_len: usize,
    per_length: usize,
    seed: u64,
    oversample: u32,
) -> Result<CylinderStudy> {
    let mut rng = SeededRng::new(seed);
    let nn = problem.n_maps();
    let mut reports = Vec::new();
    for len in 1..=max_len {
        for _ in 0..per_length {
            let word: Vec<usize> = (0..len).map(|_| rng.index(nn) + 1).collect();
            reports.push(cylinder_count(problem, &word, oversample)?);
        }
    }
    let c_lower = reports.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
    let c_upper = reports.iter().map(|c| c.ratio).fold(0.0, f64::max);
    for c in &mut reports {
        c.lower = c_lower * c.reference;
        c.upper = c_upper * c.reference;
    }
    Ok(CylinderStudy {
        reports,
        c_lower,
        c_upper,
    })
}
