#![allow(dead_code)]

use bifract::rng::SeededRng;
use bifract::{AddressPoint, InterpolationProblem, OperatorContext};

/// Seeded random problem: `N ∈ {2..=6}`, values in `[−1, 1]`, `|s_j| ≤ 0.9`,
/// uniform knots on even seeds and jittered knots on odd ones.
pub fn random_problem(seed: u64) -> InterpolationProblem {
    let mut rng = SeededRng::new(seed);
    let n = 2 + rng.index(5);
    let knots: Vec<f64> = if seed.is_multiple_of(2) {
        (0..=n).map(|j| j as f64 / n as f64).collect()
    } else {
        let mut gaps: Vec<f64> = (0..n).map(|_| rng.range(0.3, 1.0)).collect();
        let total: f64 = gaps.iter().sum();
        gaps.iter_mut().for_each(|g| *g /= total);
        let x0 = rng.range(-1.0, 1.0);
        let span = rng.range(0.5, 3.0);
        let mut xs = vec![x0];
        for g in gaps {
            xs.push(xs.last().unwrap() + g * span);
        }
        xs
    };
    let values = (0..=n).map(|_| rng.range(-1.0, 1.0)).collect();
    let scalings = (0..=n).map(|_| rng.range(-0.9, 0.9)).collect();
    InterpolationProblem::new(knots, values, scalings).unwrap()
}

/// All words of length `len` over `1..=n`, outermost letter first.
pub fn words(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=n).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Brute-force column counts at resolution `N^{-r}`.
///
/// Samples the graph at every address point of depth `r + extra` (all
/// anchors), groups the samples by the first `r` letters, joins each group
/// into a polyline sorted by abscissa, and counts for every box in the
/// global row range whether any polyline segment meets the half-open box
/// `[j, j + 1) / N^r`.
pub fn naive_column_counts(problem: &InterpolationProblem, r: usize, extra: usize) -> Vec<u64> {
    let n = problem.n_maps();
    let ctx = OperatorContext::new(problem.clone()).unwrap();
    let scale = (n as f64).powi(r as i32);
    let prefixes = words(n, r);
    let tails = words(n, extra);
    let polylines: Vec<Vec<(f64, f64)>> = prefixes
        .iter()
        .map(|prefix| {
            let mut pts = Vec::new();
            for tail in &tails {
                for anchor in 0..=n {
                    let word = prefix.iter().chain(tail).copied().collect();
                    pts.push(ctx.eval_exact(&AddressPoint::new(word, anchor)).unwrap());
                }
            }
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts
        })
        .collect();
    let all_y = polylines.iter().flatten().map(|p| p.1 * scale);
    let (lo, hi) = all_y.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let rows = (lo.floor() as i64)..=(hi.floor() as i64);
    polylines
        .iter()
        .map(|line| {
            rows.clone()
                .filter(|&j| {
                    line.windows(2).any(|seg| {
                        let (a, b) = (seg[0].1 * scale, seg[1].1 * scale);
                        let (bottom, top) = (a.min(b), a.max(b));
                        bottom < (j + 1) as f64 && top >= j as f64
                    })
                })
                .count() as u64
        })
        .collect()
}

/// Seeded chain of trapezoids in the unit square with `N ∈ {2..=6}` maps and
/// jittered knots.
pub fn random_chain(seed: u64) -> bifract::biaffine::TrapezoidChain {
    let mut rng = SeededRng::new(seed);
    let n = 2 + rng.index(5);
    let mut gaps: Vec<f64> = (0..n).map(|_| rng.range(0.4, 1.0)).collect();
    let total: f64 = gaps.iter().sum();
    gaps.iter_mut().for_each(|g| *g /= total);
    let mut knots = vec![0.0];
    for g in &gaps[..n - 1] {
        knots.push(knots.last().unwrap() + g);
    }
    knots.push(1.0);
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for _ in 0..=n {
        let lo = rng.range(0.0, 0.6);
        lower.push(lo);
        upper.push(rng.range(lo, 0.99));
    }
    bifract::biaffine::TrapezoidChain::new(knots, lower, upper).unwrap()
}
