//! The Read-Bajraktarević operator `T g = h + S · (g∘L − b∘L)` and its fixed
//! point, the bilinear fractal interpolant.
//!
//! Two independent evaluation routes are provided:
//!
//! * [`OperatorContext::fixed_point`] iterates `T` on a sample lattice,
//! * [`OperatorContext::eval_exact`] / [`exact_graph`] push knot data forward
//!   through the functional equation along finite address words, which has
//!   no iteration error at all.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{AddressPoint, InterpolationProblem};
use crate::sampled::{Lattice, SampledFunction};

const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone)]
pub struct OperatorContext {
    problem: InterpolationProblem,
    s: f64,
}

/// Result of [`OperatorContext::fixed_point`].
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub function: SampledFunction,
    /// Number of applications of `T` to `f_0 = h`.
    pub iterations: usize,
    /// `d∞(T f_0, f_0)`.
    pub first_step: f64,
    /// `d∞(f_k, f_{k-1})`.
    pub last_step: f64,
    /// The a-priori bound `s^k / (1 − s) · d∞(T f_0, f_0)`.
    pub error_bound: f64,
}

impl OperatorContext {
    pub fn new(problem: InterpolationProblem) -> Result<Self> {
        let s = problem.max_scaling();
        if s >= 1.0 {
            return Err(Error::ScalingNotContractive { s });
        }
        Ok(Self { problem, s })
    }

    pub fn problem(&self) -> &InterpolationProblem {
        &self.problem
    }

    /// `s = max_j |s_j|`.
    pub fn contraction_factor(&self) -> f64 {
        self.s
    }

    /// `‖T‖∞ ≤ (1 + s) / (1 − s)`.
    pub fn operator_norm_bound(&self) -> f64 {
        (1.0 + self.s) / (1.0 - self.s)
    }

    fn check_endpoints(&self, g: &SampledFunction) -> Result<()> {
        let p = &self.problem;
        let n = p.n_maps();
        let scale = 1.0 + p.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for j in [0, n] {
            let x = p.knots()[j];
            let found = g.eval(x)?;
            let expected = p.values()[j];
            if (found - expected).abs() > 1e-12 * scale {
                return Err(Error::EndpointMismatch { x, expected, found });
            }
        }
        Ok(())
    }

    #[inline]
    fn apply_at(&self, g: &SampledFunction, x: f64) -> f64 {
        let p = &self.problem;
        let (n, t) = p.big_l(x);
        p.h_piece(n, x) + p.s_n(n, t) * (g.eval_clamped(t) - p.b(t))
    }

    /// `(T g)` sampled on `lattice`. `g` may live on any lattice covering `I`;
    /// it is read by linear interpolation.
    pub fn rb_apply(&self, g: &SampledFunction, lattice: &Lattice) -> Result<SampledFunction> {
        self.check_endpoints(g)?;
        let pts = lattice.points();
        let ys: Vec<f64> = if pts.len() >= PAR_THRESHOLD {
            pts.par_iter().map(|&x| self.apply_at(g, x)).collect()
        } else {
            pts.iter().map(|&x| self.apply_at(g, x)).collect()
        };
        SampledFunction::new(pts.to_vec(), ys)
    }

    /// Iterates `T` from `f_0 = h` on `lattice` until the a-priori Banach
    /// bound drops to `tol`.
    pub fn fixed_point(&self, lattice: &Lattice, tol: f64) -> Result<FixedPoint> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let plan = Plan::new(&self.problem, lattice);
        let p = &self.problem;
        let f0: Vec<f64> = lattice
            .points()
            .iter()
            .map(|&x| p.h_piece(p.owner(x), x))
            .collect();
        let mut current = plan.apply(&f0);
        let first_step = sup(&current, &f0);
        let mut last_step = first_step;
        let mut k = 1;
        let bound = |k: usize| self.s.powi(k as i32) / (1.0 - self.s) * first_step;
        while bound(k) > tol {
            let next = plan.apply(&current);
            last_step = sup(&next, &current);
            current = next;
            k += 1;
        }
        Ok(FixedPoint {
            function: SampledFunction::from_parts_unchecked(lattice.points().to_vec(), current),
            iterations: k,
            first_step,
            last_step,
            error_bound: bound(k),
        })
    }

    /// `(x, f(x))` at an address point, by forward application of the
    /// functional equation `f(l_n(x)) = h(l_n(x)) + S_n(x)(f(x) − b(x))`
    /// starting from `f(X_j) = Y_j`.
    pub fn eval_exact(&self, addr: &AddressPoint) -> Result<(f64, f64)> {
        addr.check(&self.problem)?;
        let p = &self.problem;
        let start = (p.knots()[addr.anchor], p.values()[addr.anchor]);
        Ok(addr
            .word
            .iter()
            .rev()
            .fold(start, |(x, y), &n| p.graph_map(n, x, y)))
    }
}

/// The fixed point evaluated exactly at every address point of depth
/// `depth`: `N^{depth+1} + 1` samples, sorted by abscissa. The abscissae
/// coincide bit-for-bit with [`Lattice::refined`] at the same depth.
pub fn exact_graph(problem: &InterpolationProblem, depth: u32) -> Result<SampledFunction> {
    let n = problem.n_maps();
    (n as u64)
        .checked_pow(depth + 1)
        .filter(|&c| c <= 1 << 28)
        .ok_or(Error::DepthTooLarge { columns: u64::MAX })?;
    let mut xs = problem.knots().to_vec();
    let mut ys = problem.values().to_vec();
    for _ in 0..depth {
        let len = n * (xs.len() - 1) + 1;
        let (mut nx, mut ny) = (Vec::with_capacity(len), Vec::with_capacity(len));
        for map in 1..=n {
            let skip = usize::from(map > 1);
            for (&x, &y) in xs.iter().zip(&ys).skip(skip) {
                let (u, v) = problem.graph_map(map, x, y);
                nx.push(u);
                ny.push(v);
            }
        }
        xs = nx;
        ys = ny;
    }
    Ok(SampledFunction::from_parts_unchecked(xs, ys))
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

/// Precomputed per-sample terms of `T` on a fixed lattice: `h(x)`, `S(x)`,
/// `b(L(x))` and where `L(x)` falls in the lattice.
struct Plan {
    h: Vec<f64>,
    s: Vec<f64>,
    b_pull: Vec<f64>,
    pull: Vec<(usize, f64)>,
}

impl Plan {
    fn new(problem: &InterpolationProblem, lattice: &Lattice) -> Self {
        let pts = lattice.points();
        let (x0, xn) = problem.domain();
        let snap = 1e-12 * (xn - x0);
        let len = pts.len();
        let mut plan = Plan {
            h: Vec::with_capacity(len),
            s: Vec::with_capacity(len),
            b_pull: Vec::with_capacity(len),
            pull: Vec::with_capacity(len),
        };
        for &x in pts {
            let (n, t) = problem.big_l(x);
            plan.h.push(problem.h_piece(n, x));
            plan.s.push(problem.s_n(n, t));
            plan.b_pull.push(problem.b(t));
            let at = match lattice.locate(t, snap) {
                Some(j) => (j, 0.0),
                None => {
                    let j = pts.partition_point(|&p| p <= t).clamp(1, len - 1) - 1;
                    (j, (t - pts[j]) / (pts[j + 1] - pts[j]))
                }
            };
            plan.pull.push(at);
        }
        plan
    }

    #[inline]
    fn term(&self, g: &[f64], i: usize) -> f64 {
        let (j, w) = self.pull[i];
        let gl = if w == 0.0 {
            g[j]
        } else {
            g[j] + w * (g[j + 1] - g[j])
        };
        self.h[i] + self.s[i] * (gl - self.b_pull[i])
    }

    fn apply(&self, g: &[f64]) -> Vec<f64> {
        if g.len() >= PAR_THRESHOLD {
            (0..g.len()).into_par_iter().map(|i| self.term(g, i)).collect()
        } else {
            (0..g.len()).map(|i| self.term(g, i)).collect()
        }
    }
}
