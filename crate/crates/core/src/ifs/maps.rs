use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::InterpolationProblem;

/// A map of the plane, applied pointwise by the renderers and auditors.
pub trait PlaneMap: Sync {
    fn apply(&self, x: f64, y: f64) -> (f64, f64);
}

/// `w(x, y) = (l(x), a + b·u + c·y + d·u·y + e·u²)` with `u = x − X_0` and
/// `l(x) = X_{n-1} + ratio · u`.
///
/// The `e·u²` term is `−(s_n − s_{n-1})(Y_N − Y_0)/(X_N − X_0)²`; it vanishes
/// (and the map is bilinear in the strict sense) exactly when `Y_0 = Y_N` or
/// `s_{n-1} = s_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearMap {
    pub origin: f64,
    pub end: f64,
    pub left: f64,
    pub right: f64,
    pub ratio: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl BilinearMap {
    #[inline]
    pub fn l(&self, x: f64) -> f64 {
        if x == self.end {
            self.right
        } else {
            self.left + self.ratio * (x - self.origin)
        }
    }

    #[inline]
    pub fn second(&self, x: f64, y: f64) -> f64 {
        let u = x - self.origin;
        self.a + self.b * u + (self.c + self.d * u) * y + self.e * u * u
    }

    pub fn is_bilinear(&self) -> bool {
        self.e == 0.0
    }
}

impl PlaneMap for BilinearMap {
    #[inline]
    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.l(x), self.second(x, y))
    }
}

/// The IFS `W = (I × R; w_1, …, w_N)` of an interpolation problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilinearMapSet {
    pub maps: Vec<BilinearMap>,
    /// Largest deviation from the join and endpoint identities seen when
    /// the set was built.
    pub construction_defect: f64,
}

impl BilinearMapSet {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn all_bilinear(&self) -> bool {
        self.maps.iter().all(BilinearMap::is_bilinear)
    }

    /// Max deviation from `w_n(X_N, y) = (X_n, Y_n + s_n(y − Y_N))` and
    /// `w_{n+1}(X_0, y) = (X_n, Y_n + s_n(y − Y_0))` over the probe values `ys`.
    pub fn endpoint_defect(&self, problem: &InterpolationProblem, ys: &[f64]) -> f64 {
        let (x0, xn) = problem.domain();
        let (kn, vals, sc) = (problem.knots(), problem.values(), problem.scalings());
        let last = problem.n_maps();
        let mut worst = 0.0_f64;
        for &y in ys {
            for (i, m) in self.maps.iter().enumerate() {
                let n = i + 1;
                let (u, v) = m.apply(xn, y);
                worst = worst
                    .max((u - kn[n]).abs())
                    .max((v - (vals[n] + sc[n] * (y - vals[last]))).abs());
                let (u, v) = m.apply(x0, y);
                worst = worst
                    .max((u - kn[n - 1]).abs())
                    .max((v - (vals[n - 1] + sc[n - 1] * (y - vals[0]))).abs());
            }
        }
        worst
    }
}

/// Builds the coefficient form of the `N` maps
/// `w_n(x, y) = (l_n(x), h(l_n(x)) + S_n(x)(y − b(x)))`.
pub fn build_maps(problem: &InterpolationProblem) -> Result<BilinearMapSet> {
    let (x0, xn) = problem.domain();
    let span = xn - x0;
    let (kn, vals, sc) = (problem.knots(), problem.values(), problem.scalings());
    let y0 = vals[0];
    let m = problem.chord_slope();
    let maps: Vec<BilinearMap> = (1..=problem.n_maps())
        .map(|n| {
            let p = (vals[n] - vals[n - 1]) / span;
            let q = problem.s_slope(n);
            BilinearMap {
                origin: x0,
                end: xn,
                left: kn[n - 1],
                right: kn[n],
                ratio: problem.knot_ratio(n),
                a: vals[n - 1] - sc[n - 1] * y0,
                b: p - sc[n - 1] * m - q * y0,
                c: sc[n - 1],
                d: q,
                e: -q * m,
            }
        })
        .collect();
    let mut set = BilinearMapSet {
        maps,
        construction_defect: 0.0,
    };
    let scale = 1.0 + vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let probes = [-4.0 * scale, -1.0, 0.0, 0.5, 1.0, 4.0 * scale];
    let defect = set.endpoint_defect(problem, &probes);
    if defect > 1e-9 * scale * scale {
        return Err(Error::MapDefect { defect });
    }
    set.construction_defect = defect;
    Ok(set)
}
