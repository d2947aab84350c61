//! Interpolation data and the generating functions of the bilinear
//! fractal interpolant.
//!
//! A problem is the triple of knots `X_0 < … < X_N`, data values `Y_j` and
//! vertex scalings `s_j ∈ (-1, 1)`. From it we derive
//!
//! * the affine maps `l_n : I → [X_{n-1}, X_n]`,
//! * the scaling function `S = S_n ∘ l_n^{-1}` on `[X_{n-1}, X_n]`,
//! * the chord `b` through the two end points of the data,
//! * the piecewise-linear interpolant `h`.
//!
//! Every affine formula below snaps to the exact right end value when it is
//! evaluated exactly at the right end of its interval, so that knot and
//! join identities hold bit-for-bit rather than up to rounding.

use serde::Serialize;

use crate::error::{Error, Result, ValidationError, ValidationErrors};

/// Default tolerance for [`InterpolationProblem::collinear`].
pub const COLLINEAR_EPS: f64 = 1e-12;

/// Evaluates the line through `(x0, y0)` and `(x1, y1)` at `x`, returning
/// `y1` exactly when `x == x1`.
#[inline]
fn chord(x0: f64, y0: f64, x1: f64, y1: f64, slope: f64, x: f64) -> f64 {
    if x == x1 {
        y1
    } else {
        y0 + slope * (x - x0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationProblem {
    knots: Vec<f64>,
    values: Vec<f64>,
    scalings: Vec<f64>,
    #[serde(skip)]
    derived: Derived,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct Derived {
    span: f64,
    max_scaling: f64,
    chord_slope: f64,
    // per interval n = 1..=N, stored at index n - 1
    knot_ratio: Vec<f64>,
    data_slope: Vec<f64>,
    scaling_slope: Vec<f64>,
}

impl InterpolationProblem {
    /// Validates the data and builds a problem. All violated invariants are
    /// reported together.
    pub fn new(
        knots: Vec<f64>,
        values: Vec<f64>,
        scalings: Vec<f64>,
    ) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();
        if knots.len() != values.len() || knots.len() != scalings.len() {
            errors.push(ValidationError::LengthMismatch {
                knots: knots.len(),
                values: values.len(),
                scalings: scalings.len(),
            });
            return Err(ValidationErrors(errors));
        }
        if knots.len() < 2 {
            errors.push(ValidationError::TooFewKnots { count: knots.len() });
        }
        for j in 0..knots.len() {
            let row = j + 1;
            if !(knots[j].is_finite() && values[j].is_finite() && scalings[j].is_finite()) {
                errors.push(ValidationError::NonFinite { row });
                continue;
            }
            if j > 0 && knots[j - 1].is_finite() && knots[j] <= knots[j - 1] {
                errors.push(ValidationError::NonIncreasingKnots {
                    row,
                    value: knots[j],
                });
            }
            if scalings[j].abs() >= 1.0 {
                errors.push(ValidationError::ScalingOutOfRange {
                    row,
                    value: scalings[j],
                });
            }
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        let derived = Derived::compute(&knots, &values, &scalings);
        Ok(Self {
            knots,
            values,
            scalings,
            derived,
        })
    }

    /// Uniform knots `X_j = j / N` on `[0, 1]`.
    pub fn uniform(values: Vec<f64>, scalings: Vec<f64>) -> Result<Self, ValidationErrors> {
        let n = values.len().saturating_sub(1).max(1);
        let knots = (0..values.len()).map(|j| j as f64 / n as f64).collect();
        Self::new(knots, values, scalings)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scalings(&self) -> &[f64] {
        &self.scalings
    }

    /// Number of maps `N` (one less than the number of knots).
    pub fn n_maps(&self) -> usize {
        self.knots.len() - 1
    }

    /// The domain `I = [X_0, X_N]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.n_maps()])
    }

    /// `s = max_j |s_j|`.
    pub fn max_scaling(&self) -> f64 {
        self.derived.max_scaling
    }

    /// `(X_n - X_{n-1}) / (X_N - X_0)`, the Lipschitz constant of `l_n`.
    pub fn knot_ratio(&self, n: usize) -> f64 {
        self.derived.knot_ratio[n - 1]
    }

    /// True when the knots are equally spaced to within a relative `1e-12`.
    pub fn has_uniform_knots(&self) -> bool {
        let (x0, xn) = self.domain();
        let n = self.n_maps() as f64;
        let span = xn - x0;
        self.knots
            .iter()
            .enumerate()
            .all(|(j, &x)| (x - (x0 + span * j as f64 / n)).abs() <= 1e-12 * span)
    }

    /// True when the knots are `j / N` on `[0, 1]` (to within `1e-12`).
    pub fn has_unit_uniform_knots(&self) -> bool {
        let (x0, xn) = self.domain();
        x0 == 0.0 && xn == 1.0 && self.has_uniform_knots()
    }

    fn check_map(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_maps() {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.n_maps(),
            });
        }
        Ok(())
    }

    fn check_point(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return Err(Error::PointOutsideDomain { x, lo, hi });
        }
        Ok(())
    }

    /// `l_n(x)` for `1 <= n <= N` and `x ∈ I`.
    pub fn eval_l(&self, n: usize, x: f64) -> Result<f64> {
        self.check_map(n)?;
        self.check_point(x)?;
        Ok(self.l(n, x))
    }

    /// The interval owning `x` and `l_n^{-1}(x)`. Interior knots belong to the
    /// interval on their right; `X_N` belongs to interval `N`.
    pub fn eval_big_l(&self, x: f64) -> Result<(usize, f64)> {
        self.check_point(x)?;
        Ok(self.big_l(x))
    }

    /// The scaling function `S(x)`.
    pub fn eval_s(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        let (n, t) = self.big_l(x);
        Ok(self.s_n(n, t))
    }

    /// The chord `b(x)` through `(X_0, Y_0)` and `(X_N, Y_N)`.
    pub fn eval_b(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.b(x))
    }

    /// The piecewise-linear interpolant `h(x)`.
    pub fn eval_h(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        let n = self.owner(x);
        Ok(self.h_piece(n, x))
    }

    /// True iff every data point lies within `eps` (perpendicular distance)
    /// of the chord through the first and last data points.
    pub fn collinear(&self, eps: f64) -> bool {
        let (x0, xn) = self.domain();
        let (y0, yn) = (self.values[0], self.values[self.n_maps()]);
        let (dx, dy) = (xn - x0, yn - y0);
        let len = dx.hypot(dy);
        self.knots
            .iter()
            .zip(&self.values)
            .all(|(&x, &y)| ((x - x0) * dy - (y - y0) * dx).abs() / len <= eps)
    }

    /// Applies the plane map `w_n(x, y) = (l_n(x), h(l_n(x)) + S_n(x)(y - b(x)))`.
    ///
    /// This is the functional-equation form used by exact address evaluation
    /// and by the box counter. No domain checks.
    #[inline]
    pub fn graph_map(&self, n: usize, x: f64, y: f64) -> (f64, f64) {
        let lx = self.l(n, x);
        (lx, self.h_piece(n, lx) + self.s_n(n, x) * (y - self.b(x)))
    }

    /// Rebuilds the problem with new data values, keeping knots and scalings.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, ValidationErrors> {
        Self::new(self.knots.clone(), values, self.scalings.clone())
    }

    // unchecked kernels

    #[inline]
    pub(crate) fn l(&self, n: usize, x: f64) -> f64 {
        let (x0, xn) = self.domain();
        if x == xn {
            self.knots[n]
        } else {
            self.knots[n - 1] + self.derived.knot_ratio[n - 1] * (x - x0)
        }
    }

    #[inline]
    pub(crate) fn owner(&self, x: f64) -> usize {
        self.knots
            .partition_point(|&k| k <= x)
            .clamp(1, self.n_maps())
    }

    #[inline]
    pub(crate) fn big_l(&self, x: f64) -> (usize, f64) {
        let n = self.owner(x);
        let (x0, xn) = self.domain();
        let t = if x == self.knots[n] {
            xn
        } else {
            x0 + (x - self.knots[n - 1]) / self.derived.knot_ratio[n - 1]
        };
        (n, t)
    }

    /// `S_n(x) = s_{n-1} + ((s_n - s_{n-1}) / (X_N - X_0)) (x - X_0)`.
    #[inline]
    pub(crate) fn s_n(&self, n: usize, x: f64) -> f64 {
        let (x0, xn) = self.domain();
        chord(
            x0,
            self.scalings[n - 1],
            xn,
            self.scalings[n],
            self.derived.scaling_slope[n - 1],
            x,
        )
    }

    #[inline]
    pub(crate) fn b(&self, x: f64) -> f64 {
        let (x0, xn) = self.domain();
        let n = self.n_maps();
        chord(
            x0,
            self.values[0],
            xn,
            self.values[n],
            self.derived.chord_slope,
            x,
        )
    }

    /// The `n`-th affine piece of `h`, valid on `[X_{n-1}, X_n]`.
    #[inline]
    pub(crate) fn h_piece(&self, n: usize, x: f64) -> f64 {
        chord(
            self.knots[n - 1],
            self.values[n - 1],
            self.knots[n],
            self.values[n],
            self.derived.data_slope[n - 1],
            x,
        )
    }

    pub(crate) fn s_slope(&self, n: usize) -> f64 {
        self.derived.scaling_slope[n - 1]
    }

    pub(crate) fn chord_slope(&self) -> f64 {
        self.derived.chord_slope
    }
}

impl Derived {
    fn compute(knots: &[f64], values: &[f64], scalings: &[f64]) -> Self {
        let n = knots.len() - 1;
        let span = knots[n] - knots[0];
        let intervals = 1..=n;
        Self {
            span,
            max_scaling: scalings.iter().fold(0.0, |m, s| f64::max(m, s.abs())),
            chord_slope: (values[n] - values[0]) / span,
            knot_ratio: intervals
                .clone()
                .map(|i| (knots[i] - knots[i - 1]) / span)
                .collect(),
            data_slope: intervals
                .clone()
                .map(|i| (values[i] - values[i - 1]) / (knots[i] - knots[i - 1]))
                .collect(),
            scaling_slope: intervals
                .map(|i| (scalings[i] - scalings[i - 1]) / span)
                .collect(),
        }
    }
}

/// A point of `I` named by a finite word over `{1..N}` applied to a knot:
/// `x = l_{σ_1} ∘ … ∘ l_{σ_k}(X_anchor)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddressPoint {
    pub word: Vec<usize>,
    pub anchor: usize,
}

impl AddressPoint {
    pub fn new(word: Vec<usize>, anchor: usize) -> Self {
        Self { word, anchor }
    }

    pub fn check(&self, problem: &InterpolationProblem) -> Result<()> {
        let n = problem.n_maps();
        if self.anchor > n {
            return Err(Error::IndexOutOfRange {
                index: self.anchor,
                max: n,
            });
        }
        match self.word.iter().find(|&&w| w == 0 || w > n) {
            Some(&bad) => Err(Error::IndexOutOfRange { index: bad, max: n }),
            None => Ok(()),
        }
    }

    /// Abscissa of the address, applying the innermost letter first.
    pub fn abscissa(&self, problem: &InterpolationProblem) -> Result<f64> {
        self.check(problem)?;
        Ok(self
            .word
            .iter()
            .rev()
            .fold(problem.knots()[self.anchor], |x, &n| problem.l(n, x)))
    }

    /// Word as dot-separated digits, e.g. `1.2.2`; the empty word is `-`.
    pub fn word_label(&self) -> String {
        if self.word.is_empty() {
            return "-".to_string();
        }
        self.word
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_knots(values: [f64; 3], scalings: [f64; 3]) -> InterpolationProblem {
        InterpolationProblem::new(vec![0.0, 0.5, 1.0], values.to_vec(), scalings.to_vec()).unwrap()
    }

    #[test]
    fn minimal_problem_is_valid() {
        assert!(InterpolationProblem::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn rejects_unordered_knots() {
        let err = InterpolationProblem::new(
            vec![0.0, 1.0, 0.5],
            vec![0.0; 3],
            vec![0.0; 3],
        )
        .unwrap_err();
        assert_eq!(
            err.0,
            vec![ValidationError::NonIncreasingKnots { row: 3, value: 0.5 }]
        );
    }

    #[test]
    fn scaling_interval_is_open() {
        let err = InterpolationProblem::new(vec![0.0, 1.0], vec![0.0; 2], vec![0.5, 1.0]).unwrap_err();
        assert_eq!(
            err.0,
            vec![ValidationError::ScalingOutOfRange { row: 2, value: 1.0 }]
        );
        assert!(err.only_scaling());
    }

    #[test]
    fn reports_every_violation() {
        let err =
            InterpolationProblem::new(vec![0.0], vec![0.0], vec![-1.5]).unwrap_err();
        assert_eq!(err.0.len(), 2);
        assert!(!err.only_scaling());
    }

    #[test]
    fn l_maps_endpoints_to_knots() {
        let p = three_knots([0.0; 3], [0.0; 3]);
        assert_eq!(p.eval_l(1, 1.0).unwrap(), 0.5);
        assert_eq!(p.eval_l(2, 0.5).unwrap(), 0.75);
        for n in 1..=2 {
            assert_eq!(p.eval_l(n, 0.0).unwrap(), p.knots()[n - 1]);
        }
        assert!(matches!(p.eval_l(3, 0.1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(p.eval_l(1, 1.1), Err(Error::PointOutsideDomain { .. })));
    }

    #[test]
    fn big_l_uses_half_open_intervals() {
        let p = three_knots([0.0; 3], [0.0; 3]);
        assert_eq!(p.eval_big_l(0.5).unwrap(), (2, 0.0));
        assert_eq!(p.eval_big_l(1.0).unwrap(), (2, 1.0));
        assert_eq!(p.eval_big_l(0.25).unwrap(), (1, 0.5));
        assert_eq!(p.eval_big_l(0.0).unwrap(), (1, 0.0));
    }

    #[test]
    fn scaling_function_examples() {
        let p = three_knots([0.0; 3], [0.3; 3]);
        for x in [0.0, 0.2, 0.5, 0.77, 1.0] {
            assert_eq!(p.eval_s(x).unwrap(), 0.3);
        }
        let p = three_knots([0.0; 3], [0.0, 0.5, 0.0]);
        assert_eq!(p.eval_s(0.25).unwrap(), 0.25);
        for (x, s) in p.knots().iter().zip(p.scalings()) {
            assert_eq!(p.eval_s(*x).unwrap(), *s);
        }
    }

    #[test]
    fn chord_and_interpolant() {
        let p = three_knots([0.0; 3], [0.0; 3]);
        assert_eq!(p.eval_b(0.3).unwrap(), 0.0);
        assert_eq!(p.eval_h(0.3).unwrap(), 0.0);

        let p = three_knots([0.0, 1.0, 0.0], [0.0; 3]);
        assert_eq!(p.eval_h(0.25).unwrap(), 0.5);
        assert_eq!(p.eval_b(0.25).unwrap(), 0.0);
    }

    #[test]
    fn knot_identities_are_exact() {
        let p = InterpolationProblem::new(
            vec![-0.3, 0.1, 0.7, 2.9],
            vec![0.1, -0.7, 1.3, 0.3],
            vec![0.2, -0.4, 0.9, 0.35],
        )
        .unwrap();
        for j in 0..=3 {
            let x = p.knots()[j];
            assert_eq!(p.eval_h(x).unwrap(), p.values()[j]);
            assert_eq!(p.eval_s(x).unwrap(), p.scalings()[j]);
        }
        assert_eq!(p.eval_b(-0.3).unwrap(), 0.1);
        assert_eq!(p.eval_b(2.9).unwrap(), 0.3);
    }

    #[test]
    fn collinearity() {
        assert!(three_knots([0.0, 0.5, 1.0], [0.0; 3]).collinear(COLLINEAR_EPS));
        assert!(!three_knots([0.0, 1.0, 0.0], [0.0; 3]).collinear(COLLINEAR_EPS));
        assert!(three_knots([0.0, 1e-18, 0.0], [0.0; 3]).collinear(1e-12));
    }

    #[test]
    fn graph_map_endpoint_identities() {
        let p = InterpolationProblem::new(
            vec![0.0, 0.2, 0.6, 1.0],
            vec![0.3, 1.1, -0.4, 0.8],
            vec![0.5, -0.3, 0.6, 0.2],
        )
        .unwrap();
        for y in [-2.0, -0.1, 0.0, 0.37, 5.0] {
            for n in 1..=3 {
                let (x, v) = p.graph_map(n, 1.0, y);
                assert_eq!(x, p.knots()[n]);
                assert_eq!(v, p.values()[n] + p.scalings()[n] * (y - 0.8));
            }
            for n in 1..3 {
                let (x, v) = p.graph_map(n + 1, 0.0, y);
                assert_eq!(x, p.knots()[n]);
                assert_eq!(v, p.values()[n] + p.scalings()[n] * (y - 0.3));
            }
        }
    }

    #[test]
    fn address_abscissa() {
        let p = three_knots([0.0; 3], [0.0; 3]);
        let a = AddressPoint::new(vec![2, 1], 2);
        // l_2(l_1(1)) = l_2(0.5) = 0.75
        assert_eq!(a.abscissa(&p).unwrap(), 0.75);
        assert_eq!(a.word_label(), "2.1");
        assert!(AddressPoint::new(vec![3], 0).check(&p).is_err());
        assert!(AddressPoint::new(vec![], 3).check(&p).is_err());
    }
}
