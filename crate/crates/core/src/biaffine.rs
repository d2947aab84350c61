//! Bi-affine IFS on the unit square `■ = [0, 1]²`.
//!
//! Two data chains `0 ≤ Y̲_j ≤ Y̅_j < 1` over knots `0 = X_0 < … < X_N = 1`
//! define trapezoids `Q_n` with vertices `A_n = (X_{n-1}, Y̲_{n-1})`,
//! `B_n = (X_n, Y̲_n)`, `C_n = (X_n, Y̅_n)`, `D_n = (X_{n-1}, Y̅_{n-1})`, and
//! maps `w_n = (l_n, B_n) : ■ → Q_n` sending the corners of the square to
//! those vertices.

use serde::Serialize;

use crate::error::{Error, Result, ValidationError, ValidationErrors};
use crate::ifs::{build_maps, PlaneMap, Profile, TaxicabMetric};
use crate::problem::InterpolationProblem;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapezoidChain {
    knots: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TrapezoidChain {
    pub fn new(knots: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();
        if knots.len() != lower.len() || knots.len() != upper.len() {
            errors.push(ValidationError::LengthMismatch {
                knots: knots.len(),
                values: lower.len(),
                scalings: upper.len(),
            });
            return Err(ValidationErrors(errors));
        }
        if knots.len() < 2 {
            errors.push(ValidationError::TooFewKnots { count: knots.len() });
            return Err(ValidationErrors(errors));
        }
        for j in 0..knots.len() {
            let row = j + 1;
            if !(knots[j].is_finite() && lower[j].is_finite() && upper[j].is_finite()) {
                errors.push(ValidationError::NonFinite { row });
                continue;
            }
            if j > 0 && knots[j] <= knots[j - 1] {
                errors.push(ValidationError::NonIncreasingKnots {
                    row,
                    value: knots[j],
                });
            }
            if !(0.0 <= lower[j] && lower[j] <= upper[j] && upper[j] < 1.0) {
                errors.push(ValidationError::ChainOrdering {
                    row,
                    lower: lower[j],
                    upper: upper[j],
                });
            }
        }
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if first != 0.0 || last != 1.0 {
            errors.push(ValidationError::ChainEndpoints { first, last });
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        Ok(Self {
            knots,
            lower,
            upper,
        })
    }

    /// Uniform knots `X_j = j / N`.
    pub fn uniform(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ValidationErrors> {
        let n = lower.len().saturating_sub(1).max(1);
        let knots = (0..lower.len()).map(|j| j as f64 / n as f64).collect();
        Self::new(knots, lower, upper)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn n_maps(&self) -> usize {
        self.knots.len() - 1
    }

    /// `s_j = Y̅_j − Y̲_j`.
    pub fn scalings(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect()
    }

    /// `a_n = Y̲_n − Y̲_{n-1}` for `n = 1..=N`.
    pub fn lower_steps(&self) -> Vec<f64> {
        self.lower.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn lambda_l(&self) -> f64 {
        self.knots.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// `w_n(x, y) = (l_n(x), Y̲_{n-1} + a_n x + (s_{n-1} + Δs_n x) y)` on `■`.
///
/// The second coordinate is evaluated as the bilinear blend of the four
/// vertex heights, which is the same polynomial but hits the vertex
/// conditions exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiaffineMap {
    pub left: f64,
    pub right: f64,
    /// `Y̲_{n-1}`, `Y̲_n`, `Y̅_n`, `Y̅_{n-1}`: heights at `A_n`, `B_n`, `C_n`, `D_n`.
    pub corners: [f64; 4],
}

impl BiaffineMap {
    #[inline]
    pub fn l(&self, x: f64) -> f64 {
        if x == 1.0 {
            self.right
        } else {
            self.left + (self.right - self.left) * x
        }
    }

    #[inline]
    pub fn second(&self, x: f64, y: f64) -> f64 {
        let [a, b, c, d] = self.corners;
        (1.0 - x) * (1.0 - y) * a + x * (1.0 - y) * b + x * y * c + (1.0 - x) * y * d
    }

    /// `(Y̲_{n-1}, a_n, s_{n-1}, Δs_n)`: the coefficients of
    /// `Y̲_{n-1} + a_n x + (s_{n-1} + Δs_n x) y`.
    pub fn coefficients(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.corners;
        let s0 = d - a;
        (a, b - a, s0, (c - b) - s0)
    }
}

impl PlaneMap for BiaffineMap {
    #[inline]
    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.l(x), self.second(x, y))
    }
}

pub fn build_biaffine(chain: &TrapezoidChain) -> Vec<BiaffineMap> {
    biaffine_from_parts(&chain.knots, &chain.lower, &chain.upper)
}

// no chain validation: also used for normalized data with negative heights
fn biaffine_from_parts(knots: &[f64], lower: &[f64], upper: &[f64]) -> Vec<BiaffineMap> {
    (1..knots.len())
        .map(|n| BiaffineMap {
            left: knots[n - 1],
            right: knots[n],
            corners: [lower[n - 1], lower[n], upper[n], upper[n - 1]],
        })
        .collect()
}

/// The interpolation problem with knots `X_j`, values `Y̲_j` and scalings
/// `s_j = Y̅_j − Y̲_j`.
pub fn to_interpolation_problem(chain: &TrapezoidChain) -> InterpolationProblem {
    InterpolationProblem::new(chain.knots.clone(), chain.lower.clone(), chain.scalings())
        .expect("a valid chain has increasing knots and scalings in [0, 1)")
}

/// Largest pointwise gap between the bi-affine maps and the coefficient-form
/// maps of the associated interpolation problem, over a `grid × grid` sample
/// of `■`.
///
/// The two constructions coincide only when the chord `b` vanishes, so both
/// are built from the normalized lower chain `Y̲_j − b(X_j)` (which has
/// `Y̲_0 = Y̲_N = 0`); the upper chain is shifted by the same amounts.
pub fn consistency_defect(chain: &TrapezoidChain, grid: usize) -> Result<f64> {
    let problem = to_interpolation_problem(chain);
    let shift: Vec<f64> = chain.knots.iter().map(|&x| problem.b(x)).collect();
    let lower: Vec<f64> = chain.lower.iter().zip(&shift).map(|(y, b)| y - b).collect();
    let upper: Vec<f64> = chain.upper.iter().zip(&shift).map(|(y, b)| y - b).collect();
    let normalized = problem.with_values(lower.clone())?;
    let six = build_maps(&normalized)?;
    let seven = biaffine_from_parts(&chain.knots, &lower, &upper);
    let mut worst = 0.0_f64;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        for j in 0..=grid {
            let y = j as f64 / grid as f64;
            for (p, q) in six.maps.iter().zip(&seven) {
                let (u1, v1) = p.apply(x, y);
                let (u2, v2) = q.apply(x, y);
                worst = worst.max((u1 - u2).abs()).max((v1 - v2).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractivityCertificate {
    pub lambda_l: f64,
    /// `(1 − λ_l) / 2`.
    pub beta_max: f64,
    pub beta: f64,
    /// `max_n |a_n|` and `max_n |Δs_n|`; the bound below assumes both ≤ 1,
    /// which holds for any chain inside the unit square.
    pub max_abs_a: f64,
    pub max_abs_ds: f64,
    /// `max_j s_j` over all vertices `j = 0..=N`.
    pub max_s: f64,
    /// `max{λ_l + 2β, max_j s_j}`.
    pub bound: f64,
    pub max_ratio: f64,
}

/// Samples the contraction ratio of every `w_n` in the metric `d_1`
/// (`α = 1`, `q ≡ 1`, `β = β_max / 2`) over `trials` random pairs of `■`.
pub fn contractivity_certificate(
    chain: &TrapezoidChain,
    trials: usize,
    seed: u64,
) -> Result<ContractivityCertificate> {
    let lambda_l = chain.lambda_l();
    if lambda_l >= 1.0 {
        return Err(Error::NotContractive { lambda_l });
    }
    let beta_max = (1.0 - lambda_l) / 2.0;
    let beta = beta_max / 2.0;
    let s = chain.scalings();
    let max_s = s.iter().copied().fold(0.0, f64::max);
    let max_abs_a = chain.lower_steps().iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let max_abs_ds = s.windows(2).fold(0.0_f64, |m, w| m.max((w[1] - w[0]).abs()));
    let metric = TaxicabMetric::with_profile(1.0, beta, Profile::Constant(1.0), (0.0, 1.0))?;
    let maps = build_biaffine(chain);
    let mut rng = SeededRng::new(seed);
    let mut max_ratio = 0.0_f64;
    for _ in 0..trials {
        let p = (rng.unit(), rng.unit());
        let r = (rng.unit(), rng.unit());
        let before = metric.distance(p, r);
        if before == 0.0 {
            continue;
        }
        for m in &maps {
            max_ratio = max_ratio.max(metric.distance(m.apply(p.0, p.1), m.apply(r.0, r.1)) / before);
        }
    }
    Ok(ContractivityCertificate {
        lambda_l,
        beta_max,
        beta,
        max_abs_a,
        max_abs_ds,
        max_s,
        bound: f64::max(lambda_l + 2.0 * beta, max_s),
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_chain() -> TrapezoidChain {
        TrapezoidChain::new(
            vec![0.0, 0.3, 0.55, 1.0],
            vec![0.1, 0.4, 0.0, 0.25],
            vec![0.7, 0.9, 0.35, 0.6],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert!(TrapezoidChain::uniform(vec![0.0, 0.2], vec![0.1, 0.2]).is_ok());
        let e = TrapezoidChain::uniform(vec![0.0, 0.5], vec![0.1, 0.4]).unwrap_err();
        assert!(matches!(e.0[0], ValidationError::ChainOrdering { row: 2, .. }));
        let e = TrapezoidChain::uniform(vec![0.0, 0.2], vec![0.1, 1.0]).unwrap_err();
        assert!(matches!(e.0[0], ValidationError::ChainOrdering { row: 2, .. }));
        let e = TrapezoidChain::new(vec![0.0, 0.9], vec![0.0; 2], vec![0.0; 2]).unwrap_err();
        assert!(matches!(e.0[0], ValidationError::ChainEndpoints { .. }));
    }

    #[test]
    fn vertex_conditions_exact() {
        let c = sample_chain();
        let (x, lo, hi) = (c.knots(), c.lower(), c.upper());
        for (i, m) in build_biaffine(&c).iter().enumerate() {
            let n = i + 1;
            assert_eq!(m.apply(0.0, 0.0), (x[n - 1], lo[n - 1]));
            assert_eq!(m.apply(1.0, 0.0), (x[n], lo[n]));
            assert_eq!(m.apply(1.0, 1.0), (x[n], hi[n]));
            assert_eq!(m.apply(0.0, 1.0), (x[n - 1], hi[n - 1]));
        }
    }

    #[test]
    fn coefficient_form_matches_blend() {
        let c = sample_chain();
        let s = c.scalings();
        let a = c.lower_steps();
        for (i, m) in build_biaffine(&c).iter().enumerate() {
            let (k, an, s0, ds) = m.coefficients();
            assert!((an - a[i]).abs() < 1e-15 && (s0 - s[i]).abs() < 1e-15);
            assert!((ds - (s[i + 1] - s[i])).abs() < 1e-15);
            for (x, y) in [(0.3, 0.7), (0.9, 0.1), (0.5, 0.5)] {
                let direct = k + an * x + (s0 + ds * x) * y;
                assert!((m.second(x, y) - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn images_stay_in_trapezoids() {
        let c = sample_chain();
        let (x, lo, hi) = (c.knots(), c.lower(), c.upper());
        for (i, m) in build_biaffine(&c).iter().enumerate() {
            let n = i + 1;
            for a in 0..=20 {
                for b in 0..=20 {
                    let (t, y) = (a as f64 / 20.0, b as f64 / 20.0);
                    let (u, v) = m.apply(t, y);
                    assert!(x[n - 1] <= u && u <= x[n]);
                    let floor = lo[n - 1] + (lo[n] - lo[n - 1]) * t;
                    let ceil = hi[n - 1] + (hi[n] - hi[n - 1]) * t;
                    assert!(floor - 1e-15 <= v && v <= ceil + 1e-15);
                    assert!((0.0..1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn lines_map_to_lines() {
        let c = sample_chain();
        let cross = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
            (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
        };
        for m in build_biaffine(&c) {
            for t in [0.0, 0.25, 0.6, 1.0] {
                let h = [0.1, 0.5, 0.8].map(|x| m.apply(x, t));
                assert!(cross(h[0], h[1], h[2]).abs() < 1e-15);
                let v = [0.1, 0.5, 0.8].map(|y| m.apply(t, y));
                assert!(cross(v[0], v[1], v[2]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn flat_chain_collapses_to_segment() {
        let c = TrapezoidChain::uniform(vec![0.0; 4], vec![0.0; 4]).unwrap();
        for m in build_biaffine(&c) {
            assert_eq!(m.second(0.37, 0.81), 0.0);
        }
    }

    #[test]
    fn problem_conversion() {
        let c = TrapezoidChain::uniform(vec![0.0, 0.4, 0.0], vec![0.6, 0.9, 0.6]).unwrap();
        let p = to_interpolation_problem(&c);
        let s = p.scalings();
        assert!((s[0] - 0.6).abs() < 1e-15 && (s[1] - 0.5).abs() < 1e-15 && (s[2] - 0.6).abs() < 1e-15);
        assert_eq!(p.values(), c.lower());
    }

    #[test]
    fn agrees_with_general_construction() {
        let zero_ends =
            TrapezoidChain::uniform(vec![0.0, 0.4, 0.2, 0.0], vec![0.5, 0.9, 0.3, 0.5]).unwrap();
        assert!(consistency_defect(&zero_ends, 16).unwrap() <= 1e-12);
        assert!(consistency_defect(&sample_chain(), 16).unwrap() <= 1e-12);
    }

    #[test]
    fn certificate_two_maps() {
        let c = TrapezoidChain::uniform(vec![0.0, 0.4, 0.0], vec![0.6, 0.9, 0.6]).unwrap();
        let cert = contractivity_certificate(&c, 20_000, 1).unwrap();
        assert_eq!(cert.beta_max, 0.25);
        assert!(cert.max_ratio <= cert.bound + 1e-9);
    }

    #[test]
    fn certificate_without_vertical_scaling() {
        let c = TrapezoidChain::uniform(vec![0.2, 0.5, 0.1, 0.3], vec![0.2, 0.5, 0.1, 0.3]).unwrap();
        let cert = contractivity_certificate(&c, 20_000, 2).unwrap();
        assert_eq!(cert.max_s, 0.0);
        assert!(cert.max_ratio <= cert.lambda_l + 2.0 * cert.beta + 1e-12);
    }
}
