//! Functions on `I` carried by their values on an ordered sample lattice,
//! read between samples by linear interpolation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::InterpolationProblem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    abscissae: Vec<f64>,
    ordinates: Vec<f64>,
}

impl SampledFunction {
    pub fn new(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Self> {
        if abscissae.len() != ordinates.len() || abscissae.len() < 2 {
            return Err(Error::Samples(format!(
                "need matching abscissae/ordinates of length >= 2, got {} and {}",
                abscissae.len(),
                ordinates.len()
            )));
        }
        if let Some(i) = abscissae.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Samples(format!(
                "abscissae not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = ordinates
            .iter()
            .chain(&abscissae)
            .position(|v| !v.is_finite())
        {
            return Err(Error::Samples(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            abscissae,
            ordinates,
        })
    }

    /// Samples `f` on the given lattice.
    pub fn from_fn(lattice: &Lattice, f: impl Fn(f64) -> f64) -> Result<Self> {
        let ys = lattice.points().iter().map(|&x| f(x)).collect();
        Self::new(lattice.points().to_vec(), ys)
    }

    pub(crate) fn from_parts_unchecked(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Self {
        debug_assert_eq!(abscissae.len(), ordinates.len());
        Self {
            abscissae,
            ordinates,
        }
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.abscissae[0], self.abscissae[self.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return Err(Error::PointOutsideDomain { x, lo, hi });
        }
        Ok(self.eval_clamped(x))
    }

    /// Piecewise-linear read. Returns the stored ordinate exactly when `x`
    /// hits a sample abscissa; clamps outside the domain.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        let i = self.abscissae.partition_point(|&a| a <= x);
        if i == 0 {
            return self.ordinates[0];
        }
        let i = i - 1;
        if self.abscissae[i] == x || i + 1 == self.len() {
            return self.ordinates[i];
        }
        let (x0, x1) = (self.abscissae[i], self.abscissae[i + 1]);
        let t = (x - x0) / (x1 - x0);
        self.ordinates[i] + t * (self.ordinates[i + 1] - self.ordinates[i])
    }

    /// `max |f - g|` over the union of both sample sets.
    pub fn sup_distance(&self, other: &SampledFunction) -> f64 {
        if self.abscissae == other.abscissae {
            return self
                .ordinates
                .iter()
                .zip(&other.ordinates)
                .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
        }
        let one = self
            .abscissae
            .iter()
            .zip(&self.ordinates)
            .map(|(&x, &y)| (y - other.eval_clamped(x)).abs());
        let two = other
            .abscissae
            .iter()
            .zip(&other.ordinates)
            .map(|(&x, &y)| (y - self.eval_clamped(x)).abs());
        one.chain(two).fold(0.0, f64::max)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.ordinates
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
                (lo.min(y), hi.max(y))
            })
    }

    /// Largest jump between neighbouring samples; a sampled modulus of
    /// continuity at the lattice spacing.
    pub fn max_step(&self) -> f64 {
        self.ordinates
            .windows(2)
            .fold(0.0, |m, w| f64::max(m, (w[1] - w[0]).abs()))
    }
}

/// An ordered set of abscissae in `I` containing every knot.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    points: Vec<f64>,
}

impl Lattice {
    /// `M · N^d + 1` equally spaced points on `I`. Requires uniform knots and
    /// `M · N^d` divisible by `N` so that every knot is a lattice point; the
    /// lattice is then mapped into itself by `l_n^{-1}`.
    pub fn uniform(problem: &InterpolationProblem, m: usize, depth: u32) -> Result<Self> {
        if !problem.has_uniform_knots() {
            return Err(Error::NonUniformKnots);
        }
        let n = problem.n_maps();
        let cells = (n as u64)
            .checked_pow(depth)
            .and_then(|p| p.checked_mul(m as u64))
            .filter(|&c| c <= 1 << 28)
            .ok_or(Error::DepthTooLarge {
                columns: u64::MAX,
            })?;
        if m == 0 || cells % n as u64 != 0 {
            return Err(Error::InvalidArgument(format!(
                "lattice of {cells} cells does not contain the {n}-interval knots"
            )));
        }
        let (x0, xn) = problem.domain();
        let span = xn - x0;
        let cells = cells as usize;
        let stride = cells / n;
        let points = (0..=cells)
            .map(|i| {
                if i % stride == 0 {
                    problem.knots()[i / stride]
                } else {
                    x0 + span * (i as f64 / cells as f64)
                }
            })
            .collect();
        Ok(Self { points })
    }

    /// The image lattice `⋃_{|σ| ≤ depth} l_σ(knots)`, sorted, with
    /// `N^{depth+1} + 1` points. Works for any knots.
    pub fn refined(problem: &InterpolationProblem, depth: u32) -> Result<Self> {
        let n = problem.n_maps();
        let size = (n as u64)
            .checked_pow(depth + 1)
            .filter(|&c| c <= 1 << 28)
            .ok_or(Error::DepthTooLarge { columns: u64::MAX })?;
        let mut level = problem.knots().to_vec();
        for _ in 0..depth {
            let mut next = Vec::with_capacity(n * (level.len() - 1) + 1);
            for map in 1..=n {
                // images of consecutive blocks share one end point
                let skip = usize::from(map > 1);
                next.extend(level.iter().skip(skip).map(|&x| problem.l(map, x)));
            }
            level = next;
        }
        debug_assert_eq!(level.len() as u64, size + 1);
        Ok(Self { points: level })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Samples(
                "lattice must be strictly increasing with >= 2 points".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the lattice point within `tol` of `x`, if any.
    pub fn locate(&self, x: f64, tol: f64) -> Option<usize> {
        let i = self.points.partition_point(|&p| p < x);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.points.len())
            .find(|&j| (self.points[j] - x).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_samples() {
        assert!(SampledFunction::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
        assert!(SampledFunction::new(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn linear_reads() {
        let f = SampledFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.eval(0.25).unwrap(), 0.5);
        assert_eq!(f.eval(0.5).unwrap(), 1.0);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
        assert!(f.eval(1.5).is_err());
        assert_eq!(f.max_step(), 1.0);
        assert_eq!(f.min_max(), (0.0, 1.0));
    }

    #[test]
    fn sup_distance_on_different_lattices() {
        let f = SampledFunction::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let g = SampledFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.sup_distance(&g), 2.0);
        assert_eq!(g.sup_distance(&f), 2.0);
    }

    #[test]
    fn uniform_lattice_contains_knots() {
        let p = InterpolationProblem::uniform(vec![0.0; 4], vec![0.0; 4]).unwrap();
        let lat = Lattice::uniform(&p, 1, 3).unwrap();
        assert_eq!(lat.len(), 28);
        for k in p.knots() {
            assert!(lat.points().contains(k));
        }
        let lat = Lattice::uniform(&p, 1024, 1).unwrap();
        assert_eq!(lat.len(), 3 * 1024 + 1);
        assert!(Lattice::uniform(&p, 2, 0).is_err());
    }

    #[test]
    fn refined_lattice_matches_uniform_for_uniform_knots() {
        let p = InterpolationProblem::uniform(vec![0.0; 3], vec![0.0; 3]).unwrap();
        let a = Lattice::refined(&p, 4).unwrap();
        let b = Lattice::uniform(&p, 1, 5).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.points().iter().zip(b.points()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn refined_lattice_for_irregular_knots() {
        let p = InterpolationProblem::new(
            vec![0.0, 0.1, 0.7, 1.0],
            vec![0.0; 4],
            vec![0.0; 4],
        )
        .unwrap();
        let lat = Lattice::refined(&p, 3).unwrap();
        assert_eq!(lat.len(), 3usize.pow(4) + 1);
        assert!(lat.points().windows(2).all(|w| w[0] < w[1]));
        for k in p.knots() {
            assert!(lat.locate(*k, 0.0).is_some());
        }
    }
}
