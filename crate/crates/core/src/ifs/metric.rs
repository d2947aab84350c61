use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

/// The reference function `q` of a sheared taxi-cab metric.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    Sampled(SampledFunction),
}

impl Profile {
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Sampled(f) => f.eval_clamped(x),
        }
    }
}

/// `d_q((x1, y1), (x2, y2)) = α|x1 − x2| + β|(y1 − q(x1)) − (y2 − q(x2))|`
/// on `I × R`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxicabMetric {
    alpha: f64,
    beta: f64,
    profile: Profile,
    domain: (f64, f64),
}

impl TaxicabMetric {
    /// Metric sheared along a sampled function; `I` is the sample range.
    pub fn new(alpha: f64, beta: f64, q: SampledFunction) -> Result<Self> {
        let domain = q.domain();
        Self::with_profile(alpha, beta, Profile::Sampled(q), domain)
    }

    pub fn with_profile(alpha: f64, beta: f64, profile: Profile, domain: (f64, f64)) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "metric weights must be positive and finite, got alpha={alpha}, beta={beta}"
            )));
        }
        if !(domain.0 < domain.1) {
            return Err(Error::InvalidArgument("empty metric domain".into()));
        }
        Ok(Self {
            alpha,
            beta,
            profile,
            domain,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Unchecked distance; `x`-coordinates are assumed to lie in `I`.
    #[inline]
    pub fn distance(&self, p: (f64, f64), r: (f64, f64)) -> f64 {
        let dp = p.1 - self.profile.value(p.0);
        let dr = r.1 - self.profile.value(r.0);
        self.alpha * (p.0 - r.0).abs() + self.beta * (dp - dr).abs()
    }

    pub fn d_q(&self, p: (f64, f64), r: (f64, f64)) -> Result<f64> {
        let (lo, hi) = self.domain;
        for x in [p.0, r.0] {
            if !(lo..=hi).contains(&x) {
                return Err(Error::PointOutsideDomain { x, lo, hi });
            }
        }
        Ok(self.distance(p, r))
    }
}
