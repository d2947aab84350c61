use std::fmt;

use thiserror::Error;

/// A single violated invariant of an input data set, tagged with the
/// 1-based data row it was found on (the CSV header is not counted).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("need at least 2 knots, got {count}")]
    TooFewKnots { count: usize },
    #[error("column lengths differ: {knots} knots, {values} values, {scalings} scalings")]
    LengthMismatch {
        knots: usize,
        values: usize,
        scalings: usize,
    },
    #[error("row {row}: non-finite entry")]
    NonFinite { row: usize },
    #[error("row {row}: knot {value} does not exceed the previous knot")]
    NonIncreasingKnots { row: usize, value: f64 },
    #[error("row {row}: scaling {value} is outside (-1, 1)")]
    ScalingOutOfRange { row: usize, value: f64 },
    #[error("row {row}: lower value {lower} and upper value {upper} violate 0 <= lower <= upper < 1")]
    ChainOrdering { row: usize, lower: f64, upper: f64 },
    #[error("chain knots must start at 0 and end at 1, got [{first}, {last}]")]
    ChainEndpoints { first: f64, last: f64 },
}

/// The full list of problems found while validating one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl ValidationErrors {
    /// True when every entry is a scaling outside (-1, 1). The CLI reports
    /// this case as a non-contractive input rather than a malformed one.
    pub fn only_scaling(&self) -> bool {
        !self.0.is_empty()
            && self
                .0
                .iter()
                .all(|e| matches!(e, ValidationError::ScalingOutOfRange { .. }))
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(#[from] ValidationErrors),
    #[error("map index {index} is outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    PointOutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("function does not match the data at x = {x}: expected {expected}, found {found}")]
    EndpointMismatch { x: f64, expected: f64, found: f64 },
    #[error("max |s_j| = {s} is not below 1")]
    ScalingNotContractive { s: f64 },
    #[error("largest knot-interval ratio {lambda_l} is not below 1")]
    NotContractive { lambda_l: f64 },
    #[error("image point ({x}, {y}) escapes the raster window; widen the y-range")]
    StripTooSmall { x: f64, y: f64 },
    #[error("coefficient maps miss the join identities by {defect}")]
    MapDefect { defect: f64 },
    #[error("knots are not uniformly spaced")]
    NonUniformKnots,
    #[error("{columns} columns exceed the column budget")]
    DepthTooLarge { columns: u64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("need at least 3 resolutions for a fit, got {got}")]
    TooFewResolutions { got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sample data: {0}")]
    Samples(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
