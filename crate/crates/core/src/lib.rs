//! Fractal interpolation with variable vertical scalings.
//!
//! An [`InterpolationProblem`] (knots, values, scaling factors) determines a
//! unique continuous interpolant as the fixed point of a contraction
//! operator on `C[X_0, X_N]`. Its graph is also the attractor of a planar
//! IFS of bilinear maps. The crate computes the interpolant (iteratively and
//! by exact address evaluation), builds and renders the IFS, certifies
//! contractivity in a sheared taxi-cab metric, and estimates box-counting
//! dimension against a closed form.

// `!(a < b)` guards double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biaffine;
pub mod cli;
pub mod dimension;
pub mod error;
pub mod ifs;
pub mod io;
pub mod operator;
pub mod problem;
pub mod rng;
pub mod sampled;
pub mod verify;

pub use error::{Error, Result, ValidationError, ValidationErrors};
pub use operator::{exact_graph, FixedPoint, OperatorContext};
pub use problem::{AddressPoint, InterpolationProblem, COLLINEAR_EPS};
pub use sampled::{Lattice, SampledFunction};
