//! The plane IFS whose attractor is the graph of the interpolant: explicit
//! map coefficients, the sheared taxi-cab metric, contractivity analysis
//! and rendering.

mod contraction;
mod maps;
mod metric;
mod render;

pub use contraction::{
    contraction_analysis, contraction_audit, default_eta, verify_contraction, ContractionAnalysis,
    ContractionAudit,
};
pub use maps::{build_maps, BilinearMap, BilinearMapSet, PlaneMap};
pub use metric::{Profile, TaxicabMetric};
pub use render::{
    chaos_game, chord_bitmap, graph_frame, hutchinson_iterate, Bitmap, Frame, DEFAULT_BURN_IN,
    SUBPIXEL,
};
