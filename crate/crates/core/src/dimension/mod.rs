//! Spectral bounds and box-counting measurement of dimension.

mod boxcount;
mod estimate;
mod spectral;
mod theory;
mod variation;

pub use boxcount::{
    box_count_curve, box_count_graph, box_count_surface, BoxCount, BoxCountSeries, MESH_CONVENTION,
};
pub use estimate::{
    analyze_curve, curve_scales, estimate_curve_dimension, estimate_graph_dimension,
    estimate_weighted_curve_dimension, fit_dimension, CurveEstimateOptions, DimensionReport,
    Estimate, Fit,
};
pub use spectral::{
    check_irreducible, is_primitive, spectral_radius, spectral_radius_general, NonnegativeMatrix,
    DEFAULT_TOL,
};
pub use theory::{
    check_hypotheses, collinearity_test, scaling_envelopes, spectral_bounds, TheoryBounds,
};
pub use variation::{max_variation, variation_check, VariationRow};
