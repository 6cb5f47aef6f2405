//! Sampled parametric surfaces and their discrete differential geometry.
//!
//! Sign convention: the unit normal is `X_s × X_t / |X_s × X_t|` and the mean
//! curvature is `H = div_Σ n = -(κ₁ + κ₂)` measured against that normal. With it the
//! first variation of area along `φ n` is `+∫ φ H`, and a sphere oriented outward
//! has `H = 2/R`.

mod geometry;
mod jacobi;
mod patch;
mod stencil;
mod variation;

pub use geometry::{area, fundamental_forms, GeomData};
pub use jacobi::jacobi_smallest_eigenvalues;
pub use patch::{
    make_catenoid, make_graph_fn, make_graph_patch, make_helicoid, make_ruled, rescale, AnalyticSurface, DerivMode, ParamPatch,
};
pub use variation::{first_variation, FirstVariation, VariationField};
