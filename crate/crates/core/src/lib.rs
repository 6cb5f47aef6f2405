//! Numerical laboratory for embedded minimal disks.
//!
//! The crate is organised around five groups of functionality:
//!
//! * [`surface`]: sampled parametric surfaces (helicoid, catenoid, ruled surfaces,
//!   graphs), their discrete differential geometry, area, first variation and the
//!   Dirichlet spectrum of the Jacobi operator.
//! * [`multigraph`]: N-valued graphs over the universal cover of the punctured plane,
//!   separation, embeddedness, handedness and separation-growth fits.
//! * [`solver`]: damped Newton solution of the minimal surface equation on
//!   multi-sheeted annular domains.
//! * [`blowup`]: construction and verification of blow-up pairs on disk samples.
//! * [`structure`]: curvature blow-up sets, the cone property, Lipschitz curves,
//!   multi-valued graph census, foliation convergence and the one-sided estimate.
//!
//! Mesh-level utilities shared by the last two groups live in [`mesh`]; text formats
//! live in [`io`]. Node-wise loops run on rayon when the `parallel` feature is on.

// `!(x > 0.0)` deliberately rejects NaN; stencil loops index several arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod blowup;
pub mod error;
pub mod families;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod multigraph;
pub mod par;
pub mod solver;
pub mod structure;
pub mod surface;

pub use error::{Error, Result};

/// Points and vectors in 3-space.
pub type Vec3 = nalgebra::Vector3<f64>;
