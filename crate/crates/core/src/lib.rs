//! Numerical laboratory for `∂ₜu = Δu + h(t)uᵖ` on rotationally symmetric
//! manifolds with negative curvature.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barriers;
pub mod config;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod forcing;
pub mod geometry;
pub mod quadrature;
pub mod radial;
pub mod spectral;
pub mod svg;
pub mod tridiag;

pub use error::{Error, Result};
pub use geometry::{check_a0, CurvatureReport, ModelManifold, WarpingFunction, WarpingKind, WarpingTable};
