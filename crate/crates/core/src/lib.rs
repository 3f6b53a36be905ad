//! Rate and power analysis for a single-user downlink whose base-station
//! antenna is either a reconfigurable refractive surface (RRS) illuminated
//! by a directional feed, or a conventional phased array.
//!
//! * [`geometry`] holds the validated scene description.
//! * [`em_model`] sums the element-wise near-field signal model directly.
//! * [`rate_analysis`] evaluates the continuous-aperture rate integrals,
//!   their bounds and the far-field closed forms.
//! * [`power_analysis`] sizes both technologies for a target rate and
//!   compares their power draw.
//! * [`numerics`] provides the quadrature and 1-D solvers underneath.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod em_model;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod power_analysis;
pub mod presets;
pub mod rate_analysis;

pub use error::{Error, Result};
pub use geometry::{
    ArrayGeometry, ElementGrid, FeedModel, Point3, Scene, ScenePair, SurfaceGeometry, UePlacement,
};
