//! Numerical laboratory for the anisotropic Gauss curvature flow
//! `∂ₜX = −f(ν) rᵅ K ν` and its normalized form on closed convex curves
//! (n = 1) and axisymmetric convex surfaces (n = 2).
//!
//! The state variable is the support function sampled on a uniform grid of
//! normal angles. Functionals, conserved integrals and duality identities are
//! evaluated on the same grid so that a run can be checked against the
//! qualitative behaviour the theory predicts: convergence to solitons,
//! monotone energies, conservation laws and, for `α < n + 1` without
//! symmetry, blowup of the ratio of radii.

// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod measures;
pub mod oracles;
pub mod scenario;
pub mod subsolution;

pub use error::{FlowError, GeometryError, GridError};
pub use flow::{FlowConfig, FlowMode, FlowState, Outcome, PhiRule};
pub use geometry::{BodySnapshot, RadialFn, SupportFn};
pub use grid::SphericalGrid;
pub use measures::AnisotropyF;
