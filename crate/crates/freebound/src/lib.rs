//! Numerical verification toolkit for sharp geometric inequalities on
//! free boundary surfaces in the unit ball and on closed space curves.
//!
//! The crate evaluates, on triangle meshes and closed polylines:
//!
//! - the radius-indexed monotone quantity built from area ratios, curvature
//!   integrals and inverted-ball corrections, together with its annulus
//!   identity ([`monotonicity`]);
//! - densities and their small-radius limits ([`monotonicity`]);
//! - the Willmore energy with free boundary term and the associated
//!   sharp lower bound and multiplicity estimate ([`willmore`]);
//! - ball curvatures of general support surfaces and the support
//!   inequality ([`support`]);
//! - tangent-point energies of closed curves with their sharp lower
//!   bounds ([`tangent_point`]), and a descent loop exhibiting the
//!   round circle as the minimizer of the scale-invariant energy
//!   ([`optimizer`]).
//!
//! Everything is deterministic: given the same inputs, reductions run in a
//! fixed order and reports are byte-identical (timestamps aside).

pub mod clip;
pub mod config;
pub mod curve;
pub mod error;
pub mod io;
pub mod mesh;
pub mod monotonicity;
pub mod operators;
pub mod optimizer;
pub mod report;
pub mod shapes;
pub mod support;
pub mod tangent_point;
pub mod verify;
pub mod vec3;
pub mod willmore;

pub use error::{Error, Result};
pub use vec3::{vec3, Vec3};
