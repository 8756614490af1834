//! Metric geometry of spherical space forms and the Hopf submersions.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: sphere points, nets, tolerant rank, quadrature, certified intervals.
//! - [`groups`]: finite orthogonal matrix groups, closure, fixed-point-freeness, type-1 generators.
//! - [`reps`]: orthogonal representations, randomized decomposition into irreducibles, equivalence.
//! - [`quotients`]: distances, eccentricity, radius and diameter of `S^n / Γ`, dual sets,
//!   the projective involution quotient of `CP^{2d-1}`.
//! - [`fibrations`]: the complex, quaternionic and octonionic Hopf submersions with O'Neill tensors,
//!   holonomy and fiber-geometry checks.
//! - [`variational`]: index forms and averaged curvature integrals along base geodesics.

// `!(x >= lo)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod fibrations;
pub mod groups;
pub mod numerics;
pub mod quotients;
pub mod reps;
pub mod variational;

pub use error::{Error, Result};
