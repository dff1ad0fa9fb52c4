//! Central configurations of the curved N-body problem on the unit sphere
//! S^3 and the unit hyperbolic sphere H^3.
//!
//! Positions live in R^4 with the form `x1 x2 + y1 y2 + z1 z2 + sign w1 w2`;
//! see [`manifold`]. A configuration is central when the force `F_i` on every
//! body is a common multiple `lambda` of the gradient of
//! `I = sum m_i (x_i^2 + y_i^2)`.

// Argument checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod ccstat;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod manifold;
pub mod solver;

pub use catalog::{family_q, lambda_closed_form, ngon_family, pentatope, FamilyParams};
pub use ccstat::{
    cc_residual, classify_dimension, common_phi, fit_lambda, necessary_sums, normalize_to_h2xyw,
    CCReport, DimClass, Tolerances,
};
pub use dynamics::{
    eom_rhs, grad_i, grad_u, integrate, moment, potential, relative_equilibrium_velocities,
    Configuration, PhaseState, Trajectory,
};
pub use error::{Error, Result};
pub use manifold::{AmbientVector, GroupElement, Sign};
pub use solver::{canonical_gauge, find_cc, special_curve, Init, SolveOptions, SolveOutcome};
