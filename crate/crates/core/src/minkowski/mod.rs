//! Second-order jets of scalar functions on pseudo-Euclidean space with
//! signature `(-, +, ..., +)`, and the prolonged actions of point
//! transformations on them.
//!
//! Index conventions: [`ScalarJet2`] stores covariant components `u_α`,
//! `u_{αβ}`. [`Map2Jet`] stores the mixed Taylor data `A^μ_ν`,
//! `A^μ_{νρ}` of a map, with `a[(μ, ν)] = ∂φ^μ/∂x^ν` and `a2[μ]` the Hessian
//! of the component `φ^μ`.

mod actions;
mod jet;
mod metric;

pub(crate) use actions::lorentz_action_unchecked;
pub use actions::{diffeo_action, dilatation_action, lorentz_action, sct_action, LORENTZ_TOLERANCE};
pub use jet::{Map2Jet, ScalarJet2};
pub use metric::Metric;
