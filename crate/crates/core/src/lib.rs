//! Differential invariants of jets under the Möbius group of the line and the
//! conformal group of Minkowski space. See the `book/` guide for a tour.

pub mod algebra;
pub mod cli;
pub mod conformal;
pub mod error;
pub mod extraction;
pub mod minkowski;
pub mod mobius;
pub mod reduction;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/exact-algebra.md")]
    mod exact_algebra {}
    #[doc = include_str!("../../../book/src/mobius.md")]
    mod mobius {}
    #[doc = include_str!("../../../book/src/minkowski.md")]
    mod minkowski {}
    #[doc = include_str!("../../../book/src/conformal.md")]
    mod conformal {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/extraction.md")]
    mod extraction {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
