//! Numerical laboratory for compact-group extensions of hyperbolic
//! dynamics: base systems, principal extensions and their transitivity
//! groups, vertical spherical harmonics, Pestov-type degree bounds and the
//! topological tables behind structure-group reductions of spheres.

pub mod base;
pub mod error;
pub mod extension;
pub mod group;
pub mod harmonics;
pub mod linalg;
pub mod pestov;
pub mod topology;
pub mod transitivity;

pub use error::{Error, Result};
