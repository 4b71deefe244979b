//! Transitivity group of a cocycle extension: Brin's loop representation
//! built from stable and unstable holonomies, its Lie algebra, the tensors
//! it fixes and the resulting ergodicity verdict.

pub mod algebra;
pub mod holonomy;
pub mod models;
pub mod rho;
pub mod tensors;

pub use algebra::{
    ergodicity_verdict, estimate_transitivity_group, EstimatorConfig, SubgroupEstimate, Verdict, MIN_GENERATORS,
};
pub use holonomy::{
    stable_holonomy, stable_holonomy_between, unstable_holonomy, unstable_holonomy_between, HolonomyConfig,
    HolonomyResult,
};
pub use rho::{brin_rho, brin_rhos, BrinWord, TransitionCut};
pub use tensors::{fixed_tensors, fixed_tensors_of, InvariantTensor, Representation};
