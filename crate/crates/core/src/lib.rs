//! Clearing engine for barter-exchange markets (kidney exchange): finds
//! maximum-weight vertex-disjoint packings of bounded-length cycles and
//! NDD-initiated chains in a directed compatibility graph.
//!
//! The engine compiles an [`instance::Instance`] into one of several integer
//! programming formulations (cycle formulation, position-indexed edge
//! formulations, position-indexed chain-edge formulation, and their
//! reductions), solves it with a built-in LP/MIP solver or a registered
//! backend, and decodes assignments back into vertex-disjoint packings.
//! A branch-and-price solver with polynomial cycle pricing handles the
//! chain-edge formulation incrementally, including the failure-aware
//! (expected-weight) objective.
//!
//! All weight arithmetic is generic over [`scalar::Scalar`] (`f64` by
//! default; `f32` works at reduced precision).

pub mod formulations;
pub mod harness;
pub mod indexsets;
pub mod instance;
pub mod model;
pub mod pricing;
pub mod scalar;
pub mod solver;

pub use formulations::{Formulation, Solution};
pub use instance::{Chain, Cycle, Instance};
pub use model::MipModel;
pub use scalar::Scalar;

/// `f32`-backed aliases for the reduced-precision lane. The unparameterized
/// names default to `f64`.
pub type InstanceF32 = instance::Instance<f32>;
pub type MipModelF32 = model::MipModel<f32>;
pub type SolutionF32 = formulations::Solution<f32>;
pub type LpOutcomeF32 = solver::LpOutcome<f32>;
pub type MipOutcomeF32 = solver::MipOutcome<f32>;
