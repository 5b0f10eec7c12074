//! Linear time-invariant filters as sheaves over simplicial complexes.
//!
//! A [`FilterSheafNetwork`] assigns input, state and output spaces to every
//! simplex, with linear maps along face relations. Causal edges carry IIR
//! sections; 2-simplices split one state into two branches or merge two
//! into one. The [`engine`] compiles a network into a schedule and runs
//! signals through it; [`oracle`] is an independent difference-equation
//! reference.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod linmap;
pub mod oracle;
pub mod sheaf;
pub mod simplex;

pub use engine::{run, schedule, step, EngineError, NetworkState, Schedule, Trace};
pub use linmap::{LinMapError, LinearMap};
pub use sheaf::{
    build_chain, build_double_cone, build_fan, build_merge, check_consistency, glue, ConeVariant,
    ConsistencyReport, FilterCoefficients, FilterSheafNetwork, JointOutputCoefficients, MergeCoefficients,
    NetworkError,
};
pub use simplex::{Orientation, Simplex, SimplexError, SimplicialComplex};
