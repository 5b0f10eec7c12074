//! Filter sheaves: coefficients, canonical maps, networks, builders and the
//! consistency check.

pub mod builders;
pub mod coefficients;
pub mod consistency;
pub mod maps;
pub mod network;

pub use builders::{build_chain, build_double_cone, build_fan, build_merge, build_merge_unextended, ConeVariant};
pub use coefficients::{CoefficientError, FilterCoefficients, JointOutputCoefficients, MergeCoefficients};
pub use consistency::{check_consistency, ConsistencyReport, Violation, DEFAULT_TOLERANCE};
pub use maps::{
    apex_duplication, block_embedding, branch_projection, combined_state_update, edge_output_map, input_map,
    joint_output_map, merge_map, output_map, retrieval_and_input_maps, retrieval_map, state_update_map,
    BranchProjection, UnknownProjection,
};
pub use network::{
    disjoint_union, glue, glue_unchecked, identify_vertices, identify_vertices_unchecked, join_with_extension,
    join_with_extension_unchecked, write_conflict, EdgeKind, EdgeRole, FilterSheafNetwork, Flow, Layer, LayerStalks,
    NetworkBuilder, NetworkError, Restriction, Vertical, Writer,
};
