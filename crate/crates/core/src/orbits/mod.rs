//! Group actions on jets, normal forms, and the invariants that separate
//! orbits at order one: F(x₀) for connections, the ker-s part of an acs jet,
//! and (χ, ∇χ, F₊, F₋)(x₀) for superconnections.

pub mod acs;
pub mod connection;
pub mod report;
pub mod superjet;

pub use acs::{
    act_on_acs_jet, act_on_acs_jet_general, acs_projection, in_w, k_map, nijenhuis_from_jet, s_k_matrix,
    splitting_dimensions, symmetrize, AcsProjection, SplittingDims,
};
pub use connection::{
    act_on_connection_jet, act_on_connection_jet_general, reduce_connection_jet, witness_between, ConnectionReduction,
};
pub use report::{decide_equivalence, simultaneous_conjugator, CaseTag, JetData, NamedBlock, ObstructionReport, Verdict};
pub use superjet::{act_on_super_jet, reduce_super_jet, SuperAut, SuperInvariant, SuperReduction};
