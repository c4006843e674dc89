//! Maintainable regions for discrete-time Markov and semi-Markov manpower
//! systems under control by recruitment.
//!
//! The pipeline runs from longitudinal records to regions:
//!
//! 1. [`estimation`] counts seniority-indexed transitions and estimates the
//!    matrices `P(0), .., P(K)` (or converts a semi-Markov kernel).
//! 2. [`semi_markov`] expands them into `P_SM` over seniority-based states and
//!    computes the State Re-union (SR) maintainable region.
//! 3. [`markov`] handles plain Markov systems, including the induced chains
//!    built by [`induced`].
//! 4. [`region`] stores regions in vertex and halfspace form and answers
//!    membership and inclusion queries.
//! 5. [`io`] and [`plot`] read and write the file formats used by the CLI.

pub mod error;
pub mod estimation;
pub mod induced;
pub mod io;
pub mod linalg;
pub mod markov;
pub mod model;
pub mod plot;
pub mod region;
pub mod semi_markov;

pub use error::{Error, Result};
pub use estimation::{
    count_transitions, estimate_markov_chain, estimate_transition_sequence, kernel_to_transition_sequence,
    seniority_weights, simulate_careers, CareerSimulation, CountOptions, EventRecord, FlagReason, RowFlag,
    SemiMarkovKernel, SeniorityWeights, TransitionCounts, TransitionSequence,
};
pub use induced::{
    compare_regions, compare_sr_vs_induced, compare_sr_vs_induced_with, induce_markov, induced_region, Comparison,
    InducedChain, Relation,
};
pub use markov::{
    alpha_feasibility, check_maintainable, markov_region, spectral_radius, zero_recruitment_structures,
    FeasibilityReport, GrowthFactor, Maintainability, MaintainabilityCertificate, ZeroRecruitment,
};
pub use model::{
    build_reunion_matrix, l1_normalize, validate_model, ProbabilityStructure, ReUnionMatrix, RecruitmentVector, Role,
    StateSpace, StockVector, SubstochasticMatrix, ValidationReport, WastageVector, EPS_GEOM, EPS_STOCH, EPS_STRICT,
};
pub use region::{
    enumerate_vertices, in_hull, is_subset, solve_lp, Constraint, HForm, Lift, Provenance, Region, SubsetCheck,
};
pub use semi_markov::{
    build_block_chain, build_seniority_matrix, constant_path, simulate_sr_path, sr_region, sr_region_with,
    unique_fixed_point, BlockChain, FixedPointCheck, PathStep, PathTrace, RegionOptions, SeniorityMatrix,
};
