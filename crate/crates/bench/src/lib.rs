//! Fixtures shared by the benchmarks.

use srmaint_core::{build_seniority_matrix, SeniorityMatrix, StateSpace, TransitionSequence};

/// The three-state, `K = 2` system used throughout the documentation.
pub fn example_sequence() -> TransitionSequence {
    TransitionSequence::from_rows(
        StateSpace::new(3, 2).expect("valid state space"),
        &[
            vec![vec![0.2, 0.5, 0.0], vec![0.0, 0.7, 0.2], vec![0.0, 0.0, 0.9]],
            vec![vec![0.6, 0.3, 0.0], vec![0.0, 0.5, 0.45], vec![0.0, 0.0, 0.9]],
            vec![vec![0.0; 3]; 3],
        ],
    )
    .expect("valid sequence")
}

pub fn example_seniority_matrix() -> SeniorityMatrix {
    build_seniority_matrix(&example_sequence()).expect("valid expansion")
}
