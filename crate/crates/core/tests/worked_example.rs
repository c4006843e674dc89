//! End-to-end checks on the three-grade, two-seniority example system.

use srmaint_core::io::{ModelFile, RegionFile, Verdict};
use srmaint_core::linalg::linf_distance;
use srmaint_core::{
    build_seniority_matrix, compare_sr_vs_induced, constant_path, induce_markov, induced_region, simulate_sr_path,
    spectral_radius, sr_region, GrowthFactor, ProbabilityStructure, Provenance, RegionOptions, Relation,
    SeniorityWeights, StateSpace, TransitionSequence,
};

fn sequence() -> TransitionSequence {
    TransitionSequence::from_rows(
        StateSpace::new(3, 2).unwrap(),
        &[
            vec![vec![0.2, 0.5, 0.0], vec![0.0, 0.7, 0.2], vec![0.0, 0.0, 0.9]],
            vec![vec![0.6, 0.3, 0.0], vec![0.0, 0.5, 0.45], vec![0.0, 0.0, 0.9]],
            vec![vec![0.0; 3]; 3],
        ],
    )
    .expect("example sequence is valid")
}

fn weights(rows: [[f64; 3]; 3]) -> SeniorityWeights {
    SeniorityWeights::new(rows.iter().map(|r| r.to_vec()).collect()).expect("weights sum to one per state")
}

fn alpha() -> SeniorityWeights {
    weights([[0.01, 0.28, 0.39], [0.68, 0.12, 0.17], [0.31, 0.6, 0.44]])
}

fn beta() -> SeniorityWeights {
    weights([[0.15, 0.11, 0.16], [0.6, 0.56, 0.64], [0.25, 0.33, 0.2]])
}

fn gamma() -> SeniorityWeights {
    weights([[0.31, 0.29, 0.04], [0.27, 0.48, 0.57], [0.42, 0.23, 0.39]])
}

#[test]
fn seniority_matrix_is_nilpotent() {
    let sm = build_seniority_matrix(&sequence()).unwrap();
    assert_eq!(spectral_radius(sm.matrix()), 0.0);
    assert!(sm.flags().is_empty());
}

#[test]
fn sr_region_holds_its_vertices_and_rejects_corners() {
    let sm = build_seniority_matrix(&sequence()).unwrap();
    let region = sr_region(&sm, GrowthFactor::constant()).unwrap();
    assert_eq!(region.provenance(), Provenance::Sr);
    for v in region.vertices().unwrap() {
        assert!(region.contains(v).unwrap(), "vertex {v:?} should be inside");
        assert!(region.contains_by_vertices(v).unwrap());
    }
    assert!(!region.contains(&[1.0, 0.0, 0.0]).unwrap());
    assert!(!region.contains(&[0.0, 1.0, 0.0]).unwrap());
}

#[test]
fn induced_verdicts_for_all_three_weightings() {
    let seq = sequence();
    let sm = build_seniority_matrix(&seq).unwrap();
    let g = GrowthFactor::constant();
    let verdict = |w: &SeniorityWeights| {
        let ic = induce_markov(&seq, w).unwrap();
        compare_sr_vs_induced(&sm, &ic, g).unwrap()
    };
    assert_eq!(verdict(&alpha()).relation, Relation::SrSubset);
    assert_eq!(verdict(&beta()).relation, Relation::Incomparable);
    // gamma also contains the SR region when recomputed from the printed weights
    let c = verdict(&gamma());
    assert_eq!(c.relation, Relation::SrSubset);
    assert!(c.other_in_sr.witness.is_some());
}

#[test]
fn growing_system_keeps_a_nonempty_region() {
    let sm = build_seniority_matrix(&sequence()).unwrap();
    let region = sr_region(&sm, GrowthFactor::new(0.1).unwrap()).unwrap();
    let vertices = region.vertex_list().unwrap();
    assert!(!vertices.is_empty());
    let constant = sr_region(&sm, GrowthFactor::constant()).unwrap();
    // more growth means more room for recruitment
    for v in constant.vertices().unwrap() {
        assert!(region.contains(v).unwrap(), "{v:?} should remain maintainable at alpha = 0.1");
    }
}

#[test]
fn path_from_a_constant_structure_stays_put() {
    let sm = build_seniority_matrix(&sequence()).unwrap();
    let g = GrowthFactor::constant();
    let target = [0.1, 0.4, 0.5];
    let start = constant_path(&sm, &target, g).unwrap();
    let trace = simulate_sr_path(&sm, &ProbabilityStructure::seniority_based(start.clone()).unwrap(), g, 100).unwrap();
    assert!(trace.converged);
    assert_eq!(trace.steps.len(), 2);
    assert!(linf_distance(&trace.limit, &start) < 1e-12);
    assert!(linf_distance(&trace.target, &target) < 1e-12);
}

#[test]
fn model_and_region_files_round_trip() {
    let seq = sequence();
    let model = ModelFile::from_sequence(&seq, Some(alpha()));
    let parsed = ModelFile::from_json(&model.to_json().unwrap()).unwrap();
    assert_eq!(parsed, model);
    assert_eq!(parsed.sequence().unwrap(), seq);

    let ic = induce_markov(&seq, &parsed.seniority_weights().unwrap().unwrap()).unwrap();
    let region = induced_region(&ic, GrowthFactor::constant(), RegionOptions::default()).unwrap();
    let file = RegionFile::from_region(&region).unwrap();
    assert_eq!(file.verdict, Verdict::Nonempty);
    let back = RegionFile::from_json(&file.to_json().unwrap()).unwrap();
    assert_eq!(back, file);
    let restored = back.to_region().unwrap();
    assert_eq!(restored.vertices(), region.vertices());
    assert_eq!(restored.provenance(), Provenance::Induced);
}
