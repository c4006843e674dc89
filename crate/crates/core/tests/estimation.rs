//! From CSV records to transition estimates.

use srmaint_core::io::{read_records, write_records};
use srmaint_core::{
    build_seniority_matrix, count_transitions, estimate_transition_sequence, kernel_to_transition_sequence,
    seniority_weights, sr_region, sr_region_with, CountOptions, Error, FlagReason, GrowthFactor, RegionOptions,
    StateSpace,
};

fn space() -> StateSpace {
    StateSpace::with_labels(vec!["junior".into(), "senior".into()], 1, "left").unwrap()
}

const CSV: &str = "\
person_id,time,state
a,0,junior
a,1,junior
a,2,senior
a,3,left
b,0,junior
b,1,senior
c,0,senior
c,1,left
d,0,junior
d,1,junior
d,2,left
e,0,junior
e,1,left
";

#[test]
fn csv_counts_and_estimates() {
    let records = read_records(CSV.as_bytes()).expect("well-formed csv");
    assert_eq!(records.len(), 13);
    let counts = count_transitions(&records, &space(), CountOptions::default()).unwrap();
    // junior at seniority 0: a and d stay, b moves up, e leaves
    assert_eq!(counts.exposure(0, 0), 4);
    assert_eq!(counts.moves(0, 0, 0), 2);
    assert_eq!(counts.moves(0, 1, 0), 1);
    assert_eq!(counts.wastage(0, 0), 1);
    // junior at seniority 1: a moves up, d leaves
    assert_eq!(counts.moves(0, 1, 1), 1);
    assert_eq!(counts.wastage(0, 1), 1);
    // senior at seniority 0: everyone leaves, b by disappearing
    assert_eq!(counts.exposure(1, 0), 3);
    assert_eq!(counts.wastage(1, 0), 3);

    let seq = estimate_transition_sequence(&counts).unwrap();
    assert_eq!(seq.internal(0)[(0, 0)], 0.5);
    assert_eq!(seq.internal(1)[(0, 1)], 0.5);
    // nobody reaches seniority 1 as a senior
    assert_eq!(seq.flags().len(), 1);
    assert!(seq.flags().iter().any(|f| f.state == 1 && f.seniority == 1 && f.reason == FlagReason::Unidentified));

    let w = seniority_weights(&counts);
    assert_eq!(w.get(0, 0), 4.0 / 6.0);
    assert_eq!(w.get(1, 0), 2.0 / 6.0);
    assert_eq!(w.get(0, 1), 1.0);
}

#[test]
fn unidentified_rows_block_regions_unless_allowed() {
    let records = read_records(CSV.as_bytes()).unwrap();
    let counts = count_transitions(&records, &space(), CountOptions::default()).unwrap();
    let sm = build_seniority_matrix(&estimate_transition_sequence(&counts).unwrap()).unwrap();
    match sr_region(&sm, GrowthFactor::constant()) {
        Err(Error::Unidentified { rows }) => assert_eq!(rows, vec![(1, 1)]),
        other => panic!("expected Unidentified, got {other:?}"),
    }
    let region = sr_region_with(&sm, GrowthFactor::constant(), RegionOptions { allow_unidentified: true }).unwrap();
    assert_eq!(region.dimension(), 2);
}

#[test]
fn strict_mode_rejects_stays_beyond_max_seniority() {
    let csv = "person_id,time,state\nx,0,junior\nx,1,junior\nx,2,junior\nx,3,junior\n";
    let records = read_records(csv.as_bytes()).unwrap();
    let strict = CountOptions { strict: true, horizon: None };
    match count_transitions(&records, &space(), strict) {
        Err(Error::SeniorityOverflow { person, time, max_seniority }) => {
            assert_eq!((person.as_str(), time, max_seniority), ("x", 1, 1));
        }
        other => panic!("expected SeniorityOverflow, got {other:?}"),
    }
    let lenient = count_transitions(&records, &space(), CountOptions::default()).unwrap();
    assert_eq!(lenient.total_exposure(0), 1);
}

#[test]
fn malformed_rows_report_their_line() {
    let csv = "person_id,time,state\na,0,junior\na,soon,senior\n";
    match read_records(csv.as_bytes()) {
        Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, Some(3)),
        other => panic!("expected MalformedRecord, got {other:?}"),
    }
    assert!(matches!(read_records("person_id,time,state\n".as_bytes()), Err(Error::NoRecords)));
    let unknown = read_records("person_id,time,state\na,0,boss\n".as_bytes()).unwrap();
    assert!(matches!(
        count_transitions(&unknown, &space(), CountOptions::default()),
        Err(Error::MalformedRecord { .. })
    ));
}

#[test]
fn records_survive_a_csv_round_trip() {
    let records = read_records(CSV.as_bytes()).unwrap();
    let mut out = Vec::new();
    write_records(&mut out, &records).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), CSV);
}

#[test]
fn kernel_view_reproduces_estimates() {
    let records = read_records(CSV.as_bytes()).unwrap();
    let counts = count_transitions(&records, &space(), CountOptions::default()).unwrap();
    let seq = estimate_transition_sequence(&counts).unwrap();
    let back = kernel_to_transition_sequence(&seq.to_kernel()).unwrap();
    for k in 0..2 {
        for i in 0..2 {
            if seq.flags().iter().any(|f| f.state == i && f.seniority == k) {
                continue;
            }
            for j in 0..2 {
                assert!((back.internal(k)[(i, j)] - seq.internal(k)[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
