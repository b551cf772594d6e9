use std::io::Write;

use qslab::acceptance::{run_criterion, TITLES};

// Written to the raw handle so the line shows up without --nocapture.
fn check(id: usize) {
    let report = run_criterion(id);
    let _ = writeln!(std::io::stderr().lock(), "{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_1_threshold_distance_correctness() {
    check(1);
}

#[test]
fn criterion_2_query_scaling() {
    check(2);
}

#[test]
fn criterion_3_diameter_partition() {
    check(3);
}

#[test]
fn criterion_4_structural_numbers() {
    check(4);
}

#[test]
fn criterion_5_gadget_verification() {
    check(5);
}

#[test]
fn criterion_6_shuffle_invariance() {
    check(6);
}

#[test]
fn criterion_7_ramsey_mechanics() {
    check(7);
}

#[test]
fn criterion_8_reduction_facts() {
    check(8);
}

#[test]
fn criterion_9_mutation_sensitivity() {
    check(9);
}

#[test]
fn every_criterion_has_a_test() {
    assert_eq!(TITLES.len(), 9);
}
