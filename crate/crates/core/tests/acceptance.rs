//! One test per exit criterion. Each prints a PASS/FAIL line; run with
//! `--nocapture` to see them all.

use rydnet::acceptance::{self, Criterion, DEFAULT_SEED};

fn report(c: Criterion) {
    println!("{c}");
    assert!(c.passed, "{c}");
}

#[test]
fn criterion_01_step1_fidelity() {
    report(acceptance::step1_fidelity());
}

#[test]
fn criterion_02_blockade_leakage() {
    report(acceptance::blockade_leakage());
}

#[test]
fn criterion_03_collective_enhancement() {
    report(acceptance::collective_enhancement());
}

#[test]
fn criterion_04_emission_pattern() {
    report(acceptance::emission_pattern());
}

#[test]
fn criterion_05_directional_efficiency() {
    report(acceptance::directional_efficiency());
}

#[test]
fn criterion_06_node_efficiency() {
    report(acceptance::node_efficiency());
}

#[test]
fn criterion_07_hom_heralding() {
    report(acceptance::hom_heralding());
}

#[test]
fn criterion_08_link_arithmetic() {
    report(acceptance::link_arithmetic());
}

#[test]
fn criterion_09_cumulative_retry() {
    report(acceptance::cumulative_retry(DEFAULT_SEED));
}

#[test]
fn criterion_10_rate_at_distance() {
    report(acceptance::rate_at_distance());
}

#[test]
fn criterion_11_visibility_relation() {
    report(acceptance::visibility_relation());
}

#[test]
fn criterion_12_oracle_suites() {
    report(acceptance::oracle_suites(DEFAULT_SEED));
}
