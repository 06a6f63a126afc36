//! Acceptance suite: one test per shipped verification criterion, at full
//! depth. Each prints a single PASS/FAIL line; all must pass.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use qdicut::checks::{self, SuiteDepth};
use qdicut::classes::BiasClassConfig;

const SEED: u64 = 20260809;

// Criteria carry wall-clock budgets; run them one at a time so parallel
// test scheduling cannot distort the measurements.
static SERIAL: Mutex<()> = Mutex::new(());

fn production() -> BiasClassConfig {
    BiasClassConfig::from_toml_str(include_str!("../../../configs/production.toml"))
        .expect("bundled production config")
}

fn report(criterion: usize, outcome: &checks::CheckOutcome, elapsed: Duration) {
    println!(
        "ACCEPTANCE {criterion:2} {} {}: {} [{elapsed:.1?}]",
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.name,
        outcome.detail
    );
    assert!(outcome.passed, "criterion {criterion}: {}", outcome.detail);
}

fn deep() -> SuiteDepth {
    SuiteDepth::deep()
}

#[test]
fn criterion_01_state_invariant_after_every_edge() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::state_invariant_suite(&deep(), SEED).unwrap();
    let elapsed = t.elapsed();
    report(1, &outcome, elapsed);
    assert!(elapsed < Duration::from_secs(60), "criterion 1 must finish within a minute");
}

#[test]
fn criterion_02_early_termination_accounting() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::accounting_suite(&deep(), SEED).unwrap();
    report(2, &outcome, t.elapsed());
}

#[test]
fn criterion_03_dense_reference_equivalence() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::dense_equivalence_suite(&deep(), SEED).unwrap();
    report(3, &outcome, t.elapsed());
}

#[test]
fn criterion_04_single_copy_unbiasedness() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::unbiasedness_suite(&deep(), SEED).unwrap();
    let elapsed = t.elapsed();
    report(4, &outcome, elapsed);
    assert!(elapsed < Duration::from_secs(600), "criterion 4 must finish within ten minutes");
}

#[test]
fn criterion_05_off_class_nullity() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::offclass_nullity_suite(&deep(), SEED).unwrap();
    report(5, &outcome, t.elapsed());
}

#[test]
fn criterion_06_variance_bound() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::variance_suite(&deep(), SEED).unwrap();
    report(6, &outcome, t.elapsed());
}

#[test]
fn criterion_07_oblivious_soundness() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::oblivious_soundness_suite(&production(), "0.4844").unwrap();
    report(7, &outcome, t.elapsed());
}

#[test]
fn criterion_08_end_to_end_approximation() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::end_to_end_suite(&deep(), &production(), SEED).unwrap();
    let elapsed = t.elapsed();
    report(8, &outcome, elapsed);
    assert!(elapsed < Duration::from_secs(1800), "criterion 8 must finish within thirty minutes");
}

#[test]
fn criterion_09_communication_demo() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::comm_suite(&deep(), SEED).unwrap();
    report(9, &outcome, t.elapsed());
}

#[test]
fn criterion_10_space_accounting() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let outcome = checks::space_suite().unwrap();
    report(10, &outcome, t.elapsed());
}
