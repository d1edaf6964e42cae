//! Acceptance gate: the release-blocking properties in one target.
//!
//! Each test drives one verification suite (the same code the CLI `verify`
//! subcommand runs), prints a single PASS/FAIL line with every measured
//! number, re-pins the tolerance each check must enforce, and bounds the
//! wall clock. A suite whose tolerance drifts, whose measurement fails, or
//! whose runtime blows the budget fails here.

use loopform::verify::{run_suite, SuiteOptions};
use std::sync::{Mutex, PoisonError};
use std::time::{Duration, Instant};

// Gates measure wall clock, so they take turns even when the harness runs
// tests in parallel.
static TURN: Mutex<()> = Mutex::new(());

fn gate(label: &str, suite: &str, budget: Duration, pinned: &[(&str, f64)]) {
    let _turn = TURN.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();
    let results = run_suite(suite, &SuiteOptions::default()).expect("suite must run to completion");
    let elapsed = start.elapsed();

    let ok = results.iter().all(|r| r.passed) && elapsed <= budget;
    let summary = results
        .iter()
        .map(|r| format!("{}={:.2e}/{:.0e}", r.name, r.measured, r.tolerance))
        .collect::<Vec<_>>()
        .join(" ");
    println!(
        "{} {label}: {summary} [{:.2?} of {:?}]",
        if ok { "PASS" } else { "FAIL" },
        elapsed,
        budget,
    );

    assert_eq!(
        results.len(),
        pinned.len(),
        "{label}: expected exactly {} checks",
        pinned.len()
    );
    for (name, tol) in pinned {
        let r = results
            .iter()
            .find(|r| r.name == *name)
            .unwrap_or_else(|| panic!("{label}: no check named {name}"));
        assert_eq!(r.tolerance, *tol, "{label}: tolerance for {name} moved");
    }
    for r in &results {
        assert!(r.passed, "{}", r.line());
    }
    assert!(elapsed <= budget, "{label}: {elapsed:?} over {budget:?}");
}

#[test]
fn moment_orthogonality() {
    gate(
        "moments",
        "moments",
        Duration::from_secs(10),
        &[("orthogonality", 1e-12)],
    );
}

#[test]
fn series_vs_quadrature_oracle() {
    gate(
        "oracle",
        "oracle",
        Duration::from_secs(60),
        &[("series-vs-quadrature", 1e-8)],
    );
}

#[test]
fn sphere_nullity() {
    gate(
        "sphere-null",
        "sphere-null",
        Duration::from_secs(30),
        &[("table", 1e-10), ("pairings", 1e-8)],
    );
}

#[test]
fn torus_constant_and_self_pairing() {
    gate(
        "torus-const",
        "torus-const",
        Duration::from_secs(60),
        &[
            ("a00", 1e-6),
            ("stray-coefficients", 1e-8),
            ("self-pairing", 1e-5),
        ],
    );
}

#[test]
fn extraction_roundtrip_and_radius_independence() {
    gate(
        "roundtrip",
        "roundtrip",
        Duration::from_secs(30),
        &[("pointwise", 1e-10), ("radius-independence", 1e-9)],
    );
}

#[test]
fn reproducing_identity() {
    gate(
        "reproducing",
        "reproducing",
        Duration::from_secs(120),
        &[("identity-residual", 1e-4), ("calibration-stability", 1e-6)],
    );
}

#[test]
fn reduction_consistency() {
    gate(
        "reduce-consistency",
        "reduce-consistency",
        Duration::from_secs(120),
        &[
            ("constant-cocycle", 1e-6),
            ("bump-independence", 1e-6),
            ("sphere-pole", 1e-6),
        ],
    );
}

#[test]
fn bilinearity_and_window_stability() {
    gate(
        "bilinearity",
        "bilinearity",
        Duration::from_secs(120),
        &[
            ("real-linearity", 1e-10),
            ("window-stability", 0.0),
            ("swap-order", 1e-9),
        ],
    );
}
