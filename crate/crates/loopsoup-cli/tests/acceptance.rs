//! Acceptance suite: every release criterion as one test, each printing a
//! single pass/fail line (`cargo test --test acceptance -- --nocapture`).
//!
//! The scales and tolerances here are pinned: currents of total mass <= 4
//! for the oracle comparisons (mass <= 5 for the splitting identity),
//! truncation at total mass 20 with 64 quadrature nodes for the density and
//! moment checks, and 1e5 samples with fixed seeds for the Monte Carlo
//! checks.

use std::path::PathBuf;
use std::time::Instant;

use loopsoup::report::VerificationReport;
use loopsoup::verify::{self, VerifyOptions};
use loopsoup_cli::parse_matrix;

fn bundled(name: &str) -> loopsoup::WeightMatrix {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../matrices").join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    parse_matrix(&text).unwrap()
}

fn conclude(number: u32, name: &str, started: Instant, report: &VerificationReport) {
    let status = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {number} ({name}): {status} — {} checks, max discrepancy {:.3e} [{:.1?}]",
        report.checks.len(),
        report.max_discrepancy(),
        started.elapsed()
    );
    for failure in report.failures() {
        println!(
            "  failed: {} (discrepancy {:.3e}, bound {:.3e}; {} vs {})",
            failure.label, failure.discrepancy, failure.bound, failure.lhs, failure.rhs
        );
    }
    assert!(report.passed(), "criterion {number} ({name}) failed");
}

#[test]
fn criterion_1_current_field_closed_form() {
    // Ten random integrable complex weights per n in 1..=3, every current
    // of total mass <= 4, closed form within 1e-9 relative of the bubble
    // oracle.
    let started = Instant::now();
    let report = verify::proposition_suite(None, &VerifyOptions::default()).unwrap();
    assert!(report.checks.iter().all(|c| c.bound <= verify::TOL_PROPOSITION_REL));
    conclude(1, "current field closed form vs bubble oracle", started, &report);
}

#[test]
fn criterion_2_bubble_equals_loop_soup() {
    // Same current range: the two oracles agree to 1e-12 (scaled), and the
    // bubble oracle is invariant under all six vertex orders at n = 3.
    let started = Instant::now();
    let report = verify::lemma_suite(None, &VerifyOptions::default()).unwrap();
    assert!(report.checks.iter().any(|c| c.label.contains("ordering invariance")));
    conclude(2, "bubble soup vs loop soup on currents", started, &report);
}

#[test]
fn criterion_3_exact_identities() {
    // Splitting identity for all currents of mass <= 5 (n <= 3, every
    // root), the composition identity through n0 = 10, and exhaustive
    // encode/decode round trips for mass <= 4 — all in exact arithmetic.
    let started = Instant::now();
    let report = verify::identities_suite(&VerifyOptions::default()).unwrap();
    assert_eq!(report.checks.iter().filter(|c| c.label.contains("composition")).count(), 10);
    conclude(3, "exact combinatorial identities", started, &report);
}

#[test]
fn criterion_4_green_determinant_identities() {
    // det G telescopes over suffix restrictions (20 random Q, n <= 6, 1e-10
    // relative); exp of the truncated loop-measure series reaches the Green
    // diagonal within its certified tail at L = 12.
    let started = Instant::now();
    let report = verify::green_suite(&VerifyOptions::default()).unwrap();
    conclude(4, "Green determinant and log-series identities", started, &report);
}

#[test]
fn criterion_5_isomorphism_densities() {
    // Occupation density series (mass <= 20) against |Z|^2 quadrature
    // (64 nodes, gauge-reduced) on the 3x3 grid over {0.5, 1, 2}^2: within
    // certified bounds and 1e-6 absolute for the bundled Hermitian pair and
    // five random Hermitian weights; 1e-12 at zero weight.
    let started = Instant::now();
    let bundled_pair = bundled("hermitian2.json");
    assert_eq!(bundled_pair, loopsoup::presets::hermitian_pair());
    let report = verify::isomorphism_suite(None, &VerifyOptions::default()).unwrap();
    assert!(report.checks.iter().any(|c| c.label.contains("hermitian pair")));
    assert!(report
        .checks
        .iter()
        .filter(|c| c.label.contains("random hermitian"))
        .count() >= 5);
    conclude(5, "occupation density vs |Z|^2 density", started, &report);
}

#[test]
fn criterion_6_moments_vs_permanents() {
    // Every vertex subset, n <= 3: the truncated moment series at mass 20
    // agrees with the permanent of the Green submatrix within the certified
    // tail and 1e-6 absolute.
    let started = Instant::now();
    let report = verify::moments_suite(None, &VerifyOptions::default()).unwrap();
    assert!(report.checks.iter().all(|c| c.bound <= verify::TOL_MOMENT_ABS + 1e-12));
    conclude(6, "occupation moments vs permanents", started, &report);
}

#[test]
fn criterion_7_torus_current_indicator() {
    // The gauge-reduced trapezoid reproduces the 0/1 flow-conservation
    // indicator to 1e-12 on every count matrix with entries <= 3, n <= 3.
    let started = Instant::now();
    let report = verify::indicator_suite(&VerifyOptions::default()).unwrap();
    let total: usize = report
        .checks
        .iter()
        .map(|c| {
            c.label
                .split(": ")
                .nth(1)
                .and_then(|s| s.split(' ').next())
                .and_then(|s| s.parse::<usize>().ok())
                .unwrap_or(0)
        })
        .sum();
    assert_eq!(total, 4 + 256 + 262_144);
    conclude(7, "torus quadrature current indicator", started, &report);
}

#[test]
fn criterion_8_monte_carlo() {
    // Nonnegative substochastic weights, 1e5 samples, pinned seeds: the
    // growing-loop law at 3 sigma on all loops of length <= 3, the current
    // histogram against the closed form by chi-square at the 1% level, and
    // occupation means against the Green diagonal at 3 sigma.
    let started = Instant::now();
    let triple = bundled("sub3.json");
    assert_eq!(triple, loopsoup::presets::substochastic_triple());
    let report = verify::montecarlo_suite(None, &VerifyOptions::default()).unwrap();
    assert_eq!(report.checks.len(), 6);
    conclude(8, "Monte Carlo growing loops and occupation", started, &report);
}
