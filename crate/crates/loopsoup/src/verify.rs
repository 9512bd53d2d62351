//! Runnable verification suites.
//!
//! Each suite checks one family of identities at a pinned scale and
//! tolerance and returns a [`VerificationReport`] with one aggregated check
//! per instance (matrix, size, or seed). The tolerances here are the
//! project's acceptance thresholds; the CLI exposes the same suites.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;
use num_traits::ToPrimitive;

use crate::current_field::nu_c;
use crate::enumeration::{
    bijection_decode, bijection_encode, count_rooted_loops, currents_up_to_mass,
    enumerate_loops, enumerate_loops_with_current, for_each_decomposition, multinomial,
    multiset_sequences, nu_c_oracle_bubble, nu_c_oracle_loopsoup, truncated_log_green,
    verify_comb_identity, verify_cycle_identity, DEFAULT_LOOP_BUDGET,
};
use crate::error::Result;
use crate::gff::{self, moment_from_currents, permanent, submatrix};
use crate::loops::Current;
use crate::presets;
use crate::report::{Check, VerificationReport};
use crate::rng::CounterRng;
use crate::sampler;
use crate::stats::chi_square_sf;
use crate::torus::{current_indicator, ReducedGrid};
use crate::weights::{green, WeightMatrix};

/// Relative tolerance for the closed-form current field against the bubble
/// oracle.
pub const TOL_PROPOSITION_REL: f64 = 1e-9;
/// Scaled absolute tolerance for the bubble/loop-soup oracle agreement.
pub const TOL_LEMMA_ABS: f64 = 1e-12;
/// Relative tolerance for the Green determinant product identity.
pub const TOL_DET_G_REL: f64 = 1e-10;
/// Absolute tolerance for the isomorphism density comparison.
pub const TOL_ISOMORPHISM_ABS: f64 = 1e-6;
/// Absolute tolerance for the isomorphism comparison at zero weight.
pub const TOL_ISOMORPHISM_ZERO: f64 = 1e-12;
/// Absolute tolerance for occupation moments against permanents.
pub const TOL_MOMENT_ABS: f64 = 1e-6;
/// Absolute tolerance for the torus current indicator.
pub const TOL_INDICATOR_ABS: f64 = 1e-12;
/// Significance level for the Monte Carlo chi-square tests.
pub const MC_CHI_SQUARE_LEVEL: f64 = 0.01;
/// Sigma allowance for Monte Carlo frequency and moment checks.
pub const MC_SIGMAS: f64 = 3.0;

/// Scales and seeds shared by the suites.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub max_total: u64,
    pub quad_points: usize,
    pub samples: usize,
    pub seed: u64,
    /// Overrides a suite's headline tolerance when set.
    pub tol: Option<f64>,
    /// Grid axes for the isomorphism check of an input weight; the pinned
    /// default grid applies when unset.
    pub grid: Option<Vec<Vec<f64>>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_total: 20,
            quad_points: 64,
            samples: 100_000,
            seed: 0x100F_50E7,
            tol: None,
            grid: None,
        }
    }
}

impl VerifyOptions {
    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{}{}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())
}

/// Uniform complex entries scaled so that `rho(|Q|)` hits the target.
pub fn random_integrable(n: usize, rho_target: f64, rng: &mut CounterRng) -> WeightMatrix {
    loop {
        let q = WeightMatrix::from_fn(n, |_, _| {
            Complex64::new(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0)
        });
        let rho = q.spectral_radius_abs();
        if rho > 1e-6 {
            let s = rho_target / rho;
            return WeightMatrix::from_fn(n, |u, v| q.entry(u, v).scale(s));
        }
    }
}

/// Random Hermitian weight scaled to the target spectral radius.
pub fn random_hermitian_integrable(n: usize, rho_target: f64, rng: &mut CounterRng) -> WeightMatrix {
    loop {
        let mut draft = WeightMatrix::zero(n).matrix().clone();
        for u in 0..n {
            draft.set(u, u, Complex64::new(2.0 * rng.uniform() - 1.0, 0.0));
            for v in u + 1..n {
                let z = Complex64::new(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
                draft.set(u, v, z);
                draft.set(v, u, z.conj());
            }
        }
        let q = WeightMatrix::from_fn(n, |u, v| draft.get(u, v));
        let rho = q.spectral_radius_abs();
        if rho > 1e-6 {
            let s = rho_target / rho;
            return WeightMatrix::from_fn(n, |u, v| q.entry(u, v).scale(s));
        }
    }
}

fn rho_for_seed(k: usize) -> f64 {
    0.2 + 0.04 * (k % 10) as f64
}

/// Closed-form current field against the exact bubble-soup oracle, for
/// random integrable complex weights and all currents of total mass at most
/// four.
pub fn proposition_suite(
    extra: Option<&WeightMatrix>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let tol = opts.tol_or(TOL_PROPOSITION_REL);
    let mut report = VerificationReport::new(
        String::from("proposition"),
        format!("mass<=4, 10 random Q per n in 1..=3, rel tol {tol:e}"),
    );
    let mut instances: Vec<(String, WeightMatrix)> = Vec::new();
    for n in 1..=3usize {
        for k in 0..10usize {
            let mut rng = CounterRng::stream(opts.seed, (100 + n * 16 + k) as u64);
            let q = random_integrable(n, rho_for_seed(k), &mut rng);
            instances.push((format!("random n={n} #{k}"), q));
        }
    }
    if let Some(q) = extra {
        instances.push((String::from("input"), q.clone()));
    }
    for (name, q) in &instances {
        q.require_integrable()?;
        let mut worst = 0.0f64;
        let mut worst_pair = (Complex64::default(), Complex64::default());
        let mut count = 0usize;
        for c in currents_up_to_mass(q.n(), 4) {
            let closed = nu_c(q, &c)?;
            let oracle = nu_c_oracle_bubble(q, &c)?;
            let rel = (closed - oracle).norm() / closed.norm().max(oracle.norm()).max(1e-300);
            if rel > worst {
                worst = rel;
                worst_pair = (closed, oracle);
            }
            count += 1;
        }
        report.push(Check::compare(
            format!("{name}: {count} currents"),
            fmt_complex(worst_pair.0),
            fmt_complex(worst_pair.1),
            worst,
            tol,
        ));
    }
    Ok(report)
}

/// Bubble oracle against loop-soup oracle on the same range, plus ordering
/// invariance of the bubble oracle over all vertex orders at n = 3.
pub fn lemma_suite(
    extra: Option<&WeightMatrix>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let tol = opts.tol_or(TOL_LEMMA_ABS);
    let mut report = VerificationReport::new(
        String::from("lemma"),
        format!("mass<=4, oracles equal within {tol:e} (scaled); ordering invariance at n=3"),
    );
    let mut instances: Vec<(String, WeightMatrix)> = Vec::new();
    for n in 1..=3usize {
        for k in 0..10usize {
            let mut rng = CounterRng::stream(opts.seed, (200 + n * 16 + k) as u64);
            instances.push((
                format!("random n={n} #{k}"),
                random_integrable(n, rho_for_seed(k), &mut rng),
            ));
        }
    }
    if let Some(q) = extra {
        instances.push((String::from("input"), q.clone()));
    }
    for (name, q) in &instances {
        q.require_integrable()?;
        let mut worst = 0.0f64;
        let mut worst_pair = (Complex64::default(), Complex64::default());
        let mut count = 0usize;
        for c in currents_up_to_mass(q.n(), 4) {
            let bubble = nu_c_oracle_bubble(q, &c)?;
            let soup = nu_c_oracle_loopsoup(q, &c)?;
            let scaled = (bubble - soup).norm() / bubble.norm().max(soup.norm()).max(1.0);
            if scaled > worst {
                worst = scaled;
                worst_pair = (bubble, soup);
            }
            count += 1;
        }
        report.push(Check::compare(
            format!("{name}: bubble vs loop soup on {count} currents"),
            fmt_complex(worst_pair.0),
            fmt_complex(worst_pair.1),
            worst,
            tol,
        ));
    }
    // Ordering invariance at n = 3: relabeling vertices must not move the
    // induced current masses.
    let orders: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for k in 0..2usize {
        let mut rng = CounterRng::stream(opts.seed, (250 + k) as u64);
        let q = random_integrable(3, 0.4, &mut rng);
        let base: Vec<(Current, Complex64)> = currents_up_to_mass(3, 4)
            .into_iter()
            .map(|c| {
                let v = nu_c_oracle_bubble(&q, &c).unwrap();
                (c, v)
            })
            .collect();
        for order in &orders {
            let qp = q.permuted(order)?;
            let mut worst = 0.0f64;
            for (c, v) in &base {
                let cp = c.permuted(order)?;
                let vp = nu_c_oracle_bubble(&qp, &cp)?;
                let scaled = (v - vp).norm() / v.norm().max(vp.norm()).max(1.0);
                worst = worst.max(scaled);
            }
            report.push(Check::compare(
                format!("ordering invariance #{k} order={order:?}"),
                String::from("base order"),
                String::from("relabeled"),
                worst,
                tol,
            ));
        }
    }
    Ok(report)
}

/// The exact combinatorial identities: current splitting at every root,
/// the composition/factorial identity, and the sequence/loop bijection
/// round-trips.
pub fn identities_suite(opts: &VerifyOptions) -> Result<VerificationReport> {
    let _ = opts;
    let mut report = VerificationReport::new(
        String::from("identities"),
        String::from("splitting mass<=5 n<=3 all roots; compositions n0<=10; bijection mass<=4"),
    );
    for n in 1..=3usize {
        let mut all_equal = true;
        let mut checked = 0usize;
        for c in currents_up_to_mass(n, 5) {
            for x in 0..n {
                let r = verify_comb_identity(&c, x)?;
                all_equal &= r.equal;
                checked += 1;
            }
        }
        report.push(Check::exact(
            format!("splitting identity n={n}: {checked} (current, root) pairs"),
            String::from("multinomial product"),
            String::from("decomposition sum"),
            all_equal,
        ));
    }
    for n0 in 1..=10u32 {
        let (sum, equal) = verify_cycle_identity(n0);
        report.push(Check::exact(
            format!("composition identity n0={n0}"),
            sum.to_string(),
            factorial_string(n0),
            equal,
        ));
    }
    for n in 1..=3usize {
        let (round_trips, collections_match, encode_ok, decode_ok) = bijection_sweep(n, 4)?;
        report.push(Check::exact(
            format!("bijection n={n}: {round_trips} round trips"),
            String::from("encode then decode"),
            String::from("identity"),
            encode_ok && decode_ok && collections_match,
        ));
    }
    Ok(report)
}

fn factorial_string(n0: u32) -> String {
    crate::enumeration::factorial(n0 as u64).to_string()
}

/// Exhaustive encode/decode round trips over every sequence collection of
/// every current up to the mass cap, in both directions; also confirms the
/// collection sizes against both sides of the splitting identity.
fn bijection_sweep(n: usize, max_mass: u64) -> Result<(usize, bool, bool, bool)> {
    let mut round_trips = 0usize;
    let mut collections_match = true;
    let mut encode_ok = true;
    let mut decode_ok = true;
    for c in currents_up_to_mass(n, max_mass) {
        for x in 0..n {
            // Forward: every collection encodes and decodes back.
            let mut rows: Vec<Vec<Vec<usize>>> = Vec::new();
            for u in 0..n {
                let row: Vec<u64> = (0..n).map(|v| c.entry(u, v)).collect();
                rows.push(multiset_sequences(&row));
            }
            let expected: u64 = rows
                .iter()
                .map(|r| r.len() as u64)
                .product();
            let lhs = {
                let mut acc = num_bigint::BigUint::from(1u32);
                for u in 0..n {
                    let row: Vec<u64> = (0..n).map(|v| c.entry(u, v)).collect();
                    acc *= multinomial(&row);
                }
                acc
            };
            collections_match &= lhs.to_u64() == Some(expected);
            let mut assignment = alloc::vec![0usize; n];
            loop {
                let seqs: Vec<Vec<usize>> =
                    (0..n).map(|u| rows[u][assignment[u]].clone()).collect();
                match bijection_encode(&seqs, x) {
                    Ok((omega, rem)) => {
                        let back = bijection_decode(&omega, &rem)?;
                        encode_ok &= back == seqs;
                        round_trips += 1;
                    }
                    Err(_) => encode_ok = false,
                }
                // Odometer over the per-vertex collections.
                let mut pos = 0;
                loop {
                    if pos == n {
                        break;
                    }
                    assignment[pos] += 1;
                    if assignment[pos] < rows[pos].len() {
                        break;
                    }
                    assignment[pos] = 0;
                    pos += 1;
                }
                if pos == n {
                    break;
                }
            }
            // Reverse: every (loop, remainder) pair decodes and re-encodes.
            for_each_decomposition(&c, x, &mut |c_plus: &Current, c_zero: &Current| {
                for omega in enumerate_loops_with_current(x, c_plus) {
                    let mut rem_rows: Vec<Vec<Vec<usize>>> = Vec::new();
                    for u in 0..n {
                        let row: Vec<u64> = (0..n).map(|v| c_zero.entry(u, v)).collect();
                        rem_rows.push(multiset_sequences(&row));
                    }
                    let mut assignment = alloc::vec![0usize; n];
                    loop {
                        let rem: Vec<Vec<usize>> =
                            (0..n).map(|u| rem_rows[u][assignment[u]].clone()).collect();
                        match bijection_decode(&omega, &rem) {
                            Ok(seqs) => match bijection_encode(&seqs, x) {
                                Ok((omega2, rem2)) => {
                                    decode_ok &= omega2 == omega && rem2 == rem;
                                    round_trips += 1;
                                }
                                Err(_) => decode_ok = false,
                            },
                            Err(_) => decode_ok = false,
                        }
                        let mut pos = 0;
                        loop {
                            if pos == n {
                                break;
                            }
                            assignment[pos] += 1;
                            if assignment[pos] < rem_rows[pos].len() {
                                break;
                            }
                            assignment[pos] = 0;
                            pos += 1;
                        }
                        if pos == n {
                            break;
                        }
                    }
                }
            });
        }
    }
    Ok((round_trips, collections_match, encode_ok, decode_ok))
}

/// Green-function identities: the determinant telescopes over suffix
/// restrictions, and the exponential of the truncated loop-measure sum
/// reaches the Green diagonal within its certified tail.
pub fn green_suite(opts: &VerifyOptions) -> Result<VerificationReport> {
    let tol = opts.tol_or(TOL_DET_G_REL);
    let mut report = VerificationReport::new(
        String::from("green"),
        format!("det product n<=6 (20 random Q, rel tol {tol:e}); log-series tail at L=12"),
    );
    for k in 0..20usize {
        let n = 1 + (k % 6);
        let mut rng = CounterRng::stream(opts.seed, (300 + k) as u64);
        let q = random_integrable(n, 0.25 + 0.05 * (k % 8) as f64, &mut rng);
        let g = green(&q)?;
        let det_g = g.det_g();
        let mut product = Complex64::new(1.0, 0.0);
        for j in 0..n {
            let suffix: Vec<usize> = (j..n).collect();
            let gj = green(&q.restrict(&suffix)?)?;
            product *= gj.entry(0, 0);
        }
        let rel = (det_g - product).norm() / det_g.norm().max(product.norm()).max(1e-300);
        report.push(Check::compare(
            format!("det G telescoping, n={n} #{k}"),
            fmt_complex(det_g),
            fmt_complex(product),
            rel,
            tol,
        ));
    }
    for n in 1..=3usize {
        for k in 0..3usize {
            let mut rng = CounterRng::stream(opts.seed, (350 + n * 4 + k) as u64);
            let q = random_integrable(n, 0.5, &mut rng);
            let members: Vec<usize> = (0..n).collect();
            let t = truncated_log_green(&q, &members, 0, 12, DEFAULT_LOOP_BUDGET)?;
            let g = green(&q)?;
            let err = (t.sum.exp() - g.entry(0, 0)).norm();
            let bound = t.exp_error_bound() + 1e-13 * g.entry(0, 0).norm().max(1.0);
            report.push(Check::compare(
                format!("exp(log series) at L=12, n={n} #{k} ({} classes)", t.classes),
                fmt_complex(t.sum.exp()),
                fmt_complex(g.entry(0, 0)),
                err,
                bound,
            ));
        }
    }
    Ok(report)
}

/// Occupation density series against the `|Z|^2` quadrature on a grid, for
/// the zero weight, the bundled Hermitian pair, and random Hermitian
/// weights.
pub fn isomorphism_suite(
    extra: Option<&WeightMatrix>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let tol = opts.tol_or(TOL_ISOMORPHISM_ABS);
    let mut report = VerificationReport::new(
        String::from("isomorphism"),
        format!(
            "3x3 grid in {{0.5,1,2}}^2, max_total={}, quad={}, abs tol {tol:e}",
            opts.max_total, opts.quad_points
        ),
    );
    let mut instances: Vec<(String, WeightMatrix, f64)> = Vec::new();
    instances.push((String::from("zero n=2"), WeightMatrix::zero(2), TOL_ISOMORPHISM_ZERO));
    instances.push((String::from("hermitian pair"), presets::hermitian_pair(), tol));
    for k in 0..5usize {
        let mut rng = CounterRng::stream(opts.seed, (400 + k) as u64);
        let q = random_hermitian_integrable(2, 0.3 + 0.06 * k as f64, &mut rng);
        instances.push((format!("random hermitian n=2 #{k}"), q, tol));
    }
    if let Some(q) = extra {
        instances.push((String::from("input"), q.clone(), tol));
    }
    for (name, q, abs_tol) in &instances {
        let axes: Vec<Vec<f64>> = match (&opts.grid, name.as_str()) {
            (Some(axes), "input") => axes.clone(),
            _ => (0..q.n()).map(|_| alloc::vec![0.5, 1.0, 2.0]).collect(),
        };
        let inner = gff::verify_isomorphism(q, &axes, opts.max_total, opts.quad_points)?;
        let within_bounds = inner.passed();
        let max_disc = inner.max_discrepancy();
        report.push(Check {
            label: format!("{name}: {} grid points", inner.checks.len()),
            lhs: String::from("occupation series"),
            rhs: String::from("|Z|^2 quadrature"),
            discrepancy: max_disc,
            bound: *abs_tol,
            passed: within_bounds && max_disc <= *abs_tol,
        });
    }
    Ok(report)
}

/// Occupation moments from the current field against permanents of Green
/// submatrices, for every vertex subset.
pub fn moments_suite(
    extra: Option<&WeightMatrix>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let tol = opts.tol_or(TOL_MOMENT_ABS);
    let mut report = VerificationReport::new(
        String::from("moments"),
        format!("all subsets, n<=3, max_total={}, abs tol {tol:e}", opts.max_total),
    );
    let mut instances: Vec<(String, WeightMatrix)> = Vec::new();
    instances.push((String::from("zero n=2"), WeightMatrix::zero(2)));
    for n in 1..=3usize {
        for k in 0..3usize {
            let mut rng = CounterRng::stream(opts.seed, (500 + n * 8 + k) as u64);
            let q = random_hermitian_integrable(n, 0.18 + 0.04 * k as f64, &mut rng);
            instances.push((format!("random hermitian n={n} #{k}"), q));
        }
    }
    if let Some(q) = extra {
        instances.push((String::from("input"), q.clone()));
    }
    for (name, q) in &instances {
        let n = q.n();
        let g = green(q)?;
        let mut worst = 0.0f64;
        let mut worst_tail = 0.0f64;
        let mut worst_pair = (Complex64::default(), Complex64::default());
        let mut subsets = 0usize;
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&u| mask & (1 << u) != 0).collect();
            let m = moment_from_currents(q, &subset, opts.max_total)?;
            let p = permanent(&submatrix(g.matrix(), &subset))?;
            let disc = (m.value - p).norm();
            if disc > worst {
                worst = disc;
                worst_pair = (m.value, p);
                worst_tail = m.tail_bound;
            }
            subsets += 1;
        }
        // Pass needs both: within the certified tail and within the
        // absolute tolerance.
        let bound = (worst_tail + 1e-12).min(tol);
        report.push(Check::compare(
            format!("{name}: {subsets} subsets"),
            fmt_complex(worst_pair.0),
            fmt_complex(worst_pair.1),
            worst,
            bound,
        ));
    }
    Ok(report)
}

/// The torus quadrature reproduces the 0/1 current indicator exactly on all
/// small count matrices.
pub fn indicator_suite(opts: &VerifyOptions) -> Result<VerificationReport> {
    let tol = opts.tol_or(TOL_INDICATOR_ABS);
    let mut report = VerificationReport::new(
        String::from("indicator"),
        format!("all count matrices entries<=3, n<=3, abs tol {tol:e}"),
    );
    for n in 1..=3usize {
        // Net flux per vertex is at most 6 here, so 16 nodes per angle make
        // the rule exact.
        let grid = ReducedGrid::new(n, 16)?;
        let mut worst = 0.0f64;
        let mut matrices = 0usize;
        let cells = n * n;
        let mut counts = alloc::vec![0u64; cells];
        loop {
            let expected = if crate::loops::flow_conserved(&counts, n) { 1.0 } else { 0.0 };
            let got = current_indicator(&counts, n, &grid);
            let err = (got - Complex64::new(expected, 0.0)).norm();
            worst = worst.max(err);
            matrices += 1;
            let mut pos = 0;
            loop {
                if pos == cells {
                    break;
                }
                counts[pos] += 1;
                if counts[pos] <= 3 {
                    break;
                }
                counts[pos] = 0;
                pos += 1;
            }
            if pos == cells {
                break;
            }
        }
        report.push(Check::compare(
            format!("indicator n={n}: {matrices} matrices"),
            String::from("quadrature"),
            String::from("0/1 conservation"),
            worst,
            tol,
        ));
    }
    Ok(report)
}

/// Monte Carlo checks for samplable weights: the growing-loop law, the
/// sampled current histogram against the closed form, and occupation means
/// against the Green diagonal. Seeds are pinned.
pub fn montecarlo_suite(
    extra: Option<&WeightMatrix>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        String::from("montecarlo"),
        format!(
            "{} samples, {}-sigma frequencies, chi-square at {}",
            opts.samples, MC_SIGMAS, MC_CHI_SQUARE_LEVEL
        ),
    );
    let mut instances: Vec<(String, WeightMatrix)> = Vec::new();
    instances.push((String::from("substochastic triple"), presets::substochastic_triple()));
    instances.push((String::from("symmetric pair"), presets::symmetric_pair()));
    if let Some(q) = extra {
        instances.push((String::from("input"), q.clone()));
    }
    for (idx, (name, q)) in instances.iter().enumerate() {
        sampler::samplable_entries(q)?;
        let salt = opts.seed.wrapping_add(0x600 + idx as u64);
        growing_loop_check(name, q, opts.samples, salt, &mut report)?;
        current_histogram_check(name, q, opts.samples, salt ^ 0x1111, &mut report)?;
        occupation_mean_check(name, q, opts.samples, salt ^ 0x2222, &mut report)?;
    }
    Ok(report)
}

fn growing_loop_check(
    name: &str,
    q: &WeightMatrix,
    samples: usize,
    seed: u64,
    report: &mut VerificationReport,
) -> Result<()> {
    let n = q.n();
    let members: Vec<usize> = (0..n).collect();
    let g = green(q)?;
    let g_vv = g.entry(0, 0).re;
    let inventory = enumerate_loops(&members, 0, 3, count_rooted_loops(n, 3) + 1)?;
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for i in 0..samples {
        let mut rng = CounterRng::stream(seed, i as u64);
        let omega = sampler::sample_growing_loop(q, &members, 0, &mut rng)?;
        if omega.len() <= 3 {
            *counts.entry(omega.vertices().to_vec()).or_insert(0) += 1;
        }
    }
    let mut worst_z = 0.0f64;
    let mut targets: Vec<(Vec<usize>, f64)> = Vec::new();
    targets.push((alloc::vec![0], 1.0 / g_vv));
    for omega in &inventory.loops {
        let p = crate::loops::path_weight(q, &omega.as_path()).re / g_vv;
        targets.push((omega.vertices().to_vec(), p));
    }
    for (verts, p) in &targets {
        let observed = *counts.get(verts).unwrap_or(&0) as f64 / samples as f64;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        if sigma > 0.0 {
            worst_z = worst_z.max((observed - p).abs() / sigma);
        }
    }
    report.push(Check::compare(
        format!("{name}: growing-loop law on {} loops", targets.len()),
        String::from("empirical frequency"),
        String::from("q(loop)/G(v,v)"),
        worst_z,
        MC_SIGMAS,
    ));
    Ok(())
}

fn current_histogram_check(
    name: &str,
    q: &WeightMatrix,
    samples: usize,
    seed: u64,
    report: &mut VerificationReport,
) -> Result<()> {
    let n = q.n();
    // Bins: currents of mass <= 3 with enough expected hits, plus a rest
    // bin.
    let mut bins: Vec<(Vec<u64>, f64)> = Vec::new();
    let mut covered = 0.0f64;
    for c in currents_up_to_mass(n, 3) {
        let p = nu_c(q, &c)?.re;
        if p * samples as f64 >= 5.0 {
            covered += p;
            bins.push((c.counts().to_vec(), p));
        }
    }
    let rest = (1.0 - covered).max(0.0);
    let mut observed = alloc::vec![0usize; bins.len() + 1];
    let index: BTreeMap<Vec<u64>, usize> = bins
        .iter()
        .enumerate()
        .map(|(i, (c, _))| (c.clone(), i))
        .collect();
    for i in 0..samples {
        let mut rng = CounterRng::stream(seed, i as u64);
        let bubble = sampler::sample_bubble_soup(q, &mut rng)?;
        match index.get(bubble.current.counts()) {
            Some(&i) => observed[i] += 1,
            None => *observed.last_mut().unwrap() += 1,
        }
    }
    let mut chi2 = 0.0f64;
    let mut cells = bins.len();
    for (i, (_, p)) in bins.iter().enumerate() {
        let expect = p * samples as f64;
        let diff = observed[i] as f64 - expect;
        chi2 += diff * diff / expect;
    }
    if rest * samples as f64 >= 5.0 {
        let expect = rest * samples as f64;
        let diff = *observed.last().unwrap() as f64 - expect;
        chi2 += diff * diff / expect;
        cells += 1;
    }
    let dof = cells.max(2) - 1;
    let p_value = chi_square_sf(chi2, dof);
    report.push(Check {
        label: format!("{name}: current histogram, {} bins, chi2={chi2:.2}", bins.len() + 1),
        lhs: format!("p-value {p_value:.4}"),
        rhs: format!("level {MC_CHI_SQUARE_LEVEL}"),
        discrepancy: chi2,
        bound: f64::INFINITY,
        passed: p_value >= MC_CHI_SQUARE_LEVEL,
    });
    Ok(())
}

fn occupation_mean_check(
    name: &str,
    q: &WeightMatrix,
    samples: usize,
    seed: u64,
    report: &mut VerificationReport,
) -> Result<()> {
    let n = q.n();
    let g = green(q)?;
    let points = sampler::empirical_occupation(q, samples, seed)?;
    let mut worst_z = 0.0f64;
    for u in 0..n {
        let mean: f64 = points.iter().map(|t| t[u]).sum::<f64>() / samples as f64;
        let var: f64 =
            points.iter().map(|t| (t[u] - mean) * (t[u] - mean)).sum::<f64>() / samples as f64;
        let sigma = (var / samples as f64).sqrt();
        let want = g.entry(u, u).re;
        if sigma > 0.0 {
            worst_z = worst_z.max((mean - want).abs() / sigma);
        }
    }
    report.push(Check::compare(
        format!("{name}: occupation means vs Green diagonal"),
        String::from("empirical mean"),
        String::from("G(u,u)"),
        worst_z,
        MC_SIGMAS,
    ));
    Ok(())
}

/// Every suite in order; `extra` feeds the suites that accept an input
/// weight (skipped by the ones it cannot satisfy).
pub fn all_suites(
    extra: Option<&WeightMatrix>,
    opts: &VerifyOptions,
) -> Result<Vec<VerificationReport>> {
    let hermitian_extra = extra.filter(|q| q.is_hermitian());
    let samplable_extra = extra.filter(|q| sampler::samplable_entries(q).is_ok());
    Ok(alloc::vec![
        proposition_suite(extra, opts)?,
        lemma_suite(extra, opts)?,
        identities_suite(opts)?,
        green_suite(opts)?,
        isomorphism_suite(hermitian_extra, opts)?,
        moments_suite(hermitian_extra, opts)?,
        indicator_suite(opts)?,
        montecarlo_suite(samplable_extra, opts)?,
    ])
}
