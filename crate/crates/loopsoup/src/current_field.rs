//! Closed-form distributions induced by the loop soup: the current field,
//! the discrete occupation field, and the continuous occupation density with
//! certified truncation bounds.
//!
//! The current field assigns to a current `C` the mass
//! `det(I - Q) q(C) prod_u n_u(C)! / prod_v C_uv!`; summing it over currents
//! with a fixed local time gives the discrete occupation field, and folding
//! in Gamma waiting times gives the continuous occupation density. All tail
//! bounds replace `Q` by `|Q|`, whose series dominates every omitted term
//! in modulus.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;

use crate::enumeration::{factorial, for_each_current_of_mass, for_each_current_with_local_time, multinomial};
use crate::error::{Error, Result};
use crate::loops::{current_weight, Current, LocalTime};
use crate::torus;
use crate::weights::{green, WeightMatrix};

/// Largest supported total edge mass; factorials stay finite in `f64` here.
pub const MAX_TOTAL_MASS: u64 = 170;

/// Exact-integer multinomial converted to `f64`.
pub fn multinomial_f64(parts: &[u64]) -> f64 {
    multinomial(parts).to_f64().unwrap_or(f64::INFINITY)
}

fn check_mass(mass: u64) -> Result<()> {
    if mass > MAX_TOTAL_MASS {
        return Err(Error::TooLarge { limit: MAX_TOTAL_MASS, got: mass });
    }
    Ok(())
}

/// The combinatorial part of the current-field mass:
/// `q(C) prod_u n_u(C)! / prod_v C_uv!`.
fn nu_c_body(q: &WeightMatrix, current: &Current) -> Complex64 {
    let n = current.n();
    let mut combinatorial = 1.0f64;
    for u in 0..n {
        let row: Vec<u64> = (0..n).map(|v| current.entry(u, v)).collect();
        combinatorial *= multinomial_f64(&row);
    }
    current_weight(q, current).scale(combinatorial)
}

/// Mass of a single current under the current field.
pub fn nu_c(q: &WeightMatrix, current: &Current) -> Result<Complex64> {
    q.require_integrable()?;
    if current.n() != q.n() {
        return Err(Error::DimensionMismatch { expected: q.n(), got: current.n() });
    }
    check_mass(current.total_mass())?;
    let det = green(q)?.det_i_minus_q();
    Ok(det * nu_c_body(q, current))
}

/// Mass of a local-time vector under the discrete occupation field: the sum
/// of `nu_c` over the finitely many currents with that local time.
pub fn nu_star(q: &WeightMatrix, local_time: &LocalTime) -> Result<Complex64> {
    q.require_integrable()?;
    if local_time.len() != q.n() {
        return Err(Error::DimensionMismatch { expected: q.n(), got: local_time.len() });
    }
    check_mass(local_time.iter().sum())?;
    let det = green(q)?.det_i_minus_q();
    let mut sum = Complex64::new(0.0, 0.0);
    for_each_current_with_local_time(local_time, &mut |c| {
        sum += nu_c_body(q, c);
    });
    Ok(det * sum)
}

/// A truncated continuous occupation density value.
#[derive(Debug, Clone)]
pub struct OccupationDensity {
    pub value: Complex64,
    pub max_total: u64,
    /// Certified bound on the modulus of the omitted tail.
    pub tail_bound: f64,
}

/// Continuous occupation density at the point `t`, truncated at currents of
/// total mass `max_total`.
///
/// The tail bound is `|det(I - Q)|` times the gap between the full
/// nonnegative series for `|Q|` (evaluated in closed form through the torus
/// integral) and its partial sum; every omitted complex term is dominated in
/// modulus by the corresponding `|Q|` term.
pub fn occupation_density_series(
    q: &WeightMatrix,
    t: &[f64],
    max_total: u64,
) -> Result<OccupationDensity> {
    q.require_integrable()?;
    let n = q.n();
    if t.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: t.len() });
    }
    if t.iter().any(|&x| x < 0.0) {
        return Err(Error::NegativePoint);
    }
    check_mass(max_total)?;
    let det = green(q)?.det_i_minus_q();
    let abs_q = WeightMatrix::from_fn(n, |u, v| Complex64::new(q.entry(u, v).norm(), 0.0));
    let fact: Vec<f64> = (0..=max_total)
        .map(|k| factorial(k).to_f64().unwrap())
        .collect();

    let mut partial = Complex64::new(0.0, 0.0);
    let mut partial_abs = 0.0f64;
    for mass in 0..=max_total {
        for_each_current_of_mass(n, mass, &mut |c| {
            let local = c.local_time();
            let mut shape = 1.0f64;
            for u in 0..n {
                shape *= t[u].powi(local[u] as i32);
                for v in 0..n {
                    shape /= fact[c.entry(u, v) as usize];
                }
            }
            partial += current_weight(q, c).scale(shape);
            partial_abs += current_weight(&abs_q, c).re * shape;
        });
    }
    let exp_t = (-t.iter().sum::<f64>()).exp();
    let value = det * partial.scale(exp_t);

    let (full_abs, quad_est) = torus::exp_sum_converged(abs_q.matrix(), t, 32, 1e-13)?;
    let gap = (full_abs.re - partial_abs).max(0.0);
    let tail_bound = det.norm() * exp_t * (gap + quad_est);
    Ok(OccupationDensity { value, max_total, tail_bound })
}

/// Partial sums of the current field by total mass, for normalization
/// checks: returns the complex partial sum of `nu_c` over currents of mass
/// at most `max_total` and the corresponding nonnegative `|Q|` partial sum.
pub fn nu_c_partial_sums(q: &WeightMatrix, max_total: u64) -> Result<(Complex64, f64)> {
    q.require_integrable()?;
    check_mass(max_total)?;
    let n = q.n();
    let det = green(q)?.det_i_minus_q();
    let abs_q = WeightMatrix::from_fn(n, |u, v| Complex64::new(q.entry(u, v).norm(), 0.0));
    let det_abs = green(&abs_q)?.det_i_minus_q();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_abs = 0.0f64;
    for mass in 0..=max_total {
        for_each_current_of_mass(n, mass, &mut |c| {
            sum += nu_c_body(q, c);
            sum_abs += nu_c_body(&abs_q, c).re;
        });
    }
    Ok((det * sum, det_abs.re * sum_abs))
}

/// Exact factorial as `f64` (for callers composing their own series).
pub fn factorial_f64(k: u64) -> f64 {
    factorial(k).to_f64().unwrap_or(f64::INFINITY)
}

/// Exact big-integer factorial re-export for report formatting.
pub fn factorial_exact(k: u64) -> BigUint {
    factorial(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{currents_up_to_mass, nu_c_oracle_bubble};
    use crate::presets;

    #[test]
    fn nu_c_zero_current_is_det() {
        let q = presets::hermitian_pair();
        let v = nu_c(&q, &Current::zero(2)).unwrap();
        assert!((v - Complex64::new(0.75, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn nu_c_scalar_geometric() {
        let q = presets::singleton_half();
        for k in 0..8u64 {
            let c = Current::from_counts(1, alloc::vec![k]).unwrap();
            let v = nu_c(&q, &c).unwrap();
            let want = 0.5f64.powi(k as i32 + 1);
            assert!((v - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn nu_c_hermitian_pair_crossing() {
        let q = presets::hermitian_pair();
        let c = Current::from_counts(2, alloc::vec![0, 1, 1, 0]).unwrap();
        let v = nu_c(&q, &c).unwrap();
        assert!((v - Complex64::new(0.1875, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn nu_c_matches_bubble_oracle_on_hermitian_pair() {
        let q = presets::hermitian_pair();
        for c in currents_up_to_mass(2, 4) {
            let closed = nu_c(&q, &c).unwrap();
            let oracle = nu_c_oracle_bubble(&q, &c).unwrap();
            assert!(
                (closed - oracle).norm() <= 1e-12 * closed.norm().max(1.0),
                "mismatch at {:?}",
                c.counts()
            );
        }
    }

    #[test]
    fn nu_c_vanishes_on_zero_weight_edges() {
        let q = presets::hermitian_pair(); // zero diagonal
        let c = Current::from_counts(2, alloc::vec![1, 0, 0, 0]).unwrap();
        assert_eq!(nu_c(&q, &c).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn nu_star_examples() {
        let q = presets::hermitian_pair();
        let v = nu_star(&q, &alloc::vec![0, 0]).unwrap();
        assert!((v - Complex64::new(0.75, 0.0)).norm() < 1e-14);

        let single = presets::singleton_half();
        for k in 0..6u64 {
            let v = nu_star(&single, &alloc::vec![k]).unwrap();
            let want = 0.5f64.powi(k as i32 + 1);
            assert!((v - Complex64::new(want, 0.0)).norm() < 1e-15);
        }

        // Local time (1, 1): the crossing current contributes 0.1875, and
        // the two-self-loops current has weight zero on this diagonal.
        let v = nu_star(&q, &alloc::vec![1, 1]).unwrap();
        assert!((v - Complex64::new(0.1875, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn occupation_series_zero_weight() {
        let q = WeightMatrix::zero(3);
        let t = [0.5, 1.0, 2.0];
        let d = occupation_density_series(&q, &t, 0).unwrap();
        let want = (-3.5f64).exp();
        assert!((d.value - Complex64::new(want, 0.0)).norm() < 1e-14);
        assert!(d.tail_bound < 1e-12);
    }

    #[test]
    fn occupation_series_scalar_closed_form() {
        // Single vertex: the continuous occupation field is Exp(1 - q).
        let q = presets::singleton_half();
        for &t in &[0.5, 1.0, 2.0] {
            let d = occupation_density_series(&q, &[t], 60).unwrap();
            let want = 0.5 * (-0.5 * t).exp();
            assert!((d.value - Complex64::new(want, 0.0)).norm() < 1e-13);
            assert!(d.tail_bound < 1e-12);
        }
    }

    #[test]
    fn occupation_series_rejects_bad_points() {
        let q = presets::hermitian_pair();
        assert!(matches!(
            occupation_density_series(&q, &[1.0, -0.5], 5),
            Err(Error::NegativePoint)
        ));
    }

    #[test]
    fn normalization_partial_sums_within_tilde_tail() {
        let q = presets::hermitian_pair();
        let (partial, partial_abs) = nu_c_partial_sums(&q, 14).unwrap();
        let tail = (1.0 - partial_abs).max(0.0);
        assert!((partial - Complex64::new(1.0, 0.0)).norm() <= tail + 1e-12);
        assert!(tail < 1e-3);
    }

    #[test]
    fn mass_cap_enforced() {
        let q = presets::singleton_half();
        let c = Current::from_counts(1, alloc::vec![200]).unwrap();
        assert!(matches!(nu_c(&q, &c), Err(Error::TooLarge { .. })));
    }
}
