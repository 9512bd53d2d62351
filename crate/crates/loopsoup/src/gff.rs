//! The complex Gaussian free field attached to a Hermitian integrable
//! weight, and the numerical side of the occupation-field isomorphism.
//!
//! For Hermitian integrable `Q` the Green's function `G = (I - Q)^{-1}` is
//! Hermitian positive definite; the field `Z` has density
//! `exp(-<z, G^{-1} z>) / (pi^N det G)` with respect to Lebesgue measure on
//! `C^N`, conjugate covariance `E[conj(Z_u) Z_v] = G(u, v)`, and vanishing
//! pseudo-covariance. The density of `|Z|^2` is a torus integral, which is
//! exactly the continuous occupation density of the loop soup of `Q`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;

use crate::current_field::{self, occupation_density_series};
use crate::enumeration::for_each_current_of_mass;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, hermitian_eigen, lu, CMatrix, RMatrix};
use crate::loops::current_weight;
use crate::report::{Check, VerificationReport};
use crate::rng::CounterRng;
use crate::torus::{self, ReducedGrid};
use crate::weights::{green, WeightMatrix};

/// Largest matrix size accepted by the permanent.
pub const MAX_PERMANENT_SIZE: usize = 12;

/// A complex Gaussian free field specification: the covariance, its inverse,
/// and a factor `A` with `A A* = G` used for sampling.
pub struct Gff {
    g: CMatrix,
    g_inv: CMatrix,
    det_g: f64,
    factor: CMatrix,
}

impl Gff {
    /// Field of a Hermitian integrable weight, with `G = (I - Q)^{-1}`.
    pub fn from_weight(q: &WeightMatrix) -> Result<Self> {
        if !q.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        q.require_integrable()?;
        let n = q.n();
        let gr = green(q)?;
        let g_inv = CMatrix::from_fn(n, |u, v| {
            let d = if u == v { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            d - q.entry(u, v)
        });
        let det = gr.det_i_minus_q();
        debug_assert!(det.im.abs() <= 1e-10 * det.norm().max(1.0));
        Self::assemble(gr.matrix().clone(), g_inv, 1.0 / det.re)
    }

    /// Field with an explicitly given Hermitian positive definite covariance.
    pub fn from_covariance(g: CMatrix) -> Result<Self> {
        if g.hermitian_defect() > 1e-10 * g.max_abs_entry().max(1.0) {
            return Err(Error::NotHermitianPd);
        }
        let f = lu(&g).map_err(|_| Error::NotHermitianPd)?;
        let det = f.det();
        if det.re <= 0.0 || det.im.abs() > 1e-8 * det.norm() {
            return Err(Error::NotHermitianPd);
        }
        let g_inv = f.inverse();
        Self::assemble(g, g_inv, det.re)
    }

    fn assemble(g: CMatrix, g_inv: CMatrix, det_g: f64) -> Result<Self> {
        // Work on the exactly Hermitian average to keep the factorization
        // clean against float asymmetry.
        let n = g.n();
        let sym = CMatrix::from_fn(n, |u, v| (g.get(u, v) + g.get(v, u).conj()).scale(0.5));
        let factor = match cholesky_lower(&sym) {
            Ok(l) => l,
            Err(_) => {
                // Near-singular covariance: fall back to the Hermitian
                // square root through the eigendecomposition.
                let (vals, vecs) = hermitian_eigen(&sym)?;
                if vals.iter().any(|&l| l <= 0.0) {
                    return Err(Error::NotHermitianPd);
                }
                let root = CMatrix::from_fn(n, |u, v| {
                    vecs.get(u, v).scale(vals[v].sqrt())
                });
                root.mul(&vecs.conj_transpose())
            }
        };
        if det_g <= 0.0 {
            return Err(Error::NotHermitianPd);
        }
        Ok(Gff { g, g_inv, det_g, factor })
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn covariance(&self) -> &CMatrix {
        &self.g
    }

    pub fn det_g(&self) -> f64 {
        self.det_g
    }

    /// Sampling factor `A` with `A A* = G`.
    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    /// Density of the field at `z`, with respect to Lebesgue measure on
    /// `C^N`: `exp(-<z, G^{-1} z>) / (pi^N det G)`, where
    /// `<a, b> = sum conj(a_u) b_u`.
    pub fn density(&self, z: &[Complex64]) -> Result<f64> {
        let n = self.n();
        if z.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: z.len() });
        }
        let gz = self.g_inv.matvec(z);
        let mut ip = Complex64::new(0.0, 0.0);
        for u in 0..n {
            ip += z[u].conj() * gz[u];
        }
        let scale = ip.norm().max(1.0);
        assert!(
            ip.im.abs() <= 1e-10 * scale,
            "Hermitian quadratic form produced imaginary part {}",
            ip.im
        );
        let pi = core::f64::consts::PI;
        Ok((-ip.re).exp() / (pi.powi(n as i32) * self.det_g))
    }

    /// Draws `count` field samples. Sampling uses `Z = conj(A) xi` with
    /// `xi` i.i.d. standard complex normals, which realizes the conjugate
    /// covariance `E[conj(Z_u) Z_v] = G(u, v)` and zero pseudo-covariance.
    /// Sample `i` is fully determined by `(seed, i)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let n = self.n();
        let a_conj = self.factor.conj();
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let mut rng = CounterRng::stream(seed, i as u64);
            let xi: Vec<Complex64> = (0..n)
                .map(|_| {
                    let re = rng.standard_normal() * core::f64::consts::FRAC_1_SQRT_2;
                    let im = rng.standard_normal() * core::f64::consts::FRAC_1_SQRT_2;
                    Complex64::new(re, im)
                })
                .collect();
            out.push(a_conj.matvec(&xi));
        }
        out
    }

    /// The 2N x 2N real covariance of `(Z', Z'')` whose combination
    /// `(Z' + i Z'') / sqrt(2)` is distributed like the complex field:
    /// blocks `[[G_re, -G_im], [G_im, G_re]]`.
    pub fn real_embedding(&self) -> RMatrix {
        let n = self.n();
        RMatrix::from_fn(2 * n, |a, b| {
            let (u, ublock) = (a % n, a / n);
            let (v, vblock) = (b % n, b / n);
            let entry = self.g.get(u, v);
            match (ublock, vblock) {
                (0, 0) | (1, 1) => entry.re,
                (0, 1) => -entry.im,
                (1, 0) => entry.im,
                _ => unreachable!(),
            }
        })
    }
}

/// Permanent of a complex matrix by Ryser's inclusion-exclusion formula.
pub fn permanent(m: &CMatrix) -> Result<Complex64> {
    let n = m.n();
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::TooLarge { limit: MAX_PERMANENT_SIZE as u64, got: n as u64 });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 1u32..(1 << n) {
        let parity = if (mask.count_ones() as usize + n).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut prod = Complex64::new(parity, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    row += m.get(i, j);
                }
            }
            prod *= row;
        }
        total += prod;
    }
    Ok(total)
}

/// Principal submatrix on an ordered vertex subset.
pub fn submatrix(m: &CMatrix, subset: &[usize]) -> CMatrix {
    CMatrix::from_fn(subset.len(), |a, b| m.get(subset[a], subset[b]))
}

/// A truncated occupation-field moment with a certified tail bound.
#[derive(Debug, Clone)]
pub struct MomentEstimate {
    pub value: Complex64,
    pub max_total: u64,
    pub tail_bound: f64,
}

/// The occupation-field moment `E prod_{u in S} t_u` accumulated from the
/// current field: `sum_C nu_c(C) prod_{u in S} (n_u(C) + 1)`, truncated at
/// the given total mass.
///
/// The tail bound replaces `Q` by `|Q|`, whose moment series is nonnegative
/// and sums to the permanent of the corresponding Green submatrix, so the
/// gap to the partial sum dominates every omitted term.
pub fn moment_from_currents(
    q: &WeightMatrix,
    subset: &[usize],
    max_total: u64,
) -> Result<MomentEstimate> {
    q.require_integrable()?;
    let n = q.n();
    if subset.iter().any(|&u| u >= n) {
        return Err(Error::BadSubset);
    }
    if max_total > current_field::MAX_TOTAL_MASS {
        return Err(Error::TooLarge { limit: current_field::MAX_TOTAL_MASS, got: max_total });
    }
    let det = green(q)?.det_i_minus_q();
    let abs_q = WeightMatrix::from_fn(n, |u, v| Complex64::new(q.entry(u, v).norm(), 0.0));
    let green_abs = green(&abs_q)?;
    let det_abs = green_abs.det_i_minus_q().re;

    let mut partial = Complex64::new(0.0, 0.0);
    let mut partial_abs = 0.0f64;
    for mass in 0..=max_total {
        for_each_current_of_mass(n, mass, &mut |c| {
            let local = c.local_time();
            let mut comb = 1.0f64;
            for u in 0..n {
                let row: Vec<u64> = (0..n).map(|v| c.entry(u, v)).collect();
                comb *= current_field::multinomial_f64(&row);
            }
            let weight_factor: f64 = subset.iter().map(|&u| (local[u] + 1) as f64).product();
            partial += current_weight(q, c).scale(comb * weight_factor);
            partial_abs += current_weight(&abs_q, c).re * comb * weight_factor;
        });
    }
    let value = det * partial;
    let full_abs = permanent(&submatrix(green_abs.matrix(), subset))?.re;
    let tail_bound = (full_abs - det_abs * partial_abs).max(0.0);
    Ok(MomentEstimate { value, max_total, tail_bound })
}

/// A quadrature value of the `|Z|^2` density.
#[derive(Debug, Clone)]
pub struct DensityAbsZ2 {
    pub value: f64,
    /// Difference between the K-node and 2K-node grids.
    pub error_estimate: f64,
    pub points_per_dim: usize,
}

/// Density of `|Z|^2` at `t`, computed from the weight by gauge-reduced
/// periodic trapezoid quadrature of the torus representation:
/// `det(I - Q) e^{-sum t} * avg_theta exp{ sum sqrt(t_j t_l) q_jl e^{i(theta_l - theta_j)} }`.
pub fn density_f_abs_z2(q: &WeightMatrix, t: &[f64], points_per_dim: usize) -> Result<DensityAbsZ2> {
    if !q.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    q.require_integrable()?;
    let n = q.n();
    if t.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: t.len() });
    }
    if t.iter().any(|&x| x < 0.0) {
        return Err(Error::NegativePoint);
    }
    let det = green(q)?.det_i_minus_q().re;
    let exp_t = (-t.iter().sum::<f64>()).exp();
    let coarse = torus::exp_sum(q.matrix(), t, &ReducedGrid::new(n, points_per_dim)?);
    let fine = torus::exp_sum(q.matrix(), t, &ReducedGrid::new(n, 2 * points_per_dim)?);
    let scale = det * exp_t;
    let value = scale * fine.re;
    assert!(
        fine.im.abs() <= 1e-8 * fine.norm().max(1.0),
        "torus integral of a Hermitian weight came out complex: {}",
        fine.im
    );
    Ok(DensityAbsZ2 {
        value,
        error_estimate: (fine - coarse).norm() * scale.abs(),
        points_per_dim,
    })
}

/// Compares the truncated occupation density series against the quadrature
/// of the `|Z|^2` density on a grid of points.
///
/// A point passes when the discrepancy is within the certified series tail
/// plus the quadrature estimate (plus a fixed 1e-12 float allowance).
pub fn verify_isomorphism(
    q: &WeightMatrix,
    grid_axes: &[Vec<f64>],
    max_total: u64,
    points_per_dim: usize,
) -> Result<VerificationReport> {
    let n = q.n();
    if grid_axes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid_axes.len() });
    }
    let mut report = VerificationReport::new(
        String::from("isomorphism"),
        format!("max_total={max_total} quad={points_per_dim}"),
    );
    let mut point = Vec::with_capacity(n);
    verify_grid_rec(q, grid_axes, max_total, points_per_dim, &mut point, &mut report)?;
    Ok(report)
}

fn verify_grid_rec(
    q: &WeightMatrix,
    axes: &[Vec<f64>],
    max_total: u64,
    points_per_dim: usize,
    point: &mut Vec<f64>,
    report: &mut VerificationReport,
) -> Result<()> {
    if point.len() == axes.len() {
        let series = occupation_density_series(q, point, max_total)?;
        let quad = density_f_abs_z2(q, point, points_per_dim)?;
        let disc = (series.value - Complex64::new(quad.value, 0.0)).norm();
        let bound = series.tail_bound + quad.error_estimate + 1e-12;
        report.push(Check::compare(
            format!("t={point:?}"),
            format!("{}", series.value.re),
            quad.value.to_string(),
            disc,
            bound,
        ));
        return Ok(());
    }
    for &x in &axes[point.len()] {
        point.push(x);
        verify_grid_rec(q, axes, max_total, points_per_dim, point, report)?;
        point.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_known_values() {
        let field = Gff::from_covariance(CMatrix::identity(1)).unwrap();
        let pi = core::f64::consts::PI;
        assert!((field.density(&[c(0.0, 0.0)]).unwrap() - 1.0 / pi).abs() < 1e-14);
        assert!(
            (field.density(&[c(1.0, 0.0)]).unwrap() - (-1.0f64).exp() / pi).abs() < 1e-14
        );

        let pair = Gff::from_weight(&presets::hermitian_pair()).unwrap();
        let at_zero = pair.density(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((at_zero - 0.75 / (pi * pi)).abs() < 1e-13);
    }

    #[test]
    fn from_weight_requires_hermitian() {
        let q = presets::substochastic_triple();
        assert!(matches!(Gff::from_weight(&q), Err(Error::NotHermitian)));
    }

    #[test]
    fn from_covariance_rejects_indefinite() {
        let mut g = CMatrix::identity(2);
        g.set(1, 1, c(-2.0, 0.0));
        assert!(matches!(Gff::from_covariance(g), Err(Error::NotHermitianPd)));
    }

    #[test]
    fn factor_reconstructs_covariance() {
        let field = Gff::from_weight(&presets::hermitian_pair()).unwrap();
        let a = field.factor();
        let rec = a.mul(&a.conj_transpose());
        assert!(rec.sub(field.covariance()).max_abs_entry() < 1e-10);
    }

    #[test]
    fn real_embedding_blocks() {
        let id = Gff::from_covariance(CMatrix::identity(2)).unwrap();
        let e = id.real_embedding();
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert_eq!(e.get(a, b), want);
            }
        }

        let field = Gff::from_weight(&presets::hermitian_pair()).unwrap();
        let e = field.real_embedding();
        let s = 1.0 / 0.75;
        assert!((e.get(0, 1) - 0.3 * s).abs() < 1e-13);
        assert!((e.get(0, 3) + 0.4 * s).abs() < 1e-13);
        assert!((e.get(2, 1) - 0.4 * s).abs() < 1e-13);
        // The imaginary block is antisymmetric.
        for u in 0..2 {
            for v in 0..2 {
                assert!((e.get(2 + u, v) + e.get(2 + v, u)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn permanent_small_cases() {
        assert_eq!(permanent(&CMatrix::identity(3)).unwrap(), c(1.0, 0.0));
        let m = CMatrix::from_data(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        assert!((permanent(&m).unwrap() - c(10.0, 0.0)).norm() < 1e-13);
        let g = green(&presets::hermitian_pair()).unwrap();
        let p = permanent(g.matrix()).unwrap();
        let want = (1.0 / 0.75f64).powi(2) * 1.25;
        assert!((p - c(want, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn permanent_size_cap() {
        let m = CMatrix::identity(13);
        assert!(matches!(permanent(&m), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn moment_zero_weight() {
        let q = WeightMatrix::zero(2);
        let m = moment_from_currents(&q, &[0, 1], 5).unwrap();
        assert!((m.value - c(1.0, 0.0)).norm() < 1e-14);
        assert!(m.tail_bound < 1e-12);
    }

    #[test]
    fn moment_scalar_green() {
        // sum_k (k+1) 0.5^{k+1} = 2 = G_11.
        let q = presets::singleton_half();
        let m = moment_from_currents(&q, &[0], 60).unwrap();
        assert!((m.value - c(2.0, 0.0)).norm() < 1e-12);
        assert!(m.tail_bound < 1e-10);
    }

    #[test]
    fn nonneg_moment_series_sums_to_permanent_without_symmetry() {
        // The tail bounds lean on the moment series of a nonnegative weight
        // summing to the permanent of its Green submatrix even when the
        // weight is not symmetric; check it against a deep partial sum.
        let rows = [[0.10, 0.28], [0.05, 0.15]];
        let q = WeightMatrix::from_fn(2, |u, v| c(rows[u][v], 0.0));
        assert!(!q.is_hermitian());
        let g = green(&q).unwrap();
        for subset in [&[0usize][..], &[1], &[0, 1]] {
            let m = moment_from_currents(&q, subset, 60).unwrap();
            let p = permanent(&submatrix(g.matrix(), subset)).unwrap();
            assert!(
                (m.value - p).norm() < 1e-10,
                "subset {subset:?}: {} vs {}",
                m.value,
                p
            );
        }
    }

    #[test]
    fn moment_matches_permanent_on_hermitian_pair() {
        let q = presets::hermitian_pair();
        let g = green(&q).unwrap();
        for subset in [&[0usize][..], &[1], &[0, 1]] {
            let m = moment_from_currents(&q, subset, 24).unwrap();
            let p = permanent(&submatrix(g.matrix(), subset)).unwrap();
            assert!(
                (m.value - p).norm() <= m.tail_bound + 1e-9,
                "subset {subset:?}: {} vs {}",
                m.value,
                p
            );
        }
    }

    #[test]
    fn abs_z2_density_zero_weight() {
        let q = WeightMatrix::zero(2);
        let d = density_f_abs_z2(&q, &[0.7, 1.9], 16).unwrap();
        assert!((d.value - (-2.6f64).exp()).abs() < 1e-14);
        assert!(d.error_estimate < 1e-14);
    }

    #[test]
    fn abs_z2_density_scalar_closed_form() {
        let q = presets::singleton_half();
        for &t in &[0.5, 1.0, 2.0] {
            let d = density_f_abs_z2(&q, &[t], 8).unwrap();
            let want = 0.5 * (-0.5 * t).exp();
            assert!((d.value - want).abs() < 1e-13);
        }
    }

    #[test]
    fn isomorphism_on_hermitian_pair_grid() {
        let q = presets::hermitian_pair();
        let axes = vec![vec![0.5, 1.0, 2.0], vec![0.5, 1.0, 2.0]];
        let report = verify_isomorphism(&q, &axes, 20, 64).unwrap();
        assert_eq!(report.checks.len(), 9);
        assert!(report.passed(), "failures: {:?}", report.failures().collect::<Vec<_>>());
        assert!(report.max_discrepancy() < 1e-6);
    }
}
