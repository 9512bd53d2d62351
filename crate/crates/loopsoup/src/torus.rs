//! Quadrature over the angular torus for integrands that depend only on
//! angle differences.
//!
//! The integrands arising here are entire and periodic, so the equispaced
//! (periodic trapezoid) rule converges spectrally and is exact on
//! trigonometric polynomials of degree below the node count. Because the
//! integrand is invariant under a common shift of all angles, one angle is
//! fixed at zero and its integral contributes a plain factor, reducing an
//! N-dimensional grid to an (N-1)-dimensional one.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Node budget for a single reduced grid.
pub const DEFAULT_NODE_BUDGET: u128 = 1 << 26;

/// Precomputed reduced quadrature grid: for each node, the unit phases
/// `exp(i theta_j)` with the first angle pinned to zero.
pub struct ReducedGrid {
    n: usize,
    points_per_dim: usize,
    nodes: Vec<Complex64>,
}

impl ReducedGrid {
    pub fn new(n: usize, points_per_dim: usize) -> Result<Self> {
        Self::with_budget(n, points_per_dim, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(n: usize, points_per_dim: usize, budget: u128) -> Result<Self> {
        if n == 0 || points_per_dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let count = (points_per_dim as u128).pow(n as u32 - 1);
        if count.saturating_mul(n as u128) > budget {
            return Err(Error::QuadratureBudget {
                nodes: count.saturating_mul(n as u128),
                budget,
            });
        }
        let k = points_per_dim;
        let unit: Vec<Complex64> = (0..k)
            .map(|j| {
                let theta = 2.0 * core::f64::consts::PI * j as f64 / k as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let total = count as usize;
        let mut nodes = Vec::with_capacity(total * n);
        let mut index = vec![0usize; n.saturating_sub(1)];
        for _ in 0..total {
            nodes.push(Complex64::new(1.0, 0.0));
            for &i in index.iter() {
                nodes.push(unit[i]);
            }
            for slot in index.iter_mut() {
                *slot += 1;
                if *slot < k {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(ReducedGrid { n, points_per_dim, nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() / self.n
    }

    /// Average of `f` over the reduced grid; equals the normalized torus
    /// integral of any gauge-invariant integrand once the rule resolves it.
    pub fn average(&self, mut f: impl FnMut(&[Complex64]) -> Complex64) -> Complex64 {
        let count = self.node_count();
        let mut acc = Complex64::new(0.0, 0.0);
        for node in 0..count {
            acc += f(&self.nodes[node * self.n..(node + 1) * self.n]);
        }
        acc / Complex64::new(count as f64, 0.0)
    }
}

/// Normalized torus integral of
/// `exp( sum_{j,l} sqrt(t_j t_l) m_jl exp(i(theta_l - theta_j)) )`,
/// the generating integrand of the current series of `m` at the point `t`.
pub fn exp_sum(m: &CMatrix, t: &[f64], grid: &ReducedGrid) -> Complex64 {
    let n = m.n();
    debug_assert_eq!(grid.n(), n);
    let coef = CMatrix::from_fn(n, |j, l| m.get(j, l).scale((t[j] * t[l]).sqrt()));
    grid.average(|phases| {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for l in 0..n {
                let c = coef.get(j, l);
                if c != Complex64::new(0.0, 0.0) {
                    s += c * phases[l] * phases[j].conj();
                }
            }
        }
        s.exp()
    })
}

/// [`exp_sum`] with node doubling until two levels agree to `rel_tol`;
/// returns the finer value and the last inter-level difference as an error
/// estimate.
pub fn exp_sum_converged(
    m: &CMatrix,
    t: &[f64],
    start_points: usize,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    let mut k = start_points.max(4);
    let mut prev = exp_sum(m, t, &ReducedGrid::new(m.n(), k)?);
    loop {
        k *= 2;
        let grid = ReducedGrid::new(m.n(), k)?;
        let cur = exp_sum(m, t, &grid);
        let diff = (cur - prev).norm();
        if diff <= rel_tol * cur.norm().max(1.0) || k >= 4096 {
            return Ok((cur, diff));
        }
        prev = cur;
    }
}

/// Quadrature value of the normalized torus integral of
/// `prod_{j,l} exp(i C_jl (theta_l - theta_j))`, which is one exactly when
/// the count matrix conserves flow and zero otherwise. With per-vertex net
/// flux below `points_per_dim` in modulus the rule is exact.
pub fn current_indicator(counts: &[u64], n: usize, grid: &ReducedGrid) -> Complex64 {
    debug_assert_eq!(counts.len(), n * n);
    debug_assert_eq!(grid.n(), n);
    grid.average(|phases| {
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..n {
            for l in 0..n {
                let c = counts[j * n + l];
                if c > 0 {
                    prod *= (phases[l] * phases[j].conj()).powu(c as u32);
                }
            }
        }
        prod
    })
}
