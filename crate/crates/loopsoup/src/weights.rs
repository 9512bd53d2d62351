//! Complex edge weights on the complete digraph and their Green's functions.
//!
//! A weight matrix `Q` is *integrable* when the spectral radius of its
//! entrywise absolute value is below one; all loop and path series then
//! converge absolutely and `G = (I - Q)^{-1}` exists. Vertex order is the
//! input order everywhere; reordering is an explicit permutation, never
//! implicit.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lu, spectral_radius_nonneg, CMatrix, RMatrix};

/// Tolerance for the Hermitian predicate.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// Complex weight matrix over vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    mat: CMatrix,
}

impl WeightMatrix {
    /// Builds a weight matrix from row-major entries; `data.len()` must be
    /// `n * n` and `n` must be positive.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(WeightMatrix { mat: CMatrix::from_data(n, data)? })
    }

    pub fn zero(n: usize) -> Self {
        WeightMatrix { mat: CMatrix::zeros(n) }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        WeightMatrix { mat: CMatrix::from_fn(n, f) }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.mat.n()
    }

    #[inline]
    pub fn entry(&self, u: usize, v: usize) -> Complex64 {
        self.mat.get(u, v)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Entrywise absolute values `|Q|`.
    pub fn abs(&self) -> RMatrix {
        self.mat.abs()
    }

    /// Spectral radius of `|Q|`.
    pub fn spectral_radius_abs(&self) -> f64 {
        spectral_radius_nonneg(&self.abs())
    }

    /// `rho(|Q|) < 1` with the default zero margin.
    pub fn is_integrable(&self) -> bool {
        self.is_integrable_with_margin(0.0)
    }

    /// `rho(|Q|) < 1 - margin`.
    pub fn is_integrable_with_margin(&self, margin: f64) -> bool {
        self.spectral_radius_abs() < 1.0 - margin
    }

    /// `q_uv = conj(q_vu)` within [`HERMITIAN_TOL`].
    pub fn is_hermitian(&self) -> bool {
        self.mat.hermitian_defect() <= HERMITIAN_TOL
    }

    /// Row sums, the per-vertex total outgoing weight.
    pub fn row_sums(&self) -> Vec<Complex64> {
        (0..self.n())
            .map(|u| (0..self.n()).map(|v| self.entry(u, v)).sum())
            .collect()
    }

    /// Restriction `Q_U` to an ordered vertex subset.
    pub fn restrict(&self, subset: &[usize]) -> Result<WeightMatrix> {
        let n = self.n();
        if subset.is_empty() || subset.iter().any(|&u| u >= n) {
            return Err(Error::BadSubset);
        }
        for (i, &u) in subset.iter().enumerate() {
            if subset[..i].contains(&u) {
                return Err(Error::BadSubset);
            }
        }
        Ok(WeightMatrix {
            mat: CMatrix::from_fn(subset.len(), |a, b| self.entry(subset[a], subset[b])),
        })
    }

    /// Permutation similarity: vertex `j` of the result is vertex `order[j]`
    /// of `self`. `order` must be a permutation of `0..n`.
    pub fn permuted(&self, order: &[usize]) -> Result<WeightMatrix> {
        let n = self.n();
        if order.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: order.len() });
        }
        let mut seen = alloc::vec![false; n];
        for &u in order {
            if u >= n || seen[u] {
                return Err(Error::BadSubset);
            }
            seen[u] = true;
        }
        Ok(WeightMatrix {
            mat: CMatrix::from_fn(n, |a, b| self.entry(order[a], order[b])),
        })
    }

    /// Errors with [`Error::NotIntegrable`] unless `rho(|Q|) < 1`; returns
    /// the spectral radius for reuse in tail bounds.
    pub fn require_integrable(&self) -> Result<f64> {
        let rho = self.spectral_radius_abs();
        if rho < 1.0 {
            Ok(rho)
        } else {
            Err(Error::NotIntegrable { rho })
        }
    }
}

/// Green's function `G = (I - Q)^{-1}` together with `det(I - Q)`.
#[derive(Debug, Clone)]
pub struct Green {
    mat: CMatrix,
    det_i_minus_q: Complex64,
}

impl Green {
    #[inline]
    pub fn n(&self) -> usize {
        self.mat.n()
    }

    #[inline]
    pub fn entry(&self, u: usize, v: usize) -> Complex64 {
        self.mat.get(u, v)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn det_i_minus_q(&self) -> Complex64 {
        self.det_i_minus_q
    }

    /// `det G = 1 / det(I - Q)`.
    pub fn det_g(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) / self.det_i_minus_q
    }

    /// Max-entry norm of `(I - Q) G - I`.
    pub fn residual(&self, q: &WeightMatrix) -> f64 {
        let n = self.n();
        let i_minus_q = CMatrix::from_fn(n, |u, v| {
            let d = if u == v { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            d - q.entry(u, v)
        });
        i_minus_q.mul(&self.mat).sub(&CMatrix::identity(n)).max_abs_entry()
    }
}

/// Computes the Green's function of an integrable weight by LU factorization
/// of `I - Q`.
pub fn green(q: &WeightMatrix) -> Result<Green> {
    q.require_integrable()?;
    let n = q.n();
    let i_minus_q = CMatrix::from_fn(n, |u, v| {
        let d = if u == v { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        d - q.entry(u, v)
    });
    let f = lu(&i_minus_q)?;
    Ok(Green { mat: f.inverse(), det_i_minus_q: f.det() })
}
