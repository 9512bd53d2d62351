//! Small dense matrix kernels: complex LU, Cholesky, Hermitian Jacobi
//! eigensolver, and the spectral radius of nonnegative matrices.
//!
//! Everything here targets desk-scale instances (N up to a few dozen); the
//! algorithms are chosen for robustness and determinism, not asymptotics.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_data(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                data.push(f(u, v));
            }
        }
        CMatrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: Complex64) {
        self.data[u * self.n + v] = value;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.n, |u, v| self.get(u, v) - other.get(u, v))
    }

    pub fn conj_transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |u, v| self.get(v, u).conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |u, v| self.get(u, v).conj())
    }

    /// Entrywise absolute values.
    pub fn abs(&self) -> RMatrix {
        RMatrix { n: self.n, data: self.data.iter().map(|z| z.norm()).collect() }
    }

    /// Maximum row sum of entry moduli.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|u| (0..self.n).map(|v| self.get(u, v).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry, `max |a_uv - conj(a_vu)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for u in 0..self.n {
            for v in u..self.n {
                let d = (self.get(u, v) - self.get(v, u).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|u| (0..self.n).map(|v| self.get(u, v) * x[v]).sum())
            .collect()
    }
}

/// Dense row-major real matrix; used for `|Q|` work and real embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(n: usize) -> Self {
        RMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                data.push(f(u, v));
            }
        }
        RMatrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.data[u * self.n + v] = value;
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        let n = self.n;
        let mut out = RMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> RMatrix {
        RMatrix { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|u| (0..self.n).map(|v| self.get(u, v).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |u, v| Complex64::new(self.get(u, v), 0.0))
    }

    /// `self^k` by repeated multiplication.
    pub fn pow(&self, k: usize) -> RMatrix {
        let mut out = RMatrix::from_fn(self.n, |u, v| if u == v { 1.0 } else { 0.0 });
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

/// Spectral radius of an entrywise-nonnegative matrix via Gelfand's formula
/// with repeated squaring: `rho = lim ||A^{2^k}||^{1/2^k}`.
///
/// Each squaring doubles the exponent, so the k-th estimate carries an error
/// of order `log(2^k)/2^k`; sixty squarings put it far below 1e-12 relative
/// for every matrix, including defective and periodic ones where plain power
/// iteration stalls. Estimates are upper bounds throughout because
/// `||A^m||^{1/m} >= rho` for the row-sum norm.
pub fn spectral_radius_nonneg(a: &RMatrix) -> f64 {
    let s = a.inf_norm();
    if s == 0.0 {
        return 0.0;
    }
    let mut b = a.scaled(1.0 / s);
    let mut log_acc = s.ln();
    let mut est = log_acc;
    let mut pow = 1.0f64;
    let mut stable = 0;
    for _ in 0..80 {
        b = b.mul(&b);
        pow *= 2.0;
        let u = b.inf_norm();
        if u == 0.0 {
            // A^{2^k} vanished: nilpotent.
            return 0.0;
        }
        log_acc = 2.0 * log_acc + u.ln();
        b = b.scaled(1.0 / u);
        let new_est = log_acc / pow;
        if (new_est - est).abs() <= 1e-14 * est.abs().max(1.0) {
            stable += 1;
            if stable >= 2 {
                est = new_est;
                break;
            }
        } else {
            stable = 0;
        }
        est = new_est;
    }
    est.exp()
}

/// LU factorization with partial pivoting of a complex matrix.
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    parity: f64,
}

pub fn lu(a: &CMatrix) -> Result<Lu> {
    let n = a.n();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = m.get(col, col).norm();
        for row in col + 1..n {
            let v = m.get(row, col).norm();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                let a = m.get(col, j);
                let b = m.get(pivot, j);
                m.set(col, j, b);
                m.set(pivot, j, a);
            }
            perm.swap(col, pivot);
            parity = -parity;
        }
        let d = m.get(col, col);
        for row in col + 1..n {
            let factor = m.get(row, col) / d;
            m.set(row, col, factor);
            for j in col + 1..n {
                let cur = m.get(row, j);
                m.set(row, j, cur - factor * m.get(col, j));
            }
        }
    }
    Ok(Lu { lu: m, perm, parity })
}

impl Lu {
    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(self.parity, 0.0);
        for i in 0..self.lu.n() {
            d *= self.lu.get(i, i);
        }
        d
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let f = self.lu.get(i, j) * x[j];
                x[i] -= f;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let f = self.lu.get(i, j) * x[j];
                x[i] -= f;
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.lu.n();
        let mut out = CMatrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for col in 0..n {
            e[col] = Complex64::new(1.0, 0.0);
            let x = self.solve(&e);
            for (row, value) in x.into_iter().enumerate() {
                out.set(row, col, value);
            }
            e[col] = Complex64::new(0.0, 0.0);
        }
        out
    }
}

/// Lower-triangular `L` with `L L* = A` for Hermitian positive definite `A`.
pub fn cholesky_lower(a: &CMatrix) -> Result<CMatrix> {
    let n = a.n();
    let scale = a.max_abs_entry().max(1e-300);
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d <= 1e-14 * scale {
            return Err(Error::NotHermitianPd);
        }
        let ljj = d.sqrt();
        l.set(j, j, Complex64::new(ljj, 0.0));
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(l)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix via cyclic complex
/// Jacobi rotations. Returns `(values, vectors)` with eigenvectors in the
/// columns, sorted by ascending eigenvalue.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.n();
    if a.hermitian_defect() > 1e-10 * a.max_abs_entry().max(1.0) {
        return Err(Error::NotHermitianPd);
    }
    let mut m = a.clone();
    let mut vecs = CMatrix::identity(n);
    let scale = a.max_abs_entry().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    let sign = if tau > 0.0 { 1.0 } else { -1.0 };
                    1.0 / (tau + sign * (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns p,q are mixed by the unitary
                //   [ c        -s*phase ]
                //   [ s*conj(phase)  c  ]
                let sp = phase.scale(s);
                for i in 0..n {
                    let aip = m.get(i, p);
                    let aiq = m.get(i, q);
                    m.set(i, p, aip.scale(c) + aiq * sp.conj());
                    m.set(i, q, aiq.scale(c) - aip * sp);
                    let vip = vecs.get(i, p);
                    let viq = vecs.get(i, q);
                    vecs.set(i, p, vip.scale(c) + viq * sp.conj());
                    vecs.set(i, q, viq.scale(c) - vip * sp);
                }
                for j in 0..n {
                    let apj = m.get(p, j);
                    let aqj = m.get(q, j);
                    m.set(p, j, apj.scale(c) + aqj * sp);
                    m.set(q, j, aqj.scale(c) - apj * sp.conj());
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evs: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| evs[i].partial_cmp(&evs[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| evs[i]).collect();
    let vectors = CMatrix::from_fn(n, |row, col| vecs.get(row, order[col]));
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_radius_of_zero_and_scalar() {
        assert_eq!(spectral_radius_nonneg(&RMatrix::zeros(3)), 0.0);
        let m = RMatrix::from_fn(1, |_, _| 0.5);
        assert!((spectral_radius_nonneg(&m) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn spectral_radius_of_periodic_matrix() {
        // [[0, 0.5], [0.5, 0]] has eigenvalues +-0.5; power iteration on a
        // vector oscillates here, squaring does not.
        let m = RMatrix::from_fn(2, |u, v| if u != v { 0.5 } else { 0.0 });
        assert!((spectral_radius_nonneg(&m) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn spectral_radius_of_defective_matrix() {
        // Jordan block with eigenvalue 0.5.
        let mut m = RMatrix::zeros(2);
        m.set(0, 0, 0.5);
        m.set(0, 1, 1.0);
        m.set(1, 1, 0.5);
        assert!((spectral_radius_nonneg(&m) - 0.5).abs() < 1e-12);
        // Nilpotent.
        let mut nil = RMatrix::zeros(2);
        nil.set(0, 1, 1.0);
        assert_eq!(spectral_radius_nonneg(&nil), 0.0);
    }

    #[test]
    fn lu_det_and_solve() {
        let a = CMatrix::from_data(
            2,
            vec![c(1.0, 0.0), c(-0.3, -0.4), c(-0.3, 0.4), c(1.0, 0.0)],
        )
        .unwrap();
        let f = lu(&a).unwrap();
        let det = f.det();
        assert!((det - c(0.75, 0.0)).norm() < 1e-14);
        let inv = f.inverse();
        let prod = a.mul(&inv);
        assert!(prod.sub(&CMatrix::identity(2)).max_abs_entry() < 1e-14);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = CMatrix::from_data(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        assert!(matches!(lu(&a), Err(Error::Singular)));
    }

    #[test]
    fn cholesky_reconstructs() {
        // G = (I - Q)^{-1} for the Hermitian pair weight, scaled by hand.
        let g = CMatrix::from_data(
            2,
            vec![
                c(1.0 / 0.75, 0.0),
                c(0.3 / 0.75, 0.4 / 0.75),
                c(0.3 / 0.75, -0.4 / 0.75),
                c(1.0 / 0.75, 0.0),
            ],
        )
        .unwrap();
        let l = cholesky_lower(&g).unwrap();
        let rec = l.mul(&l.conj_transpose());
        assert!(rec.sub(&g).max_abs_entry() < 1e-13);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = CMatrix::identity(2);
        a.set(1, 1, c(-1.0, 0.0));
        assert!(matches!(cholesky_lower(&a), Err(Error::NotHermitianPd)));
    }

    #[test]
    fn jacobi_eigenvalues_of_hermitian_pair_green() {
        let g = CMatrix::from_data(
            2,
            vec![
                c(1.0 / 0.75, 0.0),
                c(0.3 / 0.75, 0.4 / 0.75),
                c(0.3 / 0.75, -0.4 / 0.75),
                c(1.0 / 0.75, 0.0),
            ],
        )
        .unwrap();
        let (vals, vecs) = hermitian_eigen(&g).unwrap();
        assert!((vals[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        // Residual ||G v - lambda v|| for each column.
        for col in 0..2 {
            let v: Vec<Complex64> = (0..2).map(|r| vecs.get(r, col)).collect();
            let gv = g.matvec(&v);
            for r in 0..2 {
                assert!((gv[r] - v[r].scale(vals[col])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_on_diagonal_matrix() {
        let mut d = CMatrix::zeros(3);
        d.set(0, 0, c(3.0, 0.0));
        d.set(1, 1, c(1.0, 0.0));
        d.set(2, 2, c(2.0, 0.0));
        let (vals, _) = hermitian_eigen(&d).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }
}
