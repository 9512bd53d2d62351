//! Paths, rooted and unrooted loops, local times, currents, and the loop
//! measure.
//!
//! A rooted loop is a path returning to its start; an unrooted loop is the
//! cyclic-rotation class of a nontrivial rooted loop, represented canonically
//! by the lexicographically least rotation of its vertex word. The
//! multiplicity `d` of a class is the number of identical primitive loops a
//! representative concatenates.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weights::WeightMatrix;

/// Per-vertex visit counts (visits at time zero are not counted).
pub type LocalTime = Vec<u64>;

/// A path: a nonempty sequence of vertex indices. Its length is the number
/// of edges, one less than the number of vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    verts: Vec<usize>,
}

impl Path {
    pub fn new(verts: Vec<usize>) -> Result<Self> {
        if verts.is_empty() {
            return Err(Error::BadInput(alloc::string::String::from(
                "a path needs at least one vertex",
            )));
        }
        Ok(Path { verts })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.verts.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> &[usize] {
        &self.verts
    }

    pub fn is_loop(&self) -> bool {
        self.verts.first() == self.verts.last()
    }
}

/// A rooted loop: a path whose first and last vertices coincide. Length zero
/// (the trivial loop) is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootedLoop {
    verts: Vec<usize>,
}

impl RootedLoop {
    pub fn new(verts: Vec<usize>) -> Result<Self> {
        if verts.is_empty() || verts.first() != verts.last() {
            return Err(Error::BadInput(alloc::string::String::from(
                "a rooted loop must start and end at the same vertex",
            )));
        }
        Ok(RootedLoop { verts })
    }

    pub fn trivial(v: usize) -> Self {
        RootedLoop { verts: vec![v] }
    }

    /// Builds the closed walk `word[0] -> word[1] -> ... -> word[0]` from a
    /// nonempty cyclic vertex word.
    pub fn from_word(word: &[usize]) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::TrivialLoop);
        }
        let mut verts = word.to_vec();
        verts.push(word[0]);
        Ok(RootedLoop { verts })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.verts.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn root(&self) -> usize {
        self.verts[0]
    }

    pub fn vertices(&self) -> &[usize] {
        &self.verts
    }

    pub fn as_path(&self) -> Path {
        Path { verts: self.verts.clone() }
    }

    /// The cyclic vertex word: all vertices except the repeated final one.
    pub fn word(&self) -> &[usize] {
        &self.verts[..self.verts.len() - 1]
    }
}

/// An unrooted loop: a cyclic-rotation class with canonical word and
/// multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnrootedLoop {
    word: Vec<usize>,
    multiplicity: u64,
}

impl UnrootedLoop {
    /// Canonical cyclic word (lexicographically least rotation).
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.word.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest `d` such that the loop is a `d`-fold concatenation of one
    /// primitive loop.
    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// The canonical rooted representative.
    pub fn representative(&self) -> RootedLoop {
        RootedLoop::from_word(&self.word).unwrap()
    }

    /// Whether some representative visits `v`.
    pub fn visits(&self, v: usize) -> bool {
        self.word.contains(&v)
    }
}

/// Canonicalizes a nontrivial rooted loop into its rotation class.
pub fn canonicalize(rooted: &RootedLoop) -> Result<UnrootedLoop> {
    if rooted.is_empty() {
        return Err(Error::TrivialLoop);
    }
    let word = rooted.word();
    let k = word.len();
    let mut best = 0usize;
    for start in 1..k {
        for j in 0..k {
            let a = word[(start + j) % k];
            let b = word[(best + j) % k];
            if a != b {
                if a < b {
                    best = start;
                }
                break;
            }
        }
    }
    let canonical: Vec<usize> = (0..k).map(|j| word[(best + j) % k]).collect();
    // Primitive period: smallest divisor p of k with word equal to its
    // p-shift; d = k / p.
    let mut period = k;
    for p in 1..=k / 2 {
        if !k.is_multiple_of(p) {
            continue;
        }
        if (0..k).all(|j| canonical[j] == canonical[(j + p) % k]) {
            period = p;
            break;
        }
    }
    Ok(UnrootedLoop { word: canonical, multiplicity: (k / period) as u64 })
}

/// Directed edge crossing counts of a path, as a raw row-major `n * n`
/// matrix. For a rooted loop the result conserves flow.
pub fn edge_local_time(path: &Path, n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n * n];
    let verts = path.vertices();
    for step in verts.windows(2) {
        counts[step[0] * n + step[1]] += 1;
    }
    counts
}

/// Per-vertex visit counts of a path, not counting the visit at time zero.
pub fn vertex_local_time(path: &Path, n: usize) -> LocalTime {
    let mut counts = vec![0u64; n];
    for &v in &path.vertices()[1..] {
        counts[v] += 1;
    }
    counts
}

/// Product of edge weights along a path; one on trivial loops.
pub fn path_weight(q: &WeightMatrix, path: &Path) -> Complex64 {
    let mut w = Complex64::new(1.0, 0.0);
    for step in path.vertices().windows(2) {
        w *= q.entry(step[0], step[1]);
    }
    w
}

/// A directed current: a nonnegative integer matrix whose row and column
/// sums agree at every vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Current {
    n: usize,
    counts: Vec<u64>,
}

impl Current {
    pub fn zero(n: usize) -> Self {
        Current { n, counts: vec![0; n * n] }
    }

    /// Validates flow conservation of a raw count matrix.
    pub fn from_counts(n: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: counts.len() });
        }
        if !flow_conserved(&counts, n) {
            return Err(Error::NotACurrent);
        }
        Ok(Current { n, counts })
    }

    /// The edge local time of a rooted loop, which always conserves flow.
    pub fn of_loop(rooted: &RootedLoop, n: usize) -> Self {
        let counts = edge_local_time(&rooted.as_path(), n);
        debug_assert!(flow_conserved(&counts, n));
        Current { n, counts }
    }

    pub fn of_unrooted(l: &UnrootedLoop, n: usize) -> Self {
        Self::of_loop(&l.representative(), n)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, u: usize, v: usize) -> u64 {
        self.counts[u * self.n + v]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of edge crossings.
    pub fn total_mass(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Vertex local time `n_u = (1/2) sum_v (C_uv + C_vu)`, which equals the
    /// common row/column sum at `u`.
    pub fn local_time(&self) -> LocalTime {
        (0..self.n)
            .map(|u| (0..self.n).map(|v| self.entry(u, v)).sum())
            .collect()
    }

    pub fn plus(&self, other: &Current) -> Result<Current> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(Current { n: self.n, counts })
    }

    /// Relabels vertices: entry `(a, b)` of the result is entry
    /// `(order[a], order[b])` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Current> {
        if order.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: order.len() });
        }
        let mut counts = vec![0u64; self.n * self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                counts[a * self.n + b] = self.entry(order[a], order[b]);
            }
        }
        Ok(Current { n: self.n, counts })
    }
}

pub(crate) fn flow_conserved(counts: &[u64], n: usize) -> bool {
    (0..n).all(|u| {
        let row: u64 = (0..n).map(|v| counts[u * n + v]).sum();
        let col: u64 = (0..n).map(|v| counts[v * n + u]).sum();
        row == col
    })
}

/// `q(C) = prod q_uv^{C_uv}` with the convention `0^0 = 1`.
pub fn current_weight(q: &WeightMatrix, current: &Current) -> Complex64 {
    let n = current.n();
    let mut w = Complex64::new(1.0, 0.0);
    for u in 0..n {
        for v in 0..n {
            let c = current.entry(u, v);
            if c > 0 {
                w *= q.entry(u, v).powu(c as u32);
            }
        }
    }
    w
}

/// The unrooted loop measure `m(l) = q(l) / d(l)`.
pub fn loop_measure(q: &WeightMatrix, l: &UnrootedLoop) -> Complex64 {
    let rep = l.representative();
    path_weight(q, &rep.as_path()) / Complex64::new(l.multiplicity() as f64, 0.0)
}
