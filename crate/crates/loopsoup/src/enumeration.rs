//! Exhaustive exact oracles: loop inventories, truncated loop-measure sums,
//! brute-force current distributions for the bubble soup and the loop soup,
//! the two combinatorial identities, and the sequence/loop bijection.
//!
//! Everything here trades efficiency for independence: these routines verify
//! the closed forms elsewhere in the crate by direct enumeration, in exact
//! integer or rational arithmetic wherever weights do not enter. Enumeration
//! order is always deterministic (length, then lexicographic).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::loops::{canonicalize, loop_measure, Current, RootedLoop, UnrootedLoop};
use crate::weights::{green, WeightMatrix};

/// Default cap on the number of rooted loops an inventory may hold.
pub const DEFAULT_LOOP_BUDGET: u128 = 10_000_000;

/// Default cap on recursion steps inside the exhaustive oracles.
pub const DEFAULT_ORACLE_BUDGET: u128 = 100_000_000;

/// Step meter for the exhaustive recursions.
struct Steps {
    used: u128,
    cap: u128,
}

impl Steps {
    fn new(cap: u128) -> Self {
        Steps { used: 0, cap }
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.cap
    }

    fn check(&self) -> Result<()> {
        if self.used > self.cap {
            Err(Error::BudgetExceeded { needed: self.used, budget: self.cap })
        } else {
            Ok(())
        }
    }
}

/// All rooted loops at a vertex inside a vertex set, up to a length cap.
#[derive(Debug, Clone)]
pub struct LoopInventory {
    pub root: usize,
    pub members: Vec<usize>,
    pub max_len: usize,
    pub loops: Vec<RootedLoop>,
}

/// Number of rooted loops of length `1..=max_len` inside a set of `m`
/// vertices on the complete digraph: `sum_k m^(k-1)`.
pub fn count_rooted_loops(m: usize, max_len: usize) -> u128 {
    let mut total = 0u128;
    let mut pow = 1u128;
    for _ in 1..=max_len {
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(m as u128);
    }
    total
}

/// Enumerates every rooted loop at `v` inside `members` of length
/// `1..=max_len`, ordered by length then lexicographically.
pub fn enumerate_loops(
    members: &[usize],
    v: usize,
    max_len: usize,
    budget: u128,
) -> Result<LoopInventory> {
    if !members.contains(&v) {
        return Err(Error::BadSubset);
    }
    let needed = count_rooted_loops(members.len(), max_len);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    let mut loops = Vec::new();
    let mut verts = Vec::with_capacity(max_len + 1);
    for k in 1..=max_len {
        verts.clear();
        verts.push(v);
        fill_loops(&sorted, v, k, &mut verts, &mut loops);
    }
    Ok(LoopInventory { root: v, members: sorted, max_len, loops })
}

fn fill_loops(
    members: &[usize],
    root: usize,
    target_len: usize,
    verts: &mut Vec<usize>,
    out: &mut Vec<RootedLoop>,
) {
    if verts.len() == target_len {
        verts.push(root);
        out.push(RootedLoop::new(verts.clone()).unwrap());
        verts.pop();
        return;
    }
    for &w in members {
        verts.push(w);
        fill_loops(members, root, target_len, verts, out);
        verts.pop();
    }
}

/// Partial sum of the loop measure over unrooted loops visiting `v` inside a
/// vertex set, with a certified bound on the omitted tail.
#[derive(Debug, Clone)]
pub struct TruncatedLogGreen {
    /// `sum of m(l)` over classes of length at most `max_len`.
    pub sum: Complex64,
    /// Upper bound on `sum of |m(l)|` over the omitted classes.
    pub tail_bound: f64,
    /// Number of distinct classes summed.
    pub classes: usize,
    pub max_len: usize,
}

impl TruncatedLogGreen {
    /// Bound on `|exp(full sum) - exp(partial sum)|` implied by the tail.
    pub fn exp_error_bound(&self) -> f64 {
        #[allow(unused_imports)]
        use num_traits::Float;
        self.sum.exp().norm() * (self.tail_bound.exp() - 1.0)
    }
}

/// Sums `m(l)` over unrooted loops visiting `v` in the set, of length at most
/// `max_len`, by grouping the rooted inventory into rotation classes. The
/// exponential of the full series is the Green's function diagonal, so the
/// partial sum plus its tail bound certifies `G_U(v, v)`.
pub fn truncated_log_green(
    q: &WeightMatrix,
    members: &[usize],
    v: usize,
    max_len: usize,
    budget: u128,
) -> Result<TruncatedLogGreen> {
    q.require_integrable()?;
    let restricted = q.restrict(members)?;
    let inventory = enumerate_loops(members, v, max_len, budget)?;
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut sum = Complex64::new(0.0, 0.0);
    for rooted in &inventory.loops {
        let class = canonicalize(rooted).unwrap();
        if seen.insert(class.word().to_vec()) {
            sum += loop_measure(q, &class);
        }
    }
    // Tail: the classes of length k visiting v are dominated by the rooted
    // loops at v of length k, so sum_{k>L} |m| <= sum_{k>L} (|Q_U|^k)_{vv}
    //      = (|Q_U|^{L+1} (I - |Q_U|)^{-1})_{vv}.
    let abs_sub = restricted.abs();
    let local = members.iter().position(|&u| u == v).unwrap();
    let tail_bound = nonneg_resolvent_tail(&abs_sub, local, max_len + 1)?;
    Ok(TruncatedLogGreen { sum, tail_bound, classes: seen.len(), max_len })
}

/// `(A^start (I - A)^{-1})_{vv}` for a nonnegative matrix with spectral
/// radius below one: the exact sum `sum_{k >= start} (A^k)_{vv}`.
fn nonneg_resolvent_tail(a: &RMatrix, v: usize, start: usize) -> Result<f64> {
    let n = a.n();
    let complex = a.to_complex();
    let i_minus = crate::linalg::CMatrix::from_fn(n, |i, j| {
        let d = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        d - complex.get(i, j)
    });
    let resolvent = crate::linalg::lu(&i_minus)?.inverse();
    let power = a.pow(start);
    let mut acc = 0.0;
    for k in 0..n {
        acc += power.get(v, k) * resolvent.get(k, v).re;
    }
    Ok(acc.max(0.0))
}

/// Exact bubble-soup mass of a current: enumerates every tuple of rooted
/// loops `(omega_j at v_j inside the suffix set V_j)` whose edge local times
/// sum to the current, and returns the total weight over `det G`.
pub fn nu_c_oracle_bubble(q: &WeightMatrix, current: &Current) -> Result<Complex64> {
    nu_c_oracle_bubble_with_budget(q, current, DEFAULT_ORACLE_BUDGET)
}

/// [`nu_c_oracle_bubble`] with an explicit step budget.
pub fn nu_c_oracle_bubble_with_budget(
    q: &WeightMatrix,
    current: &Current,
    budget: u128,
) -> Result<Complex64> {
    q.require_integrable()?;
    let n = q.n();
    if current.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: current.n() });
    }
    let det_g = green(q)?.det_g();
    let mut remaining: Vec<u64> = current.counts().to_vec();
    let mut total = Complex64::new(0.0, 0.0);
    let mut steps = Steps::new(budget);
    bubble_stage(q, n, 0, &mut remaining, Complex64::new(1.0, 0.0), &mut total, &mut steps);
    steps.check()?;
    Ok(total / det_g)
}

/// Advances to the loop rooted at stage `j`, after checking that nothing
/// incident to earlier vertices is left unconsumed.
#[allow(clippy::too_many_arguments)]
fn bubble_stage(
    q: &WeightMatrix,
    n: usize,
    stage: usize,
    remaining: &mut Vec<u64>,
    weight: Complex64,
    total: &mut Complex64,
    steps: &mut Steps,
) {
    if !steps.tick() {
        return;
    }
    if stage > 0 {
        let done = stage - 1;
        for t in 0..n {
            if remaining[done * n + t] != 0 || remaining[t * n + done] != 0 {
                return;
            }
        }
    }
    if stage == n {
        if remaining.iter().all(|&c| c == 0) {
            *total += weight;
        }
        return;
    }
    bubble_walk(q, n, stage, stage, remaining, weight, total, steps);
}

/// Walks a partial loop rooted at `v_stage` through the remaining edge
/// budget; closing the loop is allowed exactly when standing at the root.
#[allow(clippy::too_many_arguments)]
fn bubble_walk(
    q: &WeightMatrix,
    n: usize,
    stage: usize,
    at: usize,
    remaining: &mut Vec<u64>,
    weight: Complex64,
    total: &mut Complex64,
    steps: &mut Steps,
) {
    if !steps.tick() {
        return;
    }
    if at == stage {
        bubble_stage(q, n, stage + 1, remaining, weight, total, steps);
    }
    for next in stage..n {
        if remaining[at * n + next] == 0 {
            continue;
        }
        let w = weight * q.entry(at, next);
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        remaining[at * n + next] -= 1;
        bubble_walk(q, n, stage, next, remaining, w, total, steps);
        remaining[at * n + next] += 1;
    }
}

/// Exact loop-soup mass of a current: enumerates every finite multiset of
/// unrooted loops with total edge local time equal to the current and sums
/// `prod m(l)^{s_l} / s_l!`, over `det G`.
pub fn nu_c_oracle_loopsoup(q: &WeightMatrix, current: &Current) -> Result<Complex64> {
    nu_c_oracle_loopsoup_with_budget(q, current, DEFAULT_ORACLE_BUDGET)
}

/// [`nu_c_oracle_loopsoup`] with an explicit step budget.
pub fn nu_c_oracle_loopsoup_with_budget(
    q: &WeightMatrix,
    current: &Current,
    budget: u128,
) -> Result<Complex64> {
    q.require_integrable()?;
    let n = q.n();
    if current.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: current.n() });
    }
    let det_g = green(q)?.det_g();
    let mut steps = Steps::new(budget);
    let candidates = unrooted_loops_within_budgeted(current, &mut steps);
    steps.check()?;
    let measures: Vec<Complex64> = candidates.iter().map(|l| loop_measure(q, l)).collect();
    let currents: Vec<Current> = candidates.iter().map(|l| Current::of_unrooted(l, n)).collect();
    let mut remaining: Vec<u64> = current.counts().to_vec();
    let mut total = Complex64::new(0.0, 0.0);
    multiset_scan(
        &measures,
        &currents,
        0,
        &mut remaining,
        Complex64::new(1.0, 0.0),
        &mut total,
        &mut steps,
    );
    steps.check()?;
    Ok(total / det_g)
}

/// Every unrooted loop whose edge local time fits inside the current,
/// in deterministic (length, word) order.
pub fn unrooted_loops_within(current: &Current) -> Vec<UnrootedLoop> {
    let mut steps = Steps::new(u128::MAX);
    unrooted_loops_within_budgeted(current, &mut steps)
}

fn unrooted_loops_within_budgeted(current: &Current, steps: &mut Steps) -> Vec<UnrootedLoop> {
    let n = current.n();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut remaining: Vec<u64> = current.counts().to_vec();
    for root in 0..n {
        let mut word = vec![root];
        collect_loop_words(n, root, root, &mut remaining, &mut word, &mut found, steps);
    }
    let mut classes: Vec<UnrootedLoop> = found
        .into_iter()
        .map(|w| canonicalize(&RootedLoop::from_word(&w).unwrap()).unwrap())
        .collect();
    classes.sort_by(|a, b| (a.len(), a.word()).cmp(&(b.len(), b.word())));
    classes
}

#[allow(clippy::too_many_arguments)]
fn collect_loop_words(
    n: usize,
    root: usize,
    at: usize,
    remaining: &mut Vec<u64>,
    word: &mut Vec<usize>,
    found: &mut BTreeSet<Vec<usize>>,
    steps: &mut Steps,
) {
    if !steps.tick() {
        return;
    }
    for next in 0..n {
        if remaining[at * n + next] == 0 {
            continue;
        }
        remaining[at * n + next] -= 1;
        if next == root {
            let class = canonicalize(&RootedLoop::from_word(word).unwrap()).unwrap();
            found.insert(class.word().to_vec());
        }
        // Keep roots canonical-small to avoid rediscovering rotations:
        // only walk through vertices >= root.
        if next >= root {
            word.push(next);
            collect_loop_words(n, root, next, remaining, word, found, steps);
            word.pop();
        }
        remaining[at * n + next] += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn multiset_scan(
    measures: &[Complex64],
    currents: &[Current],
    index: usize,
    remaining: &mut Vec<u64>,
    factor: Complex64,
    total: &mut Complex64,
    steps: &mut Steps,
) {
    if !steps.tick() {
        return;
    }
    if index == measures.len() {
        if remaining.iter().all(|&c| c == 0) {
            *total += factor;
        }
        return;
    }
    // Multiplicity zero.
    multiset_scan(measures, currents, index + 1, remaining, factor, total, steps);
    let counts = currents[index].counts();
    let mut times = 0u64;
    let mut f = factor;
    loop {
        if counts.iter().zip(remaining.iter()).any(|(&need, &have)| need > have) {
            break;
        }
        for (slot, &need) in remaining.iter_mut().zip(counts.iter()) {
            *slot -= need;
        }
        times += 1;
        f = f * measures[index] / Complex64::new(times as f64, 0.0);
        multiset_scan(measures, currents, index + 1, remaining, f, total, steps);
    }
    for (slot, &need) in remaining.iter_mut().zip(counts.iter()) {
        *slot += need * times;
    }
}

/// Exact check of the composition/permutation identity
/// `sum_k sum_{(n_1..n_k) composing n0} n0! / (k! prod n_j) = n0!`.
pub fn verify_cycle_identity(n0: u32) -> (BigRational, bool) {
    let fact = BigRational::from_integer(factorial(n0 as u64).into());
    let mut sum = BigRational::zero();
    let mut parts: Vec<u64> = Vec::new();
    compositions(n0 as u64, &mut parts, &mut |comp: &[u64]| {
        let k = comp.len() as u64;
        let mut denom = factorial(k);
        for &p in comp {
            denom *= BigUint::from(p);
        }
        sum += BigRational::new(factorial(n0 as u64).into(), denom.into());
    });
    let equal = sum == fact;
    (sum, equal)
}

fn compositions(total: u64, parts: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if total == 0 {
        f(parts);
        return;
    }
    for first in 1..=total {
        parts.push(first);
        compositions(total - first, parts, f);
        parts.pop();
    }
}

pub fn factorial(k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for j in 2..=k {
        acc *= BigUint::from(j);
    }
    acc
}

/// Exact multinomial coefficient `(sum parts)! / prod parts!`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let total: u64 = parts.iter().sum();
    let mut num = factorial(total);
    for &p in parts {
        num /= factorial(p);
    }
    num
}

/// Number of rooted loops at `x` whose edge local time equals the current,
/// by exhaustive walk over the remaining edge multiset.
pub fn count_loops_with_current(x: usize, c_plus: &Current) -> BigUint {
    let n = c_plus.n();
    let mut remaining: Vec<u64> = c_plus.counts().to_vec();
    let mut count = BigUint::zero();
    count_loop_walks(n, x, x, &mut remaining, &mut count);
    count
}

fn count_loop_walks(n: usize, root: usize, at: usize, remaining: &mut Vec<u64>, count: &mut BigUint) {
    if at == root && remaining.iter().all(|&c| c == 0) {
        *count += BigUint::one();
        return;
    }
    for next in 0..n {
        if remaining[at * n + next] == 0 {
            continue;
        }
        remaining[at * n + next] -= 1;
        count_loop_walks(n, root, next, remaining, count);
        remaining[at * n + next] += 1;
    }
}

/// Every rooted loop at `x` whose edge local time equals the current.
pub fn enumerate_loops_with_current(x: usize, c_plus: &Current) -> Vec<RootedLoop> {
    let n = c_plus.n();
    let mut remaining: Vec<u64> = c_plus.counts().to_vec();
    let mut verts = vec![x];
    let mut out = Vec::new();
    fn walk(
        n: usize,
        root: usize,
        remaining: &mut Vec<u64>,
        verts: &mut Vec<usize>,
        out: &mut Vec<RootedLoop>,
    ) {
        let at = *verts.last().unwrap();
        if at == root && remaining.iter().all(|&c| c == 0) {
            out.push(RootedLoop::new(verts.clone()).unwrap());
            return;
        }
        for next in 0..n {
            if remaining[at * n + next] == 0 {
                continue;
            }
            remaining[at * n + next] -= 1;
            verts.push(next);
            walk(n, root, remaining, verts, out);
            verts.pop();
            remaining[at * n + next] += 1;
        }
    }
    walk(n, x, &mut remaining, &mut verts, &mut out);
    out
}

/// Both sides of the current-splitting identity at a distinguished vertex:
/// the full multinomial product against the sum over decompositions
/// `C = C_plus + C_0` of the loop count times the residual multinomials.
#[derive(Debug, Clone)]
pub struct CombIdentity {
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub equal: bool,
}

pub fn verify_comb_identity(current: &Current, x: usize) -> Result<CombIdentity> {
    let n = current.n();
    if x >= n {
        return Err(Error::BadSubset);
    }
    let lhs = multinomial_product(current, None);
    let mut rhs = BigUint::zero();
    for_each_decomposition(current, x, &mut |c_plus: &Current, c_zero: &Current| {
        let w = count_loops_with_current(x, c_plus);
        if w.is_zero() {
            return;
        }
        rhs += w * multinomial_product(c_zero, Some(x));
    });
    let equal = lhs == rhs;
    Ok(CombIdentity { lhs, rhs, equal })
}

/// `prod_u multinomial(n_u(C); row u of C)`, skipping `skip` if given.
fn multinomial_product(current: &Current, skip: Option<usize>) -> BigUint {
    let n = current.n();
    let mut acc = BigUint::one();
    for u in 0..n {
        if Some(u) == skip {
            continue;
        }
        let row: Vec<u64> = (0..n).map(|v| current.entry(u, v)).collect();
        acc *= multinomial(&row);
    }
    acc
}

/// Enumerates the decomposition pairs: `C_0` runs over currents supported on
/// the complement of `x` and dominated entrywise by `C`; `C_plus = C - C_0`
/// is then automatically a current.
pub fn for_each_decomposition(
    current: &Current,
    x: usize,
    f: &mut impl FnMut(&Current, &Current),
) {
    let n = current.n();
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != x && v != x)
        .collect();
    let mut chosen = vec![0u64; n * n];
    enumerate_bounded(current, &free, 0, &mut chosen, &mut |counts: &[u64]| {
        if !crate::loops::flow_conserved(counts, n) {
            return;
        }
        let c_zero = Current::from_counts(n, counts.to_vec()).unwrap();
        let plus_counts: Vec<u64> = current
            .counts()
            .iter()
            .zip(counts.iter())
            .map(|(&a, &b)| a - b)
            .collect();
        let c_plus = Current::from_counts(n, plus_counts).unwrap();
        f(&c_plus, &c_zero);
    });
}

fn enumerate_bounded(
    cap: &Current,
    free: &[(usize, usize)],
    index: usize,
    chosen: &mut Vec<u64>,
    f: &mut impl FnMut(&[u64]),
) {
    if index == free.len() {
        f(chosen);
        return;
    }
    let (u, v) = free[index];
    let n = cap.n();
    for value in 0..=cap.entry(u, v) {
        chosen[u * n + v] = value;
        enumerate_bounded(cap, free, index + 1, chosen, f);
    }
    chosen[u * n + v] = 0;
}

/// Encodes a sequence collection into a rooted loop at `x` plus the
/// remainder collection: starting from `x`, repeatedly consume the head of
/// the current vertex's sequence, stopping on a return to `x` with an empty
/// sequence there. Flow conservation guarantees the walk never strands at
/// another vertex.
pub fn bijection_encode(
    sequences: &[Vec<usize>],
    x: usize,
) -> Result<(RootedLoop, Vec<Vec<usize>>)> {
    let n = sequences.len();
    if x >= n {
        return Err(Error::BadSubset);
    }
    let counts = sequence_counts(sequences, n)?;
    if !crate::loops::flow_conserved(&counts, n) {
        return Err(Error::BadSequences(alloc::string::String::from(
            "sequence collection does not induce a current",
        )));
    }
    let mut heads = vec![0usize; n];
    let mut verts = vec![x];
    loop {
        let at = *verts.last().unwrap();
        if at == x && heads[x] == sequences[x].len() {
            break;
        }
        if heads[at] == sequences[at].len() {
            // Unreachable for a valid current; kept as a defensive error.
            return Err(Error::BadSequences(format!("sequence at vertex {at} exhausted early")));
        }
        let next = sequences[at][heads[at]];
        if next >= n {
            return Err(Error::BadSequences(format!("vertex {next} out of range")));
        }
        heads[at] += 1;
        verts.push(next);
    }
    let omega = RootedLoop::new(verts).unwrap();
    let remainder: Vec<Vec<usize>> = sequences
        .iter()
        .enumerate()
        .map(|(u, s)| s[heads[u]..].to_vec())
        .collect();
    Ok((omega, remainder))
}

/// Reverses the encoding: prepends to each remainder sequence the successor
/// of every visit of its vertex along the loop, in visit order.
pub fn bijection_decode(
    omega: &RootedLoop,
    remainder: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>> {
    let n = remainder.len();
    let x = omega.root();
    if x >= n || omega.vertices().iter().any(|&v| v >= n) {
        return Err(Error::BadInput(alloc::string::String::from("loop vertices out of range")));
    }
    if !remainder[x].is_empty() {
        return Err(Error::BadInput(alloc::string::String::from(
            "remainder at the root must be empty",
        )));
    }
    let mut sequences: Vec<Vec<usize>> = vec![Vec::new(); n];
    let verts = omega.vertices();
    for j in 0..omega.len() {
        sequences[verts[j]].push(verts[j + 1]);
    }
    for (u, extra) in remainder.iter().enumerate() {
        sequences[u].extend_from_slice(extra);
    }
    Ok(sequences)
}

fn sequence_counts(sequences: &[Vec<usize>], n: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; n * n];
    for (u, s) in sequences.iter().enumerate() {
        for &v in s {
            if v >= n {
                return Err(Error::BadSequences(format!("vertex {v} out of range")));
            }
            counts[u * n + v] += 1;
        }
    }
    Ok(counts)
}

/// All distinct arrangements of the multiset with `row[v]` copies of `v`,
/// in lexicographic order.
pub fn multiset_sequences(row: &[u64]) -> Vec<Vec<usize>> {
    let total: u64 = row.iter().sum();
    let mut out = Vec::new();
    let mut counts = row.to_vec();
    let mut prefix = Vec::with_capacity(total as usize);
    fn rec(counts: &mut Vec<u64>, prefix: &mut Vec<usize>, left: u64, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in 0..counts.len() {
            if counts[v] == 0 {
                continue;
            }
            counts[v] -= 1;
            prefix.push(v);
            rec(counts, prefix, left - 1, out);
            prefix.pop();
            counts[v] += 1;
        }
    }
    rec(&mut counts, &mut prefix, total, &mut out);
    out
}

/// Calls `f` on every current of the given total mass, in deterministic
/// order: local-time vectors are compositions of the mass, and for each the
/// matrices are contingency tables with those row and column sums.
pub fn for_each_current_of_mass(n: usize, mass: u64, f: &mut impl FnMut(&Current)) {
    let mut degrees = vec![0u64; n];
    degree_scan(n, 0, mass, &mut degrees, f);
}

fn degree_scan(
    n: usize,
    index: usize,
    left: u64,
    degrees: &mut Vec<u64>,
    f: &mut impl FnMut(&Current),
) {
    if index == n - 1 {
        degrees[index] = left;
        for_each_current_with_local_time(degrees, f);
        degrees[index] = 0;
        return;
    }
    for value in 0..=left {
        degrees[index] = value;
        degree_scan(n, index + 1, left - value, degrees, f);
    }
    degrees[index] = 0;
}

/// Calls `f` on every current whose row and column sums both equal the given
/// local-time vector.
pub fn for_each_current_with_local_time(degrees: &[u64], f: &mut impl FnMut(&Current)) {
    let n = degrees.len();
    let mut col_left = degrees.to_vec();
    let mut counts = vec![0u64; n * n];
    table_rows(degrees, 0, &mut col_left, &mut counts, f);
}

fn table_rows(
    degrees: &[u64],
    row: usize,
    col_left: &mut Vec<u64>,
    counts: &mut Vec<u64>,
    f: &mut impl FnMut(&Current),
) {
    let n = degrees.len();
    if row == n - 1 {
        // Final row forced by the column budgets; its sum automatically
        // matches the final degree.
        debug_assert_eq!(col_left.iter().sum::<u64>(), degrees[row]);
        for v in 0..n {
            counts[row * n + v] = col_left[v];
        }
        let current = Current::from_counts(n, counts.clone()).unwrap();
        f(&current);
        for v in 0..n {
            counts[row * n + v] = 0;
        }
        return;
    }
    table_row_cells(degrees, row, 0, degrees[row], col_left, counts, f);
}

#[allow(clippy::too_many_arguments)]
fn table_row_cells(
    degrees: &[u64],
    row: usize,
    col: usize,
    left: u64,
    col_left: &mut Vec<u64>,
    counts: &mut Vec<u64>,
    f: &mut impl FnMut(&Current),
) {
    let n = degrees.len();
    if col == n - 1 {
        if left > col_left[col] {
            return;
        }
        counts[row * n + col] = left;
        col_left[col] -= left;
        table_rows(degrees, row + 1, col_left, counts, f);
        col_left[col] += left;
        counts[row * n + col] = 0;
        return;
    }
    let max_here = left.min(col_left[col]);
    for value in 0..=max_here {
        counts[row * n + col] = value;
        col_left[col] -= value;
        table_row_cells(degrees, row, col + 1, left - value, col_left, counts, f);
        col_left[col] += value;
    }
    counts[row * n + col] = 0;
}

/// Collects the currents of total mass `0..=max_mass`, deterministically
/// ordered.
pub fn currents_up_to_mass(n: usize, max_mass: u64) -> Vec<Current> {
    let mut out = Vec::new();
    for mass in 0..=max_mass {
        for_each_current_of_mass(n, mass, &mut |c| out.push(c.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use num_traits::ToPrimitive;

    #[test]
    fn inventory_examples() {
        let inv = enumerate_loops(&[0], 0, 3, DEFAULT_LOOP_BUDGET).unwrap();
        let words: Vec<&[usize]> = inv.loops.iter().map(|l| l.vertices()).collect();
        assert_eq!(words, vec![&[0, 0][..], &[0, 0, 0], &[0, 0, 0, 0]]);

        let inv = enumerate_loops(&[0, 1], 0, 2, DEFAULT_LOOP_BUDGET).unwrap();
        let words: Vec<&[usize]>= inv.loops.iter().map(|l| l.vertices()).collect();
        assert_eq!(words, vec![&[0, 0][..], &[0, 0, 0], &[0, 1, 0]]);
    }

    #[test]
    fn inventory_counts_match_formula() {
        for k in 1..=6usize {
            let inv = enumerate_loops(&[0, 1, 2], 0, k, DEFAULT_LOOP_BUDGET).unwrap();
            let at_len_k = inv.loops.iter().filter(|l| l.len() == k).count();
            assert_eq!(at_len_k as u128, 3u128.pow(k as u32 - 1));
        }
    }

    #[test]
    fn inventory_budget() {
        let err = enumerate_loops(&[0, 1, 2], 0, 20, 1000).unwrap_err();
        match err {
            Error::BudgetExceeded { needed, budget } => {
                assert_eq!(budget, 1000);
                assert_eq!(needed, count_rooted_loops(3, 20));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn truncated_log_green_scalar() {
        // Single vertex, q = 1/2: the series is sum q^k / k = ln 2 and its
        // exponential is G = 2.
        let q = presets::singleton_half();
        let t = truncated_log_green(&q, &[0], 0, 40, DEFAULT_LOOP_BUDGET).unwrap();
        assert!((t.sum.re - core::f64::consts::LN_2).abs() < 1e-13);
        assert!(t.sum.im.abs() < 1e-15);
        assert!((t.sum.exp().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_log_green_zero_weight() {
        let q = WeightMatrix::zero(2);
        let t = truncated_log_green(&q, &[0, 1], 0, 6, DEFAULT_LOOP_BUDGET).unwrap();
        assert_eq!(t.sum, Complex64::new(0.0, 0.0));
        assert_eq!(t.tail_bound, 0.0);
    }

    #[test]
    fn truncated_log_green_converges_to_green_diagonal() {
        let q = presets::hermitian_pair();
        let g = green(&q).unwrap();
        let mut prev_err = f64::INFINITY;
        for max_len in [4usize, 8, 12] {
            let t = truncated_log_green(&q, &[0, 1], 0, max_len, DEFAULT_LOOP_BUDGET).unwrap();
            let err = (t.sum.exp() - g.entry(0, 0)).norm();
            assert!(err <= t.exp_error_bound() + 1e-13);
            assert!(err <= prev_err + 1e-15);
            prev_err = err;
        }
    }

    #[test]
    fn bubble_oracle_trivial_and_scalar() {
        let q = presets::hermitian_pair();
        let nu = nu_c_oracle_bubble(&q, &Current::zero(2)).unwrap();
        assert!((nu - Complex64::new(0.75, 0.0)).norm() < 1e-13);

        // Singleton with q = 1/2: nu_c{C_xx = k} = det(I - Q) q^k.
        let single = presets::singleton_half();
        for k in 0..6u64 {
            let c = Current::from_counts(1, vec![k]).unwrap();
            let nu = nu_c_oracle_bubble(&single, &c).unwrap();
            let want = 0.5 * 0.5f64.powi(k as i32);
            assert!((nu - Complex64::new(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn bubble_oracle_hermitian_pair_crossing() {
        let q = presets::hermitian_pair();
        let c = Current::from_counts(2, vec![0, 1, 1, 0]).unwrap();
        let nu = nu_c_oracle_bubble(&q, &c).unwrap();
        assert!((nu - Complex64::new(0.75 * 0.25, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn loopsoup_oracle_agrees_with_bubble() {
        let q = presets::hermitian_pair();
        for c in currents_up_to_mass(2, 3) {
            let a = nu_c_oracle_bubble(&q, &c).unwrap();
            let b = nu_c_oracle_loopsoup(&q, &c).unwrap();
            assert!(
                (a - b).norm() <= 1e-12 * a.norm().max(b.norm()).max(1.0),
                "disagreement at {:?}: {a} vs {b}",
                c.counts()
            );
        }
    }

    #[test]
    fn oracle_budgets_refuse_oversized_instances() {
        let q = presets::hermitian_pair();
        let c = Current::from_counts(2, vec![0, 2, 2, 0]).unwrap();
        assert!(matches!(
            nu_c_oracle_bubble_with_budget(&q, &c, 3),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            nu_c_oracle_loopsoup_with_budget(&q, &c, 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn loopsoup_oracle_scalar_value() {
        let single = presets::singleton_half();
        let c = Current::from_counts(1, vec![2]).unwrap();
        let nu = nu_c_oracle_loopsoup(&single, &c).unwrap();
        assert!((nu - Complex64::new(0.125, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cycle_identity_small_cases() {
        for n0 in 1..=10u32 {
            let (sum, equal) = verify_cycle_identity(n0);
            assert!(equal, "composition identity failed at {n0}: {sum}");
        }
        let (sum, _) = verify_cycle_identity(8);
        assert_eq!(sum, BigRational::from_integer(40320.into()));
    }

    #[test]
    fn loop_counts_with_current() {
        assert_eq!(count_loops_with_current(0, &Current::zero(2)), BigUint::one());
        let c = Current::from_counts(2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(count_loops_with_current(0, &c), BigUint::one());
        let c = Current::from_counts(2, vec![0, 2, 2, 0]).unwrap();
        assert_eq!(count_loops_with_current(0, &c), BigUint::one());
        // A self-loop at the far vertex cannot be picked up from vertex 0
        // without edges into it.
        let c = Current::from_counts(2, vec![0, 0, 0, 1]).unwrap();
        assert_eq!(count_loops_with_current(0, &c), BigUint::zero());
    }

    #[test]
    fn comb_identity_examples() {
        let zero = Current::zero(2);
        let r = verify_comb_identity(&zero, 0).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, BigUint::one());

        let c = Current::from_counts(2, vec![0, 1, 1, 0]).unwrap();
        let r = verify_comb_identity(&c, 0).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, BigUint::one());

        let c = Current::from_counts(2, vec![1, 1, 1, 0]).unwrap();
        let r = verify_comb_identity(&c, 0).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, BigUint::from(2u32));
        assert_eq!(r.rhs, BigUint::from(2u32));
    }

    #[test]
    fn encode_examples() {
        // Zero current at x: trivial loop, empty remainder.
        let (omega, rem) = bijection_encode(&[vec![], vec![]], 0).unwrap();
        assert_eq!(omega, RootedLoop::trivial(0));
        assert!(rem.iter().all(|s| s.is_empty()));

        let (omega, rem) = bijection_encode(&[vec![1], vec![0]], 0).unwrap();
        assert_eq!(omega.vertices(), &[0, 1, 0]);
        assert!(rem.iter().all(|s| s.is_empty()));

        let (omega, rem) = bijection_encode(&[vec![1], vec![1, 0]], 0).unwrap();
        assert_eq!(omega.vertices(), &[0, 1, 1, 0]);
        assert!(rem.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn encode_leaves_remainder_off_root() {
        // Vertex 1 has a private cycle 1->2->1 that the loop at 0 never
        // consumes when its own sequence routes back to 0 first.
        let seqs = vec![vec![1], vec![0, 2], vec![1]];
        let (omega, rem) = bijection_encode(&seqs, 0).unwrap();
        assert_eq!(omega.vertices(), &[0, 1, 0]);
        assert_eq!(rem, vec![vec![], vec![2], vec![1]]);
        let decoded = bijection_decode(&omega, &rem).unwrap();
        assert_eq!(decoded, seqs);
    }

    #[test]
    fn encode_rejects_non_current() {
        let err = bijection_encode(&[vec![1], vec![]], 0).unwrap_err();
        assert!(matches!(err, Error::BadSequences(_)));
    }

    #[test]
    fn current_enumeration_counts() {
        // Mass 1 currents on two vertices: the two self-loops.
        let currents = currents_up_to_mass(2, 1);
        assert_eq!(currents.len(), 3);
        // All have conserved flow by construction; spot-check determinism.
        let again = currents_up_to_mass(2, 1);
        assert_eq!(currents, again);
    }

    #[test]
    fn current_enumeration_matches_filter() {
        // Cross-check the contingency-table enumeration against a plain
        // filter over all matrices for small sizes.
        for mass in 0..=4u64 {
            let mut fast = Vec::new();
            for_each_current_of_mass(2, mass, &mut |c| fast.push(c.clone()));
            let mut slow = Vec::new();
            enumerate_all_matrices(2, mass, &mut slow);
            let slow: Vec<Current> = slow
                .into_iter()
                .filter_map(|m| Current::from_counts(2, m).ok())
                .collect();
            assert_eq!(fast.len(), slow.len(), "mass {mass}");
            let fast_set: BTreeSet<Vec<u64>> =
                fast.iter().map(|c| c.counts().to_vec()).collect();
            let slow_set: BTreeSet<Vec<u64>> =
                slow.iter().map(|c| c.counts().to_vec()).collect();
            assert_eq!(fast_set, slow_set);
        }
    }

    fn enumerate_all_matrices(n: usize, mass: u64, out: &mut Vec<Vec<u64>>) {
        fn rec(cells: usize, left: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if cells == 1 {
                acc.push(left);
                out.push(acc.clone());
                acc.pop();
                return;
            }
            for v in 0..=left {
                acc.push(v);
                rec(cells - 1, left - v, acc, out);
                acc.pop();
            }
        }
        let mut acc = Vec::new();
        rec(n * n, mass, &mut acc, out);
    }

    #[test]
    fn multiset_sequences_count_is_multinomial() {
        let seqs = multiset_sequences(&[2, 1, 1]);
        assert_eq!(seqs.len() as u64, multinomial(&[2, 1, 1]).to_u64().unwrap());
        // Lexicographic and duplicate-free.
        let set: BTreeSet<_> = seqs.iter().cloned().collect();
        assert_eq!(set.len(), seqs.len());
        let mut sorted = seqs.clone();
        sorted.sort();
        assert_eq!(sorted, seqs);
    }
}
