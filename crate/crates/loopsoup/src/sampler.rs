//! Monte Carlo realization of growing loops and bubble soups for nonnegative
//! row-substochastic weights.
//!
//! A growing loop at `v` inside `U` is sampled by running the killed walk
//! (step probabilities are the weights, stepping outside `U` kills) and
//! truncating the trajectory at its last visit to `v`; the deleted suffix
//! carries exactly the escape mass `1 / G_U(v, v)`, so the loop has the
//! growing-loop law with no rejection. A bubble soup stacks independent
//! growing loops at `v_j` inside the suffix vertex sets.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::loops::{vertex_local_time, Current, LocalTime, RootedLoop};
use crate::rng::CounterRng;
use crate::weights::WeightMatrix;

/// Row-sum slack tolerated before a weight is declared non-substochastic.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// One bubble-soup draw: the loop tuple and its induced current and local
/// time.
#[derive(Debug, Clone)]
pub struct BubbleSample {
    pub loops: Vec<RootedLoop>,
    pub current: Current,
    pub local_time: LocalTime,
}

/// Checks that the weight is real, nonnegative, and row-substochastic (and
/// integrable), returning the real entries.
pub fn samplable_entries(q: &WeightMatrix) -> Result<Vec<f64>> {
    let n = q.n();
    let mut entries = Vec::with_capacity(n * n);
    for u in 0..n {
        let mut row_sum = 0.0;
        for v in 0..n {
            let z = q.entry(u, v);
            if z.im != 0.0 {
                return Err(Error::NotSamplable(String::from("complex entries")));
            }
            if z.re < 0.0 {
                return Err(Error::NotSamplable(String::from("negative entries")));
            }
            row_sum += z.re;
            entries.push(z.re);
        }
        if row_sum > 1.0 + ROW_SUM_TOL {
            return Err(Error::NotSamplable(String::from("row sum exceeds one")));
        }
    }
    q.require_integrable()?;
    Ok(entries)
}

/// Samples one growing loop at `v` inside `members`.
pub fn sample_growing_loop(
    q: &WeightMatrix,
    members: &[usize],
    v: usize,
    rng: &mut CounterRng,
) -> Result<RootedLoop> {
    let entries = samplable_entries(q)?;
    if !members.contains(&v) {
        return Err(Error::BadSubset);
    }
    Ok(growing_loop_walk(&entries, q.n(), members, v, rng))
}

/// The killed-walk construction; integrability makes the walk die almost
/// surely.
fn growing_loop_walk(
    entries: &[f64],
    n: usize,
    members: &[usize],
    v: usize,
    rng: &mut CounterRng,
) -> RootedLoop {
    let mut trajectory = alloc::vec![v];
    let mut at = v;
    loop {
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut next = None;
        for &w in members {
            acc += entries[at * n + w];
            if u < acc {
                next = Some(w);
                break;
            }
        }
        match next {
            Some(w) => {
                trajectory.push(w);
                at = w;
            }
            None => break, // killed
        }
    }
    let last_visit = trajectory.iter().rposition(|&w| w == v).unwrap();
    trajectory.truncate(last_visit + 1);
    RootedLoop::new(trajectory).unwrap()
}

/// Samples a bubble soup: independent growing loops at `v_j` inside the
/// suffix sets `{v_j, ..., v_N}` in the input vertex order.
pub fn sample_bubble_soup(q: &WeightMatrix, rng: &mut CounterRng) -> Result<BubbleSample> {
    let entries = samplable_entries(q)?;
    let n = q.n();
    let mut loops = Vec::with_capacity(n);
    let mut current = Current::zero(n);
    let mut local_time = alloc::vec![0u64; n];
    for j in 0..n {
        let members: Vec<usize> = (j..n).collect();
        let omega = growing_loop_walk(&entries, n, &members, j, rng);
        current = current.plus(&Current::of_loop(&omega, n)).unwrap();
        for (acc, x) in local_time.iter_mut().zip(vertex_local_time(&omega.as_path(), n)) {
            *acc += x;
        }
        loops.push(omega);
    }
    Ok(BubbleSample { loops, current, local_time })
}

/// A bubble sample together with its continuous occupation draw: each
/// coordinate is Gamma(n_u + 1, 1), the sum of `n_u + 1` unit exponentials.
pub fn sample_occupied_bubble(
    q: &WeightMatrix,
    rng: &mut CounterRng,
) -> Result<(BubbleSample, Vec<f64>)> {
    let bubble = sample_bubble_soup(q, rng)?;
    let occupation = bubble
        .local_time
        .iter()
        .map(|&nu| rng.gamma_integer(nu + 1))
        .collect();
    Ok((bubble, occupation))
}

/// Draws `count` occupation points, one independent stream per sample index.
pub fn empirical_occupation(q: &WeightMatrix, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    samplable_entries(q)?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = CounterRng::stream(seed, i as u64);
        let (_, occupation) = sample_occupied_bubble(q, &mut rng)?;
        out.push(occupation);
    }
    Ok(out)
}
