//! Property tests for the loop and weight primitives.

use loopsoup::loops::{
    canonicalize, current_weight, edge_local_time, path_weight, vertex_local_time, Current, Path,
    RootedLoop,
};
use loopsoup::rng::CounterRng;
use loopsoup::verify::random_integrable;
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_loop_word(max_n: usize, max_len: usize) -> impl Strategy<Value = (usize, Vec<usize>)> {
    (1..=max_n, 1..=max_len).prop_flat_map(|(n, k)| {
        (Just(n), proptest::collection::vec(0..n, k))
    })
}

proptest! {
    #[test]
    fn local_time_half_sum_rule((n, word) in arb_loop_word(4, 10)) {
        let rooted = RootedLoop::from_word(&word).unwrap();
        let cur = Current::of_loop(&rooted, n);
        let lt = vertex_local_time(&rooted.as_path(), n);
        for u in 0..n {
            let s: u64 = (0..n).map(|v| cur.entry(u, v) + cur.entry(v, u)).sum();
            prop_assert_eq!(s % 2, 0);
            prop_assert_eq!(s / 2, lt[u]);
        }
    }

    #[test]
    fn canonical_form_is_rotation_invariant((n, word) in arb_loop_word(4, 10)) {
        let _ = n;
        let base = canonicalize(&RootedLoop::from_word(&word).unwrap()).unwrap();
        let k = word.len();
        for r in 0..k {
            let rotated: Vec<usize> = (0..k).map(|j| word[(j + r) % k]).collect();
            let other = canonicalize(&RootedLoop::from_word(&rotated).unwrap()).unwrap();
            prop_assert_eq!(&base, &other);
        }
        // The canonical word is itself a representative of the class.
        let rep = base.representative();
        prop_assert_eq!(canonicalize(&rep).unwrap(), base);
    }

    #[test]
    fn distinct_orbits_have_distinct_canonical_forms(
        (n, a) in arb_loop_word(3, 6),
        b in proptest::collection::vec(0..3usize, 1..=6),
    ) {
        prop_assume!(b.iter().all(|&v| v < n));
        let ca = canonicalize(&RootedLoop::from_word(&a).unwrap()).unwrap();
        let cb = canonicalize(&RootedLoop::from_word(&b).unwrap()).unwrap();
        let rotations: std::collections::BTreeSet<Vec<usize>> = (0..a.len())
            .map(|r| (0..a.len()).map(|j| a[(j + r) % a.len()]).collect())
            .collect();
        if rotations.contains(&b) {
            prop_assert_eq!(ca, cb);
        } else {
            prop_assert_ne!(ca, cb);
        }
    }

    #[test]
    fn loop_weight_factors_through_the_current((n, word) in arb_loop_word(4, 8), seed in 0u64..50) {
        let mut rng = CounterRng::new(seed);
        let q = random_integrable(n, 0.7, &mut rng);
        let rooted = RootedLoop::from_word(&word).unwrap();
        let via_path = path_weight(&q, &rooted.as_path());
        let via_current = current_weight(&q, &Current::of_loop(&rooted, n));
        prop_assert!((via_path - via_current).norm() <= 1e-12 * via_path.norm().max(1.0));
    }

    #[test]
    fn non_loop_edge_counts_break_conservation_at_endpoints(
        (n, mut verts) in arb_loop_word(4, 8)
    ) {
        prop_assume!(verts.len() >= 2);
        prop_assume!(verts.first() != verts.last());
        verts.insert(0, verts[0]); // ensure a nonempty path: duplicate head
        let path = Path::new(verts.clone()).unwrap();
        let counts = edge_local_time(&path, n);
        let (first, last) = (verts[0], *verts.last().unwrap());
        for u in 0..n {
            let row: i64 = (0..n).map(|v| counts[u * n + v] as i64).sum();
            let col: i64 = (0..n).map(|v| counts[v * n + u] as i64).sum();
            let expected = if u == first { 1 } else if u == last { -1 } else { 0 };
            prop_assert_eq!(row - col, expected);
        }
    }

    #[test]
    fn restriction_spectral_radius_is_monotone(seed in 0u64..100, n in 2usize..=4) {
        let mut rng = CounterRng::new(seed);
        let q = random_integrable(n, 0.8, &mut rng);
        let rho = q.spectral_radius_abs();
        // Every nonempty proper subset.
        for mask in 1u32..(1 << n) - 1 {
            let subset: Vec<usize> = (0..n).filter(|&u| mask & (1 << u) != 0).collect();
            let sub_rho = q.restrict(&subset).unwrap().spectral_radius_abs();
            prop_assert!(sub_rho <= rho + 1e-10);
        }
    }

    #[test]
    fn zero_exponent_edges_are_neutral(seed in 0u64..50) {
        // current_weight must treat q_uv = 0 with C_uv = 0 as factor one.
        let mut rng = CounterRng::new(seed);
        let q3 = random_integrable(3, 0.5, &mut rng);
        let mut data = Vec::new();
        for u in 0..3 {
            for v in 0..3 {
                data.push(if u == 0 && v == 1 { Complex64::new(0.0, 0.0) } else { q3.entry(u, v) });
            }
        }
        let q = loopsoup::WeightMatrix::new(3, data).unwrap();
        let c = Current::from_counts(3, vec![0, 0, 0, 0, 0, 1, 0, 1, 0]).unwrap();
        let w = current_weight(&q, &c);
        let want = q.entry(1, 2) * q.entry(2, 1);
        prop_assert!((w - want).norm() < 1e-15);
    }
}
