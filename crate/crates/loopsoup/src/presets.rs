//! Reference weight matrices used across tests, verification suites, and the
//! bundled matrix files.

use num_complex::Complex64;

use crate::weights::WeightMatrix;

/// One vertex with self-weight 1/2; everything about it is closed-form.
pub fn singleton_half() -> WeightMatrix {
    WeightMatrix::new(1, alloc::vec![Complex64::new(0.5, 0.0)]).unwrap()
}

/// Two vertices with conjugate off-diagonal weights `0.3 +- 0.4i` and zero
/// diagonal: Hermitian, integrable with `rho(|Q|) = 0.5`, not samplable.
pub fn hermitian_pair() -> WeightMatrix {
    WeightMatrix::new(
        2,
        alloc::vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.4),
            Complex64::new(0.3, -0.4),
            Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

/// Three vertices with nonnegative row-substochastic weights; samplable and
/// integrable, not symmetric.
pub fn substochastic_triple() -> WeightMatrix {
    let rows = [
        [0.10, 0.25, 0.20],
        [0.15, 0.05, 0.30],
        [0.20, 0.25, 0.05],
    ];
    WeightMatrix::from_fn(3, |u, v| Complex64::new(rows[u][v], 0.0))
}

/// Symmetric nonnegative pair; both Hermitian and samplable.
pub fn symmetric_pair() -> WeightMatrix {
    let rows = [[0.20, 0.30], [0.30, 0.20]];
    WeightMatrix::from_fn(2, |u, v| Complex64::new(rows[u][v], 0.0))
}
