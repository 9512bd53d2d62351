//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The weight is not integrable: the spectral radius of `|Q|` is >= 1.
    NotIntegrable { rho: f64 },
    /// A Hermitian weight was required.
    NotHermitian,
    /// A Hermitian positive definite matrix was required.
    NotHermitianPd,
    /// A factorization failed on a matrix that should have been regular.
    Singular,
    /// A vertex subset contains out-of-range or duplicate indices.
    BadSubset,
    /// The operation is undefined on loops of length zero.
    TrivialLoop,
    /// A count matrix violates flow conservation.
    NotACurrent,
    /// Vector or matrix sizes do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// Input sequences are inconsistent with a current.
    BadSequences(String),
    /// Malformed input to a decode step.
    BadInput(String),
    /// Occupation points must have nonnegative coordinates.
    NegativePoint,
    /// The instance exceeds the supported size for an exact computation.
    TooLarge { limit: u64, got: u64 },
    /// An enumeration would need more work than the configured budget.
    BudgetExceeded { needed: u128, budget: u128 },
    /// Monte Carlo sampling needs a nonnegative row-substochastic weight.
    NotSamplable(String),
    /// A quadrature grid would exceed the node budget.
    QuadratureBudget { nodes: u128, budget: u128 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotIntegrable { rho } => {
                write!(f, "weight is not integrable: spectral radius of |Q| is {rho}")
            }
            Error::NotHermitian => write!(f, "weight matrix is not Hermitian"),
            Error::NotHermitianPd => {
                write!(f, "matrix is not Hermitian positive definite")
            }
            Error::Singular => write!(f, "matrix factorization failed: singular matrix"),
            Error::BadSubset => write!(f, "vertex subset has out-of-range or duplicate indices"),
            Error::TrivialLoop => write!(f, "operation is undefined on the trivial loop"),
            Error::NotACurrent => write!(f, "count matrix violates flow conservation"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::BadSequences(msg) => write!(f, "bad sequence collection: {msg}"),
            Error::BadInput(msg) => write!(f, "bad input: {msg}"),
            Error::NegativePoint => write!(f, "occupation point has a negative coordinate"),
            Error::TooLarge { limit, got } => {
                write!(f, "instance size {got} exceeds supported limit {limit}")
            }
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} items, over the budget of {budget}")
            }
            Error::NotSamplable(msg) => write!(f, "weight is not samplable: {msg}"),
            Error::QuadratureBudget { nodes, budget } => {
                write!(f, "quadrature needs {nodes} nodes, over the budget of {budget}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
