//! Loop soups, directed currents, and complex Gaussian free fields on finite
//! weighted digraphs.
//!
//! A complex edge weight `q` on the complete digraph over `N` vertices induces
//! a complex measure on unrooted loops, and from it a loop soup whose
//! pushforward to directed currents has an exact closed form. When the weight
//! is Hermitian, the continuous occupation field of the soup has the same
//! density as the squared modulus of a complex Gaussian free field with
//! covariance `(I - Q)^{-1}`.
//!
//! This crate computes all the objects involved and cross-checks them against
//! independent oracles:
//!
//! * [`weights`] — weight matrices, integrability, Green's functions;
//! * [`loops`] — paths, rooted/unrooted loops, local times, currents;
//! * [`enumeration`] — exhaustive exact-arithmetic oracles and the
//!   combinatorial identities behind the current distribution;
//! * [`current_field`] — the closed-form current field and occupation
//!   densities with certified truncation bounds;
//! * [`torus`] — gauge-reduced periodic trapezoid quadrature;
//! * [`gff`] — the complex Gaussian free field, its `|Z|^2` density, moment
//!   oracles, and the isomorphism check;
//! * [`sampler`] — Monte Carlo growing loops and bubble soups for
//!   substochastic weights;
//! * [`verify`] — runnable verification suites producing structured reports.
//!
//! The crate is `no_std` (with `alloc`); all I/O lives in companion crates.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod current_field;
pub mod enumeration;
pub mod error;
pub mod gff;
pub mod linalg;
pub mod loops;
pub mod presets;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod torus;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use weights::{green, Green, WeightMatrix};
