//! Riemannian geometry of symmetric positive definite matrices under
//! O(n)-invariant metrics.
//!
//! The crate covers the classical families (Euclidean, log-Euclidean,
//! affine-invariant, Bures-Wasserstein, BKM, polar-affine) with closed-form
//! operations, kernel and trace-extended kernel metrics, general metrics given
//! by an `(α, β, γ)` function triple, and a cometric-driven Hamiltonian
//! geodesic integrator.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical_metrics;
pub mod error;
pub mod geodesic_engine;
pub mod inner_products;
pub mod invariant_metrics;
pub mod kernel_family;
pub mod sampling;
pub mod symlin;

pub use error::{Error, Result};
pub use symlin::{EigenDecomp, SpdMatrix, SymMatrix, UnivariateFn};
