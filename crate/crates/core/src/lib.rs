//! Numerical laboratory for one-dimensional quasi-periodic Schrödinger
//! operators with degenerate (vanishing) analytic weights.
//!
//! The operator family is
//!
//! ```text
//!   [H(λ,E,x,y,ω) u]_n = −u_{n+1} − u_{n−1} + (λ v(x+nω₁) − E w(y+nω₂)) u_n
//! ```
//!
//! with 1-periodic analytic `v` and nonnegative analytic `w` that has real
//! zeros. The crate assembles finite restrictions of `H`, computes their
//! Green's functions, measures the phase sets where those Green's functions
//! fail the large-deviation bounds, and checks exponential localization of
//! the eigenvectors of the equivalent Jacobi operator `W^{-1/2} H₀ W^{-1/2}`.
//!
//! Modules:
//!
//! - [`model`]: torus functions, weights, frequencies, phases, sublevel sets
//! - [`operator`]: assembly of `H_Λ`, the Jacobi form and scalings
//! - [`linalg`]: symmetric tridiagonal kernels (QL, Sturm bisection,
//!   twisted factorizations, banded solves)
//! - [`greens`]: Green's matrices, goodness verdicts, perturbation and
//!   coupling-lemma verifiers
//! - [`msa`]: exceptional-set estimation, orbit hits, scale ladders
//! - [`spectrum`]: eigen-decompositions, localization diagnostics,
//!   Poisson reconstruction, Lyapunov exponents
//! - [`cli`]: configuration, run orchestration and persistence

// `!(x < y)` comparisons deliberately treat NaN as failing the bound
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod greens;
pub mod linalg;
pub mod model;
pub mod msa;
pub mod operator;
pub mod spectrum;

pub use error::{Error, Result};
