//! Quantum Rényi divergences and the exponents of binary state discrimination.
//!
//! The crate is organised bottom-up:
//!
//! - [`operator`]: Hermitian operators, density matrices, tests, classical
//!   distributions and their tensor powers (via type classes).
//! - [`divergence`]: single-letter quantities of a pair of states — the
//!   log-moment function ψ(α) = log Tr ρ^α σ^{1−α}, standard (Petz) and
//!   sandwiched Rényi divergences, relative entropy, D₀, D_max and fidelity.
//! - [`exponent`]: Legendre transforms of ψ, the Hoeffding curve H_r, the
//!   Chernoff divergence, Hoeffding tests, and the regularized test-measured
//!   Rényi divergence computed by two independent single-letter formulas.
//! - [`measurement`]: optimization over tests and measurements, the exact
//!   classical n-copy test-measured values, and the two-level equality
//!   conditions.
//! - [`verify`]: a seeded invariant suite over random instances.
//! - [`io`]: the JSON state file format.
//!
//! All divergences are in nats. `f64::INFINITY` is a legitimate value, not an
//! error: it is returned wherever the divergence is +∞ by definition.

#![forbid(unsafe_code)]

pub mod divergence;
pub mod error;
pub mod exponent;
pub mod io;
pub mod measurement;
pub mod operator;
pub mod random;
pub mod search;
pub mod tol;
pub mod verify;

pub use divergence::{DivergenceValue, Family, PsiProfile};
pub use error::{Error, Result};
pub use exponent::{HoeffdingPoint, Method, RegularizedResult};
pub use measurement::{EqualityReport, NCopyRow, TestOptimum};
pub use operator::{
    BinaryDistribution, ClassicalState, Complex64, DensityMatrix, HermitianOperator, Test,
};
