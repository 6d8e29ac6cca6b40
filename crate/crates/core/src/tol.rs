//! Numerical tolerances shared across modules.
//!
//! Values are absolute unless stated otherwise.

/// Max absolute entry deviation of A from A† accepted as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Eigenvalues at or below this are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Negative eigenvalues above −PSD_CLAMP are clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Allowed deviation of a density matrix trace from 1.
pub const TRACE: f64 = 1e-10;

/// Allowed deviation of a classical weight sum from 1.
pub const CLASSICAL_SUM: f64 = 1e-12;

/// Negative round-off clamped to zero in probabilities.
pub const PROBABILITY_ROUNDOFF: f64 = 1e-14;

/// Tr ρσ at or below this marks a pair as orthogonal.
pub const ORTHOGONAL: f64 = 1e-14;

/// Largest entry of (I−σ⁰)ρ(I−σ⁰) below which supp ρ ⊆ supp σ.
pub const SUPPORT_INCLUSION: f64 = 1e-9;

/// Max gap between ψ and its chord for ψ to count as affine.
pub const AFFINE_GAP: f64 = 1e-9;

/// Entry tolerance for deciding ρ = σ.
pub const IDENTICAL: f64 = 1e-12;

/// Argument tolerance of golden-section searches.
pub const GOLDEN: f64 = 1e-10;

/// Argument tolerance of the r-bisection for the regularized divergence.
pub const BISECTION: f64 = 1e-9;

/// Required agreement of the two regularized-divergence methods.
pub const METHOD_RESIDUAL: f64 = 1e-6;

/// Log-ratio clustering tolerance for the two-level condition.
pub const RATIO_CLUSTER: f64 = 1e-9;

/// Idempotency tolerance for projections.
pub const PROJECTION: f64 = 1e-8;

/// Margin used when asserting gap-explorer verdicts.
pub const VERDICT_MARGIN: f64 = 1e-6;

/// Default cap on the number of type classes enumerated.
pub const TYPE_BUDGET: usize = 1_000_000;

/// Largest dense n-copy dimension d^n.
pub const DENSE_BUDGET: usize = 4096;

/// Largest |Ω| (or |Ω|ⁿ) enumerated over all subsets.
pub const EXHAUSTIVE_ATOMS: usize = 20;

/// Largest dimension accepted by the quantum test/measurement optimizers.
pub const OPTIMIZER_DIM: usize = 8;
