//! Numerical tolerances shared across the crate.

/// Simplex membership (sums, column sums).
pub const SUM: f64 = 1e-12;
/// Entries below this are clamped to zero in probability vectors.
pub const NEG_CLAMP: f64 = 1e-14;
/// Hermiticity of density matrices.
pub const HERMITIAN: f64 = 1e-12;
/// Smallest admissible eigenvalue in positivity checks.
pub const PSD: f64 = 1e-10;
/// Unitarity and Kraus completeness (Frobenius).
pub const UNITARY: f64 = 1e-10;
/// Choi eigenvalues below this are discarded when extracting Kraus operators.
pub const KRAUS_EIG: f64 = 1e-12;
/// Default orthogonality tolerance.
pub const ORTHOGONAL: f64 = 1e-10;
/// Default success tolerance of the numerical oracles.
pub const SUCCESS: f64 = 1e-10;
/// Default threshold above which an oracle residual counts as a failure.
pub const FAIL: f64 = 1e-3;
/// Agreement of classical actions within a family.
pub const ACTION: f64 = 1e-10;
/// Closed-region comparisons such as `max_k p_k <= 1/M`.
pub const BOUNDARY: f64 = 1e-12;
