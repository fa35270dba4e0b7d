//! Numerical tolerances shared across the crate.

/// Frobenius norm of the anti-Hermitian part allowed for a "Hermitian" matrix.
pub const HERMITIAN: f64 = 1e-10;

/// Smallest eigenvalue allowed for a "PSD" matrix is `-PSD`.
pub const PSD: f64 = 1e-10;

/// Allowed deviation of a state's trace from one.
pub const TRACE: f64 = 1e-10;
