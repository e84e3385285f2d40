//! Fixed numerical tolerances shared by the library.
//!
//! These are constants on purpose; tests that need other thresholds pass
//! them explicitly.

/// Elementwise `|M - M^dagger|` bound for a matrix flagged Hermitian.
pub const HERMITIAN_MATRIX: f64 = 1e-12;

/// Hermiticity bound accepted by the eigensolver and by density matrices.
pub const HERMITIAN_INPUT: f64 = 1e-10;

/// Allowed `|tr rho - 1|` for a density matrix.
pub const TRACE: f64 = 1e-10;

/// Smallest eigenvalue a density matrix may have.
pub const MIN_EIGENVALUE: f64 = -1e-8;

/// Allowed norm drift for pure states after unitary evolution.
pub const NORM: f64 = 1e-10;

/// Trace drift or negativity above this makes the RK4 integrator fail.
pub const INTEGRATION_FAILURE: f64 = 1e-6;

/// Numerical residues at or above `-CLAMP` are clamped to zero in metrics.
pub const CLAMP: f64 = 1e-10;

/// Maximum probability mass a truncated thermal/coherent field may discard.
pub const FIELD_TAIL: f64 = 1e-5;
