//! Numerical tolerances shared by the library and its tests.

/// Normalisation of pure states.
pub const NORM: f64 = 1e-12;

/// Hermiticity and unit trace of density operators.
pub const HERMITIAN: f64 = 1e-12;

/// Smallest admissible eigenvalue of a density operator or operator product.
/// Eigenvalues in `[-NEGATIVE_EIGENVALUE, 0]` are clamped to zero before square roots.
pub const NEGATIVE_EIGENVALUE: f64 = 1e-10;

/// Agreement between the two fidelity routes on commuting inputs.
pub const FIDELITY_AGREEMENT: f64 = 1e-10;

/// Isometry and unitarity checks (`V†V = I`).
pub const UNITARY: f64 = 1e-12;

/// Off-diagonal Jacobi sweeps stop once the off-diagonal Frobenius norm falls below this.
pub const JACOBI: f64 = 1e-15;

/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Width at which window bisection stops.
pub const BISECTION: f64 = 1e-10;

/// Upper limit of the error-rate interval on which `ln δ > (δ² - 1)/(2.5 δ)` holds.
pub const QUADRATIC_VALIDITY: f64 = 0.305;

/// Relative size (in units of the largest eigenvalue magnitude) below which a
/// computed eigenvalue is indistinguishable from zero. Such values are zeroed
/// before square roots, where `√ε` would otherwise amplify rounding noise.
pub const SPECTRAL_FLOOR: f64 = 64.0 * f64::EPSILON;
