//! Tolerance constants shared by the library checks, the `verify` command and
//! the test suites. Each value is the threshold named by the corresponding
//! acceptance criterion or module invariant.

/// Coefficients below this magnitude are treated as exact zeros when trimming.
pub const TRIM_ABS: f64 = 1e-300;

/// Entrywise equality of trimmed coefficient tables.
pub const COEFF_EQ: f64 = 1e-12;

/// Analytic orthonormality of `Psi_{n,m}`.
pub const ORTHONORMAL: f64 = 1e-9;

/// Ladder algebra identities (`[a, a†] = 1`, `‖a†Ψ_n‖² = n + 1`, `aΨ_0 = 0`).
pub const LADDER: f64 = 1e-10;

/// Analytic inner products vs trapezoidal quadrature.
pub const QUADRATURE: f64 = 1e-6;

/// Closed-form energies and eigenvectors vs 2×2 diagonalization.
pub const SPECTRUM: f64 = 1e-12;

/// `kappa` must have zero real part.
pub const KAPPA_REAL: f64 = 1e-14;

/// Norm of an eigenspinor.
pub const STATE_NORM: f64 = 1e-10;

/// Relative finite-difference Schrödinger residual.
pub const RESIDUAL: f64 = 1e-4;

/// Negative control: residual with the energy shifted must exceed this.
pub const RESIDUAL_NEGATIVE: f64 = 1e-2;

/// Energy shift applied in the residual negative control.
pub const RESIDUAL_ENERGY_OFFSET: f64 = 0.1;

/// Floor for the local amplitude in the relative residual.
pub const RESIDUAL_FLOOR: f64 = 1e-8;

/// Componentwise gauge identity deviation.
pub const GAUGE: f64 = 1e-8;

/// Relative angular spread of rotationally symmetric fields.
pub const ROTATIONAL: f64 = 1e-8;

/// Pointwise identities of spin densities (purity, branch sign flip).
pub const TEXTURE_POINTWISE: f64 = 1e-10;

/// Riemann-sum normalization of a texture.
pub const TEXTURE_NORM: f64 = 1e-6;

/// Relative prominence below which profile maxima are ignored.
pub const RIPPLE_PROMINENCE: f64 = 1e-6;

/// Densities below this are masked in the normalized texture variant.
pub const NORMALIZED_MASK: f64 = 1e-15;
