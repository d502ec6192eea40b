//! Landau levels of a two-dimensional electron gas in the symmetric gauge with
//! Rashba spin-orbit and Zeeman coupling.
//!
//! Everything below the I/O layer works in natural units: lengths in the
//! magnetic length `r = sqrt(hbar / e B)` and energies in the cyclotron energy
//! `hbar * omega`. In these units the whole problem is fixed by two numbers,
//! the LLL energy `xi_tilde = 1/2 - g_tilde` and the Rashba strength `a_tilde`.
//!
//! Module map:
//!
//! - [`params`]: SI inputs and their conversion to natural units.
//! - [`polybasis`]: exact ladder-operator algebra on `P(z, z̄) exp(-|z|²/4)`.
//! - [`spectrum`]: spin-split energies, `kappa`, and eigenspinors.
//! - [`texture`]: spin densities on grids and rings.
//! - [`gauge`]: Landau-gauge vs symmetric-gauge check for the `s = 1` level.
//! - [`oracle`]: finite differences, quadrature, 2×2 diagonalization, Laguerre forms.
//! - [`suite`]: all oracle checks bundled for the `verify` command.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod error;
pub mod format;
pub mod gauge;
pub mod oracle;
pub mod params;
pub mod polybasis;
pub mod spectrum;
pub mod suite;
pub mod texture;
pub mod tolerances;

pub use error::{Error, Result};
pub use params::{NaturalParams, PhysicalConfig};
pub use polybasis::PolyGauss;
pub use spectrum::{Branch, EigenState, LevelKey};
pub use texture::{GridSpec, SpinTexture, Spinor};
