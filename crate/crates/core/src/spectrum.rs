//! Spin-split Landau spectrum under Rashba and Zeeman coupling.
//!
//! For `s >= 1` the Hamiltonian couples spin-up at level `s - 1` with
//! spin-down at level `s`. Energies are `s ± sqrt(xi² + 2 s a²)` (units of
//! `hbar omega`), and the eigenspinors are `N (κ^{±1} Ψ_{s-1,m}, Ψ_{s,m})`.
//! The lowest level `s = 0` is a single spin-down state with energy `xi`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::params::NaturalParams;
use crate::polybasis::{eigenfunction, PolyGauss};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Denominators of `kappa` below this are treated as singular.
pub const KAPPA_SINGULAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Quantum numbers of a state. The lowest level has no branch pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LevelKey {
    Lll { m: usize },
    Split { s: usize, branch: Branch, m: usize },
}

impl LevelKey {
    pub fn lll(m: usize) -> Self {
        LevelKey::Lll { m }
    }

    /// Rejects `s = 0`.
    pub fn split(s: usize, branch: Branch, m: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::LowestLevel);
        }
        Ok(LevelKey::Split { s, branch, m })
    }

    pub fn s(&self) -> usize {
        match *self {
            LevelKey::Lll { .. } => 0,
            LevelKey::Split { s, .. } => s,
        }
    }

    pub fn m(&self) -> usize {
        match *self {
            LevelKey::Lll { m } | LevelKey::Split { m, .. } => m,
        }
    }

    pub fn branch(&self) -> Option<Branch> {
        match *self {
            LevelKey::Lll { .. } => None,
            LevelKey::Split { branch, .. } => Some(branch),
        }
    }
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelKey::Lll { m } => write!(f, "(s=0, m={m}, LLL)"),
            LevelKey::Split { s, branch, m } => write!(f, "(s={s}, m={m}, {branch})"),
        }
    }
}

/// A normalized eigenspinor `(up, down)` with its energy.
#[derive(Debug, Clone)]
pub struct EigenState {
    pub key: LevelKey,
    /// Units of `hbar omega`.
    pub energy: f64,
    /// `κ_s` of the level (zero for the LLL and for decoupled fallbacks).
    pub kappa: Complex64,
    /// Real positive normalization constant.
    pub norm_const: f64,
    pub up: PolyGauss,
    pub down: PolyGauss,
    /// True when the `a_tilde = 0` pure-spin spinors were used.
    pub decoupled: bool,
}

impl EigenState {
    /// `⟨self|self⟩` from the analytic inner products.
    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn inner_product(&self, other: &EigenState) -> Complex64 {
        self.up.inner_product(&other.up) + self.down.inner_product(&other.down)
    }

    /// `(ψ↑, ψ↓)` at `(x, y)`.
    pub fn value_at(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        (self.up.value_at(x, y), self.down.value_at(x, y))
    }
}

fn coupling(s: usize, p: &NaturalParams) -> f64 {
    (2.0 * s as f64).sqrt() * p.a_tilde
}

fn split_root(s: usize, p: &NaturalParams) -> f64 {
    p.xi_tilde.hypot(coupling(s, p))
}

/// `E^±_s = s ± sqrt(xi² + 2 s a²)` for `s >= 1`.
pub fn energy(s: usize, branch: Branch, p: &NaturalParams) -> Result<f64> {
    if s == 0 {
        return Err(Error::LowestLevel);
    }
    Ok(s as f64 + branch.sign() * split_root(s, p))
}

/// Energy of the spin-down lowest level, `xi_tilde`.
pub fn lll_energy(p: &NaturalParams) -> f64 {
    p.xi_tilde
}

pub fn level_energy(key: &LevelKey, p: &NaturalParams) -> f64 {
    match *key {
        LevelKey::Lll { .. } => lll_energy(p),
        LevelKey::Split { s, branch, .. } => s as f64 + branch.sign() * split_root(s, p),
    }
}

/// `κ_s = i a sqrt(2s) / (xi + sqrt(xi² + 2 s a²))`.
///
/// For `xi < 0` the equivalent form `i (R - xi) / (a sqrt(2s))` avoids the
/// cancellation in `xi + R`.
pub fn kappa(s: usize, p: &NaturalParams) -> Result<Complex64> {
    if s == 0 {
        return Err(Error::LowestLevel);
    }
    let b = coupling(s, p);
    let root = split_root(s, p);
    let xi = p.xi_tilde;
    let denominator = if xi >= 0.0 {
        xi + root
    } else {
        b * b / (root - xi)
    };
    if denominator.abs() < KAPPA_SINGULAR {
        return Err(Error::DegenerateKappa { denominator });
    }
    let k = if xi >= 0.0 {
        b / denominator
    } else {
        (root - xi) / b
    };
    Ok(I * k)
}

/// The coupled 2×2 block in the basis (up at level `s-1`, down at level `s`).
pub type Block2 = [[Complex64; 2]; 2];

pub fn block_matrix(s: usize, p: &NaturalParams) -> Result<Block2> {
    if s == 0 {
        return Err(Error::LowestLevel);
    }
    let sf = s as f64;
    let off = I * coupling(s, p);
    Ok([
        [Complex64::new(sf - 0.5 + p.g_tilde, 0.0), off],
        [off.conj(), Complex64::new(sf + 0.5 - p.g_tilde, 0.0)],
    ])
}

pub fn eigenspinor(key: LevelKey, p: &NaturalParams) -> EigenState {
    build_eigenspinor(key, p, 1.0)
}

/// [`eigenspinor`] with `κ` multiplied by `kappa_scale` before the spinor is
/// assembled. Only meaningful as a negative control for the verifiers.
#[doc(hidden)]
pub fn eigenspinor_with_kappa_scale(
    key: LevelKey,
    p: &NaturalParams,
    kappa_scale: f64,
) -> EigenState {
    build_eigenspinor(key, p, kappa_scale)
}

/// Coefficients `(c_up, c_down)` multiplying `(Ψ_{s-1,m}, Ψ_{s,m})`, plus a
/// flag telling whether the decoupled `a_tilde = 0` spinors were used.
///
/// Normally `(N κ^{±1}, N)` with `N = 1/sqrt(|κ^{±1}|² + 1)`. When `κ` is
/// singular, or zero on the minus branch, the pure spin states are returned:
/// the upper-energy state is spin down when `xi >= 0`.
pub fn spinor_weights(s: usize, branch: Branch, p: &NaturalParams) -> Result<SpinorWeights> {
    weights_scaled(s, branch, p, 1.0)
}

/// Amplitudes of an `s >= 1` eigenspinor on its two basis functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorWeights {
    pub kappa: Complex64,
    pub norm_const: f64,
    pub up: Complex64,
    pub down: Complex64,
    pub decoupled: bool,
}

fn weights_scaled(
    s: usize,
    branch: Branch,
    p: &NaturalParams,
    kappa_scale: f64,
) -> Result<SpinorWeights> {
    if s == 0 {
        return Err(Error::LowestLevel);
    }
    let k = kappa(s, p).ok().map(|k| k * kappa_scale);
    let ratio = k.and_then(|k| match branch {
        Branch::Plus => Some(k),
        Branch::Minus => {
            let inv = k.inv();
            (k.norm() > 0.0 && inv.is_finite()).then_some(inv)
        }
    });
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(match ratio {
        Some(ratio) => {
            let norm_const = 1.0 / (ratio.norm_sqr() + 1.0).sqrt();
            SpinorWeights {
                kappa: k.unwrap_or_default(),
                norm_const,
                up: ratio * norm_const,
                down: Complex64::new(norm_const, 0.0),
                decoupled: false,
            }
        }
        None => {
            let spin_down = (branch == Branch::Plus) == (p.xi_tilde >= 0.0);
            let (up, down) = if spin_down { (zero, one) } else { (one, zero) };
            SpinorWeights {
                kappa: zero,
                norm_const: 1.0,
                up,
                down,
                decoupled: true,
            }
        }
    })
}

fn build_eigenspinor(key: LevelKey, p: &NaturalParams, kappa_scale: f64) -> EigenState {
    let (s, branch, m) = match key {
        LevelKey::Lll { m } => {
            return EigenState {
                key,
                energy: lll_energy(p),
                kappa: Complex64::new(0.0, 0.0),
                norm_const: 1.0,
                up: PolyGauss::zero(),
                down: (*eigenfunction(0, m)).clone(),
                decoupled: false,
            };
        }
        LevelKey::Split { s, branch, m } => (s, branch, m),
    };
    let w = weights_scaled(s, branch, p, kappa_scale).expect("s >= 1 for split levels");
    EigenState {
        key,
        energy: s as f64 + branch.sign() * split_root(s, p),
        kappa: w.kappa,
        norm_const: w.norm_const,
        up: eigenfunction(s - 1, m).scale(w.up),
        down: eigenfunction(s, m).scale(w.down),
        decoupled: w.decoupled,
    }
}
