//! SI inputs and the natural-unit parameter set.
//!
//! Lengths are measured in the magnetic length `r = sqrt(hbar / (e B))` and
//! energies in `hbar * omega` with `omega = e B / m*`. The Bohr magneton uses
//! the free-electron mass, so `g_tilde = g * mass_ratio / 2` for any field.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// CODATA 2018 constants (SI).
pub mod constants {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Free electron mass, kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    /// Bohr magneton `e hbar / 2 m_0`, J/T.
    pub const BOHR_MAGNETON: f64 = ELEMENTARY_CHARGE * HBAR / (2.0 * ELECTRON_MASS);
    /// One electronvolt in joules.
    pub const EV: f64 = ELEMENTARY_CHARGE;
    /// One meV in joules.
    pub const MEV: f64 = 1e-3 * ELEMENTARY_CHARGE;
    /// 1 eV nm in J m.
    pub const EV_NM: f64 = ELEMENTARY_CHARGE * 1e-9;
}

use constants::*;

/// Physical inputs in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Perpendicular flux density, tesla.
    pub b_z: f64,
    /// Effective mass over the free-electron mass.
    pub mass_ratio: f64,
    /// Landé g factor (signed).
    pub g_factor: f64,
    /// Rashba coefficient, J m.
    pub alpha: f64,
    /// Replaces `g mu B / (hbar omega)` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_tilde_override: Option<f64>,
}

/// Flat key-value file form of [`PhysicalConfig`], with alpha in eV nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub b_z_tesla: f64,
    pub mass_ratio: f64,
    pub g_factor: f64,
    pub alpha_ev_nm: f64,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(toml::from_str(&text)?)
    }

    pub fn to_config(self) -> Result<PhysicalConfig> {
        PhysicalConfig::from_ev_nm(
            self.b_z_tesla,
            self.mass_ratio,
            self.g_factor,
            self.alpha_ev_nm,
        )
    }
}

impl PhysicalConfig {
    pub fn new(b_z: f64, mass_ratio: f64, g_factor: f64, alpha: f64) -> Result<Self> {
        let cfg = PhysicalConfig {
            b_z,
            mass_ratio,
            g_factor,
            alpha,
            g_tilde_override: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same as [`PhysicalConfig::new`] with alpha given in eV nm.
    pub fn from_ev_nm(b_z: f64, mass_ratio: f64, g_factor: f64, alpha_ev_nm: f64) -> Result<Self> {
        Self::new(b_z, mass_ratio, g_factor, alpha_ev_nm * EV_NM)
    }

    pub fn with_g_tilde(mut self, g_tilde: f64) -> Self {
        self.g_tilde_override = Some(g_tilde);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.b_z, self.mass_ratio, self.g_factor, self.alpha]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("non-finite input".into()));
        }
        if self.b_z <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "B_z must be > 0, got {}",
                self.b_z
            )));
        }
        if self.mass_ratio <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mass_ratio must be > 0, got {}",
                self.mass_ratio
            )));
        }
        Ok(())
    }

    pub fn magnetic_length(&self) -> f64 {
        (HBAR / (ELEMENTARY_CHARGE * self.b_z)).sqrt()
    }

    pub fn cyclotron_energy(&self) -> f64 {
        HBAR * ELEMENTARY_CHARGE * self.b_z / (self.mass_ratio * ELECTRON_MASS)
    }
}

/// Dimensionless parameters; `r` and `hbar_omega` are carried only for I/O.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalParams {
    /// Magnetic length in meters (NaN when built from natural units only).
    pub r: f64,
    /// Cyclotron energy in joules (NaN when built from natural units only).
    pub hbar_omega: f64,
    pub a_tilde: f64,
    pub g_tilde: f64,
    pub xi_tilde: f64,
}

impl NaturalParams {
    /// Natural-unit parameters without an SI scale.
    pub fn new(g_tilde: f64, a_tilde: f64) -> Self {
        NaturalParams {
            r: f64::NAN,
            hbar_omega: f64::NAN,
            a_tilde,
            g_tilde,
            xi_tilde: 0.5 - g_tilde,
        }
    }

    /// Parameters from the LLL energy instead of `g_tilde`.
    pub fn from_xi(xi_tilde: f64, a_tilde: f64) -> Self {
        Self::new(0.5 - xi_tilde, a_tilde)
    }

    pub fn has_si_scale(&self) -> bool {
        self.r.is_finite() && self.hbar_omega.is_finite()
    }

    /// Energy in `hbar omega` to joules.
    pub fn energy_to_si(&self, e_natural: f64) -> Option<f64> {
        self.has_si_scale().then_some(e_natural * self.hbar_omega)
    }

    pub fn energy_to_mev(&self, e_natural: f64) -> Option<f64> {
        self.energy_to_si(e_natural).map(|e| e / MEV)
    }

    pub fn energy_from_si(&self, e_joule: f64) -> Option<f64> {
        self.has_si_scale().then(|| e_joule / self.hbar_omega)
    }

    pub fn length_to_si(&self, l_natural: f64) -> Option<f64> {
        self.has_si_scale().then_some(l_natural * self.r)
    }
}

pub fn derive_natural(cfg: &PhysicalConfig) -> Result<NaturalParams> {
    cfg.validate()?;
    let r = cfg.magnetic_length();
    let hbar_omega = cfg.cyclotron_energy();
    let a_tilde = cfg.alpha / (r * hbar_omega);
    let g_tilde = cfg
        .g_tilde_override
        .unwrap_or(cfg.g_factor * BOHR_MAGNETON * cfg.b_z / hbar_omega);
    Ok(NaturalParams {
        r,
        hbar_omega,
        a_tilde,
        g_tilde,
        xi_tilde: 0.5 - g_tilde,
    })
}
