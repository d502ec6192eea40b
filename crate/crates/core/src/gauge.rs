//! Landau-gauge vs symmetric-gauge check for the `s = 1` level centred at the
//! origin.
//!
//! Going from `A = B(-y, 0)` to `A = (B/2)(-y, x)` adds `∇χ` with
//! `χ = B x y / 2`, and wavefunctions pick up `exp(-i e χ / hbar)`, which is
//! `exp(-i x y / 2)` in units of the magnetic length. The symmetric-gauge
//! state built from `f(z̄) = exp(z̄² / 4)` must then equal the Landau-gauge
//! state times that phase. The series for `f` is truncated at `K` terms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::Result;
use crate::params::NaturalParams;
use crate::polybasis::PolyGauss;
use crate::spectrum::{spinor_weights, Branch, SpinorWeights};
use crate::texture::{GridSpec, SpinDensity};

/// `χ / (B_z r²) = x y / 2` with lengths in units of `r`.
pub fn chi(x: f64, y: f64) -> f64 {
    x * y / 2.0
}

/// `exp(-i e χ / hbar) = exp(-i x y / 2)`.
pub fn gauge_phase(x: f64, y: f64) -> Complex64 {
    Complex64::from_polar(1.0, -chi(x, y))
}

fn s1_weights(branch: Branch, p: &NaturalParams) -> SpinorWeights {
    spinor_weights(1, branch, p).expect("s = 1 is a split level")
}

/// Landau-gauge spinor `N π^{-1/4} (κ^{±1}, √2 y) exp(-y²/2)` at `k_x = 0`.
pub fn landau_s1(
    branch: Branch,
    p: &NaturalParams,
    points: &[(f64, f64)],
) -> Vec<(Complex64, Complex64)> {
    let w = s1_weights(branch, p);
    let pref = PI.powf(-0.25);
    points
        .iter()
        .map(|&(_, y)| {
            let env = pref * (-y * y / 2.0).exp();
            (w.up * env, w.down * (2f64.sqrt() * y * env))
        })
        .collect()
}

/// `Σ_{k<K} (z̄²/4)^k / k!` times the Gaussian envelope.
pub fn truncated_generator(terms: usize) -> PolyGauss {
    let mut c = 1.0;
    PolyGauss::from_terms((0..terms).map(|k| {
        if k > 0 {
            c /= 4.0 * k as f64;
        }
        (0, 2 * k, Complex64::new(c, 0.0))
    }))
}

/// Symmetric-gauge `s = 1` spinor as coefficient tables `(up, down)`.
///
/// Up is `κ^{±1} f G / η↑` with `η↑ = π^{1/4}`. Down is
/// `η↓ (2∂_z̄ - z/2)(f G)` with `η↓ = i / sqrt(2√π)`; since
/// `(2∂_z̄ - z/2) = i√2 a†`, that is `-π^{-1/4} a†(f G)`.
pub fn symmetric_s1_poly(
    branch: Branch,
    p: &NaturalParams,
    terms: usize,
) -> (PolyGauss, PolyGauss) {
    let w = s1_weights(branch, p);
    let pref = PI.powf(-0.25);
    let f = truncated_generator(terms);
    let up = f.scale(w.up * pref);
    let down = f.raise().scale(w.down * (-pref));
    (up, down)
}

pub fn symmetric_s1(
    branch: Branch,
    p: &NaturalParams,
    terms: usize,
    points: &[(f64, f64)],
) -> Vec<(Complex64, Complex64)> {
    let (up, down) = symmetric_s1_poly(branch, p, terms);
    points
        .iter()
        .map(|&(x, y)| (up.value_at(x, y), down.value_at(x, y)))
        .collect()
}

/// Rough bound on the series truncation error inside radius `radius`.
///
/// The dropped tail of `exp(w)` with `|w| = t <= radius²/4` is at most
/// `t^K / K! / (1 - t/(K+1))`; the envelope `exp(-t)` caps the product, which
/// peaks at `t = K`. The down component carries one extra factor `~(1 + r)`.
pub fn truncation_estimate(terms: usize, radius: f64) -> f64 {
    let k = terms as f64;
    let t = (radius * radius / 4.0).min(k);
    let ln_term = k * t.max(f64::MIN_POSITIVE).ln() - t - ln_factorial(terms);
    let ratio = t / (k + 1.0);
    let geometric = if ratio < 1.0 {
        1.0 / (1.0 - ratio)
    } else {
        k + 1.0
    };
    ln_term.exp() * geometric * (1.0 + radius) * PI.powf(-0.25)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheckReport {
    pub branch: Branch,
    pub region: GridSpec,
    pub series_terms: usize,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    /// Largest pointwise difference of `rho, s_x, s_y, s_z` between gauges.
    pub max_density_deviation: f64,
    /// Unit-modulus constant `φ` minimizing `|Ψ_sym - φ Ψ_L e^{-iχ}|`.
    pub fitted_phase: Complex64,
    pub truncation_estimate: f64,
    pub truncation_warning: bool,
    pub tolerance: f64,
    pub passed: bool,
}

impl GaugeCheckReport {
    pub fn summary(&self) -> String {
        format!(
            "gauge-check branch {} K={} extent={} res={}: max |dev| = {:.3e} (tol {:.1e}), phase = {:.6}{:+.6}i{} -> {}",
            self.branch,
            self.series_terms,
            self.region.extent,
            self.region.resolution,
            self.max_abs_deviation,
            self.tolerance,
            self.fitted_phase.re,
            self.fitted_phase.im,
            if self.truncation_warning { " [truncation warning]" } else { "" },
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Max componentwise `|Ψ_sym - φ Ψ_L exp(-i x y / 2)|` over `region`.
pub fn gauge_check(
    branch: Branch,
    p: &NaturalParams,
    region: GridSpec,
    terms: usize,
    tolerance: f64,
) -> Result<GaugeCheckReport> {
    region.validate()?;
    let (up, down) = symmetric_s1_poly(branch, p, terms);
    let n = region.resolution;
    let rows: Vec<Vec<[Complex64; 4]>> = (0..n)
        .into_par_iter()
        .map(|iy| {
            let y = region.coord(iy);
            let pts: Vec<(f64, f64)> = (0..n).map(|ix| (region.coord(ix), y)).collect();
            landau_s1(branch, p, &pts)
                .into_iter()
                .zip(&pts)
                .map(|((lu, ld), &(x, y))| {
                    let ph = gauge_phase(x, y);
                    [up.value_at(x, y), down.value_at(x, y), lu * ph, ld * ph]
                })
                .collect()
        })
        .collect();
    let samples: Vec<[Complex64; 4]> = rows.into_iter().flatten().collect();

    let overlap: Complex64 = samples
        .iter()
        .map(|v| v[2].conj() * v[0] + v[3].conj() * v[1])
        .sum();
    let fitted_phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };

    let mut max_abs = 0.0_f64;
    let mut max_ref = 0.0_f64;
    let mut max_density = 0.0_f64;
    for v in &samples {
        max_abs = max_abs
            .max((v[0] - fitted_phase * v[2]).norm())
            .max((v[1] - fitted_phase * v[3]).norm());
        max_ref = max_ref.max(v[2].norm()).max(v[3].norm());
        let a = SpinDensity::from_components(v[0], v[1]);
        let b = SpinDensity::from_components(v[2], v[3]);
        let d = (a.rho - b.rho)
            .abs()
            .max((a.sx - b.sx).abs())
            .max((a.sy - b.sy).abs())
            .max((a.sz - b.sz).abs());
        max_density = max_density.max(d);
    }
    let estimate = truncation_estimate(terms, region.extent * 2f64.sqrt());
    Ok(GaugeCheckReport {
        branch,
        region,
        series_terms: terms,
        max_abs_deviation: max_abs,
        max_rel_deviation: if max_ref > 0.0 {
            max_abs / max_ref
        } else {
            max_abs
        },
        max_density_deviation: max_density,
        fitted_phase,
        truncation_estimate: estimate,
        truncation_warning: estimate > tolerance,
        tolerance,
        passed: max_abs < tolerance,
    })
}
