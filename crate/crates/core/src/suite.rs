//! The `verify` suite: every oracle check in one run, with a JSON report.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gauge::gauge_check;
use crate::oracle::{
    self, diagonalize_block, laguerre_crosscheck, overlap2, quadrature_inner, sample_poly,
};
use crate::params::NaturalParams;
use crate::polybasis::{eigenfunction, lll_state, PolyGauss};
use crate::spectrum::{
    block_matrix, eigenspinor_with_kappa_scale, energy, spinor_weights, Branch, LevelKey,
};
use crate::texture::GridSpec;
use crate::tolerances as tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub quick: bool,
    /// Multiplies `κ` in the residual states; 1.0 for a normal run.
    pub kappa_scale: f64,
    pub params: NaturalParams,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            quick: true,
            kappa_scale: 1.0,
            params: NaturalParams::from_xi(0.4, 0.3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn below(name: &str, value: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: value < tolerance,
            value,
            tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub mode: String,
    pub params: NaturalParams,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let p = opts.params;
    let checks = vec![
        check_spectrum(&p)?,
        check_orthonormality(),
        check_ladder(),
        check_quadrature(opts.quick),
        check_laguerre(),
        check_residuals(opts)?,
        check_gauge(&p, opts.quick)?,
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        mode: if opts.quick { "quick" } else { "full" }.into(),
        params: p,
        checks,
        passed,
    })
}

fn check_spectrum(p: &NaturalParams) -> Result<CheckResult> {
    let mut worst = 0.0_f64;
    let xis = [-0.4, -0.2, 0.0, 0.2, 0.4];
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let grid: Vec<NaturalParams> = xis
        .iter()
        .flat_map(|&xi| alphas.iter().map(move |&a| NaturalParams::from_xi(xi, a)))
        .chain(std::iter::once(*p))
        .collect();
    for q in &grid {
        for s in 1..=20 {
            let (vals, vecs) = diagonalize_block(&block_matrix(s, q)?);
            let plus = energy(s, Branch::Plus, q)?;
            let minus = energy(s, Branch::Minus, q)?;
            worst = worst
                .max((plus - vals[1]).abs())
                .max((minus - vals[0]).abs());
            // Eigenvectors are only meaningful away from degeneracy.
            if vals[1] - vals[0] > 1e-6 {
                for (b, v) in [(Branch::Minus, vecs[0]), (Branch::Plus, vecs[1])] {
                    let w = spinor_weights(s, b, q)?;
                    worst = worst.max((overlap2(&[w.up, w.down], &v) - 1.0).abs());
                }
            }
        }
    }
    Ok(CheckResult::below(
        "spectrum_vs_diagonalization",
        worst,
        tol::SPECTRUM,
        "s <= 20 on a 5x5 (xi, a) grid".into(),
    ))
}

fn check_orthonormality() -> CheckResult {
    let mut worst = 0.0_f64;
    for m in 0..=6 {
        for n in 0..=6 {
            for n2 in 0..=6 {
                let ip = eigenfunction(n, m).inner_product(&eigenfunction(n2, m));
                let delta = if n == n2 { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(delta, 0.0)).norm());
            }
        }
    }
    CheckResult::below(
        "orthonormality",
        worst,
        tol::ORTHONORMAL,
        "n, n', m <= 6".into(),
    )
}

/// Random polynomial with up to `terms` entries of degree < 4 in each variable.
pub fn random_poly(rng: &mut StdRng, terms: usize) -> PolyGauss {
    PolyGauss::from_terms((0..terms).map(|_| {
        (
            rng.gen_range(0..4),
            rng.gen_range(0..4),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }))
}

fn check_ladder() -> CheckResult {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let p = random_poly(&mut rng, 5);
        let comm = p.raise().lower().sub(&p.lower().raise());
        worst = worst.max(comm.max_coeff_diff(&p));
    }
    for m in 0..=3 {
        for n in 0..=5 {
            worst = worst.max((eigenfunction(n, m).raise().norm_sqr() - (n as f64 + 1.0)).abs());
        }
        worst = worst.max(lll_state(m).lower().norm_sqr().sqrt());
    }
    CheckResult::below(
        "ladder_algebra",
        worst,
        tol::LADDER,
        "[a, a+] = 1, |a+ psi_n|^2 = n + 1, a psi_0 = 0".into(),
    )
}

fn check_quadrature(quick: bool) -> CheckResult {
    let grid = GridSpec::new(8.0, if quick { 200 } else { 400 }).expect("static grid");
    let pairs = [
        ((0, 0), (0, 0)),
        ((1, 1), (1, 1)),
        ((2, 1), (0, 1)),
        ((3, 2), (1, 2)),
        ((2, 4), (2, 4)),
    ];
    let mut worst = 0.0_f64;
    for ((n1, m1), (n2, m2)) in pairs {
        let a = eigenfunction(n1, m1);
        let b = eigenfunction(n2, m2);
        let numeric = quadrature_inner(&sample_poly(&a, &grid), &sample_poly(&b, &grid), &grid);
        worst = worst.max((numeric - a.inner_product(&b)).norm());
    }
    CheckResult::below(
        "quadrature_vs_moments",
        worst,
        tol::QUADRATURE,
        format!(
            "trapezoid, extent {}, {}^2 nodes",
            grid.extent, grid.resolution
        ),
    )
}

fn check_laguerre() -> CheckResult {
    let mut worst = 0.0_f64;
    for n in 0..=8 {
        for m in 0..=8 {
            worst = worst.max(laguerre_crosscheck(n, m));
        }
    }
    CheckResult::below(
        "laguerre_closed_form",
        worst,
        tol::LADDER,
        "n, m <= 8".into(),
    )
}

fn check_residuals(opts: &SuiteOptions) -> Result<CheckResult> {
    let p = opts.params;
    let (grid, keys): (GridSpec, Vec<LevelKey>) = if opts.quick {
        (
            GridSpec::with_spacing(6.0, 0.02)?,
            vec![
                LevelKey::lll(0),
                LevelKey::split(1, Branch::Plus, 1)?,
                LevelKey::split(1, Branch::Minus, 1)?,
                LevelKey::split(2, Branch::Plus, 0)?,
            ],
        )
    } else {
        // The LLL with m >= 3 has a high-order node at the origin where the
        // floored local-amplitude denominator overstates the error.
        let mut keys = vec![LevelKey::lll(0)];
        for s in 1..=3 {
            for m in 0..=3 {
                for b in [Branch::Plus, Branch::Minus] {
                    keys.push(LevelKey::split(s, b, m)?);
                }
            }
        }
        (GridSpec::with_spacing(6.0, 0.01)?, keys)
    };
    let mut worst = 0.0_f64;
    let mut worst_control = f64::INFINITY;
    let mut worst_key = String::new();
    for key in keys {
        let st = eigenspinor_with_kappa_scale(key, &p, opts.kappa_scale);
        let (r, control) = oracle::residual_and_control(
            &st,
            &p,
            grid,
            oracle::DEFAULT_ORDER,
            tol::RESIDUAL_ENERGY_OFFSET,
        )?;
        if r > worst {
            worst = r;
            worst_key = key.to_string();
        }
        worst_control = worst_control.min(control);
    }
    let mut res = CheckResult::below(
        "schrodinger_residual",
        worst,
        tol::RESIDUAL,
        format!(
            "h = {:.3}, 4th-order stencil, worst {worst_key}; energy-offset control min {worst_control:.3e}",
            grid.spacing()
        ),
    );
    res.passed &= worst_control > tol::RESIDUAL_NEGATIVE;
    Ok(res)
}

fn check_gauge(p: &NaturalParams, quick: bool) -> Result<CheckResult> {
    let region = GridSpec::new(4.0, if quick { 64 } else { 128 })?;
    let mut worst = 0.0_f64;
    for b in [Branch::Plus, Branch::Minus] {
        worst = worst.max(gauge_check(b, p, region, 40, tol::GAUGE)?.max_abs_deviation);
    }
    let control = gauge_check(Branch::Plus, p, region, 2, tol::GAUGE)?;
    let mut res = CheckResult::below(
        "gauge_invariance",
        worst,
        tol::GAUGE,
        format!(
            "extent 4, K = 40, both branches; K = 2 control deviation {:.3e}",
            control.max_abs_deviation
        ),
    );
    res.passed &= !control.passed;
    Ok(res)
}
