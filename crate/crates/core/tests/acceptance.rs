//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits 1 if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rashba_landau::gauge::gauge_check;
use rashba_landau::oracle::{
    diagonalize_block, overlap2, quadrature_inner, residual_and_control, sample_poly, DEFAULT_ORDER,
};
use rashba_landau::polybasis::{eigenfunction, lll_state};
use rashba_landau::spectrum::{block_matrix, eigenspinor, energy, spinor_weights, LevelKey};
use rashba_landau::suite::random_poly;
use rashba_landau::texture::{
    count_maxima, density_at, maxima_radii, radial_profile, radius_of_max, ring_profile,
    spin_density, Component, SpinDensity,
};
use rashba_landau::{Branch, GridSpec, NaturalParams};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Runner {
    failures: usize,
}

impl Runner {
    fn check(
        &mut self,
        id: &str,
        title: &str,
        budget: Option<Duration>,
        f: impl FnOnce() -> Outcome,
    ) {
        let t0 = Instant::now();
        let mut o = f();
        let elapsed = t0.elapsed();
        if let Some(b) = budget {
            if elapsed > b {
                o.passed = false;
                o.detail.push_str(&format!("; over runtime budget {b:?}"));
            }
        }
        if !o.passed {
            self.failures += 1;
        }
        println!(
            "{} [{id}] {title}: {} ({:.2} s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
}

fn demo_params() -> NaturalParams {
    NaturalParams::from_xi(0.4, 0.3)
}

fn key(s: usize, b: Branch, m: usize) -> LevelKey {
    if s == 0 {
        LevelKey::lll(m)
    } else {
        LevelKey::split(s, b, m).unwrap()
    }
}

fn spectrum_equivalence() -> Outcome {
    let xis = [-0.4, -0.2, 0.0, 0.2, 0.4];
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let (mut e_dev, mut v_dev) = (0.0_f64, 0.0_f64);
    let mut skipped = 0;
    for &xi in &xis {
        for &a in &alphas {
            let p = NaturalParams::from_xi(xi, a);
            for s in 1..=20 {
                let (vals, vecs) = diagonalize_block(&block_matrix(s, &p).unwrap());
                let plus = energy(s, Branch::Plus, &p).unwrap();
                let minus = energy(s, Branch::Minus, &p).unwrap();
                e_dev = e_dev
                    .max((plus - vals[1]).abs())
                    .max((minus - vals[0]).abs());
                // At xi = a = 0 the block is degenerate and any basis is an eigenbasis.
                if vals[1] - vals[0] < 1e-9 {
                    skipped += 1;
                    continue;
                }
                for (b, v) in [(Branch::Minus, vecs[0]), (Branch::Plus, vecs[1])] {
                    let w = spinor_weights(s, b, &p).unwrap();
                    v_dev = v_dev.max((overlap2(&[w.up, w.down], &v) - 1.0).abs());
                }
            }
        }
    }
    outcome(
        e_dev < 1e-12 && v_dev < 1e-12,
        format!("max |dE| {e_dev:.2e}, max |1 - overlap| {v_dev:.2e} (tol 1e-12; {skipped} degenerate blocks energy-only)"),
    )
}

fn schrodinger_residual() -> Outcome {
    let p = demo_params();
    let grid = GridSpec::with_spacing(6.0, 0.01).unwrap();
    let mut keys = Vec::new();
    for s in 1..=3 {
        for m in 0..=3 {
            keys.push(key(s, Branch::Plus, m));
            keys.push(key(s, Branch::Minus, m));
        }
    }
    let (mut worst, mut worst_key, mut control) = (0.0_f64, String::new(), f64::INFINITY);
    for k in &keys {
        let (r, c) =
            residual_and_control(&eigenspinor(*k, &p), &p, grid, DEFAULT_ORDER, 0.1).unwrap();
        if r > worst {
            worst = r;
            worst_key = k.to_string();
        }
        control = control.min(c);
    }
    outcome(
        worst < 1e-4 && control > 1e-2,
        format!(
            "{} states, max residual {worst:.2e} at {worst_key} (tol 1e-4); E + 0.1 control min {control:.2e} (> 1e-2)",
            keys.len()
        ),
    )
}

fn orthonormality() -> Outcome {
    let mut analytic = 0.0_f64;
    for m in 0..=6 {
        for n in 0..=6 {
            for n2 in 0..=6 {
                let ip = eigenfunction(n, m).inner_product(&eigenfunction(n2, m));
                analytic = analytic.max((ip - if n == n2 { 1.0 } else { 0.0 }).norm());
            }
        }
    }
    let grid = GridSpec::new(12.0, 481).unwrap();
    let mut quad = 0.0_f64;
    for m in 0..=6 {
        let samples: Vec<Vec<Complex64>> = (0..=6)
            .map(|n| sample_poly(&eigenfunction(n, m), &grid))
            .collect();
        for n in 0..=6 {
            for n2 in n..=6 {
                let numeric = quadrature_inner(&samples[n], &samples[n2], &grid);
                let exact = eigenfunction(n, m).inner_product(&eigenfunction(n2, m));
                quad = quad.max((numeric - exact).norm());
            }
        }
    }
    outcome(
        analytic < 1e-9 && quad < 1e-6,
        format!("analytic max dev {analytic:.2e} (tol 1e-9), quadrature vs analytic {quad:.2e} (tol 1e-6)"),
    )
}

fn gauge_invariance() -> Outcome {
    let p = demo_params();
    let region = GridSpec::new(4.0, 128).unwrap();
    let plus = gauge_check(Branch::Plus, &p, region, 40, 1e-8).unwrap();
    let minus = gauge_check(Branch::Minus, &p, region, 40, 1e-8).unwrap();
    let control = gauge_check(Branch::Plus, &p, region, 2, 1e-8).unwrap();
    outcome(
        plus.passed && minus.passed && !control.passed,
        format!(
            "K = 40 max dev + {:.2e}, - {:.2e} (tol 1e-8); K = 2 control {:.2e} fails = {}",
            plus.max_abs_deviation,
            minus.max_abs_deviation,
            control.max_abs_deviation,
            !control.passed
        ),
    )
}

fn radii(max: f64, step: f64) -> Vec<f64> {
    (1..=(max / step).round() as usize)
        .map(|i| i as f64 * step)
        .collect()
}

fn worst_spread<F>(k: LevelKey, q: F) -> f64
where
    F: Fn(&SpinDensity, f64, f64) -> f64 + Sync,
{
    let st = eigenspinor(k, &demo_params());
    ring_profile(&st, &radii(5.0, 0.05), 96, q)
        .iter()
        .fold(0.0_f64, |a, pt| a.max(pt.spread))
}

fn texture_rotational() -> Outcome {
    let k = key(1, Branch::Plus, 1);
    let sz = worst_spread(k, |d, _, _| d.sz);
    let rho = worst_spread(k, |d, _, _| d.rho);
    outcome(
        sz < 1e-8 && rho < 1e-8,
        format!("angular spread s_z {sz:.2e}, rho {rho:.2e} (tol 1e-8)"),
    )
}

fn texture_in_plane_magnitude() -> Outcome {
    let spread = worst_spread(key(1, Branch::Plus, 1), |d, _, _| d.in_plane_magnitude());
    outcome(
        spread < 1e-8,
        format!("angular spread |s_par| {spread:.2e} (tol 1e-8)"),
    )
}

fn sample_points() -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 1..=12 {
        for j in 1..=12 {
            pts.push((0.3 * i as f64, 0.3 * j as f64));
        }
    }
    pts
}

/// Literal parity pattern: s_x odd in y and even in x, s_y odd in x and even in y.
fn texture_dipolar_parity() -> Outcome {
    let st = eigenspinor(key(1, Branch::Plus, 1), &demo_params());
    let scale = sample_points().iter().fold(0.0_f64, |a, &(x, y)| {
        a.max(density_at(&st, x, y).in_plane_magnitude())
    });
    let mut worst = 0.0_f64;
    for (x, y) in sample_points() {
        let d = density_at(&st, x, y);
        let fy = density_at(&st, x, -y);
        let fx = density_at(&st, -x, y);
        worst = worst
            .max((fy.sx + d.sx).abs())
            .max((fx.sx - d.sx).abs())
            .max((fx.sy + d.sy).abs())
            .max((fy.sy - d.sy).abs());
    }
    let rel = worst / scale;
    outcome(
        rel < 1e-10,
        format!("max parity violation {rel:.2e} of max |s_par| (tol 1e-10); the in-plane spin of the solved state is radial, see regression tests"),
    )
}

fn texture_branch_negation() -> Outcome {
    let p = demo_params();
    let plus = eigenspinor(key(1, Branch::Plus, 1), &p);
    let minus = eigenspinor(key(1, Branch::Minus, 1), &p);
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for (x, y) in sample_points()
        .into_iter()
        .chain(sample_points().into_iter().map(|(x, y)| (-x, 0.5 * y)))
    {
        let a = density_at(&plus, x, y);
        let b = density_at(&minus, x, y);
        worst = worst.max((a.sx + b.sx).abs()).max((a.sy + b.sy).abs());
        scale = scale.max(a.in_plane_magnitude());
    }
    outcome(
        worst <= 1e-10 * scale,
        format!("max |s_par(+) + s_par(-)| {worst:.2e}, scale {scale:.2e}"),
    )
}

fn texture_lll() -> Outcome {
    let st = eigenspinor(LevelKey::lll(1), &demo_params());
    let t = spin_density(&st, GridSpec::new(6.0, 128).unwrap()).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..t.rho.len() {
        worst = worst
            .max(t.sx[i].abs())
            .max(t.sy[i].abs())
            .max((t.sz[i] + t.rho[i]).abs());
    }
    outcome(
        worst == 0.0,
        format!("max |s_x|, |s_y|, |s_z + rho| = {worst:.2e}"),
    )
}

/// Ring radius is the outermost radial maximum of rho. The global maximum
/// sits at the origin whenever the m = s component dominates, so it is
/// reported but not tested beyond s = 1.
fn structure_counts() -> Outcome {
    let p = demo_params();
    let fine = radii(6.0, 0.005);
    let mut notes = Vec::new();
    let mut ok = true;
    for s in 0..=3 {
        for b in if s == 0 {
            vec![Branch::Plus]
        } else {
            vec![Branch::Plus, Branch::Minus]
        } {
            let profiles: Vec<_> = (1..=4)
                .map(|m| ring_profile(&eigenspinor(key(s, b, m), &p), &fine, 8, |d, _, _| d.rho))
                .collect();
            let outer: Vec<f64> = profiles
                .iter()
                .map(|pr| *maxima_radii(pr).last().unwrap_or(&0.0))
                .collect();
            let global: Vec<f64> = profiles.iter().map(|pr| radius_of_max(pr)).collect();
            let increasing = |r: &[f64]| r.windows(2).all(|w| w[1] > w[0]);
            ok &= increasing(&outer);
            if s == 1 {
                ok &= increasing(&global);
            }
            notes.push(format!(
                "s={s}{} ring r {:?}{}",
                if s == 0 {
                    String::new()
                } else {
                    format!(" {b}")
                },
                outer
                    .iter()
                    .map(|r| (r * 1000.0).round() / 1000.0)
                    .collect::<Vec<_>>(),
                if increasing(&global) {
                    ""
                } else {
                    " (global max not monotone)"
                }
            ));
        }
    }
    let mut counts = Vec::new();
    for s in 0..=3 {
        let t = spin_density(
            &eigenspinor(key(s, Branch::Plus, s), &p),
            GridSpec::new(6.0, 512).unwrap(),
        )
        .unwrap();
        let c = count_maxima(&radial_profile(&t, Component::Rho, 64));
        ok &= c == s + 1;
        counts.push(c);
    }
    notes.push(format!(
        "maxima for (s, m=s, +), s = 0..3: {counts:?} (expect s + 1)"
    ));
    outcome(ok, notes.join("; "))
}

fn ladder_algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let f = random_poly(&mut rng, 6);
        worst = worst.max(f.raise().lower().sub(&f.lower().raise()).max_coeff_diff(&f));
    }
    for m in 0..=6 {
        for n in 0..=6 {
            worst = worst.max((eigenfunction(n, m).raise().norm_sqr() - (n as f64 + 1.0)).abs());
        }
        worst = worst.max(lll_state(m).lower().norm_sqr().sqrt());
    }
    outcome(
        worst < 1e-10,
        format!("max deviation {worst:.2e} (tol 1e-10)"),
    )
}

fn main() {
    let mut r = Runner { failures: 0 };
    let secs = Duration::from_secs;
    r.check(
        "1",
        "spectrum matches 2x2 diagonalization",
        Some(secs(1)),
        spectrum_equivalence,
    );
    r.check(
        "2",
        "Schrodinger residual, h = 0.01, 4th order",
        Some(secs(60)),
        schrodinger_residual,
    );
    r.check(
        "3",
        "orthonormality, analytic and quadrature",
        Some(secs(10)),
        orthonormality,
    );
    r.check(
        "4",
        "gauge invariance, extent 4, K = 40",
        Some(secs(5)),
        gauge_invariance,
    );
    let t5 = Instant::now();
    r.check(
        "5a",
        "s_z and rho rotationally symmetric",
        None,
        texture_rotational,
    );
    r.check(
        "5b",
        "in-plane spin magnitude rotationally symmetric",
        None,
        texture_in_plane_magnitude,
    );
    r.check(
        "5c",
        "s_x odd in y, even in x; s_y the reverse",
        None,
        texture_dipolar_parity,
    );
    r.check(
        "5d",
        "minus branch negates the in-plane spin",
        None,
        texture_branch_negation,
    );
    r.check("5e", "LLL has s_x = s_y = 0, s_z = -rho", None, texture_lll);
    let t5 = t5.elapsed();
    if t5 > secs(10) {
        r.failures += 1;
    }
    println!(
        "{} [5] texture checks runtime {:.2} s (budget 10 s)",
        if t5 > secs(10) { "FAIL" } else { "PASS" },
        t5.as_secs_f64()
    );
    r.check(
        "6",
        "ring radius and radial maxima counts",
        None,
        structure_counts,
    );
    r.check("7", "ladder algebra", Some(secs(1)), ladder_algebra);
    println!("acceptance: {} failure(s)", r.failures);
    if r.failures > 0 {
        std::process::exit(1);
    }
}
