//! Independent numerical checks.
//!
//! Nothing here uses the ladder-operator algebra or the closed-form spectrum
//! to produce a reference value: the Hamiltonian is applied in real space by
//! finite differences, inner products are trapezoidal sums, the 2×2 block is
//! diagonalized numerically, and Landau states are rebuilt from the Laguerre
//! recurrence.

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::NaturalParams;
use crate::polybasis::{eigenfunction, PolyGauss};
use crate::spectrum::{Block2, EigenState};
use crate::texture::{GridSpec, SampledSpinor, SpinorField};
use crate::tolerances::RESIDUAL_FLOOR;

/// Coarsest spacing accepted by [`apply_hamiltonian_fd`].
pub const MAX_FD_SPACING: f64 = 0.02;

/// Default stencil order.
pub const DEFAULT_ORDER: usize = 4;

/// Boundary exclusion, in stencil half-widths.
pub const MARGIN_HALF_WIDTHS: usize = 5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Central-difference weights for the first and second derivative.
struct Stencil {
    d1: &'static [f64],
    d2: &'static [f64],
}

impl Stencil {
    fn new(order: usize) -> Result<Self> {
        Ok(match order {
            2 => Stencil {
                d1: &[-0.5, 0.0, 0.5],
                d2: &[1.0, -2.0, 1.0],
            },
            4 => Stencil {
                d1: &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
                d2: &[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
            },
            6 => Stencil {
                d1: &[
                    -1.0 / 60.0,
                    3.0 / 20.0,
                    -3.0 / 4.0,
                    0.0,
                    3.0 / 4.0,
                    -3.0 / 20.0,
                    1.0 / 60.0,
                ],
                d2: &[
                    1.0 / 90.0,
                    -3.0 / 20.0,
                    3.0 / 2.0,
                    -49.0 / 18.0,
                    3.0 / 2.0,
                    -3.0 / 20.0,
                    1.0 / 90.0,
                ],
            },
            other => return Err(Error::StencilOrder(other)),
        })
    }

    fn half_width(&self) -> usize {
        self.d1.len() / 2
    }
}

/// Margin (in units of `r`) excluded from residual maxima.
pub fn interior_margin(grid: &GridSpec, order: usize) -> f64 {
    (MARGIN_HALF_WIDTHS * (order / 2)) as f64 * grid.spacing()
}

/// Applies the full Hamiltonian in natural units by finite differences:
///
/// ```text
/// H = ½[(-i∂x - y/2)² + (-i∂y + x/2)²] + ã[(-i∂y + x/2)σx - (-i∂x - y/2)σy] + g̃σz
/// ```
///
/// Points closer to the window edge than the stencil half-width are NaN.
pub fn apply_hamiltonian_fd(
    samples: &SampledSpinor,
    p: &NaturalParams,
    order: usize,
) -> Result<SampledSpinor> {
    let grid = samples.grid;
    grid.validate()?;
    let h = grid.spacing();
    if h > MAX_FD_SPACING * (1.0 + 1e-9) {
        return Err(Error::GridTooCoarse {
            h,
            required: MAX_FD_SPACING,
        });
    }
    let st = Stencil::new(order)?;
    let hw = st.half_width();
    let n = grid.resolution;
    let nan = Complex64::new(f64::NAN, f64::NAN);

    let rows: Vec<Vec<(Complex64, Complex64)>> = (0..n)
        .into_par_iter()
        .map(|iy| {
            let y = grid.coord(iy);
            (0..n)
                .map(|ix| {
                    if ix < hw || iy < hw || ix + hw >= n || iy + hw >= n {
                        return (nan, nan);
                    }
                    let x = grid.coord(ix);
                    let derivs = |f: &[Complex64]| {
                        let mut dx = Complex64::new(0.0, 0.0);
                        let mut dy = Complex64::new(0.0, 0.0);
                        let mut dxx = Complex64::new(0.0, 0.0);
                        let mut dyy = Complex64::new(0.0, 0.0);
                        for k in 0..st.d1.len() {
                            let fx = f[grid.index(ix + k - hw, iy)];
                            let fy = f[grid.index(ix, iy + k - hw)];
                            dx += fx * st.d1[k];
                            dy += fy * st.d1[k];
                            dxx += fx * st.d2[k];
                            dyy += fy * st.d2[k];
                        }
                        (dx / h, dy / h, dxx / (h * h), dyy / (h * h))
                    };
                    let i0 = grid.index(ix, iy);
                    let (u, d) = (samples.up[i0], samples.down[i0]);
                    let (ux, uy, uxx, uyy) = derivs(&samples.up);
                    let (dx, dy, dxx, dyy) = derivs(&samples.down);

                    let potential = (x * x + y * y) / 4.0;
                    let h0 = |f: Complex64,
                              fx: Complex64,
                              fy: Complex64,
                              fxx: Complex64,
                              fyy: Complex64| {
                        0.5 * (-(fxx + fyy) + I * (y * fx - x * fy) + potential * f)
                    };
                    let pi_x = |f: Complex64, fx: Complex64| -I * fx - 0.5 * y * f;
                    let pi_y = |f: Complex64, fy: Complex64| -I * fy + 0.5 * x * f;

                    let hu = h0(u, ux, uy, uxx, uyy)
                        + p.g_tilde * u
                        + p.a_tilde * (pi_y(d, dy) + I * pi_x(d, dx));
                    let hd = h0(d, dx, dy, dxx, dyy) - p.g_tilde * d
                        + p.a_tilde * (pi_y(u, uy) - I * pi_x(u, ux));
                    (hu, hd)
                })
                .collect()
        })
        .collect();
    let (up, down) = rows.into_iter().flatten().unzip();
    Ok(SampledSpinor { grid, up, down })
}

/// `max |(HΨ)_c - E Ψ_c| / max(sqrt(rho), floor)` over points at least
/// `margin` from the window edge.
pub fn relative_residual(
    psi: &SampledSpinor,
    h_psi: &SampledSpinor,
    energy: f64,
    margin: f64,
) -> f64 {
    let grid = psi.grid;
    let n = grid.resolution;
    let inside = |v: f64| v.abs() <= grid.extent - margin + 1e-12;
    let per_row: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|iy| {
            if !inside(grid.coord(iy)) {
                return 0.0;
            }
            let mut worst = 0.0_f64;
            for ix in (0..n).filter(|&ix| inside(grid.coord(ix))) {
                let i = grid.index(ix, iy);
                let (u, d) = (psi.up[i], psi.down[i]);
                let amp = (u.norm_sqr() + d.norm_sqr()).sqrt().max(RESIDUAL_FLOOR);
                let ru = (h_psi.up[i] - energy * u).norm();
                let rd = (h_psi.down[i] - energy * d).norm();
                worst = worst.max(ru.max(rd) / amp);
            }
            worst
        })
        .collect();
    per_row.into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub label: String,
    pub energy: f64,
    pub grid: GridSpec,
    pub stencil_order: usize,
    pub max_residual: f64,
    pub interior_margin: f64,
}

/// Finite-difference residual of `state` against `energy`.
pub fn residual_with_energy<F: SpinorField + ?Sized>(
    label: impl Into<String>,
    state: &F,
    energy: f64,
    p: &NaturalParams,
    grid: GridSpec,
    order: usize,
) -> Result<ResidualReport> {
    let psi = SampledSpinor::sample(state, grid)?;
    let h_psi = apply_hamiltonian_fd(&psi, p, order)?;
    let margin = interior_margin(&grid, order);
    Ok(ResidualReport {
        label: label.into(),
        energy,
        grid,
        stencil_order: order,
        max_residual: relative_residual(&psi, &h_psi, energy, margin),
        interior_margin: margin,
    })
}

/// Residual of an eigenstate against its own energy.
pub fn residual(
    state: &EigenState,
    p: &NaturalParams,
    grid: GridSpec,
    order: usize,
) -> Result<ResidualReport> {
    residual_with_energy(state.key.to_string(), state, state.energy, p, grid, order)
}

/// Residuals at `E` and `E + offset` from one Hamiltonian application.
pub fn residual_and_control(
    state: &EigenState,
    p: &NaturalParams,
    grid: GridSpec,
    order: usize,
    offset: f64,
) -> Result<(f64, f64)> {
    let psi = SampledSpinor::sample(state, grid)?;
    let h_psi = apply_hamiltonian_fd(&psi, p, order)?;
    let margin = interior_margin(&grid, order);
    Ok((
        relative_residual(&psi, &h_psi, state.energy, margin),
        relative_residual(&psi, &h_psi, state.energy + offset, margin),
    ))
}

/// Trapezoidal `∫ conj(f) g d²z` over the grid.
pub fn quadrature_inner(f: &[Complex64], g: &[Complex64], grid: &GridSpec) -> Complex64 {
    let n = grid.resolution;
    let h = grid.spacing();
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let rows: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|iy| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ix in 0..n {
                let k = grid.index(ix, iy);
                acc += f[k].conj() * g[k] * weight(ix);
            }
            acc * weight(iy)
        })
        .collect();
    rows.into_iter().sum::<Complex64>() * (h * h)
}

/// Samples a coefficient table on the grid, row-major.
pub fn sample_poly(psi: &PolyGauss, grid: &GridSpec) -> Vec<Complex64> {
    let n = grid.resolution;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|iy| {
            let y = grid.coord(iy);
            (0..n).map(|ix| psi.value_at(grid.coord(ix), y)).collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Samples `z^j z̄^k exp(-|z|²/4)`.
pub fn sample_monomial(j: usize, k: usize, grid: &GridSpec) -> Vec<Complex64> {
    grid.points()
        .into_iter()
        .map(|(x, y)| {
            let z = Complex64::new(x, y);
            z.powu(j as u32) * z.conj().powu(k as u32) * (-(x * x + y * y) / 4.0).exp()
        })
        .collect()
}

/// Eigenvalues (ascending) and unit eigenvectors (columns) of a 2×2 Hermitian block.
pub fn diagonalize_block(block: &Block2) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let m = Matrix2::new(block[0][0], block[0][1], block[1][0], block[1][1]);
    let eig = SymmetricEigen::new(m);
    let (lo, hi) = if eig.eigenvalues[0] <= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let col = |c: usize| [eig.eigenvectors[(0, c)], eig.eigenvectors[(1, c)]];
    (
        [eig.eigenvalues[lo], eig.eigenvalues[hi]],
        [col(lo), col(hi)],
    )
}

/// `|⟨u|v⟩|` for normalized two-vectors.
pub fn overlap2(u: &[Complex64; 2], v: &[Complex64; 2]) -> f64 {
    let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (u[0].conj() * v[0] + u[1].conj() * v[1]).norm() / (nu * nv)
}

/// `⟨Ψ|H|Ψ⟩ / ⟨Ψ|Ψ⟩` by finite differences and trapezoidal quadrature.
pub fn expectation_energy<F: SpinorField + ?Sized>(
    state: &F,
    p: &NaturalParams,
    grid: GridSpec,
    order: usize,
) -> Result<f64> {
    let psi = SampledSpinor::sample(state, grid)?;
    let h_psi = apply_hamiltonian_fd(&psi, p, order)?;
    let clean = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter()
            .map(|c| {
                if c.is_nan() {
                    Complex64::new(0.0, 0.0)
                } else {
                    *c
                }
            })
            .collect()
    };
    let (hu, hd) = (clean(&h_psi.up), clean(&h_psi.down));
    let num = quadrature_inner(&psi.up, &hu, &grid) + quadrature_inner(&psi.down, &hd, &grid);
    let den =
        quadrature_inner(&psi.up, &psi.up, &grid) + quadrature_inner(&psi.down, &psi.down, &grid);
    Ok(num.re / den.re)
}

/// Coefficients of `L_k^{(d)}(t)` in powers of `t`, from the three-term recurrence.
pub fn laguerre_coeffs(k: usize, d: usize) -> Vec<f64> {
    let d = d as f64;
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![1.0 + d, -1.0];
    for j in 1..k {
        let jf = j as f64;
        // (j+1) L_{j+1} = (2j + 1 + d - t) L_j - (j + d) L_{j-1}
        let mut next = vec![0.0; j + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i] += (2.0 * jf + 1.0 + d) * c;
            next[i + 1] -= c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= (jf + d) * c;
        }
        for c in &mut next {
            *c /= jf + 1.0;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized symmetric-gauge Landau state from the Laguerre closed form:
/// `z^(n-m) L_m^{(n-m)}(|z|²/2)` for `n >= m`, `z̄^(m-n) L_n^{(m-n)}(|z|²/2)`
/// otherwise, each times the envelope.
pub fn laguerre_state(n: usize, m: usize) -> PolyGauss {
    let (d, k, holomorphic) = if n >= m {
        (n - m, m, true)
    } else {
        (m - n, n, false)
    };
    // ∫ |z^d L_k^{(d)}(|z|²/2)|² e^{-|z|²/2} d²z = 2π 2^d (k+d)! / k!
    let ln_norm = (2.0 * PI).ln()
        + d as f64 * 2f64.ln()
        + (k + 1..=k + d).map(|i| (i as f64).ln()).sum::<f64>();
    let scale = (-0.5 * ln_norm).exp();
    let coeffs = laguerre_coeffs(k, d);
    PolyGauss::from_terms(coeffs.iter().enumerate().map(|(i, c)| {
        // t^i = (z z̄)^i / 2^i
        let v = Complex64::new(c * scale / 2f64.powi(i as i32), 0.0);
        if holomorphic {
            (d + i, i, v)
        } else {
            (i, d + i, v)
        }
    }))
}

/// Max coefficient difference between `eigenfunction(n, m)` and the
/// Laguerre form after aligning the global phase.
pub fn laguerre_crosscheck(n: usize, m: usize) -> f64 {
    let reference = laguerre_state(n, m);
    let ladder = eigenfunction(n, m);
    let (j, k, r) = reference
        .terms()
        .fold((0, 0, Complex64::new(0.0, 0.0)), |best, t| {
            if t.2.norm() > best.2.norm() {
                t
            } else {
                best
            }
        });
    let l = ladder.coeff(j, k);
    if l.norm() == 0.0 {
        return f64::INFINITY;
    }
    let phase = (r / l) / (r / l).norm();
    ladder.scale(phase).max_coeff_diff(&reference)
}
