//! Spin densities `Ψ†σ_iΨ` of eigenspinors and their superpositions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::NaturalParams;
use crate::polybasis::PolyGauss;
use crate::spectrum::{eigenspinor, Branch, EigenState, LevelKey};
use crate::tolerances::{NORMALIZED_MASK, RIPPLE_PROMINENCE};

/// Square window `[-extent, extent]²` sampled at `resolution` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extent: f64,
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            extent: 6.0,
            resolution: 256,
        }
    }
}

impl GridSpec {
    pub fn new(extent: f64, resolution: usize) -> Result<Self> {
        let g = GridSpec { extent, resolution };
        g.validate()?;
        Ok(g)
    }

    /// Grid with spacing no larger than `h` covering `[-extent, extent]`.
    pub fn with_spacing(extent: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be > 0, got {h}")));
        }
        Self::new(extent, (2.0 * extent / h).round() as usize + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be >= 2, got {}",
                self.resolution
            )));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "extent must be > 0, got {}",
                self.extent
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.resolution - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + 2.0 * self.extent * i as f64 / (self.resolution - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of `(ix, iy)`; rows run over y, x varies fastest.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.resolution + ix
    }

    /// All points, row-major in y then x.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.resolution;
        (0..n)
            .flat_map(|iy| (0..n).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| (self.coord(ix), self.coord(iy)))
            .collect()
    }
}

/// Anything that yields `(ψ↑, ψ↓)` at a point.
pub trait SpinorField: Sync {
    fn spinor_at(&self, x: f64, y: f64) -> (Complex64, Complex64);
}

impl SpinorField for EigenState {
    fn spinor_at(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        self.value_at(x, y)
    }
}

/// Two-component samples on a grid.
#[derive(Debug, Clone)]
pub struct SampledSpinor {
    pub grid: GridSpec,
    pub up: Vec<Complex64>,
    pub down: Vec<Complex64>,
}

impl SampledSpinor {
    /// Evaluates `field` on every grid point, in parallel over rows.
    pub fn sample<F: SpinorField + ?Sized>(field: &F, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let n = grid.resolution;
        let rows: Vec<Vec<(Complex64, Complex64)>> = (0..n)
            .into_par_iter()
            .map(|iy| {
                let y = grid.coord(iy);
                (0..n)
                    .map(|ix| field.spinor_at(grid.coord(ix), y))
                    .collect()
            })
            .collect();
        let (up, down) = rows.into_iter().flatten().unzip();
        Ok(SampledSpinor { grid, up, down })
    }

    fn bilinear(&self, values: &[Complex64], x: f64, y: f64) -> Complex64 {
        let (ix, fx) = locate(&self.grid, x);
        let (iy, fy) = locate(&self.grid, y);
        let at = |i, j| values[self.grid.index(i, j)];
        at(ix, iy) * (1.0 - fx) * (1.0 - fy)
            + at(ix + 1, iy) * fx * (1.0 - fy)
            + at(ix, iy + 1) * (1.0 - fx) * fy
            + at(ix + 1, iy + 1) * fx * fy
    }
}

/// Cell index and fractional offset for bilinear interpolation, clamped.
fn locate(grid: &GridSpec, v: f64) -> (usize, f64) {
    let t = ((v + grid.extent) / grid.spacing()).clamp(0.0, (grid.resolution - 1) as f64);
    let i = (t.floor() as usize).min(grid.resolution - 2);
    (i, t - i as f64)
}

impl SpinorField for SampledSpinor {
    fn spinor_at(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        (
            self.bilinear(&self.up, x, y),
            self.bilinear(&self.down, x, y),
        )
    }
}

/// A two-component state, analytic or sampled.
#[derive(Debug, Clone)]
pub enum Spinor {
    Analytic { up: PolyGauss, down: PolyGauss },
    Sampled(SampledSpinor),
}

impl From<EigenState> for Spinor {
    fn from(st: EigenState) -> Self {
        Spinor::Analytic {
            up: st.up,
            down: st.down,
        }
    }
}

impl From<&EigenState> for Spinor {
    fn from(st: &EigenState) -> Self {
        Spinor::Analytic {
            up: st.up.clone(),
            down: st.down.clone(),
        }
    }
}

impl Spinor {
    /// Analytic norm, or `None` for sampled states.
    pub fn norm_sqr(&self) -> Option<f64> {
        match self {
            Spinor::Analytic { up, down } => Some(up.norm_sqr() + down.norm_sqr()),
            Spinor::Sampled(_) => None,
        }
    }
}

impl SpinorField for Spinor {
    fn spinor_at(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        match self {
            Spinor::Analytic { up, down } => (up.value_at(x, y), down.value_at(x, y)),
            Spinor::Sampled(s) => s.spinor_at(x, y),
        }
    }
}

/// Spin density at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpinDensity {
    pub rho: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl SpinDensity {
    pub fn from_components(up: Complex64, down: Complex64) -> Self {
        let (nu, nd) = (up.norm_sqr(), down.norm_sqr());
        let cross = up.conj() * down;
        SpinDensity {
            rho: nu + nd,
            sx: 2.0 * cross.re,
            sy: 2.0 * cross.im,
            sz: nu - nd,
        }
    }

    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::Rho => self.rho,
            Component::Sx => self.sx,
            Component::Sy => self.sy,
            Component::Sz => self.sz,
        }
    }

    pub fn spin_magnitude(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    pub fn in_plane_magnitude(&self) -> f64 {
        self.sx.hypot(self.sy)
    }
}

pub fn density_at<F: SpinorField + ?Sized>(field: &F, x: f64, y: f64) -> SpinDensity {
    let (u, d) = field.spinor_at(x, y);
    SpinDensity::from_components(u, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Rho,
    Sx,
    Sy,
    Sz,
}

/// Gridded `rho, s_x, s_y, s_z`, row-major in y then x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinTexture {
    pub grid: GridSpec,
    pub rho: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub sz: Vec<f64>,
    /// True for the `s_i / rho` variant.
    #[serde(default)]
    pub normalized: bool,
}

impl SpinTexture {
    pub fn field(&self, c: Component) -> &[f64] {
        match c {
            Component::Rho => &self.rho,
            Component::Sx => &self.sx,
            Component::Sy => &self.sy,
            Component::Sz => &self.sz,
        }
    }

    pub fn at(&self, ix: usize, iy: usize) -> SpinDensity {
        let i = self.grid.index(ix, iy);
        SpinDensity {
            rho: self.rho[i],
            sx: self.sx[i],
            sy: self.sy[i],
            sz: self.sz[i],
        }
    }

    /// Riemann sum of `rho` over the window.
    pub fn total_density(&self) -> f64 {
        let h = self.grid.spacing();
        self.rho.iter().sum::<f64>() * h * h
    }

    /// `s_i / rho` with points where `rho < 1e-15` set to NaN.
    pub fn normalized(&self) -> SpinTexture {
        let ratio = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .zip(&self.rho)
                .map(|(s, r)| {
                    if *r < NORMALIZED_MASK {
                        f64::NAN
                    } else {
                        s / r
                    }
                })
                .collect()
        };
        SpinTexture {
            grid: self.grid,
            rho: self.rho.clone(),
            sx: ratio(&self.sx),
            sy: ratio(&self.sy),
            sz: ratio(&self.sz),
            normalized: true,
        }
    }

    /// Bilinear interpolation of one component.
    pub fn interpolate(&self, c: Component, x: f64, y: f64) -> f64 {
        let f = self.field(c);
        let (ix, fx) = locate(&self.grid, x);
        let (iy, fy) = locate(&self.grid, y);
        let at = |i, j| f[self.grid.index(i, j)];
        at(ix, iy) * (1.0 - fx) * (1.0 - fy)
            + at(ix + 1, iy) * fx * (1.0 - fy)
            + at(ix, iy + 1) * (1.0 - fx) * fy
            + at(ix + 1, iy + 1) * fx * fy
    }
}

/// Spin density of `state` on `grid`.
pub fn spin_density<F: SpinorField + ?Sized>(state: &F, grid: GridSpec) -> Result<SpinTexture> {
    grid.validate()?;
    let n = grid.resolution;
    let rows: Vec<Vec<SpinDensity>> = (0..n)
        .into_par_iter()
        .map(|iy| {
            let y = grid.coord(iy);
            (0..n)
                .map(|ix| density_at(state, grid.coord(ix), y))
                .collect()
        })
        .collect();
    let cells: Vec<SpinDensity> = rows.into_iter().flatten().collect();
    Ok(SpinTexture {
        grid,
        rho: cells.iter().map(|c| c.rho).collect(),
        sx: cells.iter().map(|c| c.sx).collect(),
        sy: cells.iter().map(|c| c.sy).collect(),
        sz: cells.iter().map(|c| c.sz).collect(),
        normalized: false,
    })
}

/// Spin density of sampled data; the grid must match.
pub fn sampled_spin_density(samples: &SampledSpinor, grid: GridSpec) -> Result<SpinTexture> {
    if samples.grid != grid {
        return Err(Error::InvalidGrid(
            "sampled spinor lives on a different grid".into(),
        ));
    }
    grid.validate()?;
    let cells: Vec<SpinDensity> = samples
        .up
        .iter()
        .zip(&samples.down)
        .map(|(u, d)| SpinDensity::from_components(*u, *d))
        .collect();
    Ok(SpinTexture {
        grid,
        rho: cells.iter().map(|c| c.rho).collect(),
        sx: cells.iter().map(|c| c.sx).collect(),
        sy: cells.iter().map(|c| c.sy).collect(),
        sz: cells.iter().map(|c| c.sz).collect(),
        normalized: false,
    })
}

/// Normalized `N Σ_m a_m Ψ^±_{s,m}` at fixed `s` and branch (`None` for the LLL).
///
/// Repeated `m` entries are summed before normalizing.
pub fn superpose(
    weights: &[(usize, Complex64)],
    s: usize,
    branch: Option<Branch>,
    p: &NaturalParams,
) -> Result<Spinor> {
    let mut merged: BTreeMap<usize, Complex64> = BTreeMap::new();
    for &(m, a) in weights {
        *merged.entry(m).or_default() += a;
    }
    let total: f64 = merged.values().map(|a| a.norm_sqr()).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let scale = 1.0 / total.sqrt();
    let mut up = PolyGauss::zero();
    let mut down = PolyGauss::zero();
    for (&m, &a) in &merged {
        let key = match (s, branch) {
            (0, None) => LevelKey::lll(m),
            (0, Some(_)) => return Err(Error::LowestLevel),
            (_, Some(b)) => LevelKey::split(s, b, m)?,
            (_, None) => return Err(Error::Usage("a branch is required for s >= 1".into())),
        };
        let st = eigenspinor(key, p);
        up = up.combine(&st.up, a * scale);
        down = down.combine(&st.down, a * scale);
    }
    Ok(Spinor::Analytic { up, down })
}

/// Angular statistics of a component on one ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub radius: f64,
    pub mean: f64,
    /// Standard deviation over the ring.
    pub spread: f64,
}

fn ring_stats(values: impl Iterator<Item = f64>, radius: f64) -> ProfilePoint {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    ProfilePoint {
        radius,
        mean,
        spread: var.sqrt(),
    }
}

fn ring_angles(n_angles: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n_angles).map(move |k| (2.0 * PI * k as f64 / n_angles as f64).sin_cos())
}

/// Angular mean and spread of `component` on rings from one grid spacing out
/// to the window half-width, by bilinear interpolation of the texture.
pub fn radial_profile(t: &SpinTexture, component: Component, n_angles: usize) -> Vec<ProfilePoint> {
    let h = t.grid.spacing();
    let count = (t.grid.extent / h).floor() as usize;
    (1..=count)
        .map(|i| {
            let r = i as f64 * h;
            ring_stats(
                ring_angles(n_angles).map(|(s, c)| t.interpolate(component, r * c, r * s)),
                r,
            )
        })
        .collect()
}

/// Same statistics by direct evaluation of `field` on the given radii.
pub fn ring_profile<F, C>(
    field: &F,
    radii: &[f64],
    n_angles: usize,
    quantity: C,
) -> Vec<ProfilePoint>
where
    F: SpinorField + ?Sized,
    C: Fn(&SpinDensity, f64, f64) -> f64 + Sync,
{
    radii
        .par_iter()
        .map(|&r| {
            ring_stats(
                ring_angles(n_angles).map(|(s, c)| {
                    let (x, y) = (r * c, r * s);
                    quantity(&density_at(field, x, y), x, y)
                }),
                r,
            )
        })
        .collect()
}

/// Number of local maxima of the profile mean; see [`maxima_radii`].
pub fn count_maxima(profile: &[ProfilePoint]) -> usize {
    maxima_radii(profile).len()
}

/// Radii of the local maxima of the profile mean, innermost first.
///
/// The innermost sample counts when it exceeds everything out to the next
/// higher point (the profile is even in `r`, so the origin is interior). The
/// outermost sample never counts. Maxima whose prominence is below
/// `1e-6 * max|mean|` are ignored.
pub fn maxima_radii(profile: &[ProfilePoint]) -> Vec<f64> {
    let v: Vec<f64> = profile.iter().map(|p| p.mean).collect();
    let n = v.len();
    let mut found = Vec::new();
    if n < 2 {
        return found;
    }
    let scale = v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let threshold = RIPPLE_PROMINENCE * scale;
    let mut i = 0;
    while i < n - 1 {
        // Collapse plateaus to their first index.
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        let left_ok = i == 0 || v[i - 1] < v[i];
        let right_ok = j + 1 < n && v[j + 1] < v[i];
        if left_ok && right_ok {
            let right_base = descend(&v, j, 1);
            let prominence = if i == 0 {
                v[i] - right_base
            } else {
                v[i] - right_base.max(descend(&v, i, -1))
            };
            if prominence > threshold {
                found.push(profile[i].radius);
            }
        }
        i = j + 1;
    }
    found
}

/// Lowest value reached walking from `start` in `dir` before exceeding `v[start]`.
fn descend(v: &[f64], start: usize, dir: isize) -> f64 {
    let peak = v[start];
    let mut low = peak;
    let mut k = start as isize + dir;
    while k >= 0 && (k as usize) < v.len() {
        let x = v[k as usize];
        // Ties stop the leftward walk only, so equal twin peaks count once.
        if x > peak || (dir < 0 && x >= peak) {
            break;
        }
        low = low.min(x);
        k += dir;
    }
    low
}

/// Radius where the profile mean peaks globally.
pub fn radius_of_max(profile: &[ProfilePoint]) -> f64 {
    profile
        .iter()
        .fold((f64::NEG_INFINITY, 0.0), |(best, r), p| {
            if p.mean > best {
                (p.mean, p.radius)
            } else {
                (best, r)
            }
        })
        .1
}
