//! Wavefunctions of the form `P(z, z̄) exp(-|z|²/4)` in natural units.
//!
//! The ladder operators act on the polynomial part only:
//!
//! ```text
//! a† (P G) = (-i/√2) (2∂_z̄ - z/2)(P G) = (-i/√2) (2∂_z̄ P - z P) G
//! a  (P G) = (-i/√2) (2∂_z + z̄/2)(P G) = (-i/√2) (2∂_z P) G
//! ```
//!
//! with `G = exp(-z z̄ / 4)`. These follow from `a† = (Π_x + iΠ_y)/√2` and
//! `a = (Π_x - iΠ_y)/√2` for the symmetric-gauge kinetic momentum
//! `Π = (-i∂_x - y/2, -i∂_y + x/2)`, so `[a, a†] = 1` holds exactly on the
//! coefficient tables.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::tolerances::{COEFF_EQ, TRIM_ABS};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Dense coefficient table `c[j][k]` of `z^j z̄^k` times the Gaussian envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGauss {
    /// Row-major: `coeffs[j * cols + k]`.
    coeffs: Vec<Complex64>,
    rows: usize,
    cols: usize,
}

impl Default for PolyGauss {
    fn default() -> Self {
        Self::zero()
    }
}

impl PolyGauss {
    pub fn zero() -> Self {
        PolyGauss {
            coeffs: Vec::new(),
            rows: 0,
            cols: 0,
        }
    }

    pub fn monomial(j: usize, k: usize, c: Complex64) -> Self {
        let mut p = Self::with_shape(j + 1, k + 1);
        p.set(j, k, c);
        p.trimmed()
    }

    /// Builds from `(j, k, c)` triples; repeated indices accumulate.
    pub fn from_terms<It>(terms: It) -> Self
    where
        It: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let rows = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let cols = terms.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut p = Self::with_shape(rows, cols);
        for (j, k, c) in terms {
            p.coeffs[j * cols + k] += c;
        }
        p.trimmed()
    }

    fn with_shape(rows: usize, cols: usize) -> Self {
        PolyGauss {
            coeffs: vec![Complex64::new(0.0, 0.0); rows * cols],
            rows,
            cols,
        }
    }

    fn set(&mut self, j: usize, k: usize, c: Complex64) {
        self.coeffs[j * self.cols + k] = c;
    }

    /// Coefficient of `z^j z̄^k` (zero outside the table).
    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        if j < self.rows && k < self.cols {
            self.coeffs[j * self.cols + k]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Highest power of `z` (None for the zero state).
    pub fn degree_z(&self) -> Option<usize> {
        self.rows.checked_sub(1)
    }

    /// Highest power of `z̄` (None for the zero state).
    pub fn degree_zbar(&self) -> Option<usize> {
        self.cols.checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.rows == 0
    }

    /// Nonzero entries as `(j, k, c)`, row-major.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |j| {
            (0..self.cols).filter_map(move |k| {
                let c = self.coeffs[j * self.cols + k];
                (c.norm() > TRIM_ABS).then_some((j, k, c))
            })
        })
    }

    /// Drops trailing all-zero rows and columns.
    fn trimmed(mut self) -> Self {
        let live = |c: &Complex64| c.norm() > TRIM_ABS;
        let mut rows = 0;
        let mut cols = 0;
        for j in 0..self.rows {
            for k in 0..self.cols {
                if live(&self.coeffs[j * self.cols + k]) {
                    rows = rows.max(j + 1);
                    cols = cols.max(k + 1);
                }
            }
        }
        if rows == self.rows && cols == self.cols {
            return self;
        }
        let mut out = Self::with_shape(rows, cols);
        for j in 0..rows {
            for k in 0..cols {
                out.coeffs[j * cols + k] = self.coeffs[j * self.cols + k];
            }
        }
        self.coeffs = out.coeffs;
        self.rows = rows;
        self.cols = cols;
        self
    }

    /// Entrywise comparison of trimmed tables within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let rows = self.rows.max(other.rows);
        let cols = self.cols.max(other.cols);
        (0..rows).all(|j| (0..cols).all(|k| (self.coeff(j, k) - other.coeff(j, k)).norm() <= tol))
    }

    /// Largest entrywise difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let rows = self.rows.max(other.rows);
        let cols = self.cols.max(other.cols);
        let mut worst = 0.0_f64;
        for j in 0..rows {
            for k in 0..cols {
                worst = worst.max((self.coeff(j, k) - other.coeff(j, k)).norm());
            }
        }
        worst
    }

    pub fn scale(&self, c: Complex64) -> Self {
        PolyGauss {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            rows: self.rows,
            cols: self.cols,
        }
        .trimmed()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, Complex64::new(-1.0, 0.0))
    }

    /// `self + w * other`.
    pub fn combine(&self, other: &Self, w: Complex64) -> Self {
        let rows = self.rows.max(other.rows);
        let cols = self.cols.max(other.cols);
        let mut out = Self::with_shape(rows, cols);
        for j in 0..rows {
            for k in 0..cols {
                out.coeffs[j * cols + k] = self.coeff(j, k) + w * other.coeff(j, k);
            }
        }
        out.trimmed()
    }

    fn mul_z(&self) -> Self {
        Self::from_terms(self.terms().map(|(j, k, c)| (j + 1, k, c)))
    }

    fn d_z(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|t| t.0 > 0)
                .map(|(j, k, c)| (j - 1, k, c * j as f64)),
        )
    }

    fn d_zbar(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|t| t.1 > 0)
                .map(|(j, k, c)| (j, k - 1, c * k as f64)),
        )
    }

    /// Applies `a†`.
    pub fn raise(&self) -> Self {
        let inner = self
            .d_zbar()
            .scale(Complex64::new(2.0, 0.0))
            .sub(&self.mul_z());
        inner.scale(-I / 2f64.sqrt())
    }

    /// Applies `a`.
    pub fn lower(&self) -> Self {
        self.d_z().scale(-I * 2f64.sqrt())
    }

    /// Exact `∫ conj(self) · other d²z`.
    ///
    /// Uses `∫ z^j z̄^k exp(-|z|²/2) d²z = δ_jk 2π 2^j j!`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        // conj(c z^j z̄^k) = conj(c) z^k z̄^j, so the product term is
        // z^(k + p) z̄^(j + q), nonzero when k + p = j + q.
        let max_n = (self.rows + other.rows + self.cols + other.cols).max(1);
        let moments = gaussian_moments(max_n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, k, a) in self.terms() {
            for (p, q, b) in other.terms() {
                if k + p == j + q {
                    acc += a.conj() * b * moments[k + p];
                }
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner_product(self).re
    }

    /// Value of `P(z, z̄) exp(-|z|²/4)` at `z = x + i y`.
    pub fn value_at(&self, x: f64, y: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let z = Complex64::new(x, y);
        let zb = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (0..self.rows).rev() {
            let row = &self.coeffs[j * self.cols..(j + 1) * self.cols];
            let mut inner = Complex64::new(0.0, 0.0);
            for c in row.iter().rev() {
                inner = inner * zb + c;
            }
            acc = acc * z + inner;
        }
        acc * (-(x * x + y * y) / 4.0).exp()
    }

    /// Values at `points`, in input order.
    pub fn evaluate(&self, points: &[(f64, f64)]) -> Vec<Complex64> {
        points.iter().map(|&(x, y)| self.value_at(x, y)).collect()
    }
}

/// `2π 2^n n!` for `n = 0..len`.
fn gaussian_moments(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut m = 2.0 * PI;
    for n in 0..len {
        if n > 0 {
            m *= 2.0 * n as f64;
        }
        out.push(m);
    }
    out
}

/// `∫ z^j z̄^k exp(-|z|²/2) d²z`.
pub fn gaussian_moment(j: usize, k: usize) -> f64 {
    if j != k {
        return 0.0;
    }
    gaussian_moments(j + 1)[j]
}

/// Normalized lowest-Landau-level state `z̄^m / sqrt(2π 2^m m!)`.
pub fn lll_state(m: usize) -> PolyGauss {
    let norm = gaussian_moment(m, m).sqrt();
    PolyGauss::monomial(0, m, Complex64::new(1.0 / norm, 0.0))
}

type Cache = Mutex<HashMap<(usize, usize), Arc<PolyGauss>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normalized `Ψ_{n,m} = (a†)^n Ψ_{0,m} / sqrt(n!)`, memoized.
pub fn eigenfunction(n: usize, m: usize) -> Arc<PolyGauss> {
    if let Some(hit) = cache()
        .lock()
        .expect("eigenfunction cache poisoned")
        .get(&(n, m))
    {
        return Arc::clone(hit);
    }
    // Built outside the lock; concurrent builders produce identical tables.
    let state = if n == 0 {
        lll_state(m)
    } else {
        let below = eigenfunction(n - 1, m);
        below
            .raise()
            .scale(Complex64::new(1.0 / (n as f64).sqrt(), 0.0))
    };
    let mut guard = cache().lock().expect("eigenfunction cache poisoned");
    Arc::clone(guard.entry((n, m)).or_insert_with(|| Arc::new(state)))
}

/// Entrywise equality at the crate-wide coefficient tolerance.
pub fn same_state(a: &PolyGauss, b: &PolyGauss) -> bool {
    a.approx_eq(b, COEFF_EQ)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lll_coefficients() {
        assert!((lll_state(0).coeff(0, 0).re - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((lll_state(1).coeff(0, 1).re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(lll_state(3).degree_z(), Some(0));
        assert_eq!(lll_state(3).degree_zbar(), Some(3));
    }

    #[test]
    fn lowering_annihilates_lll() {
        for m in 0..3 {
            assert!(lll_state(m).lower().is_zero(), "m = {m}");
        }
    }

    #[test]
    fn raised_norm_is_n_plus_one() {
        for m in [0, 2] {
            for n in 0..=5 {
                let raised = eigenfunction(n, m).raise();
                assert!(
                    (raised.norm_sqr() - (n as f64 + 1.0)).abs() < 1e-10,
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn raise_then_lower_is_n_plus_one() {
        for n in 0..6 {
            let psi = eigenfunction(n, 2);
            let back = psi.raise().lower();
            let expect = psi.scale(c(n as f64 + 1.0, 0.0));
            assert!(back.approx_eq(&expect, 1e-10), "n = {n}");
        }
    }

    #[test]
    fn orthonormal_up_to_six() {
        for m in 0..=6 {
            for n in 0..=6 {
                for n2 in 0..=6 {
                    let ip = eigenfunction(n, m).inner_product(&eigenfunction(n2, m));
                    let delta = if n == n2 { 1.0 } else { 0.0 };
                    assert!(
                        (ip - c(delta, 0.0)).norm() < 1e-9,
                        "<{n},{m}|{n2},{m}> = {ip}"
                    );
                }
            }
        }
    }

    #[test]
    fn angular_selection_rule() {
        for n in 0..7 {
            for m in 0..7 {
                for (j, k, _) in eigenfunction(n, m).terms() {
                    assert_eq!(j as i64 - k as i64, n as i64 - m as i64);
                }
            }
        }
    }

    #[test]
    fn angular_phase_is_n_minus_m() {
        let rho = 1.3;
        for (n, m) in [(1, 0), (2, 1), (0, 3), (4, 2)] {
            let psi = eigenfunction(n, m);
            let base = psi.value_at(rho, 0.0);
            for t in 0..8 {
                let th = t as f64 * PI / 4.0;
                let v = psi.value_at(rho * th.cos(), rho * th.sin());
                let expected = base * Complex64::from_polar(1.0, (n as f64 - m as f64) * th);
                assert!((v - expected).norm() < 1e-12, "n={n} m={m} t={t}");
            }
        }
    }

    #[test]
    fn moments() {
        assert!((gaussian_moment(0, 0) - 2.0 * PI).abs() < 1e-15);
        assert_eq!(gaussian_moment(1, 0), 0.0);
        assert!((gaussian_moment(1, 1) - 4.0 * PI).abs() < 1e-14);
        assert!((gaussian_moment(3, 3) - 2.0 * PI * 8.0 * 6.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_matches_closed_form() {
        let v = lll_state(0).evaluate(&[(0.0, 0.0), (1.0, -2.0)]);
        assert!((v[0].re - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((v[1].re - (-5.0_f64 / 4.0).exp() / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(lll_state(1).value_at(0.0, 0.0), c(0.0, 0.0));
        // z z̄² at z = 1 + i: |z|² z̄ = 2 (1 - i)
        let p = PolyGauss::monomial(1, 2, c(1.0, 0.0));
        let expected = c(2.0, -2.0) * (-0.5_f64).exp();
        assert!((p.value_at(1.0, 1.0) - expected).norm() < 1e-15);
    }

    #[test]
    fn modulus_rotation_invariant() {
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|i| (0.3 * i as f64, 1.0 - 0.2 * i as f64))
            .collect();
        for (n, m) in [(0, 0), (1, 1), (3, 2), (2, 5)] {
            let psi = eigenfunction(n, m);
            let base: Vec<f64> = psi.evaluate(&pts).iter().map(|v| v.norm()).collect();
            for t in 1..8 {
                let (s, co) = (t as f64 * PI / 4.0).sin_cos();
                let rot: Vec<_> = pts
                    .iter()
                    .map(|&(x, y)| (co * x - s * y, s * x + co * y))
                    .collect();
                for (a, b) in psi.evaluate(&rot).iter().zip(&base) {
                    assert!((a.norm() - b).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn trimming_makes_degree_exact() {
        let p = PolyGauss::from_terms([(3, 1, c(1.0, 0.0)), (0, 0, c(2.0, 0.0))]);
        let q = p.sub(&PolyGauss::monomial(3, 1, c(1.0, 0.0)));
        assert_eq!(q.degree_z(), Some(0));
        assert_eq!(q.degree_zbar(), Some(0));
        assert!(p.sub(&p).is_zero());
        assert!(same_state(&q, &PolyGauss::monomial(0, 0, c(2.0, 0.0))));
    }

    #[test]
    fn memoized_eigenfunction_is_shared() {
        let a = eigenfunction(4, 3);
        let b = eigenfunction(4, 3);
        assert!(Arc::ptr_eq(&a, &b));
    }

    fn small_poly() -> impl Strategy<Value = PolyGauss> {
        prop::collection::vec((0usize..4, 0usize..4, -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(
            |t| PolyGauss::from_terms(t.into_iter().map(|(j, k, re, im)| (j, k, c(re, im)))),
        )
    }

    proptest! {
        #[test]
        fn commutator_is_identity(p in small_poly()) {
            let lhs = p.raise().lower().sub(&p.lower().raise());
            prop_assert!(lhs.approx_eq(&p, 1e-10));
        }

        #[test]
        fn inner_product_hermitian(p in small_poly(), q in small_poly()) {
            let a = p.inner_product(&q);
            let b = q.inner_product(&p).conj();
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }

        #[test]
        fn lower_is_adjoint_of_raise(p in small_poly(), q in small_poly()) {
            let a = p.inner_product(&q.raise());
            let b = p.lower().inner_product(&q);
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }
}
