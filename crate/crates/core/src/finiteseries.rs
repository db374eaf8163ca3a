//! Finite Fourier series at the rationals `a/q`.
//!
//! For `f` on `[0, 1]` with `f(0) = f(1)`, continuous at the grid `ℓ/q`,
//!
//! ```text
//! f(a/q) = b_0 + Σ_{r=1}^{q−1} b_r e^{2πira/q},   1 ≤ a ≤ q,
//! ```
//!
//! with `b_r = ∫_0^1 ψ(u, q−r, q) df` and `b_0 = ∫_0^1 f du + ∫_0^1 ψ(u, q, q) df`.
//! The kernels for `r ≥ 1` are step functions on the grid, so `b_r` reduces to
//! a finite sum of grid increments of `f`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcmodel::PiecewiseFn;
use crate::kernels::{root_of_unity, ApKernelClosedForm, SawtoothKernel};
use crate::stieltjes::{integrate, rs_smooth, QuadratureConfig};

/// Residual allowed by [`coefficient_independence_check`].
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFourier {
    q: usize,
    /// `b[0]` is the mean coefficient, `b[r]` multiplies `e^{2πira/q}`.
    b: Vec<Complex64>,
    /// `f(ℓ/q)` for `ℓ = 0..=q`.
    grid_values: Vec<f64>,
    est_error: f64,
}

impl FiniteFourier {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn grid_values(&self) -> &[f64] {
        &self.grid_values
    }

    /// Quadrature error estimate carried by `b_0`.
    pub fn est_error(&self) -> f64 {
        self.est_error
    }

    /// `b_0 + Σ_{r=1}^{q−1} b_r e^{2πira/q}`, which equals `f(a/q)`.
    pub fn reconstruct(&self, a: i64) -> Result<Complex64> {
        let q = self.q as i64;
        if !(1 <= a && a <= q) {
            return Err(Error::argument(format!("need 1 ≤ a ≤ q = {q}, got {a}")));
        }
        let mut sum = self.b[0];
        for r in 1..q {
            sum += self.b[r as usize] * root_of_unity(r * a, q);
        }
        Ok(sum)
    }
}

/// `ℓ/q`, computed the same way the kernels place their jumps.
fn grid_point(l: usize, q: usize) -> f64 {
    l as f64 / q as f64
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
}

fn check_hypotheses(f: &PiecewiseFn, q: usize) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(Error::argument("modulus must be ≥ 1"));
    }
    let dom = f.domain();
    if !(dom.contains(0.0) && dom.contains(1.0)) {
        return Err(Error::domain(format!("f must be defined on [0, 1], its domain is [{}, {}]", dom.c(), dom.d())));
    }
    let grid: Vec<f64> = (0..=q).map(|l| f.eval(grid_point(l, q))).collect::<Result<_>>()?;
    if grid[0] != grid[q] {
        return Err(Error::precondition(format!("need f(0) = f(1), got {} and {}", grid[0], grid[q])));
    }
    for (l, &value) in grid.iter().enumerate() {
        let x = grid_point(l, q);
        let left_ok = l == 0 || x == dom.c() || same(f.left_limit(x)?, value);
        let right_ok = l == q || x == dom.d() || same(f.right_limit(x)?, value);
        if !(left_ok && right_ok) {
            return Err(Error::precondition(format!("f must be continuous at the grid point {l}/{q}")));
        }
    }
    Ok(grid)
}

fn mean_coefficient(f: &PiecewiseFn, q: usize, cfg: &QuadratureConfig) -> Result<(Complex64, f64)> {
    let (mean, mean_err) = integrate(f, 0.0, 1.0, cfg)?;
    let kernel = SawtoothKernel::residue_zero(q as i64).to_piecewise(0.0, 1.0)?;
    let st = rs_smooth(&kernel, f, 0.0, 1.0, cfg)?;
    Ok((Complex64::new(mean + st.value, 0.0), mean_err + st.est_error))
}

/// Coefficients with `b_r`, `r ≥ 1`, summed exactly from grid increments:
/// `b_r = Σ_k s_k (f((k+1)/q) − f(k/q))` over the steps `s_k` of
/// `ψ(u, q−r, q)`. Any jump of `f` inside a cell is part of that cell's
/// increment.
pub fn finite_coeffs(f: &PiecewiseFn, q: usize, cfg: &QuadratureConfig) -> Result<FiniteFourier> {
    let grid = check_hypotheses(f, q)?;
    let (b0, est_error) = mean_coefficient(f, q, cfg)?;
    let mut b = vec![b0];
    for r in 1..q {
        let kernel = ApKernelClosedForm::new((q - r) as i64, q as i64)?;
        let br = kernel.step_values().iter().zip(grid.windows(2)).map(|(s, g)| s * (g[1] - g[0])).sum();
        b.push(br);
    }
    Ok(FiniteFourier { q, b, grid_values: grid, est_error })
}

/// Same coefficients with every `b_r` taken as a Stieltjes integral by
/// quadrature, splitting the kernel into real and imaginary step functions.
pub fn finite_coeffs_quadrature(f: &PiecewiseFn, q: usize, cfg: &QuadratureConfig) -> Result<FiniteFourier> {
    let grid = check_hypotheses(f, q)?;
    let (b0, mut est_error) = mean_coefficient(f, q, cfg)?;
    let mut b = vec![b0];
    for r in 1..q {
        let (re, im) = ApKernelClosedForm::new((q - r) as i64, q as i64)?.to_piecewise_parts()?;
        let x = rs_smooth(&re, f, 0.0, 1.0, cfg)?;
        let y = rs_smooth(&im, f, 0.0, 1.0, cfg)?;
        est_error += x.est_error + y.est_error;
        b.push(Complex64::new(x.value, y.value));
    }
    Ok(FiniteFourier { q, b, grid_values: grid, est_error })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceCheck {
    pub passed: bool,
    pub max_residual: f64,
    /// `|reconstruct(a) − f(a/q)|` for `a = 1..=q`.
    pub residuals: Vec<f64>,
}

/// Reconstructs every `f(a/q)`, `1 ≤ a ≤ q`, from one coefficient vector.
pub fn coefficient_independence_check(f: &PiecewiseFn, q: usize, cfg: &QuadratureConfig) -> Result<IndependenceCheck> {
    let ff = finite_coeffs(f, q, cfg)?;
    let residuals =
        (1..=q).map(|a| Ok((ff.reconstruct(a as i64)? - ff.grid_values[a]).norm())).collect::<Result<Vec<f64>>>()?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(IndependenceCheck { passed: max_residual <= RECONSTRUCTION_TOL, max_residual, residuals })
}
