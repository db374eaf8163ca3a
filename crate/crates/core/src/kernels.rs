//! Sawtooth kernels.
//!
//! `ψ(u) = u − ⌊u⌋ − 1/2` has the boundedly convergent expansion
//! `−Σ_{|n|≥1} e^{2πinu} / (2πin)` off the integers. Keeping only the
//! frequencies `n ≡ r (mod q)` gives `ψ(u, r, q)`, which for `r ≢ 0` is a
//! 1-periodic step function: a constant `c(r, q)` plus a staircase that drops
//! by `(1/q) e^{2πiℓr/q}` at each grid point `ℓ/q`. At a grid point the
//! staircase takes the mean of its two neighbouring steps, which is where the
//! symmetric partial sums of the series converge.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcmodel::{BinOp, Expr, PiecewiseFn, SmoothPiece};

/// `u − ⌊u⌋ − 1/2`. Takes the value `−1/2` at the integers, where the Fourier
/// series of `ψ` sums to `0` instead.
pub fn psi(u: f64) -> f64 {
    u - u.floor() - 0.5
}

/// `sin(2πt)`, exactly zero at integer and half-integer `t`.
fn sin_turns(t: f64) -> f64 {
    let r = t - t.floor();
    if r == 0.0 || r == 0.5 {
        0.0
    } else {
        (TAU * r).sin()
    }
}

/// `e^{2πi k/q}` with `k` reduced modulo `q` first.
pub(crate) fn root_of_unity(k: i64, q: i64) -> Complex64 {
    let k = k.rem_euclid(q);
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * k == q {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == q {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * k == 3 * q {
        return Complex64::new(0.0, -1.0);
    }
    let (s, c) = (TAU * k as f64 / q as f64).sin_cos();
    Complex64::new(c, s)
}

/// Truncated expansion `ψ(u, ℓ) = Σ_{n=1}^{ℓ} sin(2πnu) / (−πn)`.
pub fn psi_partial(u: f64, l: u64) -> f64 {
    let frac = u - u.floor();
    (1..=l).map(|n| sin_turns(n as f64 * frac) / (-PI * n as f64)).sum()
}

/// Mean of the first `n` truncations, `(1/N) Σ_{ℓ=1}^{N} ψ(u, ℓ)`.
pub fn psi_cesaro(u: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::argument("Cesàro mean needs N ≥ 1"));
    }
    let frac = u - u.floor();
    let nf = n as f64;
    // harmonic k appears in the truncations ℓ = k..N
    let sum: f64 = (1..=n).map(|k| (nf - k as f64 + 1.0) * sin_turns(k as f64 * frac) / (-PI * k as f64)).sum();
    Ok(sum / nf)
}

fn check_residue(r: i64, q: i64) -> Result<()> {
    if q < 1 {
        return Err(Error::argument(format!("modulus must be ≥ 1, got {q}")));
    }
    if !(1 <= r && r <= q) {
        return Err(Error::argument(format!("residue must satisfy 1 ≤ r ≤ q, got r = {r}, q = {q}")));
    }
    Ok(())
}

fn cot_pi_fraction(r: i64, q: i64) -> f64 {
    if 2 * r == q {
        0.0
    } else if 4 * r == q {
        1.0
    } else if 4 * r == 3 * q {
        -1.0
    } else {
        1.0 / (PI * r as f64 / q as f64).tan()
    }
}

/// The constant `c(r, q)`, the value of `ψ(u, r, q)` at the integers:
/// `(i / 2q) cot(πr/q)` for `1 ≤ r < q`.
pub fn c_rq(r: i64, q: i64) -> Result<Complex64> {
    check_residue(r, q)?;
    if r == q {
        return Err(Error::argument("c(r, q) needs r < q; the r = q kernel is a sawtooth"));
    }
    Ok(Complex64::new(0.0, cot_pi_fraction(r, q) / (2.0 * q as f64)))
}

/// Direct evaluation of `−(1/2πi) (1/r − 2r Σ_{m=1}^{M} 1/(m²q² − r²))`,
/// summed smallest terms first.
pub fn c_rq_series(r: i64, q: i64, m_max: u64) -> Result<Complex64> {
    check_residue(r, q)?;
    if r == q {
        return Err(Error::argument("c(r, q) needs r < q"));
    }
    let (rf, qf) = (r as f64, q as f64);
    let tail: f64 = (1..=m_max)
        .rev()
        .map(|m| {
            let mq = m as f64 * qf;
            1.0 / ((mq - rf) * (mq + rf))
        })
        .sum();
    Ok(Complex64::new(0.0, (1.0 / rf - 2.0 * rf * tail) / TAU))
}

/// Closed form of `ψ(u, r, q)` for `1 ≤ r < q` on one period.
#[derive(Debug, Clone, PartialEq)]
pub struct ApKernelClosedForm {
    r: i64,
    q: i64,
    c_rq: Complex64,
    /// `step_values[k]` is the value on `(k/q, (k+1)/q)`.
    step_values: Vec<Complex64>,
    /// `jump_values[ℓ]` is the value at `u = ℓ/q`, `ℓ = 0..=q`.
    jump_values: Vec<Complex64>,
}

impl ApKernelClosedForm {
    pub fn new(r: i64, q: i64) -> Result<Self> {
        let c = c_rq(r, q)?;
        let inv_q = 1.0 / q as f64;
        let mut step_values = Vec::with_capacity(q as usize);
        let mut jump_values = Vec::with_capacity(q as usize + 1);
        // running Σ_{1≤j≤k} e^{2πijr/q}
        let mut partial = Complex64::new(0.0, 0.0);
        jump_values.push(c);
        for k in 0..q {
            if k > 0 {
                let term = root_of_unity(k * r, q);
                jump_values.push(c - (partial + 0.5 * term + 0.5) * inv_q);
                partial += term;
            }
            step_values.push(c - (partial + 0.5) * inv_q);
        }
        jump_values.push(c);
        Ok(ApKernelClosedForm { r, q, c_rq: c, step_values, jump_values })
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn c_rq(&self) -> Complex64 {
        self.c_rq
    }

    pub fn step_values(&self) -> &[Complex64] {
        &self.step_values
    }

    pub fn jump_values(&self) -> &[Complex64] {
        &self.jump_values
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        // reduce to (0, 1]
        let t = u - u.ceil() + 1.0;
        let x = self.q as f64 * t;
        let nearest = x.round();
        if (x - nearest).abs() <= 1e-12 * self.q as f64 {
            self.jump_values[nearest as usize]
        } else {
            self.step_values[(x.floor() as usize).min(self.q as usize - 1)]
        }
    }

    /// Real and imaginary parts as step functions on `[0, 1]`.
    pub fn to_piecewise_parts(&self) -> Result<(PiecewiseFn, PiecewiseFn)> {
        let q = self.q;
        let jumps: Vec<f64> = (1..q).map(|l| l as f64 / q as f64).collect();
        let part = |pick: fn(&Complex64) -> f64| -> Result<PiecewiseFn> {
            let levels: Vec<f64> = self.step_values.iter().map(pick).collect();
            let values: Vec<f64> = self.jump_values.iter().map(pick).collect();
            PiecewiseFn::step(0.0, 1.0, &jumps, &levels, &values)
        };
        Ok((part(|z| z.re)?, part(|z| z.im)?))
    }
}

/// `ψ(u, r, q)` in closed form. For `r = q` (the residue class of 0) this is
/// `(1/q) ψ(qu)` off the grid and `0` on it.
pub fn psi_rq_closed(u: f64, r: i64, q: i64) -> Result<Complex64> {
    check_residue(r, q)?;
    if r < q {
        return Ok(ApKernelClosedForm::new(r, q)?.eval(u));
    }
    Ok(Complex64::new(SawtoothKernel::residue_zero(q).eval(u), 0.0))
}

/// Truncated series `−Σ e^{2πinu} / (2πin)` over `n ≡ r (mod q)`,
/// `0 < |n| ≤ Mq`. The cutoff is symmetric in `|n|`, so at a jump the partial
/// sums sit on the midpoint of the two sides. For `r = q` this is exactly the
/// `2M` terms `n = mq`, `1 ≤ |m| ≤ M`.
pub fn psi_rq_series(u: f64, r: i64, q: i64, m_max: u64) -> Result<Complex64> {
    check_residue(r, q)?;
    let cutoff = m_max as i64 * q;
    let term = |n: i64| {
        let t = n as f64 * u;
        let (s, c) = (TAU * (t - t.floor())).sin_cos();
        // −e^{iθ}/(2πin) = (−sin θ + i cos θ)/(2πn)
        Complex64::new(-s, c) / (TAU * n as f64)
    };
    // positive and negative frequencies accumulated separately, smallest |n|
    // first, so that self-conjugate classes cancel exactly
    let first_pos = if r == q { q } else { r };
    let first_neg = if r == q { q } else { q - r };
    let pos: Complex64 = (first_pos..=cutoff).step_by(q as usize).map(term).sum();
    let neg: Complex64 = (first_neg..=cutoff).step_by(q as usize).map(|k| term(-k)).sum();
    Ok(pos + neg)
}

/// How a sawtooth kernel is valued exactly at its jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpValue {
    /// The formula value `ψ(k) = −1/2`.
    Formula,
    /// The midpoint `0` of the two one-sided limits.
    Midpoint,
}

/// `u ↦ amplitude · ψ(±freq · (u − center))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SawtoothKernel {
    center: f64,
    freq: f64,
    reflect: bool,
    amplitude: f64,
    jump_value: JumpValue,
}

impl SawtoothKernel {
    /// `reflect` flips the sign of the argument, giving `ψ(freq · (center − u))`.
    pub fn new(center: f64, freq: f64, reflect: bool, amplitude: f64) -> Self {
        SawtoothKernel { center, freq, reflect, amplitude, jump_value: JumpValue::Formula }
    }

    /// Plain `ψ(u)`.
    pub fn standard() -> Self {
        SawtoothKernel::new(0.0, 1.0, false, 1.0)
    }

    /// `ψ((u − a) / 2δ)` for the midpoint identities.
    pub fn centered(a: f64, delta: f64, reflect: bool) -> Self {
        SawtoothKernel::new(a, 1.0 / (2.0 * delta), reflect, 1.0)
    }

    /// `ψ(u, q, q) = (1/q) ψ(qu)`, valued at the jump midpoints.
    pub fn residue_zero(q: i64) -> Self {
        SawtoothKernel { jump_value: JumpValue::Midpoint, ..SawtoothKernel::new(0.0, q as f64, false, 1.0 / q as f64) }
    }

    fn sign(&self) -> f64 {
        if self.reflect {
            -1.0
        } else {
            1.0
        }
    }

    fn argument(&self, u: f64) -> f64 {
        self.sign() * (u - self.center) * self.freq
    }

    fn value_at_jump(&self) -> f64 {
        match self.jump_value {
            JumpValue::Formula => -0.5 * self.amplitude,
            JumpValue::Midpoint => 0.0,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let x = self.argument(u);
        if (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0) {
            self.value_at_jump()
        } else {
            self.amplitude * psi(x)
        }
    }

    /// Jump locations `center + k/freq` inside `[lo, hi]`, ends included.
    fn jumps_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let k_lo = ((lo - self.center) * self.freq).floor() as i64 - 1;
        let k_hi = ((hi - self.center) * self.freq).ceil() as i64 + 1;
        (k_lo..=k_hi).map(|k| self.center + k as f64 / self.freq).filter(|&x| lo <= x && x <= hi).collect()
    }

    /// The kernel on `[lo, hi]` as a piecewise function with a breakpoint at
    /// every jump.
    pub fn to_piecewise(&self, lo: f64, hi: f64) -> Result<PiecewiseFn> {
        if !(lo < hi) {
            return Err(Error::argument(format!("kernel window needs lo < hi, got [{lo}, {hi}]")));
        }
        let jumps = self.jumps_in(lo, hi);
        let mut edges = vec![lo];
        edges.extend(jumps.iter().copied().filter(|&x| lo < x && x < hi));
        edges.push(hi);

        let slope = self.sign() * self.freq;
        let pieces = edges
            .windows(2)
            .map(|w| {
                let k = self.argument(0.5 * (w[0] + w[1])).floor();
                // amplitude · (±freq · (u − center) − k − 1/2)
                let inner = Expr::bin(
                    BinOp::Sub,
                    Expr::bin(BinOp::Mul, Expr::Lit(slope), Expr::bin(BinOp::Sub, Expr::Var, Expr::Lit(self.center))),
                    Expr::Lit(k + 0.5),
                );
                let expr = Expr::bin(BinOp::Mul, Expr::Lit(self.amplitude), inner);
                SmoothPiece::new(w[0], w[1], expr, Some(Expr::Lit(self.amplitude * slope)))
            })
            .collect::<Vec<_>>();
        let values: Vec<f64> =
            edges.iter().map(|&x| if jumps.contains(&x) { self.value_at_jump() } else { self.eval(x) }).collect();
        PiecewiseFn::from_pieces(pieces, &values, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0.25), -0.25);
        assert_eq!(psi(1.75), 0.25);
        assert_eq!(psi(3.0), -0.5);
    }

    #[test]
    fn psi_partial_examples() {
        for l in [1, 2, 7, 100] {
            assert_eq!(psi_partial(0.5, l), 0.0);
            assert_eq!(psi_partial(3.0, l), 0.0);
        }
        assert!(close(psi_partial(0.25, 1), -1.0 / PI, 1e-16));
    }

    #[test]
    fn psi_cesaro_examples() {
        assert_eq!(psi_cesaro(0.5, 17).unwrap(), 0.0);
        assert!(close(psi_cesaro(0.25, 1).unwrap(), -1.0 / PI, 1e-16));
        assert!(close(psi_cesaro(0.25, 10_000).unwrap(), psi(0.25), 1e-3));
        assert!(psi_cesaro(0.25, 0).is_err());
    }

    #[test]
    fn psi_cesaro_matches_mean_of_truncations() {
        for u in [0.1, 0.37, 0.8] {
            let n = 40;
            let direct: f64 = (1..=n).map(|l| psi_partial(u, l)).sum::<f64>() / n as f64;
            assert!(close(psi_cesaro(u, n).unwrap(), direct, 1e-14));
        }
    }

    #[test]
    fn c_rq_examples() {
        assert_eq!(c_rq(1, 2).unwrap(), Complex64::new(0.0, 0.0));
        assert!((c_rq(1, 4).unwrap() - Complex64::new(0.0, 0.125)).norm() < 1e-16);
        assert!((c_rq(3, 4).unwrap() - Complex64::new(0.0, -0.125)).norm() < 1e-16);
        assert!(c_rq(4, 4).is_err());
        assert!(c_rq(0, 4).is_err());
        assert!(c_rq(5, 4).is_err());
    }

    #[test]
    fn c_rq_series_oracle_values() {
        // series with a tail bound: Σ_{m>M} 1/(m²q² − r²) < 1/(q²(M − 1))
        let m = 1_000_000;
        let s = c_rq_series(1, 4, m).unwrap();
        let tail_bound = 2.0 / (16.0 * (m as f64 - 1.0)) / TAU;
        assert!((s.im - 0.125).abs() <= tail_bound && s.re == 0.0);
        let s = c_rq_series(3, 4, m).unwrap();
        assert!((s.im + 0.125).abs() <= 3.0 * tail_bound);
    }

    #[test]
    fn ap_kernel_q2_r1() {
        let k = ApKernelClosedForm::new(1, 2).unwrap();
        assert_eq!(k.step_values(), &[Complex64::new(-0.25, 0.0), Complex64::new(0.25, 0.0)]);
        assert_eq!(k.jump_values()[1], Complex64::new(0.0, 0.0));
        assert_eq!(psi_rq_closed(0.3, 1, 2).unwrap(), Complex64::new(-0.25, 0.0));
        assert_eq!(psi_rq_closed(0.5, 1, 2).unwrap(), Complex64::new(0.0, 0.0));
        assert!((psi_rq_closed(0.3, 2, 2).unwrap() - Complex64::new(0.05, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn odd_harmonic_identity() {
        // Σ_{m odd} sin(mθ)/m = π/4 on (0, π); ψ(u, 1, 2) = −(1/π) Σ_odd sin(2πnu)/n
        let theta = 2.0 * PI * 0.3;
        let s: f64 = (0..200_000)
            .map(|k| {
                let m = (2 * k + 1) as f64;
                (m * theta).sin() / m
            })
            .sum();
        assert!(close(s, PI / 4.0, 1e-4));
        assert!(close(-s / PI, psi_rq_closed(0.3, 1, 2).unwrap().re, 1e-4));
    }

    #[test]
    fn consecutive_steps_drop_by_roots_of_unity() {
        for q in 2..=12 {
            for r in 1..q {
                let k = ApKernelClosedForm::new(r, q).unwrap();
                let s = k.step_values();
                for l in 1..q as usize {
                    let want = -root_of_unity(l as i64 * r, q) / q as f64;
                    assert!((s[l] - s[l - 1] - want).norm() <= 1e-14, "q={q} r={r} l={l}");
                }
                // wrap-around at u = 1: last step back to the first (period 1)
                let want = -Complex64::new(1.0, 0.0) / q as f64;
                assert!((s[0] - s[q as usize - 1] - want).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn jump_values_are_step_midpoints() {
        for q in 2..=12 {
            for r in 1..q {
                let k = ApKernelClosedForm::new(r, q).unwrap();
                let (s, j) = (k.step_values(), k.jump_values());
                for l in 1..q as usize {
                    assert!((j[l] - 0.5 * (s[l - 1] + s[l])).norm() <= 1e-14);
                }
                let wrap = 0.5 * (s[0] + s[q as usize - 1]);
                assert!((j[0] - wrap).norm() <= 1e-14 && (j[q as usize] - wrap).norm() <= 1e-14);
                assert!((j[0] - k.c_rq()).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_is_periodic_and_stepwise() {
        let k = ApKernelClosedForm::new(2, 5).unwrap();
        for u in [0.13, 0.5, 0.77] {
            assert_eq!(k.eval(u), k.eval(u + 3.0));
            assert_eq!(k.eval(u), k.eval(u - 2.0));
        }
        for l in 0..5 {
            let vals: Vec<_> = (1..=5).map(|i| k.eval((l as f64 + i as f64 / 6.0) / 5.0)).collect();
            assert!(vals.iter().all(|v| *v == vals[0]));
        }
    }

    #[test]
    fn series_endpoints_and_symmetry() {
        for m in [1, 10, 1000] {
            assert!(psi_rq_series(2.0, 1, 2, m).unwrap().norm() < 1e-15);
        }
        let v = psi_rq_series(0.3, 1, 2, 100_000).unwrap();
        assert!((v - Complex64::new(-0.25, 0.0)).norm() < 1e-4);
        let v = psi_rq_series(0.5, 1, 2, 100_000).unwrap();
        assert!(v.norm() < 1e-4);
    }

    #[test]
    fn residue_zero_series_excludes_n_zero() {
        let closed = psi_rq_closed(0.3, 3, 3).unwrap();
        let series = psi_rq_series(0.3, 3, 3, 100_000).unwrap();
        assert!((closed - series).norm() < 1e-4);
        assert_eq!(psi_rq_closed(2.0 / 3.0, 3, 3).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_residues_sum_to_real() {
        for q in 2..=12 {
            for r in 1..q {
                for u in [0.05, 0.31, 0.5, 0.92] {
                    let z = psi_rq_closed(u, r, q).unwrap() + psi_rq_closed(u, q - r, q).unwrap();
                    assert!(z.im.abs() <= 1e-14, "q={q} r={r} u={u}");
                }
            }
        }
    }

    #[test]
    fn sawtooth_kernel_piecewise_matches_eval() {
        let k = SawtoothKernel::centered(0.3, 0.5, false);
        let f = k.to_piecewise(0.0, 1.0).unwrap();
        assert_eq!(f.breakpoints().len(), 3);
        assert_eq!(f.eval(0.3).unwrap(), -0.5);
        assert!(close(f.left_limit(0.3).unwrap(), 0.5, 1e-15));
        assert!(close(f.right_limit(0.3).unwrap(), -0.5, 1e-15));
        for u in [0.01, 0.2, 0.299, 0.31, 0.7, 0.99] {
            assert!(close(f.eval(u).unwrap(), k.eval(u), 1e-15));
        }
        let reflected = SawtoothKernel::centered(0.3, 0.5, true).to_piecewise(0.3, 1.0).unwrap();
        assert_eq!(reflected.eval(0.3).unwrap(), -0.5);
        assert!(close(reflected.right_limit(0.3).unwrap(), 0.5, 1e-15));

        let euler = SawtoothKernel::standard().to_piecewise(0.0, 3.0).unwrap();
        assert_eq!(euler.breakpoints().len(), 4);
        assert_eq!(euler.eval(3.0).unwrap(), -0.5);

        let zero = SawtoothKernel::residue_zero(4).to_piecewise(0.0, 1.0).unwrap();
        assert_eq!(zero.eval(0.25).unwrap(), 0.0);
        assert_eq!(zero.eval(1.0).unwrap(), 0.0);
        assert!(close(zero.eval(0.3).unwrap(), psi(1.2) / 4.0, 1e-15));
    }
}
