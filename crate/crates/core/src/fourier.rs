//! Fourier series on an arbitrary interval `[c, d]` of length `2δ`.
//!
//! Coefficients are `c_n = (1/2δ) ∫_c^d f(u) e^{−πinu/δ} du`; the series
//! `Σ c_n e^{πinx/δ}` reproduces the midpoint `(f(x+) + f(x−))/2` in the
//! Cesàro sense. The midpoint identities express that value exactly through a
//! mean term, a Stieltjes integral against a shifted sawtooth and a boundary
//! term, and are evaluated here independently of the series.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcmodel::{Expr, PiecewiseFn, Side};
use crate::kernels::SawtoothKernel;
use crate::stieltjes::quadrature::Rule;
use crate::stieltjes::{integrate, rs_smooth, QuadratureConfig};

pub use crate::funcmodel::Interval;

/// `e^{2πit}`, reducing `t` to `[0, 1)` first.
fn cis_turns(t: f64) -> Complex64 {
    let r = t - t.floor();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// Exponential coefficients `c_n`, `−N ≤ n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    interval: Interval,
    n_max: usize,
    /// `coeffs[N + n] = c_n`
    coeffs: Vec<Complex64>,
    est_error: f64,
}

impl FourierCoeffs {
    /// The period interval; `δ` is half its length.
    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        let idx = self.n_max as i64 + n;
        (0..self.coeffs.len() as i64).contains(&idx).then(|| self.coeffs[idx as usize])
    }

    /// # Panics
    /// If `|n| > N`.
    pub fn c(&self, n: i64) -> Complex64 {
        self.get(n).unwrap_or_else(|| panic!("coefficient {n} outside ±{}", self.n_max))
    }

    /// Largest per-coefficient quadrature error estimate.
    pub fn est_error(&self) -> f64 {
        self.est_error
    }

    /// `e^{πinx/δ}`.
    fn phase(&self, n: i64, x: f64) -> Complex64 {
        cis_turns(n as f64 * x / self.interval.length())
    }

    fn check_order(&self, l: usize) -> Result<()> {
        if l > self.n_max {
            return Err(Error::argument(format!("order {l} exceeds the {} coefficients computed", self.n_max)));
        }
        Ok(())
    }

    /// `Σ_{n=1}^{l} w(n) (c_n z^n + c_{−n} z^{−n})`
    fn weighted_sum(&self, x: f64, l: usize, weight: impl Fn(usize) -> f64) -> Complex64 {
        (1..=l)
            .map(|n| {
                let z = self.phase(n as i64, x);
                weight(n) * (self.c(n as i64) * z + self.c(-(n as i64)) * z.conj())
            })
            .sum()
    }
}

/// Gauss–Legendre sums of `f(u) e^{−2πiνu}` over one smooth panel, with the
/// weighted samples of `f` cached per dyadic level.
struct OscillatoryPanel<'a> {
    p: f64,
    q: f64,
    expr: &'a Expr,
    /// value of a constant piece, integrated in closed form
    constant: Option<f64>,
    /// per level: `w_i (h/2) f(x_{j,i})`, panel-major
    samples: Vec<Vec<f64>>,
    /// per level: `Σ |w f|`
    magnitude: Vec<f64>,
}

/// Subpanel phase spans up to this many radians are integrated to roundoff
/// by a 15-point rule; scaled with the rule order.
const PHASE_SPAN_15: f64 = 16.0;
/// Panel-centre phases are recomputed directly this often.
const REANCHOR: usize = 64;

impl<'a> OscillatoryPanel<'a> {
    fn new(p: f64, q: f64, expr: &'a Expr) -> Self {
        let constant = expr.is_constant().then(|| expr.eval(p));
        OscillatoryPanel { p, q, expr, constant, samples: Vec::new(), magnitude: Vec::new() }
    }

    /// `∫ K e^{−2πinu/L} du` for a constant panel. The phase span is formed
    /// as `n (q − p)/L` so a panel covering the whole period gives exactly 0.
    fn constant_integral(&self, value: f64, n: usize, period: f64) -> Complex64 {
        if n == 0 {
            return Complex64::new(value * (self.q - self.p), 0.0);
        }
        let n = n as f64;
        let start = cis_turns(-n * self.p / period);
        let rest = Complex64::new(1.0, 0.0) - cis_turns(-n * (self.q - self.p) / period);
        start * rest * value / Complex64::new(0.0, TAU * n / period)
    }

    fn ensure_level(&mut self, rule: &Rule, level: u32) {
        while self.samples.len() <= level as usize {
            let k = self.samples.len();
            let count = 1usize << k;
            let h = (self.q - self.p) / count as f64;
            let mut values = Vec::with_capacity(count * rule.nodes.len());
            let mut mag = 0.0;
            for j in 0..count {
                let mid = self.p + (j as f64 + 0.5) * h;
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let v = w * 0.5 * h * self.expr.eval(mid + 0.5 * h * t);
                    mag += v.abs();
                    values.push(v);
                }
            }
            self.samples.push(values);
            self.magnitude.push(mag);
        }
    }

    /// Composite rule at `level` for `∫ f(u) e^{−2πiνu} du`.
    fn integral(&mut self, rule: &Rule, level: u32, nu: f64) -> Complex64 {
        self.ensure_level(rule, level);
        let count = 1usize << level;
        let h = (self.q - self.p) / count as f64;
        let node_phase: Vec<Complex64> = rule.nodes.iter().map(|&t| cis_turns(-nu * 0.5 * h * t)).collect();
        let step = cis_turns(-nu * h);
        let mut centre = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        let order = rule.nodes.len();
        for (j, chunk) in self.samples[level as usize].chunks_exact(order).enumerate() {
            if j % REANCHOR == 0 {
                centre = cis_turns(-nu * (self.p + (j as f64 + 0.5) * h));
            } else {
                centre *= step;
            }
            let mut inner = Complex64::new(0.0, 0.0);
            for (v, z) in chunk.iter().zip(&node_phase) {
                inner += z * *v;
            }
            acc += centre * inner;
        }
        acc
    }

    /// Refines from the first level that resolves the oscillation until two
    /// successive levels agree to `tol`.
    fn converged(&mut self, rule: &Rule, nu: f64, tol: f64, cfg: &QuadratureConfig) -> Result<(Complex64, f64)> {
        let span_limit = PHASE_SPAN_15 * rule.nodes.len() as f64 / 15.0;
        let span = TAU * nu.abs() * (self.q - self.p);
        let mut level = if span > span_limit { (span / span_limit).log2().ceil() as u32 } else { 0 };
        let mut prev = self.integral(rule, level, nu);
        let mut diff = f64::INFINITY;
        level += 1;
        while (1usize << level) <= cfg.max_subdivisions {
            let cur = self.integral(rule, level, nu);
            diff = (cur - prev).norm();
            if diff <= tol || diff <= 16.0 * f64::EPSILON * self.magnitude[level as usize] {
                return Ok((cur, diff));
            }
            prev = cur;
            level += 1;
        }
        Err(Error::Accuracy {
            message: format!(
                "oscillatory quadrature on [{}, {}] at frequency {nu} did not converge within {} subdivisions",
                self.p, self.q, cfg.max_subdivisions
            ),
            est_error: diff,
        })
    }
}

/// Coefficients for the `2δ`-periodic series of `f · 1_{[lo, hi]}`, where the
/// period interval is `period`.
fn window_coeffs(
    f: &PiecewiseFn,
    lo: f64,
    hi: f64,
    period: Interval,
    n_max: usize,
    cfg: &QuadratureConfig,
) -> Result<FourierCoeffs> {
    let rule = cfg.rule()?;
    let dom = f.domain();
    if !(dom.contains(lo) && dom.contains(hi)) {
        return Err(Error::domain(format!("window [{lo}, {hi}] is not inside the domain [{}, {}]", dom.c(), dom.d())));
    }
    let mut edges = vec![lo];
    edges.extend(f.breakpoints().iter().map(|bp| bp.x).filter(|&x| lo < x && x < hi));
    edges.push(hi);
    let mut panels: Vec<OscillatoryPanel> = edges
        .windows(2)
        .map(|w| {
            let piece = f.piece(f.piece_index(0.5 * (w[0] + w[1])));
            OscillatoryPanel::new(w[0], w[1], &piece.expr)
        })
        .collect();

    let scale = 1.0 / period.length();
    let mut positive = Vec::with_capacity(n_max + 1);
    let mut est_error: f64 = 0.0;
    for n in 0..=n_max {
        let nu = n as f64 * scale;
        let mut total = Complex64::new(0.0, 0.0);
        let mut est = 0.0;
        for panel in panels.iter_mut() {
            let share = (panel.q - panel.p) / (hi - lo);
            let (v, e) = match panel.constant {
                Some(value) => (panel.constant_integral(value, n, period.length()), 0.0),
                None => panel.converged(&rule, nu, cfg.abs_tol * period.length() * share, cfg)?,
            };
            total += v;
            est += e;
        }
        positive.push(total * scale);
        est_error = est_error.max(est * scale);
    }
    // f is real, so c_{−n} is the conjugate of c_n
    let mut coeffs: Vec<Complex64> = positive[1..].iter().rev().map(|z| z.conj()).collect();
    coeffs.extend_from_slice(&positive);
    Ok(FourierCoeffs { interval: period, n_max, coeffs, est_error })
}

/// `c_n` for `|n| ≤ N` over `iv`.
pub fn exp_coeffs(f: &PiecewiseFn, iv: Interval, n_max: usize, cfg: &QuadratureConfig) -> Result<FourierCoeffs> {
    window_coeffs(f, iv.c(), iv.d(), iv, n_max, cfg)
}

/// Cosine and sine coefficients `a_n = c_n + c_{−n}`, `b_n = i(c_n − c_{−n})`,
/// `0 ≤ n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigCoeffs {
    interval: Interval,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

pub fn trig_coeffs(fc: &FourierCoeffs) -> TrigCoeffs {
    let i = Complex64::new(0.0, 1.0);
    let (a, b) = (0..=fc.n_max as i64)
        .map(|n| {
            if n == 0 {
                (2.0 * fc.c(0), Complex64::new(0.0, 0.0))
            } else {
                (fc.c(n) + fc.c(-n), i * (fc.c(n) - fc.c(-n)))
            }
        })
        .unzip();
    TrigCoeffs { interval: fc.interval, a, b }
}

impl TrigCoeffs {
    /// `a_0/2 + Σ_{n=1}^{l} (a_n cos(πnx/δ) + b_n sin(πnx/δ))`
    pub fn partial_sum(&self, x: f64, l: usize) -> Result<Complex64> {
        if l >= self.a.len() {
            return Err(Error::argument(format!("order {l} exceeds the {} coefficients computed", self.a.len() - 1)));
        }
        let mut sum = self.a[0] * 0.5;
        for n in 1..=l {
            let z = cis_turns(n as f64 * x / self.interval.length());
            sum += self.a[n] * z.re + self.b[n] * z.im;
        }
        Ok(sum)
    }
}

/// `Σ_{1≤|n|≤l} c_n e^{πinx/δ}`, plus `c_0` when `include_mean`.
pub fn partial_sum(fc: &FourierCoeffs, x: f64, l: usize, include_mean: bool) -> Result<Complex64> {
    fc.check_order(l)?;
    let mean = if include_mean { fc.c(0) } else { Complex64::new(0.0, 0.0) };
    Ok(mean + fc.weighted_sum(x, l, |_| 1.0))
}

/// Mean of the partial sums of orders `1..=N`:
/// `Σ_{1≤|n|≤N} ((N − |n| + 1)/N) c_n e^{πinx/δ}`, plus `c_0` when
/// `include_mean`.
pub fn cesaro_mean(fc: &FourierCoeffs, x: f64, n: usize, include_mean: bool) -> Result<Complex64> {
    fc.check_order(n)?;
    if n == 0 {
        return Err(Error::argument("Cesàro mean needs N ≥ 1"));
    }
    let mean = if include_mean { fc.c(0) } else { Complex64::new(0.0, 0.0) };
    let nf = n as f64;
    Ok(mean + fc.weighted_sum(x, n, |k| (nf - k as f64 + 1.0) / nf))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MidpointParts {
    /// `(1/2δ) ∫ f du` over the identity's range.
    pub mean_term: f64,
    /// The Stieltjes integral against the shifted sawtooth, with its sign.
    pub stieltjes_term: f64,
    pub boundary_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub parts: MidpointParts,
    pub est_error: f64,
}

impl MidpointReport {
    fn new(lhs: f64, parts: MidpointParts, est_error: f64) -> Self {
        let rhs = parts.mean_term + parts.stieltjes_term + parts.boundary_term;
        MidpointReport { lhs, rhs, residual: (lhs - rhs).abs(), parts, est_error }
    }
}

fn check_point(f: &PiecewiseFn, iv: Interval, a: f64) -> Result<()> {
    let dom = f.domain();
    if !(dom.contains(iv.c()) && dom.contains(iv.d())) {
        return Err(Error::domain(format!(
            "[{}, {}] is not inside the domain [{}, {}]",
            iv.c(),
            iv.d(),
            dom.c(),
            dom.d()
        )));
    }
    if !(iv.c() < a && a < iv.d()) {
        return Err(Error::argument(format!("the point {a} must lie strictly inside [{}, {}]", iv.c(), iv.d())));
    }
    Ok(())
}

/// Left half of the identity on `[c, a]`: `f(a−)/2` against
/// `(1/2δ)∫_c^a f du + ∫_c^a ψ((u−a)/2δ) df + f(c)(1/2 − (a−c)/2δ)`.
pub fn theorem1_left(f: &PiecewiseFn, iv: Interval, a: f64, cfg: &QuadratureConfig) -> Result<MidpointReport> {
    check_point(f, iv, a)?;
    let (c, two_delta) = (iv.c(), iv.length());
    let restricted = f.one_sided_restriction(a, c, Side::Left)?;
    let kernel = SawtoothKernel::centered(a, iv.delta(), false).to_piecewise(c, a)?;
    let (mean, mean_err) = integrate(&restricted, c, a, cfg)?;
    let st = rs_smooth(&kernel, &restricted, c, a, cfg)?;
    let parts = MidpointParts {
        mean_term: mean / two_delta,
        stieltjes_term: st.value,
        boundary_term: f.eval(c)? * (0.5 - (a - c) / two_delta),
    };
    Ok(MidpointReport::new(f.left_limit(a)? / 2.0, parts, mean_err / two_delta + st.est_error))
}

/// Right half of the identity on `[a, d]`: `f(a+)/2` against
/// `(1/2δ)∫_a^d f du − ∫_a^d ψ((a−u)/2δ) df + f(d)(1/2 − (d−a)/2δ)`.
pub fn theorem1_right(f: &PiecewiseFn, iv: Interval, a: f64, cfg: &QuadratureConfig) -> Result<MidpointReport> {
    check_point(f, iv, a)?;
    let (d, two_delta) = (iv.d(), iv.length());
    let restricted = f.one_sided_restriction(a, d, Side::Right)?;
    let kernel = SawtoothKernel::centered(a, iv.delta(), true).to_piecewise(a, d)?;
    let (mean, mean_err) = integrate(&restricted, a, d, cfg)?;
    let st = rs_smooth(&kernel, &restricted, a, d, cfg)?;
    let parts = MidpointParts {
        mean_term: mean / two_delta,
        stieltjes_term: -st.value,
        boundary_term: f.eval(d)? * (0.5 - (d - a) / two_delta),
    };
    Ok(MidpointReport::new(f.right_limit(a)? / 2.0, parts, mean_err / two_delta + st.est_error))
}

/// Two-sided identity: `(f(a+) + f(a−))/2` against
/// `(1/2δ)∫_c^d f du + ∫_c^d ψ((u−a)/2δ) df`, valid when `f(c) = f(d)`.
///
/// A jump of `f` at `a` itself carries no weight in the Stieltjes term; the
/// integral is then taken over `[c, a]` and `[a, d]` with `f(a)` replaced by
/// the matching one-sided limit on each side.
pub fn theorem1_both(f: &PiecewiseFn, iv: Interval, a: f64, cfg: &QuadratureConfig) -> Result<MidpointReport> {
    check_point(f, iv, a)?;
    let (c, d, two_delta) = (iv.c(), iv.d(), iv.length());
    let (fc, fd) = (f.eval(c)?, f.eval(d)?);
    if fc != fd {
        return Err(Error::precondition(format!("the two-sided identity needs f(c) = f(d), got {fc} and {fd}")));
    }
    let (left, right) = (f.left_limit(a)?, f.right_limit(a)?);
    let at = f.eval(a)?;
    let (mean, mean_err) = integrate(f, c, d, cfg)?;
    let (stieltjes, st_err) = if left == at && right == at {
        let kernel = SawtoothKernel::centered(a, iv.delta(), false).to_piecewise(c, d)?;
        let st = rs_smooth(&kernel, f, c, d, cfg)?;
        (st.value, st.est_error)
    } else {
        let lhs_fn = f.one_sided_restriction(a, c, Side::Left)?;
        let rhs_fn = f.one_sided_restriction(a, d, Side::Right)?;
        let lk = SawtoothKernel::centered(a, iv.delta(), false).to_piecewise(c, a)?;
        let rk = SawtoothKernel::centered(a, iv.delta(), true).to_piecewise(a, d)?;
        let l = rs_smooth(&lk, &lhs_fn, c, a, cfg)?;
        let r = rs_smooth(&rk, &rhs_fn, a, d, cfg)?;
        // ψ(−x) = −ψ(x) off the integers
        (l.value - r.value, l.est_error + r.est_error)
    };
    let parts = MidpointParts { mean_term: mean / two_delta, stieltjes_term: stieltjes, boundary_term: 0.0 };
    Ok(MidpointReport::new(0.5 * (left + right), parts, mean_err / two_delta + st_err))
}

/// Which neighbourhood of `a` a local series is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalSide {
    /// `[a − δ, a]`, recovering `f(a−)`.
    Left,
    /// `[a, a + δ]`, recovering `f(a+)`.
    Right,
    /// `[a − δ, a + δ]`, recovering the midpoint.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    /// The partial sum of order `N`.
    Direct,
    /// The mean of the partial sums of orders `1..=N`.
    Cesaro,
}

/// Fourier series at `a` of `f` cut down to a window of `a`, with period
/// `2δ`. One-sided windows see a jump from `f(a∓)` to `0` at `a`, so their
/// series tends to `f(a∓)/2`; the returned value is doubled to give `f(a∓)`.
pub fn local_series(
    f: &PiecewiseFn,
    a: f64,
    delta: f64,
    side: LocalSide,
    n: usize,
    mode: SeriesMode,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if !(delta > 0.0) {
        return Err(Error::argument(format!("δ must be positive, got {delta}")));
    }
    let (lo, hi, scale) = match side {
        LocalSide::Left => (a - delta, a, 2.0),
        LocalSide::Right => (a, a + delta, 2.0),
        LocalSide::Both => (a - delta, a + delta, 1.0),
    };
    let period = Interval::new(a - delta, a + delta)?;
    let coeffs = window_coeffs(f, lo, hi, period, n, cfg)?;
    let value = match mode {
        SeriesMode::Direct => partial_sum(&coeffs, a, n, true)?,
        SeriesMode::Cesaro => cesaro_mean(&coeffs, a, n, true)?,
    };
    Ok(value * scale)
}
