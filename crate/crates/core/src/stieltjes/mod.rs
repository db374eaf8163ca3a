//! Riemann–Stieltjes integration over piecewise functions.
//!
//! `∫ g df` splits into a smooth part, `Σ_pieces ∫ g(u) f'(u) du`, evaluated by
//! adaptive Gauss–Legendre panels cut at every breakpoint of `g` and `f`, and
//! an atomic part, `Σ_k g(x_k) · jump_k(f)`, read directly off `f`'s breakpoint
//! list. Jumps at the ends of `[a, b]` use the one-sided conventions
//! `f(a+) − f(a)` and `f(b) − f(b−)`.
//!
//! The integral exists when `g` and `f` are never discontinuous from the same
//! side at the same point; [`check_compatible`] enforces that before anything
//! is evaluated.

pub(crate) mod quadrature;

use crate::error::{Error, Result};
use crate::funcmodel::{PiecewiseFn, Side};
use crate::kernels::SawtoothKernel;

use quadrature::{dyadic, Rule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Upper bound on the number of dyadic subpanels per panel.
    pub max_subdivisions: usize,
    /// Gauss–Legendre points per subpanel.
    pub rule_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-12, max_subdivisions: 1 << 16, rule_order: 15 }
    }
}

impl QuadratureConfig {
    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        QuadratureConfig { abs_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::argument("abs_tol must be positive"));
        }
        if self.rule_order < 2 {
            return Err(Error::argument("rule_order must be at least 2"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::argument("max_subdivisions must be positive"));
        }
        Ok(())
    }

    pub(crate) fn rule(&self) -> Result<Rule> {
        self.validate()?;
        Rule::new(self.rule_order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesResult {
    pub value: f64,
    /// `Σ ∫ g f' du` over the smooth pieces.
    pub smooth_part: f64,
    /// `Σ g(x_k) · jump_k` over the breakpoints of the integrator.
    pub atom_part: f64,
    pub est_error: f64,
}

fn check_range(f: &PiecewiseFn, a: f64, b: f64, what: &str) -> Result<()> {
    if !(a < b) {
        return Err(Error::argument(format!("integration range needs a < b, got [{a}, {b}]")));
    }
    let dom = f.domain();
    if !(dom.contains(a) && dom.contains(b)) {
        return Err(Error::domain(format!("[{a}, {b}] is not inside the domain [{}, {}] of {what}", dom.c(), dom.d())));
    }
    Ok(())
}

fn differs(x: f64, y: f64) -> bool {
    (x - y).abs() > 1e-12 * (1.0 + x.abs().max(y.abs()))
}

/// Whether `f` is discontinuous from the left / from the right at `x`, as
/// seen from inside `[a, b]`.
fn one_sided_discontinuity(f: &PiecewiseFn, x: f64, a: f64, b: f64) -> Result<(bool, bool)> {
    if f.breakpoint_at(x).is_none() {
        return Ok((false, false));
    }
    let at = f.eval(x)?;
    let left = x > a && differs(f.left_limit(x)?, at);
    let right = x < b && differs(f.right_limit(x)?, at);
    Ok((left, right))
}

/// Fails when `g` and `f` share a discontinuity from the same side at some
/// point of `[a, b]`; otherwise `∫_a^b g df` exists.
pub fn check_compatible(g: &PiecewiseFn, f: &PiecewiseFn, a: f64, b: f64) -> Result<()> {
    let candidates = g.breakpoints().iter().chain(f.breakpoints()).map(|bp| bp.x).filter(|&x| a <= x && x <= b);
    for x in candidates {
        let (gl, gr) = one_sided_discontinuity(g, x, a, b)?;
        let (fl, fr) = one_sided_discontinuity(f, x, a, b)?;
        if (gl && fl) || (gr && fr) {
            let side = if gl && fl { "left" } else { "right" };
            return Err(Error::integrability(format!(
                "integrand and integrator are both discontinuous from the {side} at {x}"
            )));
        }
    }
    Ok(())
}

/// `∫_a^b f dα` for a step integrator `α`: `Σ_k f(x_k) α_k`.
pub fn rs_step_integrator(f: &PiecewiseFn, alpha: &PiecewiseFn, a: f64, b: f64) -> Result<f64> {
    check_range(f, a, b, "the integrand")?;
    check_range(alpha, a, b, "the integrator")?;
    if !alpha.is_step() {
        return Err(Error::argument("the integrator is not a step function"));
    }
    check_compatible(f, alpha, a, b)?;
    let mut sum = 0.0;
    for bp in alpha.breakpoints().iter().filter(|bp| a <= bp.x && bp.x <= b) {
        let jump = alpha.jump_within(bp.x, a, b)?;
        if jump != 0.0 {
            sum += f.eval(bp.x)? * jump;
        }
    }
    Ok(sum)
}

fn panel_edges(fns: &[&PiecewiseFn], a: f64, b: f64) -> Vec<f64> {
    let mut edges = vec![a, b];
    for f in fns {
        edges.extend(f.breakpoints().iter().map(|bp| bp.x).filter(|&x| a < x && x < b));
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

/// `∫_a^b g df` for a good integrator `f`.
pub fn rs_smooth(g: &PiecewiseFn, f: &PiecewiseFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<StieltjesResult> {
    let rule = cfg.rule()?;
    check_range(g, a, b, "the integrand")?;
    check_range(f, a, b, "the integrator")?;
    check_compatible(g, f, a, b)?;

    let mut smooth = 0.0;
    let mut est_error = 0.0;
    for w in panel_edges(&[g, f], a, b).windows(2) {
        let (p, q) = (w[0], w[1]);
        let m = 0.5 * (p + q);
        let fp = f.piece(f.piece_index(m));
        let gp = g.piece(g.piece_index(m));
        if fp.is_constant() {
            continue;
        }
        let tol = cfg.abs_tol * (q - p) / (b - a);
        if let Some(df) = &fp.deriv {
            let (v, e) = dyadic(&rule, p, q, tol, cfg, |u| gp.expr.eval(u) * df.eval(u))?;
            smooth += v;
            est_error += e;
        } else if gp.is_constant() {
            smooth += gp.expr.eval(m) * (fp.expr.eval(q) - fp.expr.eval(p));
        } else if let Some(dg) = &gp.deriv {
            // Integration by parts on the open panel, using the continuous
            // extensions of both pieces to its ends.
            let boundary = gp.expr.eval(q) * fp.expr.eval(q) - gp.expr.eval(p) * fp.expr.eval(p);
            let (v, e) = dyadic(&rule, p, q, tol, cfg, |u| fp.expr.eval(u) * dg.eval(u))?;
            smooth += boundary - v;
            est_error += e;
        } else {
            return Err(Error::integrability(format!(
                "on [{p}, {q}] the integrator has no derivative and the integrand cannot be differentiated either"
            )));
        }
    }

    let mut atoms = 0.0;
    for bp in f.breakpoints().iter().filter(|bp| a <= bp.x && bp.x <= b) {
        let jump = f.jump_within(bp.x, a, b)?;
        if jump != 0.0 {
            atoms += g.eval(bp.x)? * jump;
        }
    }
    Ok(StieltjesResult { value: smooth + atoms, smooth_part: smooth, atom_part: atoms, est_error })
}

/// Riemann integral `∫_a^b f du`, with its error estimate.
pub fn integrate(f: &PiecewiseFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let rule = cfg.rule()?;
    check_range(f, a, b, "the integrand")?;
    let mut total = 0.0;
    let mut est = 0.0;
    for w in panel_edges(&[f], a, b).windows(2) {
        let (p, q) = (w[0], w[1]);
        let piece = f.piece(f.piece_index(0.5 * (p + q)));
        if piece.is_constant() {
            total += piece.expr.eval(p) * (q - p);
            continue;
        }
        let tol = cfg.abs_tol * (q - p) / (b - a);
        let (v, e) = dyadic(&rule, p, q, tol, cfg, |u| piece.expr.eval(u))?;
        total += v;
        est += e;
    }
    Ok((total, est))
}

/// `∫_a^b α df`, obtained from `∫_a^b f dα` by integration by parts.
pub fn integrate_by_parts(f: &PiecewiseFn, alpha: &PiecewiseFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let f_dalpha = if alpha.is_step() {
        rs_step_integrator(f, alpha, a, b)
    } else {
        rs_smooth(f, alpha, a, b, cfg).map(|r| r.value)
    };
    let f_dalpha = f_dalpha.map_err(|e| match e {
        Error::Integrability(msg) => Error::integrability(format!("∫ f dα does not exist: {msg}")),
        other => other,
    })?;
    Ok(f.eval(b)? * alpha.eval(b)? - f.eval(a)? * alpha.eval(a)? - f_dalpha)
}

/// Right-hand side of the generalized Euler summation formula,
/// `∫ f du + ∫ ψ(u) df + f(a)ψ(a) − f(b)ψ(b)`, which equals `Σ_{a<n≤b} f(n)`
/// when `f` is left-continuous at every integer in `(a, b]`.
pub fn euler_sum_rhs(f: &PiecewiseFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_range(f, a, b, "f")?;
    let kernel = SawtoothKernel::standard();
    let psi_fn = kernel.to_piecewise(a, b)?;
    let (mean, _) = integrate(f, a, b, cfg)?;
    let stieltjes = rs_smooth(&psi_fn, f, a, b, cfg).map_err(|e| match e {
        Error::Integrability(msg) => {
            Error::precondition(format!("f must be continuous from the left at every integer in (a, b]: {msg}"))
        }
        other => other,
    })?;
    Ok(mean + stieltjes.value + f.eval(a)? * kernel.eval(a) - f.eval(b)? * kernel.eval(b))
}

/// One-sided limit recovered as a Stieltjes integral against the greatest
/// integer function:
///
/// - left: `f(a−) = ∫_{a−ε}^{a} f(u) d⌊(u − a)/δ⌋`
/// - right: `f(a+) = −∫_{a}^{a+ε} f(u) d⌊(a − u)/δ⌋`
///
/// The integrand is `f` restricted to the window with its value at `a`
/// replaced by the one-sided limit, so the only atom sits at `a`.
pub fn one_sided_via_stieltjes(f: &PiecewiseFn, a: f64, eps: f64, delta: f64, side: Side) -> Result<f64> {
    if !(eps > 0.0 && eps <= delta) {
        return Err(Error::argument(format!("need 0 < ε ≤ δ, got ε = {eps}, δ = {delta}")));
    }
    match side {
        Side::Left => {
            let lo = a - eps;
            check_range(f, lo, a, "f")?;
            let restricted = f.one_sided_restriction(a, lo, Side::Left)?;
            // ⌊(u − a)/δ⌋ is −1 on [a − δ, a) and 0 at a.
            let alpha = PiecewiseFn::step(lo, a, &[], &[-1.0], &[-1.0, 0.0])?;
            rs_step_integrator(&restricted, &alpha, lo, a)
        }
        Side::Right => {
            let hi = a + eps;
            check_range(f, a, hi, "f")?;
            let restricted = f.one_sided_restriction(a, hi, Side::Right)?;
            // ⌊(a − u)/δ⌋ is 0 at a and −1 on (a, a + δ].
            let alpha = PiecewiseFn::step(a, hi, &[], &[-1.0], &[0.0, -1.0])?;
            Ok(-rs_step_integrator(&restricted, &alpha, a, hi)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Catalog;

    fn smooth(expr: &str, deriv: &str) -> PiecewiseFn {
        PiecewiseFn::parse_smooth(0.0, 1.0, expr, Some(deriv)).unwrap()
    }

    fn unit_step() -> PiecewiseFn {
        PiecewiseFn::step(0.0, 1.0, &[0.5], &[0.0, 1.0], &[0.0, 1.0, 1.0]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn step_integrator_examples() {
        let sq = smooth("u^2", "2*u");
        assert_eq!(rs_step_integrator(&sq, &unit_step(), 0.0, 1.0).unwrap(), 0.25);

        let id = smooth("u", "1");
        let alpha = PiecewiseFn::step(0.0, 1.0, &[0.25, 0.75], &[0.0, 1.0, -1.0], &[0.0, 1.0, -1.0, -1.0]).unwrap();
        assert_eq!(rs_step_integrator(&id, &alpha, 0.0, 1.0).unwrap(), -1.25);

        let flat = PiecewiseFn::constant(0.0, 1.0, 3.0).unwrap();
        assert_eq!(rs_step_integrator(&sq, &flat, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn step_integrator_endpoint_conventions() {
        // α(0) = 0, α(0+) = 1, α(1−) = 1, α(1) = 3
        let alpha = PiecewiseFn::step(0.0, 1.0, &[], &[1.0], &[0.0, 3.0]).unwrap();
        let id = smooth("u + 1", "1");
        assert_eq!(rs_step_integrator(&id, &alpha, 0.0, 1.0).unwrap(), 1.0 * 1.0 + 2.0 * 2.0);
    }

    #[test]
    fn step_integrator_errors() {
        let sq = smooth("u^2", "2*u");
        assert!(matches!(rs_step_integrator(&unit_step(), &sq, 0.0, 1.0), Err(Error::Argument(_))));
        // both jump from the left at 0.5
        assert!(matches!(rs_step_integrator(&unit_step(), &unit_step(), 0.0, 1.0), Err(Error::Integrability(_))));
        // left-continuous integrand against a left-jumping integrator is fine
        let left_cont = PiecewiseFn::step(0.0, 1.0, &[0.5], &[0.0, 1.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(rs_step_integrator(&left_cont, &unit_step(), 0.0, 1.0).unwrap(), 0.0);
        assert!(matches!(rs_step_integrator(&sq, &unit_step(), 0.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn smooth_examples() {
        let cfg = QuadratureConfig::default();
        let one = PiecewiseFn::constant(0.0, 1.0, 1.0).unwrap();
        let r = rs_smooth(&one, &smooth("u^2", "2*u"), 0.0, 1.0, &cfg).unwrap();
        assert!(close(r.value, 1.0, 1e-14));

        // ψ(u − 1/2) = u on (0, 1/2), ∫_0^{1/2} u du = 1/8
        let kernel = SawtoothKernel::new(0.5, 1.0, false, 1.0).to_piecewise(0.0, 0.5).unwrap();
        let r = rs_smooth(&kernel, &smooth("u", "1"), 0.0, 0.5, &cfg).unwrap();
        assert!(close(r.value, 0.125, 1e-14));
        assert_eq!(r.atom_part, 0.0);

        let r = rs_smooth(&smooth("u", "1"), &unit_step(), 0.0, 1.0, &cfg).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.smooth_part, 0.0);
        assert_eq!(r.atom_part, 0.5);
        assert!(r.est_error >= 0.0);
    }

    #[test]
    fn smooth_without_derivative_falls_back_to_parts() {
        let cfg = QuadratureConfig::default();
        let f_no_deriv = PiecewiseFn::parse_smooth(0.0, 1.0, "u^2", None).unwrap();
        let g = smooth("u", "1");
        // ∫ u d(u²) = 2/3
        let r = rs_smooth(&g, &f_no_deriv, 0.0, 1.0, &cfg).unwrap();
        assert!(close(r.value, 2.0 / 3.0, 1e-14));
        let g_no_deriv = PiecewiseFn::parse_smooth(0.0, 1.0, "u", None).unwrap();
        assert!(matches!(rs_smooth(&g_no_deriv, &f_no_deriv, 0.0, 1.0, &cfg), Err(Error::Integrability(_))));
    }

    #[test]
    fn by_parts_examples() {
        let cfg = QuadratureConfig::default();
        let id = smooth("u", "1");
        assert!(close(integrate_by_parts(&id, &id, 0.0, 1.0, &cfg).unwrap(), 0.5, 1e-14));

        let sq = smooth("u^2", "2*u");
        let v = integrate_by_parts(&sq, &unit_step(), 0.0, 1.0, &cfg).unwrap();
        // oracle: ∫_{1/2}^{1} 2u du
        assert!(close(v, 1.0 - 0.25, 1e-15));

        let flat = PiecewiseFn::constant(0.0, 1.0, 2.5).unwrap();
        let v = integrate_by_parts(&sq, &flat, 0.0, 1.0, &cfg).unwrap();
        assert!(close(v, 2.5, 1e-15));

        assert!(matches!(integrate_by_parts(&unit_step(), &unit_step(), 0.0, 1.0, &cfg), Err(Error::Integrability(_))));
    }

    fn poly(c: f64, d: f64, expr: &str, deriv: &str) -> PiecewiseFn {
        PiecewiseFn::parse_smooth(c, d, expr, Some(deriv)).unwrap()
    }

    fn direct_sum(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let first = a.floor() as i64 + 1;
        let last = b.floor() as i64;
        (first..=last).map(|n| f(n as f64)).sum()
    }

    #[test]
    fn euler_sum_examples() {
        let cfg = QuadratureConfig::default();
        let v = euler_sum_rhs(&poly(0.0, 5.5, "u", "1"), 0.0, 5.5, &cfg).unwrap();
        assert!(close(v, direct_sum(|n| n, 0.0, 5.5), 1e-12) && close(v, 15.0, 1e-12));
        let v = euler_sum_rhs(&PiecewiseFn::constant(0.0, 4.0, 1.0).unwrap(), 0.0, 4.0, &cfg).unwrap();
        assert!(close(v, direct_sum(|_| 1.0, 0.0, 4.0), 1e-12) && close(v, 4.0, 1e-12));
        let v = euler_sum_rhs(&poly(0.5, 3.5, "u^2", "2*u"), 0.5, 3.5, &cfg).unwrap();
        assert!(close(v, 14.0, 1e-12));
    }

    #[test]
    fn euler_sum_requires_left_continuity_at_integers() {
        let cfg = QuadratureConfig::default();
        // jumps from the left at 2
        let f = PiecewiseFn::step(0.5, 3.5, &[2.0], &[0.0, 1.0], &[0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(euler_sum_rhs(&f, 0.5, 3.5, &cfg), Err(Error::Precondition(_))));
        // right-continuity failure at 2 is allowed: f(2) = 0 = f(2−)
        let g = PiecewiseFn::step(0.5, 3.5, &[2.0], &[0.0, 1.0], &[0.0, 0.0, 1.0]).unwrap();
        let v = euler_sum_rhs(&g, 0.5, 3.5, &cfg).unwrap();
        assert!(close(v, 0.0 + 0.0 + 1.0, 1e-12), "{v}");
    }

    #[test]
    fn one_sided_examples() {
        let step = unit_step();
        assert_eq!(one_sided_via_stieltjes(&step, 0.5, 0.25, 0.25, Side::Left).unwrap(), 0.0);
        assert_eq!(one_sided_via_stieltjes(&step, 0.5, 0.25, 0.25, Side::Right).unwrap(), 1.0);
        let sq = smooth("u^2", "2*u");
        assert_eq!(one_sided_via_stieltjes(&sq, 0.5, 0.1, 0.2, Side::Left).unwrap(), 0.25);
        assert!(matches!(one_sided_via_stieltjes(&sq, 0.5, 0.3, 0.2, Side::Left), Err(Error::Argument(_))));
        assert!(matches!(one_sided_via_stieltjes(&sq, 0.1, 0.2, 0.2, Side::Left), Err(Error::Domain(_))));
    }

    #[test]
    fn one_sided_is_independent_of_epsilon() {
        let cat = Catalog::standard();
        let delta = 0.2;
        for (name, f) in cat.iter() {
            for a in [0.3, 0.5, 0.7] {
                for side in [Side::Left, Side::Right] {
                    let vals: Vec<f64> = [delta, delta / 2.0, delta / 10.0]
                        .iter()
                        .map(|&eps| one_sided_via_stieltjes(f, a, eps, delta, side).unwrap())
                        .collect();
                    assert!(vals.iter().all(|v| close(*v, vals[0], 1e-14)), "{name} {a} {side:?}");
                    assert!(close(vals[0], f.limit(a, side).unwrap(), 1e-14));
                }
            }
        }
    }
}
