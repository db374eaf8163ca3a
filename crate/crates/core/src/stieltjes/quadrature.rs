use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use super::QuadratureConfig;
use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pub(crate) nodes: Vec<f64>,
    pub(crate) weights: Vec<f64>,
}

impl Rule {
    pub(crate) fn new(order: usize) -> Result<Self> {
        let order = NonZeroUsize::new(order)
            .filter(|n| n.get() >= 2)
            .ok_or_else(|| Error::argument("quadrature rule order must be at least 2"))?;
        let gl = GaussLegendre::new(order);
        let (nodes, weights) = gl.as_node_weight_pairs().iter().copied().unzip();
        Ok(Rule { nodes, weights })
    }

    /// Rule applied on `[p, q]`; also returns `Σ w |f|` for the roundoff floor.
    fn apply(&self, p: f64, q: f64, f: &impl Fn(f64) -> f64) -> (f64, f64) {
        let half = 0.5 * (q - p);
        let mid = 0.5 * (q + p);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = w * f(mid + half * t);
            sum += v;
            abs += v.abs();
        }
        (sum * half, abs * half.abs())
    }

    /// Composite rule over `2^level` equal subpanels of `[p, q]`.
    fn composite(&self, p: f64, q: f64, level: u32, f: &impl Fn(f64) -> f64) -> (f64, f64) {
        let n = 1usize << level;
        let h = (q - p) / n as f64;
        let mut sum = 0.0;
        let mut abs = 0.0;
        for i in 0..n {
            let lo = p + i as f64 * h;
            let hi = if i + 1 == n { q } else { p + (i + 1) as f64 * h };
            let (s, a) = self.apply(lo, hi, f);
            sum += s;
            abs += a;
        }
        (sum, abs)
    }
}

/// Integral of a smooth integrand over `[p, q]` by dyadic refinement of a
/// composite Gauss–Legendre rule. Stops when two successive levels differ by
/// less than `tol` (or by less than the roundoff floor). Returns the finer
/// value and the last difference as the error estimate.
pub(crate) fn dyadic(
    rule: &Rule,
    p: f64,
    q: f64,
    tol: f64,
    cfg: &QuadratureConfig,
    f: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let (mut prev, _) = rule.composite(p, q, 0, &f);
    let mut level = 1u32;
    let mut diff = f64::INFINITY;
    while (1usize << level) <= cfg.max_subdivisions {
        let (cur, abs) = rule.composite(p, q, level, &f);
        diff = (cur - prev).abs();
        if diff <= tol || diff <= 16.0 * f64::EPSILON * abs {
            return Ok((cur, diff));
        }
        prev = cur;
        level += 1;
    }
    Err(Error::Accuracy {
        message: format!("quadrature on [{p}, {q}] did not converge within {} subdivisions", cfg.max_subdivisions),
        est_error: diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let rule = Rule::new(15).unwrap();
        assert_eq!(rule.nodes.len(), 15);
        let (v, _) = rule.apply(0.0, 2.0, &|x: f64| x.powi(29));
        assert!((v - 2f64.powi(30) / 30.0).abs() / (2f64.powi(30) / 30.0) < 1e-13);
        assert!(Rule::new(1).is_err());
    }

    #[test]
    fn dyadic_converges_on_smooth_integrands() {
        let rule = Rule::new(15).unwrap();
        let cfg = QuadratureConfig::default();
        let (v, err) = dyadic(&rule, 0.0, std::f64::consts::PI, 1e-12, &cfg, f64::sin).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        assert!(err <= 1e-12);
    }

    #[test]
    fn dyadic_reports_non_convergence() {
        let rule = Rule::new(2).unwrap();
        let cfg = QuadratureConfig { max_subdivisions: 4, ..QuadratureConfig::default() };
        let res = dyadic(&rule, 0.0, 1.0, 1e-15, &cfg, |x| (200.0 * x).sin());
        assert!(matches!(res, Err(Error::Accuracy { est_error, .. }) if est_error > 0.0));
    }
}
