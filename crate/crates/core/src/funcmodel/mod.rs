//! Piecewise closed-form functions with exact discontinuity data.
//!
//! A [`PiecewiseFn`] tiles its domain `[c, d]` with [`SmoothPiece`]s. Every
//! piece boundary (including `c` and `d`) carries a [`Breakpoint`] that stores
//! the one-sided limits and the value the function actually takes there.
//! Stieltjes integration reads jumps straight from these records instead of
//! trying to detect them numerically.

mod catalog;
mod expr;

pub use catalog::{BreakpointSpec, Catalog, CatalogFile, FunctionSpec, PieceSpec};
pub use expr::{BinOp, Expr, Func};

use crate::error::{Error, Result};

/// Closed interval `[c, d]` with half-length `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    c: f64,
    d: f64,
    delta: f64,
}

impl Interval {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c.is_finite() && d.is_finite() && c < d) {
            return Err(Error::argument(format!("interval requires finite c < d, got [{c}, {d}]")));
        }
        Ok(Interval { c, d, delta: (d - c) / 2.0 })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Half-length; `2 * delta == d - c` exactly.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn length(&self) -> f64 {
        self.d - self.c
    }

    pub fn contains(&self, x: f64) -> bool {
        self.c <= x && x <= self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Discontinuity record at a piece boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    /// `f(x−)`; absent at the left end of the domain.
    pub left_value: Option<f64>,
    /// `f(x+)`; absent at the right end of the domain.
    pub right_value: Option<f64>,
    pub value_at: f64,
}

impl Breakpoint {
    /// Both one-sided limits agree with the stored value.
    pub fn is_removable(&self) -> bool {
        self.left_value.is_none_or(|l| l == self.value_at) && self.right_value.is_none_or(|r| r == self.value_at)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPiece {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
    pub deriv: Option<Expr>,
}

impl SmoothPiece {
    pub fn new(lo: f64, hi: f64, expr: Expr, deriv: Option<Expr>) -> Self {
        SmoothPiece { lo, hi, expr, deriv }
    }

    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        SmoothPiece { lo, hi, expr: Expr::Lit(value), deriv: Some(Expr::Lit(0.0)) }
    }

    pub fn is_constant(&self) -> bool {
        self.expr.is_constant()
    }
}

/// Step used for the one-sided limit consistency checks.
const LIMIT_PROBES: [f64; 3] = [1e-3, 1e-5, 1e-7];
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    domain: Interval,
    pieces: Vec<SmoothPiece>,
    breakpoints: Vec<Breakpoint>,
    bv_flag: bool,
}

impl PiecewiseFn {
    /// Validates and assembles a function. There must be exactly one
    /// breakpoint per piece boundary, `c` and `d` included.
    pub fn new(
        domain: Interval,
        pieces: Vec<SmoothPiece>,
        breakpoints: Vec<Breakpoint>,
        bv_flag: bool,
    ) -> Result<Self> {
        let f = PiecewiseFn { domain, pieces, breakpoints, bv_flag };
        f.validate()?;
        Ok(f)
    }

    /// Builds breakpoints from the pieces themselves: one-sided limits are
    /// the adjacent piece expressions evaluated at the boundary and the point
    /// values are taken from `values_at` (one per boundary, `c` and `d`
    /// included). Only valid when every expression extends continuously to
    /// the ends of its piece.
    pub fn from_pieces(pieces: Vec<SmoothPiece>, values_at: &[f64], bv_flag: bool) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::definition("a function needs at least one piece"));
        }
        if values_at.len() != pieces.len() + 1 {
            return Err(Error::definition(format!(
                "{} pieces need {} breakpoint values, got {}",
                pieces.len(),
                pieces.len() + 1,
                values_at.len()
            )));
        }
        let domain = Interval::new(pieces[0].lo, pieces[pieces.len() - 1].hi)?;
        let mut breakpoints = Vec::with_capacity(values_at.len());
        for (i, &value_at) in values_at.iter().enumerate() {
            let x = if i < pieces.len() { pieces[i].lo } else { pieces[i - 1].hi };
            let left_value = (i > 0).then(|| pieces[i - 1].expr.eval(x));
            let right_value = (i < pieces.len()).then(|| pieces[i].expr.eval(x));
            breakpoints.push(Breakpoint { x, left_value, right_value, value_at });
        }
        PiecewiseFn::new(domain, pieces, breakpoints, bv_flag)
    }

    /// A single expression over `[c, d]`, with point values at the ends taken
    /// from the expression.
    pub fn smooth(c: f64, d: f64, expr: Expr, deriv: Option<Expr>) -> Result<Self> {
        let ends = [expr.eval(c), expr.eval(d)];
        PiecewiseFn::from_pieces(vec![SmoothPiece::new(c, d, expr, deriv)], &ends, false)
    }

    /// Parses `expr` (and `deriv`) with the catalog grammar.
    pub fn parse_smooth(c: f64, d: f64, expr: &str, deriv: Option<&str>) -> Result<Self> {
        let expr: Expr = expr.parse()?;
        let deriv = deriv.map(str::parse).transpose()?;
        PiecewiseFn::smooth(c, d, expr, deriv)
    }

    pub fn constant(c: f64, d: f64, value: f64) -> Result<Self> {
        PiecewiseFn::from_pieces(vec![SmoothPiece::constant(c, d, value)], &[value, value], true)
    }

    /// Step function with the given jump locations, levels between them and
    /// point values at every boundary (`c` and `d` included).
    pub fn step(c: f64, d: f64, jumps: &[f64], levels: &[f64], values_at: &[f64]) -> Result<Self> {
        if levels.len() != jumps.len() + 1 {
            return Err(Error::definition("a step function needs one more level than jumps"));
        }
        let mut edges = Vec::with_capacity(jumps.len() + 2);
        edges.push(c);
        edges.extend_from_slice(jumps);
        edges.push(d);
        let pieces = edges.windows(2).zip(levels).map(|(w, &level)| SmoothPiece::constant(w[0], w[1], level)).collect();
        PiecewiseFn::from_pieces(pieces, values_at, true)
    }

    fn validate(&self) -> Result<()> {
        let (c, d) = (self.domain.c, self.domain.d);
        let n = self.pieces.len();
        if n == 0 {
            return Err(Error::definition("a function needs at least one piece"));
        }
        if self.pieces[0].lo != c || self.pieces[n - 1].hi != d {
            return Err(Error::definition("pieces must start at c and end at d"));
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if !(p.lo < p.hi) {
                return Err(Error::definition(format!("piece {i} has lo >= hi")));
            }
            if i + 1 < n && p.hi != self.pieces[i + 1].lo {
                return Err(Error::definition(format!("pieces {i} and {} do not meet", i + 1)));
            }
        }
        if self.breakpoints.len() != n + 1 {
            return Err(Error::definition(format!(
                "expected {} breakpoints (one per piece boundary), got {}",
                n + 1,
                self.breakpoints.len()
            )));
        }
        for (i, bp) in self.breakpoints.iter().enumerate() {
            let x = if i < n { self.pieces[i].lo } else { self.pieces[n - 1].hi };
            if bp.x != x {
                return Err(Error::definition(format!("breakpoint {i} at {} does not match piece boundary {x}", bp.x)));
            }
            if !bp.value_at.is_finite() {
                return Err(Error::definition(format!("non-finite value at {x}")));
            }
            match (i == 0, bp.left_value) {
                (true, Some(_)) => {
                    return Err(Error::definition("the left endpoint has no left limit"));
                }
                (false, None) => {
                    return Err(Error::definition(format!("missing left limit at {x}")));
                }
                (false, Some(l)) => check_limit(&self.pieces[i - 1], x, l, Side::Left)?,
                (true, None) => {}
            }
            match (i == n, bp.right_value) {
                (true, Some(_)) => {
                    return Err(Error::definition("the right endpoint has no right limit"));
                }
                (false, None) => {
                    return Err(Error::definition(format!("missing right limit at {x}")));
                }
                (false, Some(r)) => check_limit(&self.pieces[i], x, r, Side::Right)?,
                (true, None) => {}
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if let Some(deriv) = &p.deriv {
                let m = 0.5 * (p.lo + p.hi);
                let h = FD_STEP.min(0.25 * (p.hi - p.lo));
                // slivers left over from restricting at rounded endpoints
                if h < 1e-8 * (1.0 + m.abs()) {
                    continue;
                }
                let fd = (p.expr.eval(m + h) - p.expr.eval(m - h)) / (2.0 * h);
                let dv = deriv.eval(m);
                if !((dv - fd).abs() <= FD_TOL * (1.0 + fd.abs())) {
                    return Err(Error::definition(format!(
                        "piece {i}: derivative {deriv} gives {dv} at {m}, finite difference gives {fd}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn pieces(&self) -> &[SmoothPiece] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn bv_flag(&self) -> bool {
        self.bv_flag
    }

    /// Declared bounded variation, or every non-constant piece carries its
    /// derivative.
    pub fn is_good(&self) -> bool {
        self.bv_flag || self.pieces.iter().all(|p| p.deriv.is_some() || p.is_constant())
    }

    /// Every piece is constant.
    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(SmoothPiece::is_constant)
    }

    fn check_in_domain(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::domain(format!("{x} is outside [{}, {}]", self.domain.c, self.domain.d)))
        }
    }

    pub fn breakpoint_at(&self, x: f64) -> Option<&Breakpoint> {
        self.breakpoints.binary_search_by(|bp| bp.x.total_cmp(&x)).ok().map(|i| &self.breakpoints[i])
    }

    /// Index of the piece whose open interior contains `x`, or the piece to the
    /// right of `x` when `x` is a boundary (the left piece at `d`).
    pub(crate) fn piece_index(&self, x: f64) -> usize {
        let idx = self.pieces.partition_point(|p| p.hi <= x);
        idx.min(self.pieces.len() - 1)
    }

    pub(crate) fn piece(&self, idx: usize) -> &SmoothPiece {
        &self.pieces[idx]
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        if let Some(bp) = self.breakpoint_at(x) {
            return Ok(bp.value_at);
        }
        Ok(self.pieces[self.piece_index(x)].expr.eval(x))
    }

    pub fn left_limit(&self, x: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        if x == self.domain.c {
            return Err(Error::domain(format!("no left limit at the left endpoint {x}")));
        }
        match self.breakpoint_at(x) {
            Some(bp) => Ok(bp.left_value.expect("validated: interior and right-end breakpoints carry left limits")),
            None => self.eval(x),
        }
    }

    pub fn right_limit(&self, x: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        if x == self.domain.d {
            return Err(Error::domain(format!("no right limit at the right endpoint {x}")));
        }
        match self.breakpoint_at(x) {
            Some(bp) => Ok(bp.right_value.expect("validated: interior and left-end breakpoints carry right limits")),
            None => self.eval(x),
        }
    }

    /// One-sided limit on the requested side.
    pub fn limit(&self, x: f64, side: Side) -> Result<f64> {
        match side {
            Side::Left => self.left_limit(x),
            Side::Right => self.right_limit(x),
        }
    }

    /// `f(x+) − f(x−)` in the interior, `f(c+) − f(c)` at `c` and `f(d) − f(d−)` at `d`.
    pub fn jump_at(&self, x: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        let (c, d) = (self.domain.c, self.domain.d);
        if x == c {
            Ok(self.right_limit(x)? - self.eval(x)?)
        } else if x == d {
            Ok(self.eval(x)? - self.left_limit(x)?)
        } else {
            Ok(self.right_limit(x)? - self.left_limit(x)?)
        }
    }

    /// Jump relative to the sub-interval `[a, b]`: the endpoint conventions
    /// of [`jump_at`](Self::jump_at) apply at `a` and `b` instead of `c`, `d`.
    pub fn jump_within(&self, x: f64, a: f64, b: f64) -> Result<f64> {
        if x == a {
            Ok(self.right_limit(x)? - self.eval(x)?)
        } else if x == b {
            Ok(self.eval(x)? - self.left_limit(x)?)
        } else {
            Ok(self.right_limit(x)? - self.left_limit(x)?)
        }
    }

    /// Restriction to `[lo, hi]`, keeping the function's own values at the
    /// new endpoints.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<PiecewiseFn> {
        self.check_in_domain(lo)?;
        self.check_in_domain(hi)?;
        if !(lo < hi) {
            return Err(Error::argument(format!("restriction needs lo < hi, got [{lo}, {hi}]")));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.hi <= lo || p.lo >= hi {
                continue;
            }
            let mut q = p.clone();
            q.lo = q.lo.max(lo);
            q.hi = q.hi.min(hi);
            pieces.push(q);
        }
        let mut breakpoints = Vec::with_capacity(pieces.len() + 1);
        let start =
            Breakpoint { x: lo, left_value: None, right_value: Some(self.right_limit(lo)?), value_at: self.eval(lo)? };
        breakpoints.push(start);
        for bp in &self.breakpoints {
            if bp.x > lo && bp.x < hi {
                breakpoints.push(bp.clone());
            }
        }
        breakpoints.push(Breakpoint {
            x: hi,
            left_value: Some(self.left_limit(hi)?),
            right_value: None,
            value_at: self.eval(hi)?,
        });
        PiecewiseFn::new(Interval::new(lo, hi)?, pieces, breakpoints, self.bv_flag)
    }

    /// Copy with the point value at an existing breakpoint replaced.
    pub fn with_value_at(&self, x: f64, value: f64) -> Result<PiecewiseFn> {
        let mut g = self.clone();
        let idx = g
            .breakpoints
            .binary_search_by(|bp| bp.x.total_cmp(&x))
            .map_err(|_| Error::argument(format!("{x} is not a breakpoint")))?;
        g.breakpoints[idx].value_at = value;
        g.validate()?;
        Ok(g)
    }

    /// Restriction to `[lo, a]` with `f(a)` replaced by `f(a−)`, or to
    /// `[a, hi]` with `f(a)` replaced by `f(a+)`.
    pub fn one_sided_restriction(&self, a: f64, other_end: f64, side: Side) -> Result<PiecewiseFn> {
        match side {
            Side::Left => {
                let limit = self.left_limit(a)?;
                self.restrict(other_end, a)?.with_value_at(a, limit)
            }
            Side::Right => {
                let limit = self.right_limit(a)?;
                self.restrict(a, other_end)?.with_value_at(a, limit)
            }
        }
    }
}

fn check_limit(piece: &SmoothPiece, x: f64, stored: f64, side: Side) -> Result<()> {
    if !stored.is_finite() {
        return Err(Error::definition(format!("non-finite one-sided limit at {x}")));
    }
    let width = piece.hi - piece.lo;
    let h = LIMIT_PROBES[LIMIT_PROBES.len() - 1].min(0.5 * width);
    let probe = match side {
        Side::Left => x - h,
        Side::Right => x + h,
    };
    let err = (piece.expr.eval(probe) - stored).abs();
    if err <= 1e-5 * (1.0 + stored.abs()) {
        Ok(())
    } else {
        Err(Error::definition(format!(
            "{side:?} limit {stored} at {x} disagrees with the adjacent piece (off by {err:e})"
        )))
    }
}

/// Distance between each stored one-sided limit and the adjacent piece's
/// expression at `x ∓ h`, for each probe step `h` in turn.
pub fn limit_probe_errors(f: &PiecewiseFn) -> Vec<(f64, Side, [f64; 3])> {
    let mut out = Vec::new();
    let n = f.pieces.len();
    for (i, bp) in f.breakpoints.iter().enumerate() {
        if let (Some(l), true) = (bp.left_value, i > 0) {
            let p = &f.pieces[i - 1];
            out.push((bp.x, Side::Left, LIMIT_PROBES.map(|h| (p.expr.eval(bp.x - h) - l).abs())));
        }
        if let (Some(r), true) = (bp.right_value, i < n) {
            let p = &f.pieces[i];
            out.push((bp.x, Side::Right, LIMIT_PROBES.map(|h| (p.expr.eval(bp.x + h) - r).abs())));
        }
    }
    out
}
