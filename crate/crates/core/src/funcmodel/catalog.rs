//! Text catalog of named piecewise functions.
//!
//! The on-disk form is TOML. Each `[[function]]` table has a `name`, a
//! `domain = [c, d]`, an optional `bv` flag, a list of `pieces` and a list of
//! `breakpoints` (one per piece boundary, both ends included):
//!
//! ```toml
//! [[function]]
//! name = "step_half"
//! domain = [0.0, 1.0]
//! bv = true
//! pieces = [
//!     { lo = 0.0, hi = 0.5, expr = "0" },
//!     { lo = 0.5, hi = 1.0, expr = "1" },
//! ]
//! breakpoints = [
//!     { x = 0.0, right = 0.0, at = 0.0 },
//!     { x = 0.5, left = 0.0, right = 1.0, at = 1.0 },
//!     { x = 1.0, left = 1.0, at = 1.0 },
//! ]
//! ```
//!
//! `expr` and the optional `deriv` use the grammar in [`Expr`](super::Expr).
//! `left`/`right` may be omitted at interior breakpoints, in which case they
//! are filled in from the adjacent piece evaluated at `x`.

use serde::{Deserialize, Serialize};

use super::{Breakpoint, Expr, Interval, PiecewiseFn, SmoothPiece};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deriv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakpointSpec {
    pub x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<f64>,
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub name: String,
    pub domain: [f64; 2],
    #[serde(default)]
    pub bv: bool,
    pub pieces: Vec<PieceSpec>,
    pub breakpoints: Vec<BreakpointSpec>,
}

impl FunctionSpec {
    pub fn build(&self) -> Result<PiecewiseFn> {
        let domain = Interval::new(self.domain[0], self.domain[1])?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let expr: Expr = p.expr.parse()?;
                let deriv = p.deriv.as_deref().map(str::parse::<Expr>).transpose()?;
                Ok(SmoothPiece::new(p.lo, p.hi, expr, deriv))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = pieces.len();
        let breakpoints = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let left = match b.left {
                    None if i > 0 && i < n => Some(pieces[i - 1].expr.eval(b.x)),
                    v => v,
                };
                let right = match b.right {
                    None if i > 0 && i < n => Some(pieces[i].expr.eval(b.x)),
                    v => v,
                };
                Breakpoint { x: b.x, left_value: left, right_value: right, value_at: b.at }
            })
            .collect();
        PiecewiseFn::new(domain, pieces, breakpoints, self.bv)
            .map_err(|e| Error::Definition(format!("function {:?}: {e}", self.name)))
    }

    pub fn from_fn(name: &str, f: &PiecewiseFn) -> Self {
        let dom = f.domain();
        FunctionSpec {
            name: name.to_string(),
            domain: [dom.c(), dom.d()],
            bv: f.bv_flag(),
            pieces: f
                .pieces()
                .iter()
                .map(|p| PieceSpec {
                    lo: p.lo,
                    hi: p.hi,
                    expr: p.expr.to_string(),
                    deriv: p.deriv.as_ref().map(Expr::to_string),
                })
                .collect(),
            breakpoints: f
                .breakpoints()
                .iter()
                .map(|b| BreakpointSpec { x: b.x, left: b.left_value, right: b.right_value, at: b.value_at })
                .collect(),
        }
    }
}

/// Serialized form of a catalog: a list of `[[function]]` tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CatalogFile {
    #[serde(default)]
    pub function: Vec<FunctionSpec>,
}

/// Named functions in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    entries: Vec<(String, PiecewiseFn)>,
}

const STANDARD: &str = include_str!("standard.toml");

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    /// The built-in test functions on `[0, 1]`.
    pub fn standard() -> Self {
        Catalog::from_toml_str(STANDARD).expect("built-in catalog is valid")
    }

    pub fn from_specs(specs: &[FunctionSpec]) -> Result<Self> {
        let mut cat = Catalog::new();
        for spec in specs {
            cat.insert(&spec.name, spec.build()?);
        }
        Ok(cat)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Catalog::from_specs(&file.function)
    }

    pub fn to_file(&self) -> CatalogFile {
        CatalogFile { function: self.entries.iter().map(|(n, f)| FunctionSpec::from_fn(n, f)).collect() }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_file()).expect("catalog serializes")
    }

    /// Inserts or replaces by name.
    pub fn insert(&mut self, name: &str, f: PiecewiseFn) {
        match self.entries.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = f,
            None => self.entries.push((name.to_string(), f)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&PiecewiseFn> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn require(&self, name: &str) -> Result<&PiecewiseFn> {
        self.get(name).ok_or_else(|| Error::argument(format!("no function named {name:?} in the catalog")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PiecewiseFn)> {
        self.entries.iter().map(|(n, f)| (n.as_str(), f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
