//! Run configuration: catalog functions plus suite parameters.
//!
//! Every field has a default, so an empty file (or no file) runs the full
//! default suites. `[[function]]` tables use the catalog format and are
//! merged over the built-in catalog, replacing entries with the same name.

use std::path::Path;

use rsfourier::funcmodel::{Catalog, FunctionSpec};
use rsfourier::stieltjes::QuadratureConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Orders randomized grids; every grid is reproducible from it.
    pub seed: u64,
    pub quadrature: QuadratureSection,
    pub tolerances: Tolerances,
    pub theorem1: Theorem1Section,
    pub theorem2: Theorem2Section,
    pub theorem3: Theorem3Section,
    pub lemmas: LemmasSection,
    pub function: Vec<FunctionSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 20_240_601,
            quadrature: QuadratureSection::default(),
            tolerances: Tolerances::default(),
            theorem1: Theorem1Section::default(),
            theorem2: Theorem2Section::default(),
            theorem3: Theorem3Section::default(),
            lemmas: LemmasSection::default(),
            function: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub rule_order: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        QuadratureSection { abs_tol: q.abs_tol, max_subdivisions: q.max_subdivisions, rule_order: q.rule_order }
    }
}

/// All pass/fail thresholds in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Midpoint identity residuals.
    pub identity: f64,
    /// Two-sided right-hand side against the sum of the one-sided ones.
    pub additivity: f64,
    pub euler_sum: f64,
    pub one_sided_eps: f64,
    pub by_parts: f64,
    pub reconstruction: f64,
    pub two_oracle: f64,
    pub partition: f64,
    /// Closed kernel against the truncated series at the largest order.
    pub kernel_series: f64,
    pub jump_midpoint: f64,
    pub constant_series: f64,
    pub cesaro: f64,
    pub local_series: f64,
    pub partial_sum: f64,
    /// Residuals at or below this count as converged when checking that a
    /// sequence decreases.
    pub noise_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-8,
            additivity: 1e-10,
            euler_sum: 1e-9,
            one_sided_eps: 1e-14,
            by_parts: 1e-10,
            reconstruction: 1e-10,
            two_oracle: 1e-9,
            partition: 1e-12,
            kernel_series: 1e-3,
            jump_midpoint: 1e-3,
            constant_series: 1e-6,
            cesaro: 1e-2,
            local_series: 1e-2,
            partial_sum: 1e-3,
            noise_floor: 1e-10,
        }
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

const IDENTITY_FUNCTIONS: [&str; 7] = ["u", "u2", "u_one_minus_u", "cos2pi", "sawtooth", "step_half", "abs_kink"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Section {
    pub interval: [f64; 2],
    pub functions: Vec<String>,
    /// Functions for the two-sided identity; when absent, those members of
    /// `functions` with `f(c) = f(d)`.
    pub both_functions: Option<Vec<String>>,
    pub points: Vec<f64>,
    pub cesaro_functions: Vec<String>,
    pub cesaro_points: Vec<f64>,
    pub cesaro_orders: Vec<usize>,
    pub partial_function: String,
    pub partial_point: f64,
    pub partial_order: usize,
    pub local: Vec<LocalCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalCase {
    pub function: String,
    pub point: f64,
    pub delta: f64,
    /// `left`, `right` or `both`.
    pub side: String,
    pub order: usize,
}

impl Default for Theorem1Section {
    fn default() -> Self {
        let local = |function: &str, side: &str| LocalCase {
            function: function.into(),
            point: 0.5,
            delta: 0.25,
            side: side.into(),
            order: 10_000,
        };
        Theorem1Section {
            interval: [0.0, 1.0],
            functions: names(&IDENTITY_FUNCTIONS),
            both_functions: None,
            points: (1..=9).map(|k| k as f64 / 10.0).collect(),
            cesaro_functions: names(&IDENTITY_FUNCTIONS),
            cesaro_points: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            cesaro_orders: vec![100, 1000, 10_000],
            partial_function: "u_one_minus_u".into(),
            partial_point: 0.3,
            partial_order: 1000,
            local: vec![local("u", "left"), local("u", "right"), local("step_half", "both")],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem2Section {
    pub functions: Vec<String>,
    pub max_modulus: usize,
}

impl Default for Theorem2Section {
    fn default() -> Self {
        Theorem2Section { functions: names(&["u_one_minus_u", "cos2pi", "abs_kink"]), max_modulus: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem3Section {
    pub partition_max_modulus: usize,
    pub series_max_modulus: usize,
    pub grid_size: usize,
    pub series_orders: Vec<u64>,
    pub jump_order: u64,
    pub constant_terms: u64,
}

impl Default for Theorem3Section {
    fn default() -> Self {
        Theorem3Section {
            partition_max_modulus: 12,
            series_max_modulus: 8,
            grid_size: 101,
            series_orders: vec![100, 1000, 10_000],
            jump_order: 100_000,
            constant_terms: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    pub name: String,
    pub expr: String,
    pub deriv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmasSection {
    pub euler_functions: Vec<Polynomial>,
    pub euler_interval: [f64; 2],
    pub random_intervals: usize,
    pub random_range: [f64; 2],
    pub one_sided_delta: f64,
    pub one_sided_points: Vec<f64>,
}

impl Default for LemmasSection {
    fn default() -> Self {
        let poly = |name: &str, expr: &str, deriv: &str| Polynomial {
            name: name.into(),
            expr: expr.into(),
            deriv: deriv.into(),
        };
        LemmasSection {
            euler_functions: vec![poly("u", "u", "1"), poly("u2", "u^2", "2*u"), poly("u3", "u^3", "3*u^2")],
            euler_interval: [0.0, 5.5],
            random_intervals: 20,
            random_range: [0.0, 10.0],
            one_sided_delta: 0.2,
            one_sided_points: vec![0.3, 0.5, 0.7],
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        RunConfig::from_toml_str(&text)
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig, CliError> {
        let q = QuadratureConfig {
            abs_tol: self.quadrature.abs_tol,
            max_subdivisions: self.quadrature.max_subdivisions,
            rule_order: self.quadrature.rule_order,
        };
        q.validate()?;
        Ok(q)
    }

    /// The built-in catalog with this file's functions merged in.
    pub fn catalog(&self) -> Result<Catalog, CliError> {
        let mut cat = Catalog::standard();
        for (name, f) in Catalog::from_specs(&self.function)?.iter() {
            cat.insert(name, f.clone());
        }
        Ok(cat)
    }

    /// Fails on the first function name a suite refers to that is not in the
    /// catalog.
    pub fn check_references(&self, cat: &Catalog) -> Result<(), CliError> {
        let t1 = &self.theorem1;
        let referenced = t1
            .functions
            .iter()
            .chain(t1.both_functions.iter().flatten())
            .chain(&t1.cesaro_functions)
            .chain(std::iter::once(&t1.partial_function))
            .chain(t1.local.iter().map(|l| &l.function))
            .chain(&self.theorem2.functions);
        for name in referenced {
            cat.require(name)?;
        }
        for case in &t1.local {
            if !matches!(case.side.as_str(), "left" | "right" | "both") {
                return Err(CliError::Config(format!(
                    "local series side must be left, right or both, got {:?}",
                    case.side
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let text = toml::to_string(&RunConfig::default()).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::from_toml_str("sede = 3"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::from_toml_str("[theorem1]\npoint = [0.5]"), Err(CliError::Config(_))));
    }

    #[test]
    fn config_functions_extend_the_catalog() {
        let cfg = RunConfig::from_toml_str(
            r#"
            [[function]]
            name = "ramp"
            domain = [0.0, 1.0]
            pieces = [{ lo = 0.0, hi = 1.0, expr = "2*u", deriv = "2" }]
            breakpoints = [{ x = 0.0, right = 0.0, at = 0.0 }, { x = 1.0, left = 2.0, at = 2.0 }]
            "#,
        )
        .unwrap();
        let cat = cfg.catalog().unwrap();
        assert_eq!(cat.require("ramp").unwrap().eval(0.5).unwrap(), 1.0);
        assert!(cat.get("u2").is_some());
        cfg.check_references(&cat).unwrap();

        let mut bad = cfg.clone();
        bad.theorem2.functions.push("missing".into());
        assert!(bad.check_references(&cat).is_err());
    }
}
