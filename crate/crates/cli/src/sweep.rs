//! Convergence sweeps: residual against truncation order, one CSV row per
//! order in the order given.

use clap::{Args, ValueEnum};
use rsfourier::fourier::{cesaro_mean, exp_coeffs, partial_sum};
use rsfourier::kernels::{psi_rq_closed, psi_rq_series};

use crate::config::RunConfig;
use crate::suites::midpoint;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    /// Cesàro mean of a catalog function against its midpoint value.
    Cesaro,
    /// Symmetric partial sum of a catalog function against its midpoint value.
    Partial,
    /// Truncated kernel series against the closed form.
    #[value(name = "psi_series")]
    PsiSeries,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub target: SweepTarget,

    /// Catalog function (cesaro and partial).
    #[arg(long, default_value = "sawtooth")]
    pub function: String,

    /// Evaluation point (cesaro and partial).
    #[arg(long, default_value_t = 0.0)]
    pub point: f64,

    #[arg(long, default_value_t = 2)]
    pub q: i64,

    #[arg(long, default_value_t = 1)]
    pub r: i64,

    /// Evaluation point of the kernel (psi_series).
    #[arg(long, default_value_t = 0.3)]
    pub u: f64,

    /// Truncation orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub orders: Vec<u64>,
}

/// Residual at each requested order.
pub fn residuals(args: &SweepArgs, cfg: &RunConfig) -> Result<Vec<(u64, f64)>, CliError> {
    if args.orders.is_empty() {
        return Err(CliError::Config("a sweep needs at least one order".into()));
    }
    match args.target {
        SweepTarget::PsiSeries => {
            let closed = psi_rq_closed(args.u, args.r, args.q)?;
            let mut rows = Vec::with_capacity(args.orders.len());
            for &m in &args.orders {
                rows.push((m, (psi_rq_series(args.u, args.r, args.q, m)? - closed).norm()));
            }
            Ok(rows)
        }
        SweepTarget::Cesaro | SweepTarget::Partial => {
            let catalog = cfg.catalog()?;
            let f = catalog.require(&args.function)?;
            let iv = f.domain();
            let target = midpoint(f, iv, args.point)?;
            let max = *args.orders.iter().max().expect("orders checked non-empty");
            let fc = exp_coeffs(f, iv, max as usize, &cfg.quadrature()?)?;
            let mut rows = Vec::with_capacity(args.orders.len());
            for &n in &args.orders {
                let value = match args.target {
                    SweepTarget::Cesaro => cesaro_mean(&fc, args.point, n as usize, true)?,
                    _ => partial_sum(&fc, args.point, n as usize, true)?,
                };
                rows.push((n, (value.re - target).hypot(value.im)));
            }
            Ok(rows)
        }
    }
}

pub fn run(args: &SweepArgs, cfg: &RunConfig) -> Result<String, CliError> {
    let rows = residuals(args, cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "residual"])?;
    for (n, residual) in rows {
        w.write_record([n.to_string(), format!("{residual:.16e}")])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}
