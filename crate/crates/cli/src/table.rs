//! Step tables for the residue-class kernels.
//!
//! Rows are `kind,lo,hi,re,im`. The first data row is the constant `c`
//! (blank `lo`/`hi`), then one `step` row per open interval `(k/q, (k+1)/q)`,
//! one `jump` row per interior grid point, and `sample` rows when
//! `--grid` asks for them. For `r = q` the kernel is a scaled sawtooth
//! rather than a step function; the table then starts with a `sawtooth`
//! row and carries samples only.

use clap::{Args, ValueEnum};
use rsfourier::kernels::{psi_rq_closed, ApKernelClosedForm};
use rsfourier::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKernel {
    #[value(name = "psi_rq")]
    PsiRq,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub kernel: TableKernel,

    #[arg(long)]
    pub q: i64,

    #[arg(long)]
    pub r: i64,

    /// Number of equal subintervals of [0, 1] to sample the kernel on; 0
    /// for none.
    #[arg(long, default_value_t = 0)]
    pub grid: usize,
}

struct Rows(csv::Writer<Vec<u8>>);

impl Rows {
    fn push(&mut self, kind: &str, span: Option<(f64, f64)>, v: Complex64) -> Result<(), CliError> {
        let (lo, hi) = span.map_or((String::new(), String::new()), |(lo, hi)| (sci(lo), sci(hi)));
        self.0.write_record([kind.to_string(), lo, hi, sci(v.re), sci(v.im)])?;
        Ok(())
    }
}

fn sci(x: f64) -> String {
    // no negative zero in the output
    format!("{:.16e}", x + 0.0)
}

pub fn run(args: &TableArgs) -> Result<String, CliError> {
    let TableKernel::PsiRq = args.kernel;
    let (r, q) = (args.r, args.q);
    if q < 1 || r < 1 || r > q {
        return Err(rsfourier::Error::Argument(format!("need 1 <= r <= q, got r = {r}, q = {q}")).into());
    }
    let mut rows = Rows(csv::Writer::from_writer(Vec::new()));
    rows.0.write_record(["kind", "lo", "hi", "re", "im"])?;
    let qf = q as f64;
    if r == q {
        rows.push("sawtooth", Some((0.0, 1.0)), Complex64::new(1.0 / qf, 0.0))?;
    } else {
        let kernel = ApKernelClosedForm::new(r, q)?;
        rows.push("c", None, kernel.c_rq())?;
        for (k, &v) in kernel.step_values().iter().enumerate() {
            rows.push("step", Some((k as f64 / qf, (k + 1) as f64 / qf)), v)?;
        }
        for k in 1..q as usize {
            let x = k as f64 / qf;
            rows.push("jump", Some((x, x)), kernel.jump_values()[k])?;
        }
    }
    for k in 0..=args.grid {
        if args.grid == 0 {
            break;
        }
        let u = k as f64 / args.grid as f64;
        rows.push("sample", Some((u, u)), psi_rq_closed(u, r, q)?)?;
    }
    let bytes = rows.0.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(q: i64, r: i64, grid: usize) -> Result<String, CliError> {
        run(&TableArgs { kernel: TableKernel::PsiRq, q, r, grid })
    }

    fn field(line: &str, i: usize) -> f64 {
        line.split(',').nth(i).unwrap().parse().unwrap()
    }

    #[test]
    fn half_modulus_table() {
        let text = table(2, 1, 0).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kind,lo,hi,re,im");
        assert!(lines[1].starts_with("c,,,"));
        assert_eq!((field(lines[1], 3), field(lines[1], 4)), (0.0, 0.0));
        let steps: Vec<&str> = lines.iter().copied().filter(|l| l.starts_with("step")).collect();
        assert_eq!(steps.len(), 2);
        assert_eq!((field(steps[0], 1), field(steps[0], 2), field(steps[0], 3)), (0.0, 0.5, -0.25));
        assert_eq!((field(steps[1], 1), field(steps[1], 2), field(steps[1], 3)), (0.5, 1.0, 0.25));
        let jumps: Vec<&str> = lines.iter().copied().filter(|l| l.starts_with("jump")).collect();
        assert_eq!(jumps.len(), 1);
        assert_eq!((field(jumps[0], 1), field(jumps[0], 3)), (0.5, 0.0));
    }

    #[test]
    fn quarter_modulus_constant() {
        let text = table(4, 1, 0).unwrap();
        let c = text.lines().nth(1).unwrap();
        assert!(c.starts_with("c,"));
        assert!(field(c, 3).abs() < 1e-15);
        assert!((field(c, 4) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn full_modulus_is_flagged_as_sawtooth() {
        let text = table(2, 2, 4).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].starts_with("sawtooth,"));
        assert!(!text.contains("\nstep,"));
        assert_eq!(lines.iter().filter(|l| l.starts_with("sample")).count(), 5);
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(table(2, 3, 0), Err(CliError::Core(_))));
        assert!(matches!(table(0, 0, 0), Err(CliError::Core(_))));
    }
}
