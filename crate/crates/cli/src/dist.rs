use std::io::{self, Write};

use nflp::{adaptive_cutoff, shape_from_omega};
use serde::Serialize;

use crate::args::{DistArgs, Format};
use crate::error::{CliError, Result};
use crate::report::{finite, write_csv, write_json};

#[derive(Debug, Serialize)]
struct ShapeRow {
    omega: f64,
    pure_normal: bool,
    /// `null` for the pure normal.
    tau: Option<f64>,
    lambda: Option<f64>,
    rho: f64,
    cutoff: Option<f64>,
}

pub fn run(args: DistArgs) -> Result<()> {
    if !(args.omega > 0.0 && args.omega <= 1.0) {
        return Err(CliError::usage(format!("omega must lie in (0, 1], got {}", args.omega)));
    }
    let s = shape_from_omega(args.omega)?;
    let cutoff = adaptive_cutoff(&s)?;
    let row = ShapeRow {
        omega: s.omega,
        pure_normal: s.is_pure_normal(),
        tau: finite(s.tau),
        lambda: finite(s.lambda),
        rho: s.rho,
        cutoff: finite(cutoff),
    };
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => write_json(&mut out, &row),
        Format::Csv => write_csv(&mut out, [&row]),
        Format::Text => {
            writeln!(out, "omega   {}", row.omega)?;
            if row.pure_normal {
                writeln!(out, "pure normal: no outlier component")?;
            }
            writeln!(out, "tau     {:.6}", s.tau)?;
            writeln!(out, "lambda  {:.6}", s.lambda)?;
            writeln!(out, "rho     {:.6}", s.rho)?;
            writeln!(out, "cutoff  {:.6}", cutoff)?;
            Ok(())
        }
    }
}
