use std::io::Write;

use nflp::{inference_report, multistart_fit, outlier_report, FitDiagnostics, StartOrigin, Summary};
use serde::Serialize;

use crate::args::{FitArgs, Format};
use crate::config::RunConfig;
use crate::data::Table;
use crate::error::Result;
use crate::report::{finite, num, sink, write_csv, write_json, Provenance, TextTable};

#[derive(Debug, Serialize)]
struct CoefficientRow {
    term: String,
    estimate: f64,
    std_error: f64,
    ci_lower: f64,
    ci_upper: f64,
    t: f64,
    df: f64,
    p_value: f64,
}

#[derive(Debug, Serialize)]
struct SolutionRow {
    origin: StartOrigin,
    omega_hat: f64,
    beta_hat: Vec<f64>,
    sigma_hat: f64,
    iterations: usize,
    converged: bool,
    is_ols: bool,
    selected: bool,
}

#[derive(Debug, Serialize)]
struct ObservationRow {
    /// 1-based data row.
    row: usize,
    line: u64,
    residual: f64,
    pi: f64,
    outlier_probability: f64,
    flagged: bool,
}

#[derive(Debug, Serialize)]
struct Interval {
    lower: f64,
    upper: f64,
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    provenance: Provenance<'a, RunConfig>,
    n: usize,
    p: usize,
    alpha: f64,
    omega_hat: f64,
    /// `Σπ`, the estimated number of non-outlying rows.
    weight_sum: f64,
    sigma_hat: f64,
    df: f64,
    sigma_ci: Interval,
    r_squared: Option<f64>,
    adj_r_squared: Option<f64>,
    /// Absolute standardized residual beyond which rows are flagged; `null`
    /// when the selected solution is least squares.
    cutoff: Option<f64>,
    coefficients: Vec<CoefficientRow>,
    flagged_rows: Vec<usize>,
    observations: Vec<ObservationRow>,
    solutions: Vec<SolutionRow>,
    diagnostics: &'a FitDiagnostics,
}

pub fn run(args: FitArgs) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common, args.covariates, args.no_intercept, None)?;
    let table = Table::read(&cfg.input)?;
    let data = table.dataset(&cfg.response, &cfg.covariates, cfg.intercept)?;
    let fit = multistart_fit(&data, &cfg.fit)?;
    let summary = Summary::from_fit(&fit, &data);
    let inf = inference_report(&summary, cfg.alpha)?;
    let sel = fit.selected_solution();

    let coefficients = data
        .column_names()
        .iter()
        .enumerate()
        .map(|(j, term)| {
            Ok(CoefficientRow {
                term: term.clone(),
                estimate: sel.beta_hat[j],
                std_error: summary.standard_error(j)?,
                ci_lower: inf.beta_cis[j].lower,
                ci_upper: inf.beta_cis[j].upper,
                t: inf.coefficient_tests[j].statistic,
                df: inf.df,
                p_value: inf.coefficient_tests[j].p_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let observations: Vec<ObservationRow> = outlier_report(&fit, &data)
        .into_iter()
        .map(|o| ObservationRow {
            row: o.index + 1,
            line: table.line(o.index),
            residual: o.residual,
            pi: o.pi,
            outlier_probability: o.outlier_probability,
            flagged: o.flagged,
        })
        .collect();
    let solutions = fit
        .solutions
        .iter()
        .enumerate()
        .map(|(i, s)| SolutionRow {
            origin: s.origin,
            omega_hat: s.omega_hat,
            beta_hat: s.beta_hat.clone(),
            sigma_hat: s.sigma_hat,
            iterations: s.iterations,
            converged: s.converged,
            is_ols: s.is_ols,
            selected: i == fit.selected,
        })
        .collect();
    let report = FitReport {
        provenance: Provenance::new("fit", cfg.fit.seed, &cfg),
        n: data.n(),
        p: data.p(),
        alpha: cfg.alpha,
        omega_hat: sel.omega_hat,
        weight_sum: summary.weight_sum,
        sigma_hat: sel.sigma_hat,
        df: inf.df,
        sigma_ci: Interval { lower: inf.sigma_ci.lower, upper: inf.sigma_ci.upper },
        r_squared: inf.r_squared,
        adj_r_squared: inf.adj_r_squared,
        cutoff: finite(fit.cutoff),
        coefficients,
        flagged_rows: observations.iter().filter(|o| o.flagged).map(|o| o.row).collect(),
        observations,
        solutions,
        diagnostics: &fit.diagnostics,
    };

    let mut out = sink(cfg.output.as_deref())?;
    match cfg.format {
        Format::Json => write_json(&mut *out, &report),
        Format::Csv => write_csv(&mut *out, &report.coefficients),
        Format::Text => write_text(&mut *out, &report),
    }
}

fn write_text(out: &mut dyn Write, r: &FitReport<'_>) -> Result<()> {
    writeln!(
        out,
        "n = {}  p = {}  omega = {}  sigma = {}  df = {}",
        r.n,
        r.p,
        num(r.omega_hat),
        num(r.sigma_hat),
        num(r.df)
    )?;
    writeln!(out)?;
    let level = format!("{:.0}%", 100.0 * (1.0 - r.alpha));
    let mut t = TextTable::new(&["term", "estimate", "std.error", &format!("{level} lower"), "upper", "t", "p"]);
    for c in &r.coefficients {
        t.row(vec![
            c.term.clone(),
            num(c.estimate),
            num(c.std_error),
            num(c.ci_lower),
            num(c.ci_upper),
            num(c.t),
            num(c.p_value),
        ]);
    }
    t.write(out)?;
    writeln!(out)?;
    writeln!(out, "sigma {level} interval: ({}, {})", num(r.sigma_ci.lower), num(r.sigma_ci.upper))?;
    if let (Some(a), Some(b)) = (r.r_squared, r.adj_r_squared) {
        writeln!(out, "R^2 = {}  adjusted R^2 = {}", num(a), num(b))?;
    }
    match r.cutoff {
        Some(c) => writeln!(out, "outlier cutoff |r| > {}", num(c))?,
        None => writeln!(out, "least-squares solution selected; no outliers identified")?,
    }
    if !r.flagged_rows.is_empty() {
        writeln!(out)?;
        let mut t = TextTable::new(&["row", "line", "residual", "pi", "P(outlier)"]);
        for o in r.observations.iter().filter(|o| o.flagged) {
            t.row(vec![o.row.to_string(), o.line.to_string(), num(o.residual), num(o.pi), num(o.outlier_probability)]);
        }
        t.write(out)?;
    }
    out.flush()?;
    Ok(())
}
