use std::io::Write;

use serde::Serialize;

use super::harness::{GridResult, ScenarioResult};
use super::scenario::EstimatorId;
use crate::error::{invalid, Result};

#[derive(Serialize)]
struct CsvRow {
    y0: f64,
    estimator: EstimatorId,
    mean_d_beta: f64,
    mean_d_sigma: f64,
    re_beta: Option<f64>,
    re_sigma: Option<f64>,
    ols_identical_rate: Option<f64>,
    replications_used: usize,
    failures: usize,
}

fn rows(result: &ScenarioResult) -> impl Iterator<Item = CsvRow> + '_ {
    result.summaries.iter().map(|s| CsvRow {
        y0: result.spec.y0,
        estimator: s.estimator,
        mean_d_beta: s.mean_d_beta,
        mean_d_sigma: s.mean_d_sigma,
        re_beta: s.re_beta,
        re_sigma: s.re_sigma,
        ols_identical_rate: s.ols_identical_rate,
        replications_used: s.replications_used,
        failures: s.failures,
    })
}

fn write_rows<W: Write>(out: W, results: &[ScenarioResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        for row in rows(r) {
            w.serialize(row).map_err(|e| invalid(format!("csv: {e}")))?;
        }
    }
    w.flush().map_err(|e| invalid(format!("csv: {e}")))
}

/// One CSV row per estimator.
pub fn write_scenario_csv<W: Write>(out: W, result: &ScenarioResult) -> Result<()> {
    write_rows(out, std::slice::from_ref(result))
}

/// One CSV row per `(estimator, y0)`.
pub fn write_grid_csv<W: Write>(out: W, grid: &GridResult) -> Result<()> {
    write_rows(out, &grid.points)
}

/// Spec, seed, grid and the per-estimator grid averages.
pub fn grid_summary_json(grid: &GridResult) -> serde_json::Value {
    let spec = grid.points.first().map(|p| &p.spec);
    serde_json::json!({
        "spec": spec,
        "seed": spec.map(|s| s.seed),
        "y_max": grid.y_max,
        "y0": grid.y0,
        "averages": grid.averages,
        "points": grid.points.iter().map(|p| serde_json::json!({
            "y0": p.spec.y0,
            "summaries": p.summaries,
        })).collect::<Vec<_>>(),
    })
}
