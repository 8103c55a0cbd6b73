use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nflp::simbench::{
    default_y_max, grid_summary_json, run_grid, run_scenario, write_grid_csv, write_scenario_csv, ScenarioSpec,
};
use serde::{Deserialize, Serialize};

use crate::args::{Format, SimulateArgs};
use crate::error::{CliError, Result};
use crate::report::{write_json, Provenance};

fn default_steps() -> usize {
    31
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Largest outlier response; the built-in table is used when absent.
    pub y_max: Option<f64>,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationFile {
    #[serde(flatten)]
    pub scenario: ScenarioSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

impl SimulationFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read spec {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("spec {}: {e}", path.display())))?;
        let obj = value.as_object().ok_or_else(|| CliError::usage("spec file must hold a JSON object"))?;
        // flattened structs cannot deny unknown fields themselves
        let known = serde_json::to_value(ScenarioSpec::default()).expect("spec serializes");
        let known = known.as_object().expect("spec is an object");
        if let Some(k) = obj.keys().find(|k| *k != "grid" && !known.contains_key(*k)) {
            return Err(CliError::usage(format!("spec {}: unknown field '{k}'", path.display())));
        }
        serde_json::from_value(value).map_err(|e| CliError::usage(format!("spec {}: {e}", path.display())))
    }
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let mut file = SimulationFile::load(&args.spec)?;
    if let Some(seed) = args.seed {
        file.scenario.seed = seed;
    }
    if let Some(r) = args.replications {
        file.scenario.replications = r;
    }
    file.scenario.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let spec = &file.scenario;
    let provenance = Provenance::new("simulate", spec.seed, &file);

    let (summary, csv): (serde_json::Value, Vec<u8>) = match &file.grid {
        None => {
            let result = run_scenario(spec)?;
            let mut buf = Vec::new();
            write_scenario_csv(&mut buf, &result)?;
            (serde_json::json!({ "provenance": provenance, "result": result }), buf)
        }
        Some(grid) => {
            let y_max = match grid.y_max {
                Some(v) => v,
                None => default_y_max(spec.x0, spec.contamination_fraction).ok_or_else(|| {
                    CliError::usage(format!(
                        "no built-in y_max for x0 = {}, k = {}; set grid.y_max",
                        spec.x0, spec.contamination_fraction
                    ))
                })?,
            };
            let result = run_grid(spec, y_max, grid.steps)?;
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, &result)?;
            (serde_json::json!({ "provenance": provenance, "grid": grid_summary_json(&result) }), buf)
        }
    };

    if let Some(dir) = &args.output {
        fs::create_dir_all(dir).map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
        fs::write(dir.join("results.csv"), &csv)?;
        let mut f = fs::File::create(dir.join("summary.json"))?;
        write_json(&mut f, &summary)?;
    }
    let mut out = io::stdout().lock();
    match args.format {
        Format::Csv => {
            out.write_all(&csv)?;
            Ok(())
        }
        _ => write_json(&mut out, &summary),
    }
}
