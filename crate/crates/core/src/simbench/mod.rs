//! Monte Carlo comparison of N-FLP against OLS and a Tukey-bisquare
//! M-estimator on clean and contaminated regression samples.

mod distance;
mod harness;
mod report;
mod scenario;
mod tukey;

pub use distance::{d_beta, d_beta_hyperplane, d_sigma, relative_efficiency};
pub use harness::{run_grid, run_scenario, DistanceSummary, GridAverage, GridResult, ScenarioResult, MAX_FAILURE_RATE};
pub use report::{grid_summary_json, write_grid_csv, write_scenario_csv};
pub use scenario::{contaminate, default_y_max, gen_clean_sample, EstimatorId, ScenarioSpec};
pub use tukey::{m_tukey_fit, TUKEY_C};
