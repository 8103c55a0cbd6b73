use rayon::prelude::*;
use serde::Serialize;

use super::distance::{d_beta, d_beta_hyperplane, d_sigma, relative_efficiency};
use super::scenario::{contaminate, gen_clean_sample, EstimatorId, ScenarioSpec};
use super::tukey::m_tukey_fit;
use crate::error::{invalid, Error, Result};
use crate::estimator::{multistart_fit, stream_rng, FitConfig};
use crate::linalg::{ols_fit, Dataset};

/// Runs fail when at least this fraction of replications fails for any
/// estimator.
pub const MAX_FAILURE_RATE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub estimator: EstimatorId,
    pub mean_d_beta: f64,
    pub mean_d_sigma: f64,
    /// Relative efficiency against OLS; clean scenarios only.
    pub re_beta: Option<f64>,
    pub re_sigma: Option<f64>,
    /// Fraction of replications whose selected N-FLP solution is the OLS one.
    pub ols_identical_rate: Option<f64>,
    pub replications_used: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub summaries: Vec<DistanceSummary>,
}

impl ScenarioResult {
    pub fn summary(&self, id: EstimatorId) -> Option<&DistanceSummary> {
        self.summaries.iter().find(|s| s.estimator == id)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Clone, Copy, Debug)]
struct Outcome {
    d_beta: f64,
    d_sigma: f64,
    is_ols: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fit_one(id: EstimatorId, data: &Dataset<f64>, fit: &FitConfig) -> Result<Outcome> {
    let (beta, sigma, is_ols) = match id {
        EstimatorId::Ols => {
            let o = ols_fit(data)?;
            (o.beta, o.sigma, true)
        }
        EstimatorId::Nflp => {
            let f = multistart_fit(data, fit)?;
            let s = f.selected_solution();
            (s.beta_hat.clone(), s.sigma_hat, s.is_ols)
        }
        EstimatorId::TukeyM => {
            let (b, s) = m_tukey_fit(data)?;
            (b, s, false)
        }
    };
    let truth = vec![0.0; data.p()];
    let db = d_beta(&beta, data, &truth, 1.0);
    debug_assert!((db - d_beta_hyperplane(&beta, data, &truth, 1.0)).abs() <= 1e-10 * (1.0 + db));
    Ok(Outcome { d_beta: db, d_sigma: d_sigma(sigma, 1.0)?, is_ols })
}

fn replicate(spec: &ScenarioSpec, rep: usize) -> Result<Vec<Result<Outcome>>> {
    let mut rng = stream_rng(spec.seed, rep as u64);
    let clean = gen_clean_sample(&mut rng, spec.n, spec.p)?;
    let data = contaminate(&clean, spec.contamination_fraction, spec.x0, spec.y0)?;
    let fit = FitConfig { seed: splitmix64(spec.seed ^ splitmix64(rep as u64)), ..spec.fit.clone() };
    Ok(spec.estimators.iter().map(|&id| fit_one(id, &data, &fit)).collect())
}

/// Simulates `spec.replications` samples in parallel and averages the
/// distances of every estimator. Replication `r` draws from its own random
/// stream, so results do not depend on the number of worker threads.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioResult> {
    spec.validate()?;
    let outcomes = (0..spec.replications)
        .into_par_iter()
        .map(|rep| replicate(spec, rep))
        .collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::with_capacity(spec.estimators.len());
    for (e, &id) in spec.estimators.iter().enumerate() {
        let (mut sb, mut ss, mut ols_count, mut used, mut failures) = (Kahan::default(), Kahan::default(), 0, 0, 0);
        for rep in &outcomes {
            match &rep[e] {
                Ok(o) => {
                    sb.add(o.d_beta);
                    ss.add(o.d_sigma);
                    ols_count += usize::from(o.is_ols);
                    used += 1;
                }
                Err(_) => failures += 1,
            }
        }
        if failures as f64 >= MAX_FAILURE_RATE * spec.replications as f64 {
            return Err(Error::TooManyFailures { estimator: id.name().into(), failed: failures, total: spec.replications });
        }
        summaries.push(DistanceSummary {
            estimator: id,
            mean_d_beta: sb.sum / used as f64,
            mean_d_sigma: ss.sum / used as f64,
            re_beta: None,
            re_sigma: None,
            ols_identical_rate: (id == EstimatorId::Nflp).then(|| ols_count as f64 / used as f64),
            replications_used: used,
            failures,
        });
    }
    if spec.contaminated_rows() == 0 {
        if let Some(ols) = summaries.iter().find(|s| s.estimator == EstimatorId::Ols).cloned() {
            for s in &mut summaries {
                s.re_beta = Some(relative_efficiency(ols.mean_d_beta, s.mean_d_beta));
                s.re_sigma = Some(relative_efficiency(ols.mean_d_sigma, s.mean_d_sigma));
            }
        }
    }
    Ok(ScenarioResult { spec: spec.clone(), summaries })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridAverage {
    pub estimator: EstimatorId,
    pub mean_d_beta: f64,
    pub mean_d_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridResult {
    pub y_max: f64,
    pub y0: Vec<f64>,
    pub points: Vec<ScenarioResult>,
    /// Distances averaged over the grid points.
    pub averages: Vec<GridAverage>,
}

impl GridResult {
    pub fn average(&self, id: EstimatorId) -> Option<&GridAverage> {
        self.averages.iter().find(|a| a.estimator == id)
    }
}

/// Runs the scenario at `steps` evenly spaced `y0` in `[0, y_max]`. Every grid
/// point reuses `base.seed`, so the clean samples are shared across `y0`.
pub fn run_grid(base: &ScenarioSpec, y_max: f64, steps: usize) -> Result<GridResult> {
    if steps < 2 {
        return Err(invalid("a y0 grid needs at least 2 points"));
    }
    if !(y_max.is_finite() && y_max > 0.0) {
        return Err(invalid(format!("y_max must be positive, got {y_max}")));
    }
    let y0: Vec<f64> = (0..steps).map(|i| y_max * i as f64 / (steps - 1) as f64).collect();
    let points = y0
        .iter()
        .map(|&y| run_scenario(&ScenarioSpec { y0: y, ..base.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let averages = base
        .estimators
        .iter()
        .map(|&id| {
            let (mut b, mut s) = (Kahan::default(), Kahan::default());
            for p in &points {
                let d = p.summary(id).expect("every point runs every estimator");
                b.add(d.mean_d_beta);
                s.add(d.mean_d_sigma);
            }
            GridAverage { estimator: id, mean_d_beta: b.sum / steps as f64, mean_d_sigma: s.sum / steps as f64 }
        })
        .collect();
    Ok(GridResult { y_max, y0, points, averages })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = Kahan::default();
        k.add(1e16);
        for _ in 0..10 {
            k.add(1.0);
        }
        assert_eq!(k.sum, 1e16 + 10.0);
    }

    #[test]
    fn ols_against_itself_is_one() {
        let spec = ScenarioSpec { replications: 20, estimators: vec![EstimatorId::Ols], ..Default::default() };
        let r = run_scenario(&spec).unwrap();
        assert_eq!(r.summaries[0].re_beta, Some(1.0));
        assert_eq!(r.summaries[0].re_sigma, Some(1.0));
    }
}
