use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimator::FitConfig;
use crate::linalg::{Dataset, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Ols,
    Nflp,
    TukeyM,
}

impl EstimatorId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ols => "ols",
            Self::Nflp => "nflp",
            Self::TukeyM => "tukey_m",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub n: usize,
    /// Number of coefficients, intercept included.
    pub p: usize,
    pub contamination_fraction: f64,
    pub x0: f64,
    pub y0: f64,
    pub replications: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorId>,
    pub fit: FitConfig,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            n: 50,
            p: 2,
            contamination_fraction: 0.0,
            x0: 1.0,
            y0: 0.0,
            replications: 2000,
            seed: 0,
            estimators: vec![EstimatorId::Ols, EstimatorId::Nflp],
            fit: FitConfig::default(),
        }
    }
}

impl ScenarioSpec {
    /// `⌊k·n⌋`, with a small guard against `k·n` landing just below an integer.
    pub fn contaminated_rows(&self) -> usize {
        contaminated_rows(self.contamination_fraction, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n <= self.p + 1 {
            return Err(invalid(format!("need n > p + 1 and p >= 1, got n = {}, p = {}", self.n, self.p)));
        }
        if !(0.0..0.5).contains(&self.contamination_fraction) {
            return Err(invalid(format!("contamination fraction must lie in [0, 0.5), got {}", self.contamination_fraction)));
        }
        if 2 * self.contaminated_rows() >= self.n {
            return Err(invalid("contaminated rows must be fewer than n/2"));
        }
        if !self.x0.is_finite() || !self.y0.is_finite() {
            return Err(invalid("x0 and y0 must be finite"));
        }
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if self.estimators.is_empty() {
            return Err(invalid("no estimators requested"));
        }
        self.fit.validate()
    }
}

fn contaminated_rows(k: f64, n: usize) -> usize {
    (k * n as f64 + 1e-9).floor() as usize
}

/// Intercept plus `p − 1` independent standard normal covariates, with
/// `y ~ N(0, 1)` independent of them (true `β = 0`, `σ = 1`).
pub fn gen_clean_sample<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> Result<Dataset<f64>> {
    if p == 0 || n <= p {
        return Err(invalid(format!("need n > p >= 1, got n = {n}, p = {p}")));
    }
    let mut x = Matrix::zeros(n, p);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let row = x.row_mut(i);
        row[0] = 1.0;
        for v in &mut row[1..] {
            *v = rng.sample(StandardNormal);
        }
        y.push(rng.sample(StandardNormal));
    }
    let mut names = vec!["(intercept)".to_string()];
    names.extend((1..p).map(|j| format!("x{j}")));
    Dataset::new(x, y, names, true)
}

/// Replaces the first `⌊k·n⌋` rows by the point with every covariate equal
/// to `x0` and response `y0`.
pub fn contaminate(data: &Dataset<f64>, k: f64, x0: f64, y0: f64) -> Result<Dataset<f64>> {
    let m = contaminated_rows(k, data.n());
    if !(k >= 0.0) || 2 * m >= data.n() {
        return Err(invalid(format!("cannot replace {m} of {} rows", data.n())));
    }
    let mut out = data.clone();
    let mut row = vec![x0; data.p()];
    if data.has_intercept() {
        row[0] = 1.0;
    }
    for i in 0..m {
        out.replace_row(i, &row, y0);
    }
    Ok(out)
}

/// Grid upper end `y_max` for leverage `x0` and contamination fraction `k`.
///
/// Chosen so that the least squares grid averages of both distances match
/// published reference values; `None` for combinations without a default.
pub fn default_y_max(x0: f64, k: f64) -> Option<f64> {
    const LOW: [(f64, f64); 6] = [(0.02, 7.0), (0.04, 7.5), (0.10, 8.0), (0.20, 12.0), (0.30, 15.0), (0.40, 42.0)];
    const HIGH: [(f64, f64); 5] = [(0.02, 14.0), (0.04, 15.0), (0.10, 25.0), (0.20, 40.0), (0.30, 80.0)];
    let table: &[(f64, f64)] = if x0 == 1.0 {
        &LOW
    } else if x0 == 10.0 {
        &HIGH
    } else {
        return None;
    };
    table.iter().find(|(kk, _)| (kk - k).abs() < 1e-9).map(|&(_, y)| y)
}
