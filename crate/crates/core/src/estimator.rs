//! Adapted EM estimation of `(ω, β, σ)` with per-observation normal-component
//! probabilities, multistart search and solution selection.
//!
//! Each iteration recomputes the mixture shape from the current `ω`, sets
//! `πᵢ = π_ω(rᵢ)` on the standardized residuals, and then updates
//!
//! ```text
//! ω = Σπᵢ / n,   β = (XᵀD_π X)⁻¹XᵀD_π y,   σ² = Σπᵢ(yᵢ − xᵢᵀβ)² / (Σπᵢ − p).
//! ```
//!
//! Starting at `ω = 1` reproduces ordinary least squares after one step, so
//! the OLS fit is always among the candidate solutions.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flp::{adaptive_cutoff, pi_weight, shape_from_omega, MixtureShape};
use crate::linalg::{ols_fit, wls_solve, Dataset, Matrix};
use crate::scalar::Real;

/// Scale factor making the median absolute residual consistent for σ.
const MAD_CONSISTENCY: f64 = 1.4826;
/// Jitter on robust starting coefficients, in units of σ₀·sqrt([(XᵀX)⁻¹]ⱼⱼ).
const START_JITTER: f64 = 0.05;
const SUBSET_ATTEMPTS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Number of robust starts in addition to the OLS base start.
    pub n_starts: usize,
    /// Initial `ω` for the robust starts.
    pub init_omega: f64,
    pub convergence_tol: f64,
    pub max_iterations: usize,
    /// Solutions with `ω̂` at or below this floor are never selected.
    pub min_omega: f64,
    pub dedup_tol: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_starts: 10,
            init_omega: 0.80,
            convergence_tol: 1e-9,
            max_iterations: 10_000,
            min_omega: 0.50,
            dedup_tol: 1e-6,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_omega > 0.0 && self.min_omega < 1.0) {
            return Err(invalid(format!("min_omega must lie in (0, 1), got {}", self.min_omega)));
        }
        if !(self.init_omega > 0.0 && self.init_omega <= 1.0) {
            return Err(invalid(format!("init_omega must lie in (0, 1], got {}", self.init_omega)));
        }
        if !(self.convergence_tol > 0.0) || !(self.dedup_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Parameters of one EM iterate, together with the weights that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct EmState<T> {
    pub omega: T,
    pub beta: Vec<T>,
    pub sigma: T,
    /// Weights used in the M step that produced `(omega, beta, sigma)`.
    pub pi: Vec<T>,
    /// `(XᵀD_π X)⁻¹` for `pi`.
    pub xtwx_inverse: Matrix<T>,
}

/// Where the EM run producing a solution started.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartOrigin {
    Ols,
    Robust(usize),
}

/// One fixed point of the adapted EM iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution<T> {
    pub omega_hat: T,
    pub beta_hat: Vec<T>,
    pub sigma_hat: T,
    pub pi: Vec<T>,
    pub shape: MixtureShape<T>,
    pub xtwx_inverse: Matrix<T>,
    pub iterations: usize,
    pub converged: bool,
    /// `ω̂ = 1`, equivalently every `πᵢ = 1`.
    pub is_ols: bool,
    pub origin: StartOrigin,
}

impl<T: Real> Solution<T> {
    /// `Σπᵢ = ω̂n`, the estimated number of normal observations.
    pub fn weight_sum(&self) -> T {
        self.pi.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Standardized residuals `rᵢ = (yᵢ − xᵢᵀβ̂)/σ̂`.
    pub fn standardized_residuals(&self, data: &Dataset<T>) -> Vec<T> {
        data.residuals(&self.beta_hat).into_iter().map(|e| e / self.sigma_hat).collect()
    }

    fn distance(&self, other: &Self) -> T {
        param_distance(
            (self.omega_hat, &self.beta_hat, self.sigma_hat),
            (other.omega_hat, &other.beta_hat, other.sigma_hat),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FitDiagnostics {
    /// Robust starts that ended in an error (collapse or degenerate scale).
    pub failed_starts: usize,
    /// Starts that hit the iteration limit.
    pub unconverged_starts: usize,
    /// Two distinct eligible solutions shared the minimal `ω̂`; the smaller
    /// `σ̂` was chosen.
    pub tie_on_min_omega: bool,
}

/// All distinct solutions of a multistart fit and the selected one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub solutions: Vec<Solution<T>>,
    pub selected: usize,
    pub min_omega: f64,
    /// `1 − πᵢ` under the selected solution.
    pub outlier_probabilities: Vec<T>,
    /// `πᵢ < 1/2` under the selected solution.
    pub flags: Vec<bool>,
    /// Adaptive cutoff of the selected solution (`+∞` when it is OLS).
    pub cutoff: T,
    pub diagnostics: FitDiagnostics,
}

impl<T: Real> FitResult<T> {
    pub fn selected_solution(&self) -> &Solution<T> {
        &self.solutions[self.selected]
    }

    pub fn ols_solution(&self) -> Option<&Solution<T>> {
        self.solutions.iter().find(|s| s.is_ols)
    }
}

/// Starting values for one EM run.
#[derive(Clone, Debug, PartialEq)]
pub struct StartValues<T> {
    pub omega: T,
    pub beta: Vec<T>,
    pub sigma: T,
}

fn param_distance<T: Real>(a: (T, &[T], T), b: (T, &[T], T)) -> T {
    let d_omega = (a.0 - b.0).abs();
    let beta_scale = T::one() + a.1.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let d_beta = a.1.iter().zip(b.1).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs())) / beta_scale;
    let d_sigma = (a.2 - b.2).abs() / a.2;
    d_omega.max(d_beta).max(d_sigma)
}

fn response_scale<T: Real>(y: &[T]) -> T {
    let n = T::lit(y.len() as f64);
    let mean = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let var = y.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / n;
    let sd = var.sqrt();
    if sd > T::zero() {
        sd
    } else {
        T::one()
    }
}

/// One E step followed by one M step.
pub fn em_iterate<T: Real>(data: &Dataset<T>, state: &EmState<T>) -> Result<EmState<T>> {
    em_iterate_scaled(data, state, response_scale(data.y()))
}

fn em_iterate_scaled<T: Real>(data: &Dataset<T>, state: &EmState<T>, y_scale: T) -> Result<EmState<T>> {
    let (n, p) = (data.n(), data.p());
    let shape = shape_from_omega(state.omega)?;
    let pi: Vec<T> = data
        .residuals(&state.beta)
        .into_iter()
        .map(|e| pi_weight(e / state.sigma, &shape))
        .collect();
    let weight_sum = pi.iter().fold(T::zero(), |a, &b| a + b);
    if !(weight_sum > T::lit(p as f64)) {
        return Err(Error::InsufficientEffectiveSample { weight_sum: weight_sum.as_f64(), p });
    }
    let wls = wls_solve(data, &pi)?;
    let sigma = (wls.weighted_residual_ss / (weight_sum - T::lit(p as f64))).sqrt();
    if !(sigma > T::lit(1e-12) * y_scale) {
        return Err(Error::DegenerateScale);
    }
    let omega = (weight_sum / T::lit(n as f64)).min(T::one());
    Ok(EmState { omega, beta: wls.beta, sigma, pi, xtwx_inverse: wls.xtwx_inverse })
}

/// Iterates [`em_iterate`] until `|Δω|`, `‖Δβ‖∞/(1 + ‖β‖∞)`, `|Δσ|/σ` and
/// `‖Δπ‖∞` all fall below the tolerance, or the iteration limit is reached.
pub fn run_em<T: Real>(data: &Dataset<T>, init: &StartValues<T>, config: &FitConfig) -> Result<Solution<T>> {
    run_em_from(data, init, config, StartOrigin::Ols)
}

fn run_em_from<T: Real>(
    data: &Dataset<T>,
    init: &StartValues<T>,
    config: &FitConfig,
    origin: StartOrigin,
) -> Result<Solution<T>> {
    if init.beta.len() != data.p() {
        return Err(invalid(format!("{} starting coefficients for p = {}", init.beta.len(), data.p())));
    }
    if !(init.omega > T::zero() && init.omega <= T::one()) || !(init.sigma > T::zero()) {
        return Err(invalid("starting values need omega in (0, 1] and sigma > 0"));
    }
    let y_scale = response_scale(data.y());
    let tol = T::lit(config.convergence_tol);
    let mut state = EmState {
        omega: init.omega,
        beta: init.beta.clone(),
        sigma: init.sigma,
        pi: vec![T::one(); data.n()],
        xtwx_inverse: Matrix::identity(data.p()),
    };
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let next = em_iterate_scaled(data, &state, y_scale)?;
        let step = param_distance((next.omega, &next.beta, next.sigma), (state.omega, &state.beta, state.sigma));
        // `next.pi` is the E step at `state`'s parameters, so stopping here
        // leaves `state` with weights within `weight_step` of its own E step.
        let weight_step = next.pi.iter().zip(&state.pi).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        if iterations > 0 && step < tol && weight_step < tol {
            converged = true;
            break;
        }
        iterations += 1;
        state = next;
    }
    let shape = shape_from_omega(state.omega)?;
    let is_ols = state.pi.iter().all(|&v| v == T::one());
    Ok(Solution {
        omega_hat: state.omega,
        beta_hat: state.beta,
        sigma_hat: state.sigma,
        pi: state.pi,
        shape,
        xtwx_inverse: state.xtwx_inverse,
        iterations,
        converged,
        is_ols,
        origin,
    })
}

/// Per-start random stream, independent of the order starts are run in.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / T::lit(2.0)
    }
}

/// Robust start: least squares through a random elemental subset of `p + 1`
/// observations, `σ₀` from the median absolute residual over the full sample,
/// and Gaussian jitter on the coefficients.
fn robust_start<T: Real>(
    data: &Dataset<T>,
    xtx_inverse_diag: &[T],
    fallback_sigma: T,
    config: &FitConfig,
    index: usize,
) -> Option<StartValues<T>> {
    let (n, p) = (data.n(), data.p());
    let mut rng = stream_rng(config.seed, index as u64);
    let mut beta = None;
    for _ in 0..SUBSET_ATTEMPTS {
        let mut w = vec![T::zero(); n];
        for i in sample(&mut rng, n, (p + 1).min(n)) {
            w[i] = T::one();
        }
        if let Ok(out) = wls_solve(data, &w) {
            beta = Some(out.beta);
            break;
        }
    }
    let mut beta = beta?;
    let abs_res: Vec<T> = data.residuals(&beta).into_iter().map(T::abs).collect();
    let mut sigma = T::lit(MAD_CONSISTENCY) * median(abs_res);
    if !(sigma > T::zero()) {
        sigma = fallback_sigma;
    }
    for (b, &d) in beta.iter_mut().zip(xtx_inverse_diag) {
        let z: f64 = StandardNormal.sample(&mut rng);
        *b = *b + T::lit(z * START_JITTER) * sigma * d.sqrt();
    }
    Some(StartValues { omega: T::lit(config.init_omega), beta, sigma })
}

/// Runs the OLS base start plus `n_starts` robust starts, deduplicates the
/// fixed points and selects the one with the smallest `ω̂` above the floor.
pub fn multistart_fit<T: Real>(data: &Dataset<T>, config: &FitConfig) -> Result<FitResult<T>> {
    config.validate()?;
    let (n, p) = (data.n(), data.p());
    if n <= p + 1 {
        return Err(invalid(format!("multistart fit needs n > p + 1, got n = {n}, p = {p}")));
    }
    let ols = ols_fit(data)?;
    if !(ols.sigma > T::lit(1e-12) * response_scale(data.y())) {
        return Err(Error::DegenerateScale);
    }
    let base = StartValues { omega: T::one(), beta: ols.beta.clone(), sigma: ols.sigma };
    let ols_solution = run_em_from(data, &base, config, StartOrigin::Ols)?;

    let mut diagnostics = FitDiagnostics::default();
    let mut solutions = vec![ols_solution];
    let diag = ols.xtx_inverse.diagonal();
    for s in 0..config.n_starts {
        let Some(start) = robust_start(data, &diag, ols.sigma, config, s) else {
            diagnostics.failed_starts += 1;
            continue;
        };
        let candidate = match run_em_from(data, &start, config, StartOrigin::Robust(s)) {
            Ok(c) => c,
            Err(_) => {
                diagnostics.failed_starts += 1;
                continue;
            }
        };
        if !candidate.converged {
            diagnostics.unconverged_starts += 1;
        }
        insert_distinct(&mut solutions, candidate, T::lit(config.dedup_tol));
    }

    let (selected, tie) = select(&solutions, config)?;
    diagnostics.tie_on_min_omega = tie;
    let chosen = &solutions[selected];
    let outlier_probabilities = chosen.pi.iter().map(|&v| T::one() - v).collect();
    let flags = chosen.pi.iter().map(|&v| v < T::lit(0.5)).collect();
    let cutoff = adaptive_cutoff(&chosen.shape)?;
    Ok(FitResult {
        solutions,
        selected,
        min_omega: config.min_omega,
        outlier_probabilities,
        flags,
        cutoff,
        diagnostics,
    })
}

fn insert_distinct<T: Real>(solutions: &mut Vec<Solution<T>>, candidate: Solution<T>, tol: T) {
    if let Some(existing) = solutions.iter_mut().find(|s| s.distance(&candidate) < tol) {
        if !existing.converged && candidate.converged {
            *existing = candidate;
        }
        return;
    }
    solutions.push(candidate);
}

/// Index of the converged solution with minimal `ω̂ > min_omega`, ties on `ω̂`
/// broken by the smaller `σ̂`.
fn select<T: Real>(solutions: &[Solution<T>], config: &FitConfig) -> Result<(usize, bool)> {
    let floor = T::lit(config.min_omega);
    let tie_tol = T::lit(config.dedup_tol);
    let mut best: Option<usize> = None;
    let mut tie = false;
    for (i, s) in solutions.iter().enumerate() {
        if !s.converged || !(s.omega_hat > floor) {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) => {
                let cur = &solutions[b];
                if (s.omega_hat - cur.omega_hat).abs() <= tie_tol {
                    tie = true;
                    if s.sigma_hat < cur.sigma_hat {
                        best = Some(i);
                    }
                } else if s.omega_hat < cur.omega_hat {
                    best = Some(i);
                    tie = false;
                }
            }
        }
    }
    best.map(|b| (b, tie)).ok_or(Error::FitFailure)
}

/// One row of the outlier table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutlierRow<T> {
    pub index: usize,
    pub residual: T,
    pub pi: T,
    pub outlier_probability: T,
    pub flagged: bool,
}

/// Per-observation standardized residuals, `π`, outlier probabilities and
/// flags (`π < 1/2`) under the selected solution.
pub fn outlier_report<T: Real>(fit: &FitResult<T>, data: &Dataset<T>) -> Vec<OutlierRow<T>> {
    let sol = fit.selected_solution();
    sol.standardized_residuals(data)
        .into_iter()
        .enumerate()
        .map(|(index, residual)| {
            let pi = sol.pi[index];
            OutlierRow { index, residual, pi, outlier_probability: T::one() - pi, flagged: pi < T::lit(0.5) }
        })
        .collect()
}
