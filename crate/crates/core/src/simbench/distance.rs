use crate::error::{invalid, Result};
use crate::linalg::Dataset;

/// `n^{-1/2}·sqrt((β̂−β)ᵀσ⁻²XᵀX(β̂−β))`, computed from the Gram matrix.
pub fn d_beta(beta_hat: &[f64], data: &Dataset<f64>, beta_true: &[f64], sigma_true: f64) -> f64 {
    let delta: Vec<f64> = beta_hat.iter().zip(beta_true).map(|(a, b)| a - b).collect();
    let gram = data.x().weighted_gram(&vec![1.0; data.n()]);
    let q: f64 = (0..delta.len())
        .map(|j| delta[j] * (0..delta.len()).map(|k| gram[(j, k)] * delta[k]).sum::<f64>())
        .sum();
    (q.max(0.0) / data.n() as f64).sqrt() / sigma_true
}

/// The same distance as the root mean squared gap between the fitted and
/// true hyperplanes at the design points, in units of `σ`.
pub fn d_beta_hyperplane(beta_hat: &[f64], data: &Dataset<f64>, beta_true: &[f64], sigma_true: f64) -> f64 {
    let a = data.fitted(beta_hat);
    let b = data.fitted(beta_true);
    let ss: f64 = a.iter().zip(&b).map(|(u, v)| (u - v) * (u - v)).sum();
    (ss / data.n() as f64).sqrt() / sigma_true
}

/// `|ln(σ̂/σ)|`.
pub fn d_sigma(sigma_hat: f64, sigma_true: f64) -> Result<f64> {
    if !(sigma_hat > 0.0 && sigma_true > 0.0) {
        return Err(invalid(format!("scales must be positive, got {sigma_hat} and {sigma_true}")));
    }
    Ok((sigma_hat / sigma_true).ln().abs())
}

/// `(mean distance of OLS / mean distance of the estimator)²`.
pub fn relative_efficiency(ols_mean: f64, estimator_mean: f64) -> f64 {
    let r = ols_mean / estimator_mean;
    r * r
}
