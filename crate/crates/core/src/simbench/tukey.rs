use crate::error::{Error, Result};
use crate::linalg::{ols_fit, wls_solve, Dataset};

/// Bisquare tuning constant (95% efficiency at the normal).
pub const TUKEY_C: f64 = 4.685;
const MAX_IRLS: usize = 500;
const IRLS_TOL: f64 = 1e-9;

fn bisquare_weight(u: f64) -> f64 {
    if u.abs() >= TUKEY_C {
        0.0
    } else {
        let t = u / TUKEY_C;
        (1.0 - t * t) * (1.0 - t * t)
    }
}

/// Tukey-bisquare M-estimate by IRLS from the OLS fit, with the scale held at
/// the normalized MAD of the OLS residuals. Returns `(β̂, scale)`.
pub fn m_tukey_fit(data: &Dataset<f64>) -> Result<(Vec<f64>, f64)> {
    let ols = ols_fit(data)?;
    let mut abs: Vec<f64> = data.residuals(&ols.beta).iter().map(|r| r.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let m = abs.len() / 2;
    let med = if abs.len() % 2 == 1 { abs[m] } else { 0.5 * (abs[m - 1] + abs[m]) };
    let scale = 1.4826 * med;
    if !(scale > 0.0) {
        return Ok((ols.beta, ols.sigma));
    }
    let mut beta = ols.beta;
    for _ in 0..MAX_IRLS {
        let w: Vec<f64> = data.residuals(&beta).iter().map(|r| bisquare_weight(r / scale)).collect();
        let next = wls_solve(data, &w)?.beta;
        let size = 1.0 + beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let step = next.iter().zip(&beta).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        beta = next;
        if step <= IRLS_TOL * size {
            return Ok((beta, scale));
        }
    }
    Err(Error::BaselineFailure(MAX_IRLS))
}
