//! Confidence intervals, coefficient tests, R² and one-way ANOVA for a fitted
//! model, with `ω̂n − p` degrees of freedom used fractionally.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimator::{multistart_fit, FitConfig, FitResult, Solution};
use crate::linalg::{Dataset, Matrix};
use crate::scalar::Real;
use crate::special::{chisq_quantile, f_sf, t_quantile, t_two_sided_p, RealDf};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

/// Everything inference needs from a fit: `β̂`, `σ̂`, `Σπᵢ = ω̂n`, the
/// covariance factor `(XᵀD_πX)⁻¹` and the π-weighted response sum of squares.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary<T> {
    pub beta: Vec<T>,
    pub sigma: T,
    pub weight_sum: T,
    pub n: usize,
    pub p: usize,
    pub xtwx_inverse: Matrix<T>,
    /// `SSY = Σπᵢ(yᵢ − ȳ_π)²`; `None` when the response is unavailable.
    pub ssy: Option<T>,
    pub has_intercept: bool,
}

impl<T: Real> FitSummary<T> {
    pub fn from_solution(solution: &Solution<T>, data: &Dataset<T>) -> Self {
        let weight_sum = solution.weight_sum();
        let y = data.y();
        let mean = y.iter().zip(&solution.pi).fold(T::zero(), |a, (&y, &w)| a + w * y) / weight_sum;
        let ssy = y.iter().zip(&solution.pi).fold(T::zero(), |a, (&y, &w)| a + w * (y - mean) * (y - mean));
        Self {
            beta: solution.beta_hat.clone(),
            sigma: solution.sigma_hat,
            weight_sum,
            n: data.n(),
            p: data.p(),
            xtwx_inverse: solution.xtwx_inverse.clone(),
            ssy: Some(ssy),
            has_intercept: data.has_intercept(),
        }
    }

    /// Summary of the selected solution of a multistart fit.
    pub fn from_fit(fit: &FitResult<T>, data: &Dataset<T>) -> Self {
        Self::from_solution(fit.selected_solution(), data)
    }

    /// `ω̂n − p`, or an error when it is not positive.
    pub fn df(&self) -> Result<RealDf<T>> {
        let df = self.weight_sum - T::lit(self.p as f64);
        if !(df > T::zero()) {
            return Err(Error::InsufficientDf { df: df.as_f64() });
        }
        RealDf::new(df)
    }

    pub fn standard_error(&self, j: usize) -> Result<T> {
        if j >= self.p {
            return Err(invalid(format!("coefficient index {j} out of range for p = {}", self.p)));
        }
        Ok(self.sigma * self.xtwx_inverse[(j, j)].sqrt())
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// `β̂ⱼ ± t_{α/2; ω̂n−p}·σ̂·sqrt([(XᵀD_πX)⁻¹]ⱼⱼ)`.
pub fn beta_ci<T: Real>(fit: &FitSummary<T>, j: usize, alpha: T) -> Result<Interval<T>> {
    check_alpha(alpha)?;
    let df = fit.df()?;
    let se = fit.standard_error(j)?;
    let q = t_quantile(T::one() - alpha / T::lit(2.0), df)?;
    let half = q * se;
    Ok(Interval { lower: fit.beta[j] - half, upper: fit.beta[j] + half })
}

/// `sqrt((ω̂n−p)σ̂²/χ²_{upper α/2})` to `sqrt((ω̂n−p)σ̂²/χ²_{upper 1−α/2})`.
pub fn sigma_ci<T: Real>(fit: &FitSummary<T>, alpha: T) -> Result<Interval<T>> {
    check_alpha(alpha)?;
    let df = fit.df()?;
    let half = alpha / T::lit(2.0);
    let upper_q = chisq_quantile(T::one() - half, df)?;
    let lower_q = chisq_quantile(half, df)?;
    let s = df.value() * fit.sigma * fit.sigma;
    Ok(Interval { lower: (s / upper_q).sqrt(), upper: (s / lower_q).sqrt() })
}

/// Robust `R² = 1 − (ω̂n−p)σ̂²/SSY` and `R̄² = 1 − σ̂²/(SSY/(ω̂n−1))`.
pub fn r_squared<T: Real>(fit: &FitSummary<T>) -> Result<(T, T)> {
    if !fit.has_intercept {
        return Err(Error::UnsupportedModel("R² requires a model with an intercept"));
    }
    let ssy = fit.ssy.ok_or_else(|| invalid("response sum of squares unavailable"))?;
    if !(ssy > T::zero()) {
        return Err(Error::DegenerateResponse);
    }
    let df = fit.df()?.value();
    let s2 = fit.sigma * fit.sigma;
    let r2 = T::one() - df * s2 / ssy;
    let adj = T::one() - s2 / (ssy / (fit.weight_sum - T::one()));
    Ok((r2, adj))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoefficientTest<T> {
    pub statistic: T,
    pub df: T,
    pub p_value: T,
}

/// `T = (β̂ⱼ − null)/se` against `t_{ω̂n−p}`, two-sided.
pub fn coefficient_test<T: Real>(fit: &FitSummary<T>, j: usize, null_value: T) -> Result<CoefficientTest<T>> {
    let df = fit.df()?;
    let se = fit.standard_error(j)?;
    let statistic = (fit.beta[j] - null_value) / se;
    Ok(CoefficientTest { statistic, df: df.value(), p_value: t_two_sided_p(statistic, df) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InferenceReport<T> {
    pub alpha: T,
    pub beta_cis: Vec<Interval<T>>,
    pub sigma_ci: Interval<T>,
    /// Tests of `βⱼ = 0`.
    pub coefficient_tests: Vec<CoefficientTest<T>>,
    /// `None` for models without an intercept.
    pub r_squared: Option<T>,
    pub adj_r_squared: Option<T>,
    pub df: T,
}

pub fn inference_report<T: Real>(fit: &FitSummary<T>, alpha: T) -> Result<InferenceReport<T>> {
    let df = fit.df()?;
    let beta_cis = (0..fit.p).map(|j| beta_ci(fit, j, alpha)).collect::<Result<Vec<_>>>()?;
    let coefficient_tests = (0..fit.p).map(|j| coefficient_test(fit, j, T::zero())).collect::<Result<Vec<_>>>()?;
    let (r2, adj) = match r_squared(fit) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(Error::UnsupportedModel(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(InferenceReport {
        alpha,
        beta_cis,
        sigma_ci: sigma_ci(fit, alpha)?,
        coefficient_tests,
        r_squared: r2,
        adj_r_squared: adj,
        df: df.value(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnovaReport<T> {
    pub group_means: Vec<T>,
    /// `Σᵢπᵢⱼ`, the effective size of each group.
    pub group_weights: Vec<T>,
    pub sigma_hat: T,
    pub omega_hat: T,
    pub ss_tr: T,
    pub f_stat: T,
    pub df1: usize,
    pub df2: T,
    pub p_value: T,
    /// `(μ̂₂ − μ̂₁)/(σ̂·sqrt(1/w₁ + 1/w₂))`, present when there are two groups.
    pub t_stat: Option<T>,
    pub t_p_value: Option<T>,
    /// Outlier probabilities `1 − πᵢ`, in the order the groups were given.
    pub outlier_probabilities: Vec<T>,
}

/// Cell-means design: one indicator column per group, no intercept.
pub fn group_design<T: Real>(groups: &[Vec<T>]) -> Result<Dataset<T>> {
    let j = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    let mut x = Matrix::zeros(n, j);
    let mut y = Vec::with_capacity(n);
    let mut row = 0;
    for (g, values) in groups.iter().enumerate() {
        for &v in values {
            x[(row, g)] = T::one();
            y.push(v);
            row += 1;
        }
    }
    let names = (1..=j).map(|g| format!("group{g}")).collect();
    Dataset::new(x, y, names, false)
}

/// SS_tr, F and (for two groups) T from group means, effective group sizes
/// and `σ̂`, with `df2 = Σw − J`.
pub fn anova_statistics<T: Real>(means: &[T], weights: &[T], sigma: T) -> Result<(T, T, T, Option<T>)> {
    let j = means.len();
    let total = weights.iter().fold(T::zero(), |a, &b| a + b);
    let df2 = total - T::lit(j as f64);
    if !(df2 > T::zero()) {
        return Err(Error::InsufficientDf { df: df2.as_f64() });
    }
    let grand = means.iter().zip(weights).fold(T::zero(), |a, (&m, &w)| a + m * w) / total;
    let ss_tr = means.iter().zip(weights).fold(T::zero(), |a, (&m, &w)| a + (m - grand) * (m - grand) * w);
    let f = ss_tr / T::lit((j - 1) as f64) / (sigma * sigma);
    let t = (j == 2).then(|| (means[1] - means[0]) / (sigma * (T::one() / weights[0] + T::one() / weights[1]).sqrt()));
    Ok((ss_tr, f, df2, t))
}

/// Fits a shared-σ group-means model and tests equality of the group means.
pub fn anova_fit_and_test<T: Real>(groups: &[Vec<T>], config: &FitConfig) -> Result<AnovaReport<T>> {
    if groups.len() < 2 {
        return Err(invalid(format!("ANOVA needs at least 2 groups, got {}", groups.len())));
    }
    if let Some((g, _)) = groups.iter().enumerate().find(|(_, v)| v.len() < 2) {
        return Err(invalid(format!("group {} has fewer than 2 observations", g + 1)));
    }
    let data = group_design(groups)?;
    let fit = multistart_fit(&data, config)?;
    let sol = fit.selected_solution();
    let mut weights = vec![T::zero(); groups.len()];
    let mut row = 0;
    for (g, values) in groups.iter().enumerate() {
        for _ in values {
            weights[g] = weights[g] + sol.pi[row];
            row += 1;
        }
    }
    let (ss_tr, f_stat, df2, t_stat) = anova_statistics(&sol.beta_hat, &weights, sol.sigma_hat)?;
    let d1 = RealDf::new(T::lit((groups.len() - 1) as f64))?;
    let d2 = RealDf::new(df2)?;
    let t_p_value = t_stat.map(|t| t_two_sided_p(t, d2));
    Ok(AnovaReport {
        group_means: sol.beta_hat.clone(),
        group_weights: weights,
        sigma_hat: sol.sigma_hat,
        omega_hat: sol.omega_hat,
        ss_tr,
        f_stat,
        df1: groups.len() - 1,
        df2,
        p_value: f_sf(f_stat, d1, d2),
        t_stat,
        t_p_value,
        outlier_probabilities: fit.outlier_probabilities.clone(),
    })
}
