//! Robust linear regression under a normal / filtered-log-Pareto error mixture.
//!
//! The errors of `y = Xβ + ε` are modelled as `ω·N(0, σ²) + (1 − ω)·FLP`,
//! where the FLP component lives only on the outlier region `|ε/σ| > τ(ω)`.
//! An adapted EM algorithm yields weighted least squares estimates of `β`
//! and `σ`, an estimate of `ω`, and for every observation the probability
//! that it is an outlier.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`. The Monte Carlo harness in [`simbench`]
//! works in `f64` only.
//!
//! ```
//! use nflp::{multistart_fit, Dataset, FitConfig};
//!
//! let mut y: Vec<f64> = (0..30).map(|i| ((i * 7919) % 31) as f64 / 31.0 - 0.5).collect();
//! y[0] = 25.0;
//! let data = Dataset::location(y).unwrap();
//! let fit = multistart_fit(&data, &FitConfig::default()).unwrap();
//! assert!(fit.flags[0]);
//! ```

pub mod error;
pub mod estimator;
pub mod flp;
pub mod inference;
pub mod linalg;
mod roots;
mod scalar;
pub mod simbench;
pub mod special;

pub use error::{Error, Result};
pub use estimator::{
    em_iterate, multistart_fit, outlier_report, run_em, EmState, FitConfig, FitDiagnostics, FitResult, OutlierRow,
    Solution, StartOrigin, StartValues,
};
pub use flp::{adaptive_cutoff, flp_pdf, g_of_tau, nflp_pdf, pi_weight, shape_from_omega, MixtureShape};
pub use inference::{
    anova_fit_and_test, beta_ci, coefficient_test, inference_report, r_squared, sigma_ci, AnovaReport,
    CoefficientTest, FitSummary, InferenceReport, Interval,
};
pub use linalg::{ols_fit, wls_solve, Dataset, Matrix, OlsFit, WlsOutput};
pub use scalar::Real;
pub use special::RealDf;

pub type Shape = MixtureShape<f64>;
pub type Data = Dataset<f64>;
pub type Fit = FitResult<f64>;
pub type Sol = Solution<f64>;
pub type Summary = FitSummary<f64>;
pub type Df = RealDf<f64>;
