//! The filtered-log-Pareto (FLP) outlier density and the normal/FLP mixture.
//!
//! For a normal weight `ω < 1` the mixture coincides with `ω·N(μ, σ²)` on the
//! central region `|z| ≤ τ` and has log-Pareto tails beyond it. The threshold
//! `τ` and tail exponent `λ` are implicit functions of `ω`; they are bundled in
//! [`MixtureShape`].

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::roots::brent;
use crate::scalar::Real;
use crate::special::{normal_cdf, normal_ln_pdf, normal_pdf};

/// Root of `(τ² − 1)·ln τ = 1`; `g(τ) → 0` as `τ` decreases to this value.
pub const TAU_LOWER_LIMIT: f64 = 1.699_009_034_043_338_6;

/// Upper end of the bracket used to invert `g`. `g(40) = 1` in double precision.
pub const TAU_BRACKET_UPPER: f64 = 40.0;

const TAU_TOLERANCE: f64 = 1e-12;

/// Shape constants of the mixture for a given normal weight `ω`.
///
/// `ω = 1` is the pure normal model and stores `τ = λ = +∞`, `ρ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixtureShape<T> {
    pub omega: T,
    pub tau: T,
    pub lambda: T,
    pub rho: T,
}

impl<T: Real> MixtureShape<T> {
    /// The degenerate pure-normal shape (`ω = 1`).
    pub fn pure_normal() -> Self {
        Self {
            omega: T::one(),
            tau: T::infinity(),
            lambda: T::infinity(),
            rho: T::one(),
        }
    }

    #[inline]
    pub fn is_pure_normal(&self) -> bool {
        self.omega >= T::one()
    }

    /// `ln(ω·φ(τ)·τ)`, the log of the tail density numerator shared by every
    /// outlier-region evaluation.
    #[inline]
    fn ln_tail_scale(&self) -> T {
        self.omega.ln() + normal_ln_pdf(self.tau) + self.tau.ln()
    }

    /// Log of the standardized mixture density in the outlier region, given
    /// `ln|z|` (so that it stays finite for `|z|` beyond the float range).
    #[inline]
    fn ln_tail_density_times_abs_z(&self, ln_abs_z: T) -> T {
        self.ln_tail_scale() + (self.lambda + T::one()) * (self.tau.ln().ln() - ln_abs_z.ln())
    }
}

/// `ρ = 2Φ(τ) − 1`, formed as `1 − 2Φ(−τ)` to keep precision for large `τ`.
fn central_mass<T: Real>(tau: T) -> T {
    T::one() - T::lit(2.0) * normal_cdf(-tau)
}

/// `g(τ)` without the domain check; returns 0 at (or numerically below) the
/// lower limit of the domain.
fn g_unchecked<T: Real>(tau: T) -> T {
    let ln_tau = tau.ln();
    let denom = (tau * tau - T::one()) * ln_tau - T::one();
    if denom <= T::zero() {
        return T::zero();
    }
    let rho = central_mass(tau);
    T::one() / (rho + T::lit(2.0) * normal_pdf(tau) * tau * ln_tau / denom)
}

/// The map `τ ↦ ω` whose inverse defines the outlier threshold.
///
/// Defined for `τ > 1` with `(τ² − 1)·ln τ > 1`, i.e. `τ > 1.69901…`.
pub fn g_of_tau<T: Real>(tau: T) -> Result<T> {
    if !(tau > T::one() && (tau * tau - T::one()) * tau.ln() > T::one()) {
        return Err(invalid(format!(
            "g(tau) requires tau > 1 and (tau^2 - 1)*ln(tau) > 1, got tau = {tau}"
        )));
    }
    Ok(g_unchecked(tau))
}

/// Solves `g(τ) = ω` and derives `ρ` and `λ`.
pub fn shape_from_omega<T: Real>(omega: T) -> Result<MixtureShape<T>> {
    if !(omega > T::zero() && omega <= T::one()) {
        return Err(invalid(format!("omega must lie in (0, 1], got {omega}")));
    }
    if omega == T::one() {
        return Ok(MixtureShape::pure_normal());
    }
    let lo = T::lit(TAU_LOWER_LIMIT);
    let hi = T::lit(TAU_BRACKET_UPPER);
    let tau = brent(|t| g_unchecked(t) - omega, lo, hi, T::tolerance(TAU_TOLERANCE, hi), 200)
        .map_err(|_| Error::RootNotConverged("inverting g(tau) = omega"))?;
    let rho = central_mass(tau);
    let lambda = T::lit(2.0) * omega * normal_pdf(tau) * tau * tau.ln() / (T::one() - omega * rho);
    Ok(MixtureShape { omega, tau, lambda, rho })
}

fn standardize<T: Real>(y: T, mu: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    Ok((y - mu) / sigma)
}

fn nflp_standard_pdf<T: Real>(z: T, shape: &MixtureShape<T>) -> T {
    let a = z.abs();
    if shape.is_pure_normal() || a <= shape.tau {
        shape.omega * normal_pdf(z)
    } else {
        let ln_a = a.ln();
        (shape.ln_tail_density_times_abs_z(ln_a) - ln_a).exp()
    }
}

/// Density of the mixture `ω·N(μ, σ²) + (1 − ω)·FLP(ω, μ, σ)`.
pub fn nflp_pdf<T: Real>(y: T, shape: &MixtureShape<T>, mu: T, sigma: T) -> Result<T> {
    let z = standardize(y, mu, sigma)?;
    Ok(nflp_standard_pdf(z, shape) / sigma)
}

/// Density of the FLP contaminating component: zero on `|z| ≤ τ`.
pub fn flp_pdf<T: Real>(y: T, shape: &MixtureShape<T>, mu: T, sigma: T) -> Result<T> {
    let z = standardize(y, mu, sigma)?;
    if shape.is_pure_normal() || z.abs() <= shape.tau {
        return Ok(T::zero());
    }
    let excess = nflp_standard_pdf(z, shape) - shape.omega * normal_pdf(z);
    Ok((excess / (T::one() - shape.omega)).max(T::zero()) / sigma)
}

/// Density of `ln|Z|` at `ℓ` for a standardized mixture variate `Z`.
///
/// Equals `2·e^ℓ·f(e^ℓ)` but is evaluated without forming `e^ℓ` in the outlier
/// region, so it is usable far beyond the floating point range of `|z|`.
pub fn nflp_log_abs_pdf<T: Real>(ell: T, shape: &MixtureShape<T>) -> T {
    let two = T::lit(2.0);
    if shape.is_pure_normal() || ell <= shape.tau.ln() {
        two * shape.omega * normal_log_abs_pdf(ell)
    } else {
        two * shape.ln_tail_density_times_abs_z(ell).exp()
    }
}

/// Density of `ln|Z|` at `ℓ` for a standardized FLP variate `Z`.
pub fn flp_log_abs_pdf<T: Real>(ell: T, shape: &MixtureShape<T>) -> T {
    if shape.is_pure_normal() || ell <= shape.tau.ln() {
        return T::zero();
    }
    let tail = T::lit(2.0) * shape.ln_tail_density_times_abs_z(ell).exp();
    let normal = T::lit(2.0) * shape.omega * normal_log_abs_pdf(ell);
    ((tail - normal) / (T::one() - shape.omega)).max(T::zero())
}

/// `e^ℓ·φ(e^ℓ)`, underflowing cleanly to zero.
fn normal_log_abs_pdf<T: Real>(ell: T) -> T {
    let z = ell.exp();
    if z.is_infinite() {
        return T::zero();
    }
    (ell + normal_ln_pdf(z)).exp()
}

/// Log of the posterior normal-component probability `ln π_ω(r)`.
pub fn ln_pi_weight<T: Real>(r: T, shape: &MixtureShape<T>) -> T {
    let a = r.abs();
    if shape.is_pure_normal() || a <= shape.tau {
        return T::zero();
    }
    let ln_a = a.ln();
    let ln_pi = shape.omega.ln() + normal_ln_pdf(a) + ln_a - shape.ln_tail_density_times_abs_z(ln_a);
    ln_pi.min(T::zero())
}

/// Posterior probability that a standardized residual `r` comes from the
/// normal component: `ω·φ(r) / f_mix(r)`. Exactly 1 on `|r| ≤ τ`.
pub fn pi_weight<T: Real>(r: T, shape: &MixtureShape<T>) -> T {
    ln_pi_weight(r, shape).exp()
}

/// The residual magnitude at which `π_ω(r) = 1/2`; `+∞` for the pure normal.
pub fn adaptive_cutoff<T: Real>(shape: &MixtureShape<T>) -> Result<T> {
    if shape.is_pure_normal() {
        return Ok(T::infinity());
    }
    let ln_half = T::lit(0.5).ln();
    let f = |r: T| ln_pi_weight(r, shape) - ln_half;
    let mut hi = shape.tau + T::one();
    let mut guard = 0;
    while f(hi) > T::zero() {
        hi = hi + hi;
        guard += 1;
        if guard > 64 {
            return Err(Error::RootNotConverged("bracketing the adaptive cutoff"));
        }
    }
    brent(f, shape.tau, hi, T::tolerance(1e-12, hi), 200)
        .map_err(|_| Error::RootNotConverged("solving pi(r) = 0.5"))
}
