//! Scalar special functions: the standard normal, regularized incomplete
//! gamma and beta functions, and Student-t / chi-square / F distributions with
//! real-valued degrees of freedom.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::roots::newton_monotone;
use crate::scalar::Real;

const MAX_CF_ITER: usize = 10_000;

/// Degrees of freedom, possibly fractional (e.g. `ω̂n − p`).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealDf<T>(T);

impl<T: Real> RealDf<T> {
    pub fn new(value: T) -> Result<Self> {
        if value > T::zero() && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(invalid(format!("degrees of freedom must be positive and finite, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

fn ln_sqrt_2pi<T: Real>() -> T {
    T::lit(0.918_938_533_204_672_741_780_329_736_405_6)
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(invalid(format!("probability must lie in (0, 1), got {p}")))
    }
}

// ---------------------------------------------------------------------------
// Gamma function and incomplete gamma

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < T::lit(0.5) {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = T::lit(COEF[0]);
    let t = x + T::lit(7.5);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a = a + T::lit(c) / (x + T::lit(i as f64));
    }
    ln_sqrt_2pi::<T>() + (x + T::lit(0.5)) * t.ln() - t + a.ln()
}

fn ln_gamma_prefactor<T: Real>(a: T, x: T) -> T {
    -x + a * x.ln() - ln_gamma(a)
}

fn gamma_series<T: Real>(a: T, x: T) -> T {
    let mut ap = a;
    let mut del = T::one() / a;
    let mut sum = del;
    for _ in 0..MAX_CF_ITER {
        ap = ap + T::one();
        del = del * x / ap;
        sum = sum + del;
        if del.abs() < sum.abs() * T::epsilon() {
            break;
        }
    }
    sum * ln_gamma_prefactor(a, x).exp()
}

fn gamma_continued_fraction<T: Real>(a: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_CF_ITER {
        let fi = T::lit(i as f64);
        let an = -fi * (fi - a);
        b = b + T::lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let del = d * c;
        h = h * del;
        if (del - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (ln_gamma_prefactor(a, x)).exp() * h
}

/// Regularized lower and upper incomplete gamma `(P(a, x), Q(a, x))`, each
/// computed directly on its accurate side.
pub fn gamma_pq<T: Real>(a: T, x: T) -> (T, T) {
    if x <= T::zero() {
        return (T::zero(), T::one());
    }
    if x.is_infinite() {
        return (T::one(), T::zero());
    }
    if x < a + T::one() {
        let p = gamma_series(a, x);
        (p, T::one() - p)
    } else {
        let q = gamma_continued_fraction(a, x);
        (T::one() - q, q)
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p<T: Real>(a: T, x: T) -> T {
    gamma_pq(a, x).0
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q<T: Real>(a: T, x: T) -> T {
    gamma_pq(a, x).1
}

// ---------------------------------------------------------------------------
// Incomplete beta

fn beta_continued_fraction<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let one = T::one();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..MAX_CF_ITER {
        let m = T::lit(m as f64);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= T::epsilon() {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` and its complement `1 − I_x(a, b)`.
///
/// `xc` must equal `1 − x`; passing it separately keeps precision when the
/// caller can form it without cancellation.
pub fn beta_inc_pair<T: Real>(a: T, b: T, x: T, xc: T) -> (T, T) {
    if x <= T::zero() {
        return (T::zero(), T::one());
    }
    if xc <= T::zero() {
        return (T::one(), T::zero());
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * xc.ln();
    let front = ln_front.exp();
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        let i = front * beta_continued_fraction(a, b, x) / a;
        (i, T::one() - i)
    } else {
        let ic = front * beta_continued_fraction(b, a, xc) / b;
        (T::one() - ic, ic)
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc<T: Real>(a: T, b: T, x: T) -> T {
    beta_inc_pair(a, b, x, T::one() - x).0
}

// ---------------------------------------------------------------------------
// Standard normal

pub fn normal_ln_pdf<T: Real>(z: T) -> T {
    -T::lit(0.5) * z * z - ln_sqrt_2pi::<T>()
}

/// Standard normal density φ(z).
pub fn normal_pdf<T: Real>(z: T) -> T {
    normal_ln_pdf(z).exp()
}

/// Standard normal distribution function Φ(z), via `erfc` expressed through
/// the incomplete gamma function of order 1/2.
pub fn normal_cdf<T: Real>(z: T) -> T {
    if z.is_nan() {
        return z;
    }
    let half = T::lit(0.5);
    let (p, q) = gamma_pq(half, half * z * z);
    if z < T::zero() {
        half * q
    } else {
        half + half * p
    }
}

/// Upper tail `1 − Φ(z)`.
pub fn normal_sf<T: Real>(z: T) -> T {
    normal_cdf(-z)
}

/// Standard normal quantile Φ⁻¹(p).
pub fn normal_quantile<T: Real>(p: T) -> Result<T> {
    check_probability(p)?;
    let half = T::lit(0.5);
    if p == half {
        return Ok(T::zero());
    }
    if p > half {
        return normal_quantile(T::one() - p).map(|z| -z);
    }
    // Abramowitz & Stegun 26.2.23 as the starting point.
    let t = (-T::lit(2.0) * p.ln()).sqrt();
    let num = T::lit(2.515_517) + t * (T::lit(0.802_853) + t * T::lit(0.010_328));
    let den = T::one() + t * (T::lit(1.432_788) + t * (T::lit(0.189_269) + t * T::lit(0.001_308)));
    let z0 = -(t - num / den);
    let ln_p = p.ln();
    newton_monotone(
        |z: T| {
            let c = normal_cdf(z);
            (c.ln() - ln_p, (normal_ln_pdf(z) - c.ln()).exp())
        },
        z0,
        200,
    )
}

// ---------------------------------------------------------------------------
// Student t

pub fn t_ln_pdf<T: Real>(x: T, df: RealDf<T>) -> T {
    let nu = df.value();
    let half = T::lit(0.5);
    ln_gamma(half * (nu + T::one())) - ln_gamma(half * nu) - half * (nu * T::PI()).ln()
        - half * (nu + T::one()) * (x * x / nu).ln_1p()
}

pub fn t_pdf<T: Real>(x: T, df: RealDf<T>) -> T {
    t_ln_pdf(x, df).exp()
}

/// Upper tail `P(t_ν > x)`.
pub fn t_sf<T: Real>(x: T, df: RealDf<T>) -> T {
    let nu = df.value();
    let half = T::lit(0.5);
    let x2 = x * x;
    let denom = nu + x2;
    // P(|t| > |x|) = I_{ν/(ν+x²)}(ν/2, 1/2)
    let (two_tail, _) = beta_inc_pair(half * nu, half, nu / denom, x2 / denom);
    if x >= T::zero() {
        half * two_tail
    } else {
        T::one() - half * two_tail
    }
}

/// Student-t distribution function with real degrees of freedom.
pub fn t_cdf<T: Real>(x: T, df: RealDf<T>) -> T {
    t_sf(-x, df)
}

/// Two-sided p-value `2·P(t_ν > |x|)`.
pub fn t_two_sided_p<T: Real>(x: T, df: RealDf<T>) -> T {
    (T::lit(2.0) * t_sf(x.abs(), df)).min(T::one())
}

/// Student-t quantile (lower-tail probability `p`).
pub fn t_quantile<T: Real>(p: T, df: RealDf<T>) -> Result<T> {
    check_probability(p)?;
    let half = T::lit(0.5);
    if p == half {
        return Ok(T::zero());
    }
    let upper = p.min(T::one() - p);
    let sign = if p > half { T::one() } else { -T::one() };
    // Solve ln P(t > e^u) = ln(upper) in u; the tail is close to a power law
    // in x, hence close to linear in u.
    let z = -normal_quantile(upper)?;
    let ln_target = upper.ln();
    let u = newton_monotone(
        |u: T| {
            let x = u.exp();
            let s = t_sf(x, df);
            (s.ln() - ln_target, -(t_ln_pdf(x, df) + u - s.ln()).exp())
        },
        z.max(T::lit(1e-3)).ln(),
        300,
    )?;
    Ok(sign * u.exp())
}

// ---------------------------------------------------------------------------
// Chi-square

fn chisq_ln_x_pdf<T: Real>(x: T, df: RealDf<T>) -> T {
    // ln(x · f(x))
    let k = T::lit(0.5) * df.value();
    k * x.ln() - T::lit(0.5) * x - k * T::LN_2() - ln_gamma(k)
}

pub fn chisq_cdf<T: Real>(x: T, df: RealDf<T>) -> T {
    gamma_p(T::lit(0.5) * df.value(), T::lit(0.5) * x)
}

pub fn chisq_sf<T: Real>(x: T, df: RealDf<T>) -> T {
    gamma_q(T::lit(0.5) * df.value(), T::lit(0.5) * x)
}

/// Chi-square quantile (lower-tail probability `p`).
pub fn chisq_quantile<T: Real>(p: T, df: RealDf<T>) -> Result<T> {
    check_probability(p)?;
    let nu = df.value();
    let z = normal_quantile(p)?;
    // Wilson–Hilferty start, clamped into the positive half line.
    let c = T::lit(2.0) / (T::lit(9.0) * nu);
    let wh = nu * (T::one() - c + z * c.sqrt()).powi(3);
    let x0 = if wh > T::zero() { wh } else { nu * T::lit(1e-3) };
    let lower_side = p <= T::lit(0.5);
    let ln_target = if lower_side { p.ln() } else { (T::one() - p).ln() };
    let k = T::lit(0.5) * nu;
    let u = newton_monotone(
        |u: T| {
            let x = u.exp();
            let (lo, hi) = gamma_pq(k, T::lit(0.5) * x);
            let lxf = chisq_ln_x_pdf(x, df);
            if lower_side {
                (lo.ln() - ln_target, (lxf - lo.ln()).exp())
            } else {
                (hi.ln() - ln_target, -(lxf - hi.ln()).exp())
            }
        },
        x0.ln(),
        300,
    )?;
    Ok(u.exp())
}

// ---------------------------------------------------------------------------
// F distribution

fn f_pair<T: Real>(x: T, d1: RealDf<T>, d2: RealDf<T>) -> (T, T) {
    if x <= T::zero() {
        return (T::zero(), T::one());
    }
    let (a, b) = (d1.value(), d2.value());
    let ax = a * x;
    let half = T::lit(0.5);
    beta_inc_pair(half * a, half * b, ax / (ax + b), b / (ax + b))
}

pub fn f_cdf<T: Real>(x: T, d1: RealDf<T>, d2: RealDf<T>) -> T {
    f_pair(x, d1, d2).0
}

/// Upper tail `P(F > x)`.
pub fn f_sf<T: Real>(x: T, d1: RealDf<T>, d2: RealDf<T>) -> T {
    f_pair(x, d1, d2).1
}
