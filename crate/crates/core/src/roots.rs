//! Bracketed scalar root finding.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Brent's method: bisection safeguarding secant and inverse quadratic steps.
///
/// `f(a)` and `f(b)` must have opposite signs (or one of them be zero).
pub(crate) fn brent<T, F>(mut f: F, a: T, b: T, xtol: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || (fa > T::zero()) == (fb > T::zero()) {
        return Err(invalid("root is not bracketed"));
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * xtol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if xm > T::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::RootNotConverged("objective evaluated to NaN"));
        }
    }
    Err(Error::RootNotConverged("Brent iteration limit reached"))
}

/// Safeguarded Newton iteration for a monotone function.
///
/// `f` returns the value and derivative at `x`. The bracket is grown
/// geometrically from `x0` until the sign changes, then Newton steps are taken
/// whenever they stay inside the bracket and bisection otherwise.
pub(crate) fn newton_monotone<T, F>(mut f: F, x0: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let (f0, d0) = f(x0);
    if f0 == T::zero() {
        return Ok(x0);
    }
    if f0.is_nan() {
        return Err(invalid("objective is NaN at the starting point"));
    }
    // Direction in which the root lies, using the sign of the derivative when
    // available and probing otherwise.
    let increasing = if d0 != T::zero() && d0.is_finite() {
        d0 > T::zero()
    } else {
        let (f1, _) = f(x0 + T::one());
        f1 > f0
    };
    let toward_root = if (f0 > T::zero()) == increasing { -T::one() } else { T::one() };

    let (mut lo, mut hi);
    let mut step = T::one();
    let mut prev = x0;
    let mut found = false;
    lo = x0;
    hi = x0;
    for _ in 0..200 {
        let x = x0 + toward_root * step;
        let (fx, _) = f(x);
        if fx.is_nan() {
            return Err(invalid("objective is NaN while bracketing"));
        }
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx > T::zero()) != (f0 > T::zero()) {
            if toward_root > T::zero() {
                lo = prev;
                hi = x;
            } else {
                lo = x;
                hi = prev;
            }
            found = true;
            break;
        }
        prev = x;
        step = step * T::lit(2.0);
    }
    if !found {
        return Err(Error::RootNotConverged("could not bracket root"));
    }

    let (flo, _) = f(lo);
    let lo_positive = flo > T::zero();
    let mut x = if x0 > lo && x0 < hi { x0 } else { T::lit(0.5) * (lo + hi) };
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx > T::zero()) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != T::zero() && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            T::lit(0.5) * (lo + hi)
        };
        let tol = T::lit(4.0) * T::epsilon() * T::one().max(next.abs());
        if (next - x).abs() <= tol || (hi - lo) <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootNotConverged("Newton iteration limit reached"))
}
