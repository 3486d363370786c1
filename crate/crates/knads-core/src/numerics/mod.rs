//! Small numerical kernels shared by the solvers.

pub mod ode;
pub mod quad;
pub mod tridiag;

use crate::error::{Error, Result};

/// Bisection on a sign change of `f` in `[lo, hi]` until the bracket is below `xtol`.
/// Returns the midpoint of the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootSearch(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Illinois-modified regula falsi on a sign-change bracket. Stops when successive iterates differ
/// by at most `xtol` or `f` vanishes; a bisection step is taken whenever progress stalls.
pub fn illinois<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootSearch(format!("no sign change on [{lo}, {hi}]")));
    }
    let mut side = 0i8;
    let mut x_prev = f64::NAN;
    for _ in 0..200 {
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        let width = hi - lo;
        if !(x > lo.min(hi) && x < lo.max(hi)) || side.abs() > 3 {
            x = 0.5 * (lo + hi);
            side = 0;
        }
        let fx = f(x)?;
        if fx == 0.0 || (x - x_prev).abs() <= xtol || width.abs() <= xtol {
            return Ok(x);
        }
        x_prev = x;
        if fx.signum() == fhi.signum() {
            hi = x;
            fhi = fx;
            if side > 0 {
                flo *= 0.5;
            }
            side = if side > 0 { side + 1 } else { 1 };
        } else {
            lo = x;
            flo = fx;
            if side < 0 {
                fhi *= 0.5;
            }
            side = if side < 0 { side - 1 } else { -1 };
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration kept inside a sign-change bracket; falls back to bisection steps.
pub fn newton_bracketed<F>(mut fdf: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (flo, _) = fdf(lo)?;
    let (fhi, _) = fdf(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootSearch(format!("no sign change on [{lo}, {hi}]")));
    }
    let rising = fhi > 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = fdf(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - fx / dfx;
        if !(next > lo.min(hi) && next < lo.max(hi)) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= xtol * x.abs().max(1.0) || (hi - lo).abs() <= xtol * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
