//! Dormand-Prince 5(4) with FSAL and a caller-supplied step cap.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-12, atol: 1e-12, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest scaled local error estimate of an accepted step.
    pub max_err: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

impl Dopri5 {
    pub fn with_tol(tol: f64) -> Self {
        Dopri5 { rtol: tol, atol: tol, ..Default::default() }
    }

    /// Integrate from `t0` to `t1` (either direction) and return the final state.
    pub fn solve<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t1: f64) -> Result<([f64; N], StepStats)>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        self.integrate(f, t0, y0, t1, |_| f64::INFINITY, |_, _| {})
    }

    /// Full driver. `cap(t)` bounds the step magnitude at `t`; `observe` sees every accepted point,
    /// including the initial one.
    pub fn integrate<const N: usize, F, C, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        cap: C,
        mut observe: O,
    ) -> Result<([f64; N], StepStats)>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        C: Fn(f64) -> f64,
        O: FnMut(f64, &[f64; N]),
    {
        let mut stats = StepStats::default();
        observe(t0, &y0);
        if t1 == t0 {
            return Ok((y0, stats));
        }
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&mut f, t, &y, &k1, dir).min(span).min(cap(t));
        let mut reject_streak = false;

        while (t1 - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::IntegratorStall { t, h });
            }
            h = h.min(cap(t));
            let remaining = (t1 - t).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h <= 1e-15 * t.abs().max(1.0) && !last {
                return Err(Error::IntegratorStall { t, h });
            }
            let hs = h * dir;
            let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(
                t + hs,
                &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let ynew = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let tnew = if last { t1 } else { t + hs };
            let k7 = f(tnew, &ynew);

            let mut err = 0.0;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                stats.rejected += 1;
                h *= 0.25;
                reject_streak = true;
                continue;
            }
            if err <= 1.0 {
                stats.accepted += 1;
                stats.max_err = stats.max_err.max(err);
                t = tnew;
                y = ynew;
                k1 = k7;
                observe(t, &y);
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 5.0);
                if reject_streak {
                    fac = fac.min(1.0);
                }
                reject_streak = false;
                h *= fac;
            } else {
                stats.rejected += 1;
                reject_streak = true;
                h *= (0.9 * err.powf(-0.2)).max(0.2);
            }
        }
        Ok((y, stats))
    }

    fn initial_step<const N: usize, F>(&self, f: &mut F, t: f64, y: &[f64; N], k1: &[f64; N], dir: f64) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let norm = |v: &[f64; N]| {
            let mut s = 0.0;
            for i in 0..N {
                let sc = self.atol + self.rtol * y[i].abs();
                s += (v[i] / sc) * (v[i] / sc);
            }
            (s / N as f64).sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(k1);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(y, h0 * dir, &[(1.0, k1)]);
        let k2 = f(t + h0 * dir, &y1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = k2[i] - k1[i];
        }
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }
}
