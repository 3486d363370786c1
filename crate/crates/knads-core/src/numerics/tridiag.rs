//! Symmetric tridiagonal eigenproblems: implicit QL for eigenvalues, inverse iteration for vectors.

use crate::error::{Error, Result};

/// All eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples `i` and `i + 1`), ascending.
pub fn ql_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert_eq!(e.len() + 1, n, "off-diagonal length must be n - 1");
    let mut d = d.to_vec();
    let mut e = e.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::RootSearch(format!("QL iteration did not converge at row {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Unit eigenvector for a (converged) eigenvalue `lambda` by two sweeps of inverse iteration.
pub fn inverse_iteration(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let scale = d.iter().chain(e.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let shift = lambda + 1e-13 * scale;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..3 {
        x = solve_shifted(d, e, shift, &x, scale);
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= nrm;
        }
    }
    x
}

// Gaussian elimination with partial pivoting on (T - shift I) x = b.
fn solve_shifted(d: &[f64], e: &[f64], shift: f64, b: &[f64], scale: f64) -> Vec<f64> {
    let n = d.len();
    let tiny = f64::EPSILON * scale;
    // rows stored as (diag, super, super2) after elimination
    let mut diag: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut sup: Vec<f64> = e.to_vec();
    sup.push(0.0);
    let mut sup2 = vec![0.0; n];
    let mut sub: Vec<f64> = e.to_vec();
    let mut rhs = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        if diag[i].abs() >= sub[i].abs() {
            if diag[i] == 0.0 {
                diag[i] = tiny;
            }
            let f = sub[i] / diag[i];
            diag[i + 1] -= f * sup[i];
            rhs[i + 1] -= f * rhs[i];
            sub[i] = 0.0;
        } else {
            // swap rows i and i+1
            let f = diag[i] / sub[i];
            diag[i] = sub[i];
            let t = diag[i + 1];
            diag[i + 1] = sup[i] - f * t;
            sup[i] = t;
            if i + 1 < n - 1 {
                sup2[i] = sup[i + 1];
                sup[i + 1] = -f * sup2[i];
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if diag[n - 1] == 0.0 {
        diag[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= sup[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= sup2[i] * x[i + 2];
        }
        x[i] = s / diag[i];
    }
    x
}
