//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Kronrod panel: (integral, |K15 - G7|).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quad {
    fn default() -> Self {
        Quad { abs_tol: 1e-14, rel_tol: 1e-13, max_panels: 4000 }
    }
}

impl Quad {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let (v, e) = gk15(&mut f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Panel { a, b, val: v, err: e });
        let mut total = v;
        let mut total_err = e;
        let mut panels = 1;
        while total_err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if panels >= self.max_panels {
                return Err(Error::QuadratureFailure { a, b });
            }
            let p = heap.pop().expect("heap never empties");
            let m = 0.5 * (p.a + p.b);
            if m <= p.a.min(p.b) || m >= p.a.max(p.b) {
                // cannot split further; accept what we have
                heap.push(p);
                break;
            }
            let (v1, e1) = gk15(&mut f, p.a, m);
            let (v2, e2) = gk15(&mut f, m, p.b);
            total += v1 + v2 - p.val;
            total_err += e1 + e2 - p.err;
            heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
            heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
            panels += 1;
            if !total.is_finite() {
                return Err(Error::QuadratureFailure { a, b });
            }
        }
        // re-sum to shed accumulated rounding from the running updates
        Ok(heap.iter().map(|p| p.val).sum())
    }
}
