//! Adaptive Gauss-Kronrod quadrature.
//!
//! 15-point Kronrod rule with embedded 7-point Gauss rule, refined by
//! splitting the segment with the largest error estimate. Semi-infinite
//! ranges are mapped onto (0, 1] with the rational substitution used by
//! QUADPACK's QAGI; the Kronrod nodes are interior so the endpoint is
//! never evaluated.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

// K15 nodes (positive half) and weights, G7 weights; QUADPACK values.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
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

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub segments: usize,
}

/// One K15 evaluation over [a, b]: (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = kronrod.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();

    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

const MAX_SEGMENTS: usize = 4096;

/// Adaptive integral of `f` over the finite interval [a, b].
///
/// Converges when the summed error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            segments: 0,
        });
    }
    let (value, error) = gk15(f, a, b);
    if !value.is_finite() {
        return Err(Error::QuadratureFailure {
            detail: format!("non-finite integrand on [{a}, {b}]"),
        });
    }

    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure {
                detail: format!(
                    "error {:.3e} above tolerance after {} segments on [{a}, {b}]",
                    total_err,
                    heap.len()
                ),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer splittable in f64; accept what we have
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::QuadratureFailure {
                detail: format!("non-finite integrand near [{}, {}]", worst.a, worst.b),
            });
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    Ok(QuadResult {
        value: total,
        abs_error: total_err,
        segments: heap.len(),
    })
}

/// `∫_{-∞}^{b} f(r) dr` via r = b - (1-t)/t, t in (0, 1].
pub fn integral_below<F: Fn(f64) -> f64>(
    f: &F,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    adaptive(
        &|t: f64| {
            let r = b - (1.0 - t) / t;
            f(r) / (t * t)
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// `∫_{a}^{∞} f(r) dr`.
pub fn integral_above<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    integral_below(&|r: f64| f(-r), -a, abs_tol, rel_tol)
}

/// `∫_{-∞}^{∞} f(r) dr`, split at zero.
pub fn integral_line<F: Fn(f64) -> f64>(f: &F, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    let lower = integral_below(f, 0.0, 0.5 * abs_tol, rel_tol)?;
    let upper = integral_above(f, 0.0, 0.5 * abs_tol, rel_tol)?;
    Ok(QuadResult {
        value: lower.value + upper.value,
        abs_error: lower.abs_error + upper.abs_error,
        segments: lower.segments + upper.segments,
    })
}

/// Iterated 2-D integral over [a1, b1] x [a2, b2]; the inner (second)
/// variable is integrated adaptively for every outer node.
pub fn adaptive_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    let inner_abs = (abs_tol / (b1 - a1).abs()).max(1e-15);
    let inner_err = std::cell::Cell::new(0.0f64);
    let outer = adaptive(
        &|x: f64| match adaptive(&|y: f64| f(x, y), a2, b2, inner_abs, rel_tol) {
            Ok(r) => {
                inner_err.set(inner_err.get().max(r.abs_error));
                r.value
            }
            Err(_) => f64::NAN,
        },
        a1,
        b1,
        abs_tol,
        rel_tol,
    )?;
    Ok(QuadResult {
        value: outer.value,
        abs_error: outer.abs_error + inner_err.get() * (b1 - a1).abs(),
        segments: outer.segments,
    })
}
