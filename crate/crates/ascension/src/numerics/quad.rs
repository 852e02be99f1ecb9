use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

static RULES: [OnceLock<Vec<(f64, f64)>>; 4] = [
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
];

/// Gauss-Legendre nodes and weights on [-1, 1]. Supported orders: 8, 16, 32, 64.
pub fn gl_rule(order: usize) -> &'static [(f64, f64)] {
    let slot = match order {
        8 => 0,
        16 => 1,
        32 => 2,
        64 => 3,
        _ => panic!("unsupported Gauss-Legendre order {order}"),
    };
    RULES[slot].get_or_init(|| {
        let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("nonzero order"));
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

fn gl_on(order: usize, a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    gl_rule(order)
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive Gauss-Legendre quadrature: GL16 is accepted on a panel when it agrees
/// with GL8 on the two halves to within the panel's share of `tol`.
///
/// `tol` is an absolute tolerance, relaxed to `tol * |I|` when the integral is large.
pub fn adaptive_gl(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite interval [{a}, {b}]")));
    }
    const MAX_DEPTH: u32 = 48;
    const MAX_PANELS: usize = 1 << 16;

    let whole = gl_on(16, a, b, &mut f);
    let scale = whole.abs().max(1.0);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut panels = 0usize;
    let width = (b - a).abs();
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        panels += 1;
        let mid = 0.5 * (lo + hi);
        let left = gl_on(16, lo, mid, &mut f);
        let right = gl_on(16, mid, hi, &mut f);
        let fine = left + right;
        let share = tol * scale * ((hi - lo).abs() / width).max(1e-3);
        if (fine - coarse).abs() <= share || (hi - lo).abs() < 1e-14 * width {
            // Neumaier step
            let t = total + fine;
            if total.abs() >= fine.abs() {
                comp += (total - t) + fine;
            } else {
                comp += (fine - t) + total;
            }
            total = t;
            continue;
        }
        if depth >= MAX_DEPTH || panels > MAX_PANELS {
            return Err(Error::QuadratureFailed { a, b });
        }
        stack.push((mid, hi, right, depth + 1));
        stack.push((lo, mid, left, depth + 1));
    }
    Ok(total + comp)
}

/// Composite Gauss-Legendre nodes and weights for `panels` equal panels on [a, b],
/// sorted by node.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = gl_rule(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}
