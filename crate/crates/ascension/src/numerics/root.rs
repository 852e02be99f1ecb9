use crate::error::{Error, Result};

/// Safeguarded Newton iteration for an increasing or decreasing `f` on a bracket
/// `[lo, hi]` with `f(lo)` and `f(hi)` of opposite signs. `fdf` returns `(f, f')`.
///
/// Falls back to bisection whenever a Newton step leaves the current bracket.
pub fn newton_bracketed(
    mut fdf: impl FnMut(f64) -> Result<(f64, f64)>,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol: f64,
) -> Result<f64> {
    let (flo, _) = fdf(lo)?;
    let (fhi, _) = fdf(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotBracketed(format!(
            "f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    let rising = fhi > 0.0;
    let mut x = x0.clamp(lo.min(hi), lo.max(hi));
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
        let newton = x - fx / dfx;
        let inside = dfx != 0.0 && newton.is_finite() && (newton - lo) * (newton - hi) < 0.0;
        let next = if inside { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= tol || (hi - lo).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootNotBracketed("no convergence in 200 iterations".into()))
}
