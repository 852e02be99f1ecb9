//! Whittaker waves `e^{i a x} W_{tau, i s1}(2 a y)` and their ascension.
//!
//! `W` is the solution of `W'' + (-1/4 + tau/z + (s1^2 + 1/4)/z^2) W = 0` recessive at
//! infinity, normalised by `W ~ e^{-z/2} z^tau`. It is seeded from the asymptotic series
//! far out and integrated inward while carrying its logarithmic scale separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Dopri5;

const FIRST_SEED: f64 = 120.0;
const MAX_SEED: f64 = 1e6;
const SERIES_TOL: f64 = 1e-17;
/// Largest inward stretch integrated without renormalising.
const RESCALE_SPAN: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhittakerParams {
    pub tau: u32,
    pub s1: f64,
    /// Horizontal frequency; the wave is evaluated at `z = 2 a y`.
    pub a: f64,
}

impl WhittakerParams {
    pub fn new(tau: u32, s1: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidInput(format!("frequency a = {a} must be positive")));
        }
        if !s1.is_finite() {
            return Err(Error::InvalidInput("s1 must be finite".into()));
        }
        Ok(Self { tau, s1, a })
    }

    pub fn raised(&self) -> Self {
        Self { tau: self.tau + 1, ..*self }
    }

    /// Product of the raising norms `sqrt(s1^2 + (k + 1/2)^2)` for `k < tau`.
    pub fn ascension_norm(&self) -> f64 {
        (0..self.tau).map(|k| (self.s1 * self.s1 + (k as f64 + 0.5).powi(2)).sqrt()).product()
    }
}

/// A value `sign * exp(log_abs)` kept in logarithmic form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub sign: f64,
    pub log_abs: f64,
}

impl LogValue {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

/// `W` and `dW/dz` at the requested arguments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhittakerTable {
    pub params: WhittakerParams,
    pub z: Vec<f64>,
    pub w: Vec<LogValue>,
    pub dw: Vec<LogValue>,
}

/// Asymptotic series at `z`: `(ln|W|, sign W, W'/W)`, or `None` if it has not converged.
fn asymptotic_seed(tau: f64, s1: f64, z: f64) -> Option<(f64, f64, f64)> {
    // W = e^{-z/2} z^tau S(z), S = sum a_k (-z)^{-k}
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut dsum = 0.0;
    for k in 1..400 {
        let j = (k - 1) as f64;
        let factor = ((0.5 - tau + j).powi(2) + s1 * s1) / (k as f64 * -z);
        let next = term * factor;
        if next.abs() > term.abs() && k > 1 {
            return None;
        }
        term = next;
        sum += term;
        dsum += -(k as f64) * term / z;
        if term.abs() < SERIES_TOL * sum.abs() {
            let log_abs = -z / 2.0 + tau * z.ln() + sum.abs().ln();
            let ratio = -0.5 + tau / z + dsum / sum;
            return Some((log_abs, sum.signum(), ratio));
        }
    }
    None
}

/// Seed point beyond `z_max` where the asymptotic series converges to working precision.
fn seed_point(p: &WhittakerParams, z_max: f64) -> Result<(f64, (f64, f64, f64))> {
    let mut z = FIRST_SEED;
    while z < z_max {
        z *= 2.0;
    }
    while z <= MAX_SEED {
        if let Some(seed) = asymptotic_seed(p.tau as f64, p.s1, z) {
            return Ok((z, seed));
        }
        z *= 2.0;
    }
    Err(Error::WhittakerSeed(format!(
        "asymptotic series for tau = {}, s1 = {} does not converge below z = {MAX_SEED}",
        p.tau, p.s1
    )))
}

/// Evaluates `W` and `dW/dz` at every `z` in `zs` (any order, all positive).
pub fn whittaker_table(p: &WhittakerParams, zs: &[f64]) -> Result<WhittakerTable> {
    if let Some(&bad) = zs.iter().find(|z| !(**z > 0.0) || !z.is_finite()) {
        return Err(Error::InvalidInput(format!("Whittaker argument {bad} must be positive")));
    }
    let z_max = zs.iter().copied().fold(0.0, f64::max);
    if z_max > MAX_SEED {
        return Err(Error::WhittakerSeed(format!("argument {z_max} beyond the seed range")));
    }
    let (z0, (log0, sign0, ratio0)) = seed_point(p, z_max)?;

    let mut order: Vec<usize> = (0..zs.len()).collect();
    order.sort_by(|&i, &j| zs[j].total_cmp(&zs[i]));

    // inward targets: requested points plus rescaling stops
    let mut stops: Vec<(f64, Option<usize>)> = Vec::new();
    let mut cursor = z0;
    for &i in &order {
        while cursor - zs[i] > RESCALE_SPAN {
            cursor -= RESCALE_SPAN;
            stops.push((cursor, None));
        }
        stops.push((zs[i], Some(i)));
        cursor = zs[i];
    }

    let tau = p.tau as f64;
    let c2 = p.s1 * p.s1 + 0.25;
    let rhs = move |z: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
        dy[0] = y[1];
        dy[1] = -(-0.25 + tau / z + c2 / (z * z)) * y[0];
    };
    let solver = Dopri5::<2>::new(1e-13, 1e-300).with_groups([0, 0]);

    let mut w = vec![LogValue { sign: 0.0, log_abs: f64::NEG_INFINITY }; zs.len()];
    let mut dw = w.clone();
    let mut state = [sign0, sign0 * ratio0];
    let mut log_scale = log0;
    let mut at = z0;
    for (target, slot) in stops {
        if target != at {
            let mut end = state;
            solver.integrate(rhs, at, state, &[target], |_, _, y| end = *y)?;
            state = end;
            at = target;
        }
        let n = state[0].abs().max(state[1].abs());
        state = [state[0] / n, state[1] / n];
        log_scale += n.ln();
        if let Some(i) = slot {
            w[i] = LogValue { sign: state[0].signum(), log_abs: log_scale + state[0].abs().ln() };
            dw[i] = LogValue { sign: state[1].signum(), log_abs: log_scale + state[1].abs().ln() };
        }
    }
    Ok(WhittakerTable { params: *p, z: zs.to_vec(), w, dw })
}

/// `W_{tau, i s1}(2 a y)`.
pub fn whittaker_w(p: &WhittakerParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::OutsideHalfPlane(y));
    }
    Ok(whittaker_table(p, &[2.0 * p.a * y])?.w[0].value())
}

/// The ascended wave `W_{tau}(2 a y)` divided by its ascension norm, sampled at `ys`.
pub fn ascended_profile(p: &WhittakerParams, ys: &[f64]) -> Result<Vec<f64>> {
    let zs: Vec<f64> = ys.iter().map(|y| 2.0 * p.a * y).collect();
    let table = whittaker_table(p, &zs)?;
    let log_norm = p.ascension_norm().ln();
    Ok(table.w.iter().map(|v| v.sign * (v.log_abs - log_norm).exp()).collect())
}

/// Relative residual of `z W_tau' = (z/2 - tau) W_tau - W_{tau+1}` at `z`.
pub fn contiguous_residual(p: &WhittakerParams, zs: &[f64]) -> Result<Vec<f64>> {
    let lo = whittaker_table(p, zs)?;
    let hi = whittaker_table(&p.raised(), zs)?;
    let tau = p.tau as f64;
    Ok((0..zs.len())
        .map(|k| {
            let z = zs[k];
            // scale everything by the common magnitude before subtracting
            let r = lo.w[k].log_abs.max(hi.w[k].log_abs).max(lo.dw[k].log_abs + z.ln());
            let at = |v: &LogValue| v.sign * (v.log_abs - r).exp();
            let left = z * at(&lo.dw[k]);
            let right = (z / 2.0 - tau) * at(&lo.w[k]) - at(&hi.w[k]);
            let scale = left.abs().max((z / 2.0 - tau).abs() * at(&lo.w[k]).abs()).max(at(&hi.w[k]).abs());
            (left - right).abs() / scale
        })
        .collect())
}

/// A local maximum of `|W|` in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub tau: u32,
    pub s1: f64,
    pub abscissa: f64,
    pub ordinate: f64,
}

/// Local maxima of the ascended profile `|W_tau(2 a y)| / norm` on `[lo, hi]`, located by a
/// scan of `samples` points and refined by golden-section search to `1e-9` in `y`.
pub fn whittaker_peaks(p: &WhittakerParams, lo: f64, hi: f64, samples: usize) -> Result<Vec<Peak>> {
    if !(lo > 0.0 && hi > lo) || samples < 3 {
        return Err(Error::InvalidInput(format!("bad peak window [{lo}, {hi}] with {samples} samples")));
    }
    let ys: Vec<f64> = (0..samples).map(|k| lo + (hi - lo) * k as f64 / (samples - 1) as f64).collect();
    let log_norm = p.ascension_norm().ln();
    let log_abs = |ys: &[f64]| -> Result<Vec<f64>> {
        let zs: Vec<f64> = ys.iter().map(|y| 2.0 * p.a * y).collect();
        Ok(whittaker_table(p, &zs)?.w.iter().map(|v| v.log_abs - log_norm).collect())
    };
    let scan = log_abs(&ys)?;
    let mut peaks = Vec::new();
    for k in 1..samples - 1 {
        if scan[k] > scan[k - 1] && scan[k] >= scan[k + 1] {
            let (y, v) = golden_max(|y| Ok(log_abs(&[y])?[0]), ys[k - 1], ys[k + 1], 1e-9)?;
            peaks.push(Peak { tau: p.tau, s1: p.s1, abscissa: y, ordinate: v.exp() });
        }
    }
    Ok(peaks)
}

/// The highest peak in the window, the one shown in the ascension figure.
pub fn main_peak(p: &WhittakerParams, lo: f64, hi: f64, samples: usize) -> Result<Option<Peak>> {
    Ok(whittaker_peaks(p, lo, hi, samples)?.into_iter().max_by(|a, b| a.ordinate.total_cmp(&b.ordinate)))
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modified_bessel_special_case() {
        // W_{0, mu}(2x) = sqrt(2x / pi) K_mu(x); for mu = 1/2 this is e^{-x}
        // s1^2 + 1/4 = 0 is not reachable with real s1, so check mu = i s1 -> large z decay rate
        let p = WhittakerParams::new(0, 0.0, 0.5).unwrap();
        // s1 = 0: mu = 0, W_{0,0}(z) = sqrt(z / pi) K_0(z / 2)
        let z = 3.0;
        let w = whittaker_table(&p, &[z]).unwrap().w[0].value();
        // K_0(1.5) = 0.2138055626...
        let expect = (z / std::f64::consts::PI).sqrt() * 0.213_805_562_647_525_6;
        assert!((w - expect).abs() < 1e-10 * expect, "{w} vs {expect}");
    }

    #[test]
    fn rejects_non_positive_arguments() {
        let p = WhittakerParams::new(1, 10.0, 1.0).unwrap();
        assert!(whittaker_w(&p, 0.0).is_err());
        assert!(WhittakerParams::new(0, 1.0, 0.0).is_err());
        assert!(matches!(whittaker_table(&p, &[2e6]), Err(Error::WhittakerSeed(_))));
    }

    #[test]
    fn seed_converges_far_out() {
        assert!(asymptotic_seed(0.0, 50.0, 120.0).is_none());
        let (z, _) = seed_point(&WhittakerParams::new(0, 50.0, 25.0).unwrap(), 100.0).unwrap();
        assert!(z > 120.0);
    }
}
