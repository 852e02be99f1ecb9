//! Quadratic forms `<Op(a) u, u>` of separated-wave expansions on the cylinder.
//!
//! Observables are products `phi1(eta) phi2(beta) phi3(sigma)` of one plateau bump, and
//! quantisation acts on Fourier coefficients in `sigma`, so every form reduces to a double
//! sum over frequency pairs of a `sigma` Fourier transform times a `beta` integral.
//! Forms are assembled Hermitian: the frequency weight is averaged over the pair.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{q_form, solve_wave, transfer_product, Branch, WaveParams, WAVE_RTOL};
use crate::numerics::{adaptive_gl, composite_gl, ComplexSum};
use crate::phase::{eta_max, PhaseTable};

/// Smooth plateau: exactly 1 on `[-1/4, 1/4]`, exactly 0 outside `(-1/2, 1/2)`.
pub fn bump(t: f64) -> f64 {
    smooth_step((0.5 - t.abs()) * 4.0)
}

/// `0` for `x <= 0`, `1` for `x >= 1`, smooth and increasing in between.
fn smooth_step(x: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (h(x), h(1.0 - x));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `bump((x - center) / width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub center: f64,
    pub width: f64,
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        bump((x - self.center) / self.width)
    }

    /// Closed support `[center - width/2, center + width/2]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - 0.5 * self.width, self.center + 0.5 * self.width)
    }

    /// `int profile(x) e^{i k x} dx`.
    pub fn fourier(&self, k: f64) -> Result<Complex64> {
        let kw = k * self.width;
        let re = adaptive_gl(|t| bump(t) * (kw * t).cos(), -0.5, 0.5, 1e-13)?;
        Ok(Complex64::from_polar(self.width * re, k * self.center))
    }
}

/// Separable observable `phi1(eta) phi2(beta) phi3(sigma)`; a missing `phi3` means `1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub eta: Profile,
    pub beta: Profile,
    pub sigma: Option<Profile>,
}

impl Observable {
    /// All three profiles with the common width `eps`.
    pub fn new(eta0: f64, beta0: f64, sigma0: f64, eps: f64) -> Result<Self> {
        let p = |center| Profile { center, width: eps };
        Self::from_profiles(p(eta0), p(beta0), Some(p(sigma0)))
    }

    pub fn from_profiles(eta: Profile, beta: Profile, sigma: Option<Profile>) -> Result<Self> {
        for w in [eta.width, beta.width].into_iter().chain(sigma.map(|p| p.width)) {
            if !(w > 0.0) {
                return Err(Error::InvalidInput(format!("profile width {w} must be positive")));
            }
        }
        let (lo, hi) = beta.support();
        if !(lo > -std::f64::consts::FRAC_PI_2 && hi < std::f64::consts::FRAC_PI_2) {
            return Err(Error::OutsideChart(beta.center));
        }
        Ok(Self { eta, beta, sigma })
    }

    pub fn phi1(&self) -> Profile {
        self.eta
    }
    pub fn phi2(&self) -> Profile {
        self.beta
    }
    fn phi3_eval(&self, sigma: f64) -> f64 {
        self.sigma.map_or(1.0, |p| p.eval(sigma))
    }

    /// `int_cylinder phi3(sigma) e^{i k sigma} dsigma` at a lattice frequency `k`;
    /// a profile is assumed to fit inside one period.
    pub fn phi3_hat(&self, k: f64, l: f64) -> Result<Complex64> {
        match self.sigma {
            Some(p) => p.fourier(k),
            None if k.abs() < 1e-9 => Ok(Complex64::new(l, 0.0)),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// `a0(beta, sigma, eta)`.
    pub fn a0(&self, beta: f64, sigma: f64, eta: f64) -> f64 {
        self.phi1().eval(eta) * self.phi2().eval(beta) * self.phi3_eval(sigma)
    }

    /// Transported observable `a1(beta', sigma, eta)` for field `b`.
    pub fn a1(&self, b: f64, beta_prime: f64, sigma: f64, eta: f64) -> Result<f64> {
        let w1 = self.phi1().eval(eta);
        if w1 == 0.0 {
            return Ok(0.0);
        }
        let t = PhaseTable::new(b, eta)?;
        let beta = t.phi_inv(beta_prime)?;
        let w2 = self.phi2().eval(beta);
        if w2 == 0.0 {
            return Ok(0.0);
        }
        let jac = 1.0 / t.dphi_dbeta(beta)?;
        Ok(jac * w1 * w2 * self.phi3_eval(sigma - t.f4(beta)?) * (-2.0 * t.f3(beta)?).exp())
    }
}

/// Coefficients `m -> (alpha_m, alpha_m^II)` over the lattice `m = 2 pi n / l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveCoeffs {
    pub l: f64,
    /// Keyed by the lattice index `n`.
    pub entries: BTreeMap<i64, (Complex64, Complex64)>,
}

impl WaveCoeffs {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidInput(format!("neck length {l} must be positive")));
        }
        Ok(Self { l, entries: BTreeMap::new() })
    }

    pub fn frequency(&self, n: i64) -> f64 {
        TAU * n as f64 / self.l
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|(a, b)| a.norm_sqr() + b.norm_sqr()).sum()
    }

    /// Drops the branch-II part.
    pub fn project_first_branch(&self) -> Self {
        let entries = self.entries.iter().map(|(&n, &(a, _))| (n, (a, Complex64::new(0.0, 0.0)))).collect();
        Self { l: self.l, entries }
    }
}

/// Packet of the `k` lattice frequencies nearest to `eta0 s`, each with weight `k^{-1/2}`.
pub fn geodesic_packet(s: f64, eta0: f64, k: usize, l: f64) -> Result<WaveCoeffs> {
    let mut coeffs = WaveCoeffs::new(l)?;
    if k == 0 {
        return Err(Error::InvalidInput("packet needs at least one frequency".into()));
    }
    let center = eta0 * s * l / TAU;
    let lo = (center - k as f64).floor() as i64;
    let mut cand: Vec<i64> = (lo..=lo + 2 * k as i64 + 2).collect();
    cand.sort_by(|a, b| (*a as f64 - center).abs().total_cmp(&(*b as f64 - center).abs()).then(a.cmp(b)));
    let weight = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    for &n in &cand[..k] {
        let m = coeffs.frequency(n) / s;
        if !(m.abs() < 0.5) {
            return Err(Error::OutsideWindow(format!("packet frequency m/s = {m} outside (-1/2, 1/2)")));
        }
        coeffs.entries.insert(n, (weight, Complex64::new(0.0, 0.0)));
    }
    Ok(coeffs)
}

/// Multiplies each first-branch coefficient by the transfer product over `[Bs]` raisings.
pub fn ascend_coeffs(coeffs: &WaveCoeffs, s: f64, b: f64) -> Result<WaveCoeffs> {
    let steps = (b * s).floor() as usize;
    let mut out = coeffs.clone();
    for (&n, entry) in out.entries.iter_mut() {
        if entry.1 != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidInput("ascension of branch-II coefficients is not represented".into()));
        }
        entry.0 *= transfer_product(coeffs.frequency(n) / s, s, steps);
    }
    Ok(out)
}

/// Default frequency window `s^{1/8}`.
pub fn default_window(s: f64) -> f64 {
    s.powf(0.125)
}

/// `phi3` transforms keyed by lattice-index difference.
fn fourier_cache(coeffs: &WaveCoeffs, obs: &Observable, window: f64) -> Result<BTreeMap<i64, Complex64>> {
    let span = (window * coeffs.l / TAU).floor() as i64;
    let mut cache = BTreeMap::new();
    for d in -span..=span {
        cache.insert(d, obs.phi3_hat(coeffs.frequency(d), coeffs.l)?);
    }
    Ok(cache)
}

fn beta_nodes(obs: &Observable) -> Vec<(f64, f64)> {
    let (lo, hi) = obs.phi2().support();
    composite_gl(lo, hi, 16, 16)
}

/// Assembles `sum alpha_m conj(alpha_m') q_{m,m'}` over pairs with `|m - m'| <= window`,
/// in ascending `(m, m')` order with compensated summation.
fn assemble(
    coeffs: &WaveCoeffs,
    keys: &[i64],
    window: f64,
    pair: impl Fn(usize, usize) -> Complex64 + Sync,
) -> Complex64 {
    let rows: Vec<Complex64> = (0..keys.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = ComplexSum::new();
            let ai = coeffs.entries[&keys[i]].0;
            for j in 0..keys.len() {
                if (coeffs.frequency(keys[i] - keys[j])).abs() > window + 1e-12 {
                    continue;
                }
                acc.add(ai * coeffs.entries[&keys[j]].0.conj() * pair(i, j));
            }
            acc.value()
        })
        .collect();
    let mut total = ComplexSum::new();
    rows.into_iter().for_each(|r| total.add(r));
    total.value()
}

fn active_keys(coeffs: &WaveCoeffs, s: f64, cap: f64, obs: &Observable) -> Vec<i64> {
    coeffs
        .entries
        .iter()
        .filter(|(&n, (a, _))| {
            let m = coeffs.frequency(n) / s;
            m.abs() <= cap && *a != Complex64::new(0.0, 0.0) && obs.phi1().eval(m) > 0.0
        })
        .map(|(&n, _)| n)
        .collect()
}

/// `<Op(a0) u0, u0>` for degree-0 first-branch waves.
pub fn quad_form_a0(coeffs: &WaveCoeffs, obs: &Observable, s: f64, window: f64) -> Result<Complex64> {
    let keys = active_keys(coeffs, s, 0.5, obs);
    if keys.is_empty() || window < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let nodes = beta_nodes(obs);
    let grid: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let weights: Vec<f64> = nodes.iter().map(|&(b, w)| w * obs.phi2().eval(b)).collect();
    let waves: Vec<Vec<Complex64>> = keys
        .par_iter()
        .map(|&n| {
            let p = WaveParams::new(0.0, coeffs.frequency(n) / s, s)?;
            Ok(solve_wave(&p, Branch::I, &grid, WAVE_RTOL)?.values)
        })
        .collect::<Result<_>>()?;
    let phi1: Vec<f64> = keys.iter().map(|&n| obs.phi1().eval(coeffs.frequency(n) / s)).collect();
    let hat = fourier_cache(coeffs, obs, window)?;
    Ok(assemble(coeffs, &keys, window, |i, j| {
        let mut acc = ComplexSum::new();
        for k in 0..grid.len() {
            acc.add(weights[k] * waves[i][k] * waves[j][k].conj());
        }
        0.5 * (phi1[i] + phi1[j]) * hat[&(keys[i] - keys[j])] * acc.value()
    }))
}

/// `<Op(a1) u_B, u_B>` for first-branch waves of degree `[Bs]`, with `a1` transported by
/// the field `[Bs]/s`. The `beta'` integral is evaluated in the degree-0 variable.
pub fn quad_form_a1(coeffs: &WaveCoeffs, obs: &Observable, b: f64, s: f64, window: f64) -> Result<Complex64> {
    let steps = (b * s).floor();
    let field = steps / s;
    let keys = active_keys(coeffs, s, eta_max(field), obs);
    if keys.is_empty() || window < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let nodes = beta_nodes(obs);
    let span = (window * coeffs.l / TAU).floor() as i64;
    let hat = fourier_cache(coeffs, obs, window)?;

    // for each m: its transported nodes, weights, shifts and the waves of every nearby m'
    struct Row {
        weights: Vec<f64>,
        shifts: Vec<f64>,
        own: Vec<Complex64>,
        others: BTreeMap<i64, Vec<Complex64>>,
        phi1: f64,
    }
    let rows: Vec<Row> = keys
        .par_iter()
        .map(|&n| {
            let m = coeffs.frequency(n) / s;
            let table = PhaseTable::new(field, m)?;
            let mut image = Vec::with_capacity(nodes.len());
            let mut weights = Vec::with_capacity(nodes.len());
            let mut shifts = Vec::with_capacity(nodes.len());
            for &(beta, w) in &nodes {
                image.push(table.phi(beta)?);
                weights.push(w * obs.phi2().eval(beta) * (-2.0 * table.f3(beta)?).exp());
                shifts.push(table.f4(beta)?);
            }
            let mut others = BTreeMap::new();
            for &o in keys.iter().filter(|&&o| (o - n).abs() <= span) {
                let p = WaveParams::new(field, coeffs.frequency(o) / s, s)?;
                others.insert(o, solve_wave(&p, Branch::I, &image, WAVE_RTOL)?.values);
            }
            let own = others[&n].clone();
            Ok(Row { weights, shifts, own, others, phi1: obs.phi1().eval(m) })
        })
        .collect::<Result<_>>()?;

    let half = |i: usize, j: usize| -> Complex64 {
        let r = &rows[i];
        let dm = coeffs.frequency(keys[i] - keys[j]);
        let other = &r.others[&keys[j]];
        let mut acc = ComplexSum::new();
        for k in 0..r.weights.len() {
            acc.add(r.weights[k] * Complex64::from_polar(1.0, dm * r.shifts[k]) * r.own[k] * other[k].conj());
        }
        r.phi1 * hat[&(keys[i] - keys[j])] * acc.value()
    };
    Ok(assemble(coeffs, &keys, window, |i, j| 0.5 * (half(i, j) + half(j, i).conj())))
}

/// One row of the transport comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportRow {
    pub s: f64,
    pub b: f64,
    pub eta0: f64,
    pub eps: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_diff: f64,
}

/// Packet settings for the transport comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub eta0: f64,
    pub k: usize,
    pub l: f64,
}

/// Compares `<Op(a0) u0, u0>` with `<Op(a1) u_B, u_B>` for a geodesic packet at each `s`.
pub fn measure_transport_check(
    s_list: &[f64],
    b: f64,
    packet: PacketSpec,
    obs: &Observable,
) -> Result<Vec<TransportRow>> {
    s_list
        .iter()
        .map(|&s| {
            let u0 = geodesic_packet(s, packet.eta0, packet.k, packet.l)?;
            let ub = ascend_coeffs(&u0, s, b)?;
            let window = default_window(s);
            let lhs = quad_form_a0(&u0, obs, s, window)?;
            let rhs = quad_form_a1(&ub, obs, b, s, window)?;
            let rel_diff = if lhs.norm() > 0.0 { (lhs - rhs).norm() / lhs.norm() } else { (lhs - rhs).norm() };
            Ok(TransportRow { s, b, eta0: packet.eta0, eps: obs.eta.width, lhs, rhs, rel_diff })
        })
        .collect()
}

/// Gaussian momentum profile `exp(-(xi - center)^2 / (2 width^2))` in the `beta` direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumProbe {
    pub center: f64,
    pub width: f64,
}

impl MomentumProbe {
    /// Convolution kernel of `g(hbar D_beta)`.
    fn kernel(&self, t: f64, hbar: f64) -> Complex64 {
        let amp = self.width / (hbar * (2.0 * PI).sqrt()) * (-0.5 * (self.width * t / hbar).powi(2)).exp();
        Complex64::from_polar(amp, self.center * t / hbar)
    }
}

/// Settings of a momentum-resolved quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellForm {
    /// Degree of the waves divided by `s`, so waves are `w_{tau/s, m/s}` with `tau = [b1 s]`.
    pub b1: f64,
    pub s: f64,
    /// Quantisation scale: `hbar = 1 / (scale s)`, `eta = m hbar`.
    pub scale: f64,
    pub window: f64,
}

/// `<Op(a0 g(xi)) u, u>` with `g` a Gaussian momentum profile (or `g = 1` when `probe` is
/// `None`), for `u` built from both branches. The momentum multiplier acts on `u` cut off
/// smoothly to `[beta0 - eps, beta0 + eps]` and is applied by trapezoidal convolution.
pub fn momentum_form(
    coeffs: &WaveCoeffs,
    obs: &Observable,
    form: ShellForm,
    probe: Option<MomentumProbe>,
) -> Result<Complex64> {
    let ShellForm { b1, s, scale, window } = form;
    let steps = (b1 * s).floor();
    let hbar = 1.0 / (scale * s);
    let keys: Vec<i64> = coeffs
        .entries
        .iter()
        .filter(|(&n, (a, c))| {
            let eta = coeffs.frequency(n) * hbar;
            obs.phi1().eval(eta) > 0.0 && (a.norm() + c.norm()) > 0.0
        })
        .map(|(&n, _)| n)
        .collect();
    if keys.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cutoff = Profile { center: obs.beta.center, width: 2.0 * obs.beta.width };
    let (lo, hi) = cutoff.support();
    // finest oscillation: wave frequency plus probe frequency, four points per period
    let wave_freq = keys
        .iter()
        .map(|&n| {
            let m = coeffs.frequency(n) / s;
            let edge = lo.abs().max(hi.abs());
            steps + s * q_form(steps / s, m, edge).sqrt().max(q_form(steps / s, m, 0.0).sqrt())
        })
        .fold(0.0, f64::max);
    let probe_freq = probe.map_or(0.0, |p| (p.center.abs() + 8.0 * p.width) / hbar);
    let h = PI / (2.0 * (wave_freq + probe_freq));
    let n = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let grid: Vec<f64> = (0..=n).map(|k| lo + h * k as f64).collect();
    let (olo, ohi) = obs.phi2().support();
    let out: Vec<usize> = (0..=n).filter(|&k| grid[k] > olo && grid[k] < ohi).collect();

    let waves: Vec<Vec<Complex64>> = keys
        .par_iter()
        .map(|&key| {
            let (a, c) = coeffs.entries[&key];
            let p = WaveParams::new(steps / s, coeffs.frequency(key) / s, s)?;
            let mut f = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (branch, coef) in [(Branch::I, a), (Branch::II, c)] {
                if coef != Complex64::new(0.0, 0.0) {
                    let w = solve_wave(&p, branch, &grid, WAVE_RTOL)?;
                    f.iter_mut().zip(&w.values).for_each(|(x, v)| *x += coef * v);
                }
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;

    // g(hbar D)(psi f) on the output nodes
    let filtered: Vec<Vec<Complex64>> = waves
        .par_iter()
        .map(|f| match probe {
            None => out.iter().map(|&k| f[k]).collect(),
            Some(p) => {
                let reach = 10.0 * hbar / p.width;
                out.iter()
                    .map(|&i| {
                        let mut acc = ComplexSum::new();
                        for j in 0..grid.len() {
                            let t = grid[i] - grid[j];
                            if t.abs() <= reach {
                                acc.add(p.kernel(t, hbar) * cutoff.eval(grid[j]) * f[j]);
                            }
                        }
                        acc.value() * h
                    })
                    .collect()
            }
        })
        .collect();

    let phi1: Vec<f64> = keys.iter().map(|&n| obs.phi1().eval(coeffs.frequency(n) * hbar)).collect();
    let span = (window * coeffs.l / TAU).floor() as i64;
    let mut hat = BTreeMap::new();
    for d in -span..=span {
        hat.insert(d, obs.phi3_hat(coeffs.frequency(d), coeffs.l)?);
    }
    let weights: Vec<f64> = out.iter().map(|&k| h * obs.phi2().eval(grid[k])).collect();
    let half = |i: usize, j: usize| -> Complex64 {
        let mut acc = ComplexSum::new();
        for (q, &k) in out.iter().enumerate() {
            acc.add(weights[q] * filtered[i][q] * waves[j][k].conj());
        }
        phi1[i] * hat[&(keys[i] - keys[j])] * acc.value()
    };
    let mut total = ComplexSum::new();
    for i in 0..keys.len() {
        for j in 0..keys.len() {
            if (keys[i] - keys[j]).abs() > span {
                continue;
            }
            // coefficients are already folded into the wave samples
            total.add(0.5 * (half(i, j) + half(j, i).conj()));
        }
    }
    Ok(total.value())
}

/// Cylinder form of `H_B`.
pub fn magnetic_energy(b: f64, beta: f64, xi: f64, eta: f64) -> f64 {
    let (s, c) = beta.sin_cos();
    0.5 * ((xi - b) * (xi - b) * c * c + (eta * c - b * s).powi(2))
}

/// Ratio of an off-shell momentum form to the localised mass `<Op(a0) u, u>`.
pub fn energy_shell_test(
    coeffs: &WaveCoeffs,
    obs: &Observable,
    form: ShellForm,
    probe: MomentumProbe,
) -> Result<(Complex64, f64)> {
    let value = momentum_form(coeffs, obs, form, Some(probe))?;
    let mass = momentum_form(coeffs, obs, form, None)?;
    Ok((value, mass.re))
}

/// Samples `|u|^2` of a first-branch degree-0 expansion on a `(beta, sigma)` grid.
pub fn packet_density(coeffs: &WaveCoeffs, s: f64, betas: &[f64], sigmas: &[f64]) -> Result<Vec<Vec<f64>>> {
    let keys: Vec<i64> = coeffs.entries.keys().copied().collect();
    let waves: Vec<Vec<Complex64>> = keys
        .par_iter()
        .map(|&n| {
            let p = WaveParams::new(0.0, coeffs.frequency(n) / s, s)?;
            Ok(solve_wave(&p, Branch::I, betas, WAVE_RTOL)?.values)
        })
        .collect::<Result<_>>()?;
    Ok((0..betas.len())
        .map(|i| {
            sigmas
                .iter()
                .map(|&sg| {
                    let mut u = Complex64::new(0.0, 0.0);
                    for (k, &n) in keys.iter().enumerate() {
                        u += coeffs.entries[&n].0 * Complex64::from_polar(1.0, coeffs.frequency(n) * sg) * waves[k][i];
                    }
                    u.norm_sqr()
                })
                .collect()
        })
        .collect())
}

/// Mass fraction of a packet near its density ridge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    /// `(beta, sigma)` of the density maximum on each sampled `beta` line.
    pub ridge: Vec<(f64, f64)>,
    /// Share of `int |u|^2 dA` over `|beta| <= beta_max` lying within `radius` of the ridge.
    pub fraction: f64,
}

/// Locates the ridge of `|u|^2` line by line in `beta` and measures the mass within
/// hyperbolic distance `radius` of it, over one period in `sigma`.
pub fn packet_concentration(
    coeffs: &WaveCoeffs,
    s: f64,
    beta_max: f64,
    samples: (usize, usize),
    radius: f64,
) -> Result<Concentration> {
    use crate::hyperbolic::{distance, CylPoint};
    let (nb, ns) = samples;
    let betas: Vec<f64> = (0..nb).map(|k| -beta_max + 2.0 * beta_max * (k as f64 + 0.5) / nb as f64).collect();
    let sigmas: Vec<f64> = (0..ns).map(|k| -0.5 * coeffs.l + coeffs.l * k as f64 / ns as f64).collect();
    let dens = packet_density(coeffs, s, &betas, &sigmas)?;
    let ridge: Vec<(f64, f64)> = betas
        .iter()
        .zip(&dens)
        .map(|(&b, row)| {
            let k = (0..ns).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap_or(0);
            (b, sigmas[k])
        })
        .collect();
    let ridge_points: Vec<_> = ridge
        .iter()
        .flat_map(|&(b, sg)| [-coeffs.l, 0.0, coeffs.l].map(move |shift| (b, sg + shift)))
        .map(|(b, sg)| CylPoint::new(b, sg).map(|c| c.to_point()))
        .collect::<Result<_>>()?;
    let (near, total) = betas
        .par_iter()
        .zip(&dens)
        .map(|(&b, row)| {
            let area = 1.0 / b.cos().powi(2);
            let mut near = 0.0;
            let mut total = 0.0;
            for (k, &sg) in sigmas.iter().enumerate() {
                let mass = row[k] * area;
                total += mass;
                let p = CylPoint { beta: b, sigma: sg }.to_point();
                if ridge_points.iter().any(|&r| distance(p, r) <= radius) {
                    near += mass;
                }
            }
            (near, total)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Concentration { ridge, fraction: near / total })
}
