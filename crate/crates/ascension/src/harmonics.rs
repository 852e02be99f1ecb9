//! Separated waves `e^{i m sigma} w(beta)` on the hyperbolic cylinder in the chart
//! `z = i exp(sigma - i beta)`, the raising operator that moves them up in degree, and
//! the ascension chain from degree 0 to degree `[Bs]`.
//!
//! A wave of degree `tau = B1 s` and frequency `m = m~ s` solves
//! `(w e^{-i tau beta})'' + s^2 Q (w e^{-i tau beta}) = 0` with
//! `Q = 2 B1 m~ tan(beta) - m~^2 + sec^2(beta) + B1^2`, normalised by `w(0) = 1`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{adaptive_gl, Dopri5};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default relative tolerance for wave integration.
pub const WAVE_RTOL: f64 = 1e-11;

/// Branch of the WKB pair: `I` travels with increasing phase, `II` against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    I,
    II,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::I => 1.0,
            Branch::II => -1.0,
        }
    }
}

/// Degree, frequency and spectral parameter of a separated wave, all in units of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    /// Degree divided by `s`.
    pub b1: f64,
    /// Frequency divided by `s`.
    pub m_tilde: f64,
    pub s: f64,
}

impl WaveParams {
    pub fn new(b1: f64, m_tilde: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidInput(format!("spectral parameter s = {s} must be positive")));
        }
        if !(m_tilde.abs() < 1.0) {
            return Err(Error::OutsideWindow(format!("|m~| = {} must be < 1", m_tilde.abs())));
        }
        if !b1.is_finite() {
            return Err(Error::InvalidInput("degree must be finite".into()));
        }
        Ok(Self { b1, m_tilde, s })
    }

    /// Integer-degree parameters `tau / s`, frequency `m / s`.
    pub fn from_degree(tau: f64, m: f64, s: f64) -> Result<Self> {
        Self::new(tau / s, m / s, s)
    }

    pub fn tau(&self) -> f64 {
        self.b1 * self.s
    }

    pub fn m(&self) -> f64 {
        self.m_tilde * self.s
    }

    /// Same frequency, one degree higher.
    pub fn raised(&self) -> Self {
        Self { b1: self.b1 + 1.0 / self.s, ..*self }
    }
}

/// `Q_{B1, m~}(beta)`.
pub fn q_form(b1: f64, m: f64, beta: f64) -> f64 {
    let c = beta.cos();
    2.0 * b1 * m * beta.tan() - m * m + 1.0 / (c * c) + b1 * b1
}

/// `dQ/dbeta`.
pub fn q_prime(b1: f64, m: f64, beta: f64) -> f64 {
    let c2 = beta.cos().powi(2);
    2.0 * b1 * m / c2 + 2.0 * beta.tan() / c2
}

/// `cos^2(beta) Q`, smooth up to `|beta| = pi/2`.
pub fn q_cos2(b1: f64, m: f64, beta: f64) -> f64 {
    let (s, c) = beta.sin_cos();
    2.0 * b1 * m * s * c - m * m * c * c + 1.0 + b1 * b1 * c * c
}

/// Inverse Gudermannian `ln tan(beta/2 + pi/4) = asinh(tan beta)`.
pub fn gd_inv(beta: f64) -> f64 {
    beta.tan().asinh()
}

/// `int_0^beta sqrt(Q)`: the secant part in closed form plus a smooth remainder.
pub fn sqrt_q_integral(b1: f64, m: f64, beta: f64) -> Result<f64> {
    check_chart(beta)?;
    let rest = adaptive_gl(
        |t| {
            let (s, c) = t.sin_cos();
            (2.0 * b1 * m * s + (b1 * b1 - m * m) * c) / (q_cos2(b1, m, t).sqrt() + 1.0)
        },
        0.0,
        beta,
        1e-14,
    )?;
    Ok(gd_inv(beta) + rest)
}

fn check_chart(beta: f64) -> Result<()> {
    if !(beta.abs() < FRAC_PI_2) {
        return Err(Error::OutsideChart(beta));
    }
    Ok(())
}

/// `w'(0)` of the normalised branch.
pub fn initial_derivative(p: &WaveParams, branch: Branch) -> Complex64 {
    let q0 = q_form(p.b1, p.m_tilde, 0.0);
    let qp0 = q_prime(p.b1, p.m_tilde, 0.0);
    I * p.tau() + branch.sign() * I * p.s * q0.sqrt() - qp0 / (4.0 * q0)
}

/// Samples of a separated wave and its first derivative on a sorted grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylWave {
    pub params: WaveParams,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub derivs: Vec<Complex64>,
}

impl CylWave {
    /// `w''` from the differential equation.
    pub fn second_derivative(&self, k: usize) -> Complex64 {
        let p = &self.params;
        let tau = p.tau();
        let q = q_form(p.b1, p.m_tilde, self.grid[k]);
        2.0 * I * tau * self.derivs[k] + (tau * tau - p.s * p.s * q) * self.values[k]
    }

    /// `w'''` from the differentiated equation.
    pub fn third_derivative(&self, k: usize) -> Complex64 {
        let p = &self.params;
        let tau = p.tau();
        let beta = self.grid[k];
        let q = q_form(p.b1, p.m_tilde, beta);
        let qp = q_prime(p.b1, p.m_tilde, beta);
        2.0 * I * tau * self.second_derivative(k) + (tau * tau - p.s * p.s * q) * self.derivs[k]
            - p.s * p.s * qp * self.values[k]
    }

    /// `(w, w', w'', w''')` at grid index `k`.
    pub fn jet(&self, k: usize) -> [Complex64; 4] {
        [self.values[k], self.derivs[k], self.second_derivative(k), self.third_derivative(k)]
    }

    /// Value and derivative at `beta = 0`, if it is a grid point.
    pub fn at_origin(&self) -> Option<(Complex64, Complex64)> {
        self.grid.iter().position(|&b| b == 0.0).map(|k| (self.values[k], self.derivs[k]))
    }
}

/// Solves for the normalised branch on `grid` (sorted, inside the chart).
pub fn solve_wave(p: &WaveParams, branch: Branch, grid: &[f64], rtol: f64) -> Result<CylWave> {
    solve_with_data(p, Complex64::new(1.0, 0.0), initial_derivative(p, branch), grid, rtol)
}

/// Solves the degree-`tau` equation with data `w(0) = w0`, `w'(0) = dw0`.
pub fn solve_with_data(
    p: &WaveParams,
    w0: Complex64,
    dw0: Complex64,
    grid: &[f64],
    rtol: f64,
) -> Result<CylWave> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("wave grid must be strictly increasing".into()));
    }
    for &b in grid {
        check_chart(b)?;
    }
    let q0 = q_form(p.b1, p.m_tilde, 0.0);
    if !(q0 > 0.0) {
        return Err(Error::NonPositiveQ(q0));
    }
    let tau = p.tau();
    let s2 = p.s * p.s;
    let (b1, m) = (p.b1, p.m_tilde);
    // f = w e^{-i tau beta}
    let f0 = w0;
    let df0 = dw0 - I * tau * w0;
    let y0 = [f0.re, f0.im, df0.re, df0.im];
    let solver = Dopri5::<4>::new(rtol, rtol * 1e-4).with_groups([0, 0, 1, 1]);
    let rhs = move |beta: f64, y: &[f64; 4], dy: &mut [f64; 4]| {
        let k = -s2 * q_form(b1, m, beta);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = k * y[0];
        dy[3] = k * y[1];
    };

    let n = grid.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let mut derivs = vec![Complex64::new(0.0, 0.0); n];
    let split = grid.partition_point(|&b| b < 0.0);
    let mut store = |k: usize, beta: f64, y: &[f64; 4]| {
        let phase = Complex64::from_polar(1.0, tau * beta);
        let f = Complex64::new(y[0], y[1]);
        let df = Complex64::new(y[2], y[3]);
        values[k] = f * phase;
        derivs[k] = (df + I * tau * f) * phase;
    };
    let right: Vec<f64> = grid[split..].to_vec();
    solver.integrate(rhs, 0.0, y0, &right, |i, b, y| store(split + i, b, y))?;
    let left: Vec<f64> = grid[..split].iter().rev().copied().collect();
    solver.integrate(rhs, 0.0, y0, &left, |i, b, y| store(split - 1 - i, b, y))?;
    Ok(CylWave { params: *p, grid: grid.to_vec(), values, derivs })
}

/// WKB approximation `exp(i tau beta ± i s int sqrt(Q) - (1/4) int Q'/Q)`.
pub fn wkb_eval(p: &WaveParams, branch: Branch, beta: f64) -> Result<Complex64> {
    let phase = p.tau() * beta + branch.sign() * p.s * sqrt_q_integral(p.b1, p.m_tilde, beta)?;
    let amp = (q_form(p.b1, p.m_tilde, 0.0) / q_form(p.b1, p.m_tilde, beta)).powf(0.25);
    Ok(Complex64::from_polar(amp, phase))
}

/// Raising operator on a separated wave: given `(w, w', w'', w''')` at `beta`, returns
/// `(v, v', v'')` for `v = tau w + i cos(beta) e^{i beta} (m w + w')`.
pub fn raise_jet(m: f64, tau: f64, beta: f64, jet: &[Complex64; 4]) -> [Complex64; 3] {
    let [w, w1, w2, w3] = *jet;
    let e1 = Complex64::from_polar(1.0, beta);
    let e2 = e1 * e1;
    let ea = I * beta.cos() * e1;
    let eb = -e2;
    let ec = -2.0 * I * e2;
    let u0 = m * w + w1;
    let u1 = m * w1 + w2;
    let u2 = m * w2 + w3;
    [
        tau * w + ea * u0,
        tau * w1 + eb * u0 + ea * u1,
        tau * w2 + ec * u0 + 2.0 * eb * u1 + ea * u2,
    ]
}

/// Lowering operator `conj o K_{-tau} o conj` on a separated wave:
/// `v = -tau w + i cos(beta) e^{-i beta} (m w - w')`. Returns `(v, v')`.
pub fn lower_jet(m: f64, tau: f64, beta: f64, jet: &[Complex64; 3]) -> [Complex64; 2] {
    let [w, w1, w2] = *jet;
    let e = Complex64::from_polar(1.0, -beta);
    let ea = I * beta.cos() * e;
    // d/dbeta (i cos e^{-i beta}) = -e^{-2 i beta}
    let eb = -(e * e);
    let u0 = m * w - w1;
    let u1 = m * w1 - w2;
    [-tau * w + ea * u0, -tau * w1 + eb * u0 + ea * u1]
}

/// `sqrt(s^2 + tau (tau + 1))`, the norm growth of one raising step.
pub fn raising_norm(s: f64, tau: f64) -> f64 {
    (s * s + tau * (tau + 1.0)).sqrt()
}

/// Samples of the raised wave (optionally normalised) on the wave's grid.
pub fn apply_raising(wave: &CylWave, normalized: bool) -> (Vec<Complex64>, Vec<Complex64>) {
    let p = &wave.params;
    let scale = if normalized { 1.0 / raising_norm(p.s, p.tau()) } else { 1.0 };
    (0..wave.grid.len())
        .map(|k| {
            let [v, dv, _] = raise_jet(p.m(), p.tau(), wave.grid[k], &wave.jet(k));
            (v * scale, dv * scale)
        })
        .unzip()
}

/// `D^tau` on a separated wave from `(w, w', w'')`:
/// `-cos^2 w'' + 2 i tau cos^2 w' + (m^2 cos^2 - 2 tau m sin cos) w`.
pub fn apply_d_tau(m: f64, tau: f64, beta: f64, w: Complex64, w1: Complex64, w2: Complex64) -> Complex64 {
    let (s, c) = beta.sin_cos();
    let c2 = c * c;
    -c2 * w2 + 2.0 * I * tau * c2 * w1 + (m * m * c2 - 2.0 * tau * m * s * c) * w
}

/// Two-term expansion of the raising coefficient, as printed in the source.
///
/// The exact coefficient of `w^I` after one normalised raising is `-c1 + O(s^-2)`;
/// see [`transfer_coefficient`].
pub fn c1(b1: f64, m: f64, s: f64) -> Complex64 {
    two_term(b1, m, s, 1.0)
}

/// Branch-II analogue of [`c1`]: the same expansion with `sqrt(Q(0))` negated.
pub fn c2_ii(b1: f64, m: f64, s: f64) -> Complex64 {
    two_term(b1, m, s, -1.0)
}

fn two_term(b1: f64, m: f64, s: f64, root_sign: f64) -> Complex64 {
    let q0 = b1 * b1 - m * m + 1.0;
    let rq = root_sign * q0.sqrt();
    let r2 = 1.0 + b1 * b1;
    let r = r2.sqrt();
    let lead = Complex64::new(rq, -m) / r;
    let next = (Complex64::new(-rq, m) * b1 / (2.0 * r2) + I * m * b1 / (2.0 * q0)) / r;
    lead + next / s
}

/// Coefficient of `w^I_{B1 + 1/s}` in the normalised raising of `w^I_{B1}`, to `O(s^-2)`.
pub fn transfer_coefficient(b1: f64, m: f64, s: f64) -> Complex64 {
    -c1(b1, m, s)
}

/// Splits data `(w(0), w'(0))` of a degree-`p` solution into branch coefficients.
pub fn decompose(p: &WaveParams, w0: Complex64, dw0: Complex64) -> (Complex64, Complex64) {
    let d1 = initial_derivative(p, Branch::I);
    let d2 = initial_derivative(p, Branch::II);
    let c2 = (dw0 - d1 * w0) / (d2 - d1);
    (w0 - c2, c2)
}

/// One normalised raising step on the data at `beta = 0` of a degree-`p` solution.
pub fn raise_at_origin(p: &WaveParams, w0: Complex64, dw0: Complex64) -> (Complex64, Complex64) {
    let tau = p.tau();
    let w2 = 2.0 * I * tau * dw0 + (tau * tau - p.s * p.s * q_form(p.b1, p.m_tilde, 0.0)) * w0;
    let w3 = 2.0 * I * tau * w2 + (tau * tau - p.s * p.s * q_form(p.b1, p.m_tilde, 0.0)) * dw0
        - p.s * p.s * q_prime(p.b1, p.m_tilde, 0.0) * w0;
    let [v, dv, _] = raise_jet(p.m(), tau, 0.0, &[w0, dw0, w2, w3]);
    let k = 1.0 / raising_norm(p.s, tau);
    (v * k, dv * k)
}

/// Result of ascending a degree-0 branch-I wave to degree `[Bs]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ascension {
    /// `[Bs]` normalised raisings, exact up to integration error.
    pub exact: CylWave,
    /// `w^I_{[Bs]/s}` times the accumulated transfer coefficients.
    pub omega: CylWave,
    /// Product of the transfer coefficients.
    pub product: Complex64,
    pub steps: usize,
}

/// Product of transfer coefficients over degrees `0..steps`.
pub fn transfer_product(m: f64, s: f64, steps: usize) -> Complex64 {
    (0..steps).fold(Complex64::new(1.0, 0.0), |acc, t| acc * transfer_coefficient(t as f64 / s, m, s))
}

/// Ascends `w^I_{0, m~}` at spectral parameter `s` through `[Bs]` normalised raisings.
///
/// The exact chain carries `(w(0), w'(0))` through each raising (each intermediate is
/// determined by these data) and solves once at the final degree.
pub fn ascend(m_tilde: f64, b: f64, s: f64, grid: &[f64], rtol: f64) -> Result<Ascension> {
    if !(b >= 0.0) {
        return Err(Error::InvalidInput(format!("field strength B = {b} must be >= 0")));
    }
    let steps = (b * s).floor() as usize;
    let mut p = WaveParams::new(0.0, m_tilde, s)?;
    let mut w0 = Complex64::new(1.0, 0.0);
    let mut dw0 = initial_derivative(&p, Branch::I);
    for _ in 0..steps {
        let (v, dv) = raise_at_origin(&p, w0, dw0);
        p = p.raised();
        w0 = v;
        dw0 = dv;
    }
    let top = WaveParams::from_degree(steps as f64, m_tilde * s, s)?;
    let exact = solve_with_data(&top, w0, dw0, grid, rtol)?;
    let branch = solve_wave(&top, Branch::I, grid, rtol)?;
    let product = transfer_product(m_tilde, s, steps);
    let omega = CylWave {
        params: top,
        grid: branch.grid.clone(),
        values: branch.values.iter().map(|w| w * product).collect(),
        derivs: branch.derivs.iter().map(|w| w * product).collect(),
    };
    Ok(Ascension { exact, omega, product, steps })
}

/// Uniform grid of `n + 1` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}
