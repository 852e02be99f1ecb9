//! Phase transport between degree-0 and degree-`[Bs]` waves.
//!
//! `P_{B1,m~}(beta) = B1 beta + int_0^beta sqrt(Q)` is the WKB phase per unit `s`. The
//! transport `Phi` matches phases, `P_{B,m~}(Phi(beta)) = P_{0,m~}(beta) - b4(B, m~)`,
//! and `f3`, `f4` are the modulus and horizontal corrections it induces.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{q_cos2, q_form, sqrt_q_integral};
use crate::numerics::{adaptive_gl, newton_bracketed};

const QUAD_TOL: f64 = 1e-13;
const EDGE: f64 = 1e-9;

/// `P_{B1,m~}(beta)`.
pub fn phase_p(b1: f64, m: f64, beta: f64) -> Result<f64> {
    Ok(b1 * beta + sqrt_q_integral(b1, m, beta)?)
}

/// `-atan(m~ / sqrt(B^2 - m~^2 + 1))`.
pub fn b1(b: f64, m: f64) -> f64 {
    -(m / (b * b - m * m + 1.0).sqrt()).atan()
}

/// `int_0^B b1(B2, m~) dB2`.
pub fn b4(b: f64, m: f64) -> Result<f64> {
    adaptive_gl(|t| b1(t, m), 0.0, b, QUAD_TOL)
}

/// `d b4 / d m~` in closed form.
pub fn db4_dm(b: f64, m: f64) -> f64 {
    (1.0 - m * m).sqrt().ln() - (b + (b * b - m * m + 1.0).sqrt()).ln()
}

/// Real part of the `1/s` coefficient of `ln c1`.
pub fn b3(b: f64, m: f64) -> f64 {
    -b / (2.0 * (b * b - m * m + 1.0))
}

/// `int_0^B b3(B2, m~) dB2` by quadrature.
pub fn b7(b: f64, m: f64) -> Result<f64> {
    adaptive_gl(|t| b3(t, m), 0.0, b, QUAD_TOL)
}

/// Closed form of [`b7`]: `-(1/4) ln(Q_B(0) / Q_0(0))`.
pub fn b7_closed(b: f64, m: f64) -> f64 {
    -0.25 * ((b * b - m * m + 1.0) / (1.0 - m * m)).ln()
}

/// `d sqrt(Q_{B,m~}) / d m~`, bounded on the whole chart.
fn dsqrt_q_dm(b: f64, m: f64, beta: f64) -> f64 {
    let (s, c) = beta.sin_cos();
    (b * s - m * c) / q_cos2(b, m, beta).sqrt()
}

/// Largest admissible `|m~|` for field `B`: below `1/2` and with `B m~ < sqrt(1 - m~^2)`.
pub fn eta_max(b: f64) -> f64 {
    0.5f64.min(1.0 / (1.0 + b * b).sqrt())
}

/// Cached phase data for one `(B, m~)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub b: f64,
    pub m: f64,
    pub b4: f64,
    pub b7: f64,
}

impl PhaseTable {
    pub fn new(b: f64, m: f64) -> Result<Self> {
        if !(m.abs() < 1.0) || !b.is_finite() {
            return Err(Error::OutsideWindow(format!("(B, m~) = ({b}, {m})")));
        }
        Ok(Self { b, m, b4: b4(b, m)?, b7: b7(b, m)? })
    }

    fn solve_phase(&self, field: f64, target: f64, guess: f64) -> Result<f64> {
        let lo = -FRAC_PI_2 + EDGE;
        let hi = FRAC_PI_2 - EDGE;
        let m = self.m;
        newton_bracketed(
            |x| Ok((phase_p(field, m, x)? - target, field + q_form(field, m, x).sqrt())),
            lo,
            hi,
            guess,
            1e-14,
        )
        .map_err(|e| match e {
            Error::RootNotBracketed(msg) => {
                Error::OutsideWindow(format!("phase {target} not attained inside the chart: {msg}"))
            }
            other => other,
        })
    }

    /// `Phi_{B,m~}(beta)`.
    pub fn phi(&self, beta: f64) -> Result<f64> {
        if self.b == 0.0 {
            return Ok(beta);
        }
        let target = phase_p(0.0, self.m, beta)? - self.b4;
        self.solve_phase(self.b, target, beta)
    }

    /// `Phi^{-1}_{B,m~}(beta')`.
    pub fn phi_inv(&self, beta_prime: f64) -> Result<f64> {
        if self.b == 0.0 {
            return Ok(beta_prime);
        }
        let target = phase_p(self.b, self.m, beta_prime)? + self.b4;
        self.solve_phase(0.0, target, beta_prime)
    }

    /// `dPhi/dbeta = sqrt(Q_0(beta)) / (B + sqrt(Q_B(Phi)))`.
    pub fn dphi_dbeta(&self, beta: f64) -> Result<f64> {
        let phi = self.phi(beta)?;
        Ok(q_form(0.0, self.m, beta).sqrt() / (self.b + q_form(self.b, self.m, phi).sqrt()))
    }

    /// Numerator of `dPhi/dm~`; equals `f4`.
    fn transport_numerator(&self, beta: f64, phi: f64) -> Result<f64> {
        let (b, m) = (self.b, self.m);
        let first = adaptive_gl(|t| dsqrt_q_dm(0.0, m, t), 0.0, beta, QUAD_TOL)?;
        let second = adaptive_gl(|t| dsqrt_q_dm(b, m, t), 0.0, phi, QUAD_TOL)?;
        Ok(first - second - db4_dm(b, m))
    }

    /// `dPhi_{B,m~}(beta) / dm~`.
    pub fn dphi_dm(&self, beta: f64) -> Result<f64> {
        let phi = self.phi(beta)?;
        Ok(self.transport_numerator(beta, phi)? / (self.b + q_form(self.b, self.m, phi).sqrt()))
    }

    /// Horizontal shift `f4 = (B + sqrt(Q_B(Phi))) dPhi/dm~`.
    pub fn f4(&self, beta: f64) -> Result<f64> {
        if self.b == 0.0 {
            return Ok(0.0);
        }
        let phi = self.phi(beta)?;
        self.transport_numerator(beta, phi)
    }

    /// Log-modulus change `f3`, so that `|omega(Phi(beta))| = |w_0(beta)| exp(f3)`.
    ///
    /// `b7 + (ln Q_0(beta) - ln Q_B(Phi))/4` plus the constant `(ln Q_B(0) - ln Q_0(0))/4`
    /// coming from normalising both waves to 1 at `beta = 0`.
    pub fn f3(&self, beta: f64) -> Result<f64> {
        if self.b == 0.0 {
            return Ok(0.0);
        }
        let (b, m) = (self.b, self.m);
        let phi = self.phi(beta)?;
        Ok(self.b7 + 0.25 * (q_form(0.0, m, beta).ln() - q_form(b, m, phi).ln())
            + 0.25 * (q_form(b, m, 0.0).ln() - q_form(0.0, m, 0.0).ln()))
    }
}

/// Point `(beta, sigma, eta)` of the cylinder's cotangent bundle restricted to the energy shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellPoint {
    pub beta: f64,
    pub sigma: f64,
    pub eta: f64,
}

fn check_eta(b: f64, eta: f64) -> Result<()> {
    let limit = eta_max(b);
    if !(eta.abs() < limit) {
        return Err(Error::OutsideWindow(format!("|eta| = {} not below {limit}", eta.abs())));
    }
    Ok(())
}

/// `G(beta, sigma, eta) = (Phi_{B,eta}(beta), sigma + f4(B, beta, eta), eta)`.
pub fn g_map(b: f64, p: ShellPoint) -> Result<ShellPoint> {
    check_eta(b, p.eta)?;
    let t = PhaseTable::new(b, p.eta)?;
    Ok(ShellPoint { beta: t.phi(p.beta)?, sigma: p.sigma + t.f4(p.beta)?, eta: p.eta })
}

/// Density `A = (dPhi^{-1}/dbeta')^{-1} exp(2 f3(Phi^{-1}(beta')))` at a point of the image.
pub fn a_density(b: f64, p: ShellPoint) -> Result<f64> {
    check_eta(b, p.eta)?;
    let t = PhaseTable::new(b, p.eta)?;
    let beta = t.phi_inv(p.beta)?;
    Ok(t.dphi_dbeta(beta)? * (2.0 * t.f3(beta)?).exp())
}
