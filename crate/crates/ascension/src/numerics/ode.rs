use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Counters reported by an integration run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Adaptive Dormand-Prince 5(4) integrator over fixed-size real state vectors.
///
/// Components can be grouped so that the error of, say, the real and imaginary
/// parts of one complex unknown is measured against their joint magnitude.
#[derive(Debug, Clone)]
pub struct Dopri5<const N: usize> {
    pub rtol: f64,
    pub atol: f64,
    pub groups: [usize; N],
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl<const N: usize> Dopri5<N> {
    pub fn new(rtol: f64, atol: f64) -> Self {
        let mut groups = [0; N];
        for (i, g) in groups.iter_mut().enumerate() {
            *g = i;
        }
        Self {
            rtol,
            atol,
            groups,
            max_steps: 50_000_000,
            initial_step: None,
        }
    }

    pub fn with_groups(mut self, groups: [usize; N]) -> Self {
        self.groups = groups;
        self
    }

    fn scales(&self, y: &[f64; N], z: &[f64; N]) -> [f64; N] {
        let mut mag = [0.0f64; N];
        for i in 0..N {
            let g = self.groups[i];
            mag[g] = mag[g].max(y[i].abs()).max(z[i].abs());
        }
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = self.atol + self.rtol * mag[self.groups[i]];
        }
        out
    }

    /// Integrates from `(t0, y0)` through every point of `targets` (monotone, all on
    /// the same side of `t0`), landing exactly on each and calling `sink(i, t, y)`.
    pub fn integrate<F, S>(&self, f: F, t0: f64, y0: [f64; N], targets: &[f64], mut sink: S) -> Result<OdeStats>
    where
        F: Fn(f64, &[f64; N], &mut [f64; N]),
        S: FnMut(usize, f64, &[f64; N]),
    {
        let mut stats = OdeStats::default();
        if targets.is_empty() {
            return Ok(stats);
        }
        let last = *targets.last().unwrap();
        let dir = if last >= t0 { 1.0 } else { -1.0 };
        if targets.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || (targets[0] - t0) * dir < 0.0 {
            return Err(Error::InvalidInput("ODE targets must be monotone away from t0".into()));
        }

        let mut t = t0;
        let mut y = y0;
        let mut k1 = [0.0; N];
        f(t, &y, &mut k1);
        stats.evaluations += 1;

        let span = (last - t0).abs().max(1e-300);
        let mut h = self.initial_step.unwrap_or_else(|| {
            let sc = self.scales(&y, &y);
            let d0 = rms(&y, &sc);
            let d1 = rms(&k1, &sc);
            let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            guess.min(span)
        });

        let mut k2 = [0.0; N];
        let mut k3 = [0.0; N];
        let mut k4 = [0.0; N];
        let mut k5 = [0.0; N];
        let mut k6 = [0.0; N];
        let mut k7 = [0.0; N];
        let mut tmp = [0.0; N];
        let mut y5 = [0.0; N];

        for (idx, &target) in targets.iter().enumerate() {
            while (target - t) * dir > 0.0 {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::TooManySteps(self.max_steps));
                }
                let remaining = (target - t).abs();
                let clipped = h >= remaining;
                let hs = if clipped { remaining } else { h } * dir;
                if hs.abs() <= 1e-15 * t.abs().max(1.0) && !clipped {
                    return Err(Error::StepSizeUnderflow { t });
                }

                for i in 0..N {
                    tmp[i] = y[i] + hs * A21 * k1[i];
                }
                f(t + C2 * hs, &tmp, &mut k2);
                for i in 0..N {
                    tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
                }
                f(t + C3 * hs, &tmp, &mut k3);
                for i in 0..N {
                    tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
                }
                f(t + C4 * hs, &tmp, &mut k4);
                for i in 0..N {
                    tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
                }
                f(t + C5 * hs, &tmp, &mut k5);
                for i in 0..N {
                    tmp[i] = y[i]
                        + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
                }
                f(t + hs, &tmp, &mut k6);
                for i in 0..N {
                    y5[i] = y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
                }
                let t_new = if clipped { target } else { t + hs };
                f(t_new, &y5, &mut k7);
                stats.evaluations += 6;

                let sc = self.scales(&y, &y5);
                let mut err = [0.0; N];
                for i in 0..N {
                    err[i] = hs
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                }
                let e = rms(&err, &sc);
                if !e.is_finite() {
                    stats.rejected += 1;
                    h *= 0.2;
                    continue;
                }
                if e <= 1.0 {
                    stats.accepted += 1;
                    t = t_new;
                    y = y5;
                    k1 = k7;
                    let grow = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    // a clipped step says nothing about the natural step length
                    if !clipped || hs.abs() * grow > h {
                        h = hs.abs() * grow;
                    }
                } else {
                    stats.rejected += 1;
                    h = hs.abs() * (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
                }
            }
            sink(idx, t, &y);
        }
        Ok(stats)
    }
}

fn rms<const N: usize>(v: &[f64; N], sc: &[f64; N]) -> f64 {
    let s: f64 = v.iter().zip(sc).map(|(a, b)| (a / b) * (a / b)).sum();
    (s / N as f64).sqrt()
}
