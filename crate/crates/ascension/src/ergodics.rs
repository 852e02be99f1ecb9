//! Birkhoff averages of geodesic, hypercyclic and horocyclic orbits on the octagon surface.
//!
//! Orbits are stepped exactly in the frame bundle: the frame is multiplied by the flow's
//! one-parameter subgroup element for one step and reduced to the fundamental domain.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{polar_point, FuchsianGroup, Surface};
use crate::hyperbolic::{
    distance, horocycle_subgroup, hypercycle_speed, hypercycle_subgroup, Mobius, Point, TangentVector,
};
use crate::numerics::{adaptive_gl, composite_gl, KahanSum};
use crate::semiclassical::bump;

/// Default flow-time step of orbit sampling.
pub const DEFAULT_STEP: f64 = 1e-2;
/// Steps between determinant renormalisations of the frame.
pub const RENORMALIZE_EVERY: usize = 1000;

/// Which homogeneous flow to follow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Geodesic,
    Hypercyclic { b: f64 },
    Horocyclic,
}

impl FlowKind {
    /// Right multiplier advancing a frame by flow time `t`.
    pub fn generator(&self, t: f64) -> Mobius {
        match *self {
            FlowKind::Geodesic => Mobius::diag(t),
            FlowKind::Hypercyclic { b } => hypercycle_subgroup(b, t),
            FlowKind::Horocyclic => horocycle_subgroup(t),
        }
    }

    /// Length of the vectors the flow moves.
    pub fn speed(&self) -> f64 {
        match *self {
            FlowKind::Hypercyclic { b } => hypercycle_speed(b),
            _ => 1.0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            FlowKind::Geodesic => "geodesic".into(),
            FlowKind::Hypercyclic { b } => format!("hypercyclic:{b}"),
            FlowKind::Horocyclic => "horocyclic".into(),
        }
    }
}

impl std::str::FromStr for FlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geodesic" => Ok(FlowKind::Geodesic),
            "horocyclic" => Ok(FlowKind::Horocyclic),
            _ => {
                let b = s
                    .strip_prefix("hypercyclic:")
                    .and_then(|r| r.parse::<f64>().ok())
                    .filter(|b| b.is_finite())
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "unknown flow `{s}` (expected geodesic, horocyclic or hypercyclic:<B>)"
                        ))
                    })?;
                Ok(FlowKind::Hypercyclic { b })
            }
        }
    }
}

/// Frames along one orbit, each reduced into the fundamental domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitSample {
    pub kind: FlowKind,
    pub initial: TangentVector,
    pub step: f64,
    pub length: f64,
    /// Samples at flow times `0, step, ..., length`.
    pub samples: Vec<TangentVector>,
}

/// Steps reduced frames along an orbit, calling `visit` on each sample.
fn walk(
    group: &FuchsianGroup,
    kind: FlowKind,
    v0: &TangentVector,
    step: f64,
    steps: usize,
    mut visit: impl FnMut(usize, &TangentVector),
) -> Result<()> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("orbit step {step} must be positive")));
    }
    let speed = kind.speed();
    if (v0.norm() - speed).abs() > 1e-8 * speed {
        return Err(Error::WrongLength { expected: speed, actual: v0.norm() });
    }
    let advance = kind.generator(step);
    let mut g = group.reduce_frame(&v0.frame()?)?;
    visit(0, &TangentVector::from_frame(&g, speed));
    for k in 1..=steps {
        g = group.reduce_frame(&g.compose(&advance))?;
        if k % RENORMALIZE_EVERY == 0 {
            g = g.renormalized();
        }
        visit(k, &TangentVector::from_frame(&g, speed));
    }
    Ok(())
}

fn step_count(length: f64, step: f64) -> Result<usize> {
    if !(length >= 0.0) || !length.is_finite() {
        return Err(Error::InvalidInput(format!("orbit length {length} must be finite and >= 0")));
    }
    Ok((length / step).round() as usize)
}

/// Samples the orbit of `v0` for flow time `length`.
pub fn orbit(group: &FuchsianGroup, kind: FlowKind, v0: &TangentVector, step: f64, length: f64) -> Result<OrbitSample> {
    let steps = step_count(length, step)?;
    let mut samples = Vec::with_capacity(steps + 1);
    walk(group, kind, v0, step, steps, |_, v| samples.push(*v))?;
    Ok(OrbitSample { kind, initial: *v0, step, length: steps as f64 * step, samples })
}

/// Trapezoidal time average of `f` along the orbit.
pub fn birkhoff_average(orbit: &OrbitSample, f: impl Fn(&TangentVector) -> f64) -> Result<f64> {
    let n = orbit.samples.len();
    match n {
        0 => Err(Error::InvalidInput("empty orbit".into())),
        1 => Ok(f(&orbit.samples[0])),
        _ => {
            let mut acc = KahanSum::new();
            for (k, v) in orbit.samples.iter().enumerate() {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc.add(w * f(v));
            }
            Ok(acc.value() / (n - 1) as f64)
        }
    }
}

/// Smooth test functions on the unit tangent bundle of the octagon surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestObservable {
    /// `bump(d(z, center) / width)`, supported inside the fundamental domain.
    Bump { center: Point, width: f64 },
    /// `bump(d(z, i) / width) cos(k theta - phase)` with `theta` the direction in the disk model.
    Direction { k: u32, phase: f64, width: f64 },
    Constant { value: f64 },
}

/// Direction of `v` in the disk model `w = (z - i)/(z + i)`.
pub fn disk_angle(v: &TangentVector) -> f64 {
    let z = v.base.to_complex();
    let dw = Complex64::new(0.0, 2.0) / ((z + Complex64::i()) * (z + Complex64::i()));
    (dw * Complex64::new(v.vx, v.vy)).arg()
}

impl TestObservable {
    pub fn eval(&self, v: &TangentVector) -> f64 {
        match *self {
            TestObservable::Bump { center, width } => bump(distance(v.base, center) / width),
            TestObservable::Direction { k, phase, width } => {
                let radial = bump(distance(v.base, Point::i()) / width);
                if radial == 0.0 {
                    0.0
                } else {
                    radial * (k as f64 * disk_angle(v) - phase).cos()
                }
            }
            TestObservable::Constant { value } => value,
        }
    }

    /// Liouville mean on the unit tangent bundle of the octagon surface.
    pub fn area_mean(&self) -> Result<f64> {
        match *self {
            TestObservable::Bump { center, width } => {
                octagon_mean(|p| bump(distance(p, center) / width))
            }
            // the fibre average of cos(k theta - phase) vanishes
            TestObservable::Direction { .. } => Ok(0.0),
            TestObservable::Constant { value } => Ok(value),
        }
    }
}

/// Area average of `f` over the octagon by polar quadrature about its centre.
pub fn octagon_mean(f: impl Fn(Point) -> f64 + Sync) -> Result<f64> {
    // panels of width pi/8 put every vertex direction on a panel edge
    let nodes = composite_gl(0.0, TAU, 16, 32);
    let parts: Vec<f64> = nodes
        .par_iter()
        .map(|&(theta, w)| {
            let r_max = FuchsianGroup::octagon_boundary_radius(theta);
            let radial = adaptive_gl(|r| f(polar_point(r, theta)) * r.sinh(), 0.0, r_max, 1e-13)?;
            Ok(w * radial)
        })
        .collect::<Result<_>>()?;
    let total: KahanSum = parts.into_iter().collect();
    Ok(total.value() / FuchsianGroup::octagon_area()?)
}

/// Eight interior bumps and four direction harmonics.
pub fn standard_family() -> Vec<TestObservable> {
    let mut family = vec![TestObservable::Bump { center: Point::i(), width: 2.0 }];
    for k in 0..7 {
        let theta = 0.3 + TAU * k as f64 / 7.0;
        family.push(TestObservable::Bump { center: polar_point(0.9, theta), width: 1.2 });
    }
    for (k, phase) in [(1, 0.0), (1, 0.5 * PI), (2, 0.0), (2, 0.5 * PI)] {
        family.push(TestObservable::Direction { k, phase, width: 2.8 });
    }
    family
}

/// A reproducible vector of length `speed` based inside the octagon.
pub fn seeded_vector(seed: u64, speed: f64) -> TangentVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = rng.gen_range(0.0..TAU);
    let r = rng.gen_range(0.0..0.9) * FuchsianGroup::octagon_boundary_radius(theta);
    let base = polar_point(r, theta);
    let dir = rng.gen_range(0.0..TAU);
    TangentVector::new(base, speed * base.y * dir.cos(), speed * base.y * dir.sin())
}

/// One row of an equidistribution series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub length: f64,
    pub discrepancy: f64,
}

/// Max over `family` of `|time average - area mean|` over the orbit prefixes of the given
/// flow-time lengths, all taken from one orbit.
pub fn equidistribution_series(
    group: &FuchsianGroup,
    kind: FlowKind,
    v0: &TangentVector,
    lengths: &[f64],
    step: f64,
    family: &[TestObservable],
) -> Result<Vec<DiscrepancyRow>> {
    if group.surface != Surface::Octagon {
        return Err(Error::InvalidInput("equidistribution needs the compact octagon surface".into()));
    }
    if lengths.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("lengths must be increasing".into()));
    }
    let Some(&last) = lengths.last() else {
        return Ok(Vec::new());
    };
    let means: Vec<f64> = family.iter().map(|f| f.area_mean()).collect::<Result<_>>()?;
    let checkpoints: Vec<usize> = lengths.iter().map(|&l| step_count(l, step)).collect::<Result<_>>()?;
    let mut sums: Vec<KahanSum> = vec![KahanSum::new(); family.len()];
    let mut first = vec![0.0; family.len()];
    let mut rows = Vec::with_capacity(lengths.len());
    let mut next = 0;
    walk(group, kind, v0, step, step_count(last, step)?, |k, v| {
        let values: Vec<f64> = family.iter().map(|f| f.eval(v)).collect();
        if k == 0 {
            first.clone_from(&values);
        }
        while next < checkpoints.len() && checkpoints[next] == k {
            let disc = (0..family.len())
                .map(|j| {
                    let avg = if k == 0 {
                        values[j]
                    } else {
                        // trapezoid: full weights so far, half at both ends
                        (sums[j].value() - 0.5 * first[j] + 0.5 * values[j]) / k as f64
                    };
                    (avg - means[j]).abs()
                })
                .fold(0.0, f64::max);
            rows.push(DiscrepancyRow { length: k as f64 * step, discrepancy: disc });
            next += 1;
        }
        for (s, x) in sums.iter_mut().zip(&values) {
            s.add(*x);
        }
    })?;
    Ok(rows)
}
