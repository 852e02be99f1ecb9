//! Upper half-plane geometry: points, Möbius maps, tangent vectors, the magnetic
//! Hamiltonian and the closed-form geodesic, horocyclic and hypercyclic flows.
//!
//! Unit tangent vectors are identified with SL(2,R) via `g -> (g(i), g_*(up at i))`;
//! every flow here is right multiplication by a one-parameter subgroup, so the group
//! law holds to rounding. Curvature is signed positive to the left; the magnetic flow
//! with field strength `B > 0` curves to the right.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Dopri5;

const UNIT_TOL: f64 = 1e-9;

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::OutsideHalfPlane(y));
        }
        Ok(Self { x, y })
    }

    pub fn i() -> Self {
        Self { x: 0.0, y: 1.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Cylinder chart `z = i exp(sigma - i beta)`, `|beta| < pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylPoint {
    pub beta: f64,
    pub sigma: f64,
}

impl CylPoint {
    pub fn new(beta: f64, sigma: f64) -> Result<Self> {
        if !(beta.abs() < std::f64::consts::FRAC_PI_2) || !sigma.is_finite() {
            return Err(Error::OutsideChart(beta));
        }
        Ok(Self { beta, sigma })
    }

    pub fn to_point(self) -> Point {
        let r = self.sigma.exp();
        let (s, c) = self.beta.sin_cos();
        Point { x: r * s, y: r * c }
    }

    pub fn from_point(p: Point) -> Self {
        Self { beta: p.x.atan2(p.y), sigma: 0.5 * (p.x * p.x + p.y * p.y).ln() }
    }

    /// Representative with `sigma` in `[0, l)`.
    pub fn reduced(self, l: f64) -> Self {
        Self { sigma: self.sigma.rem_euclid(l), ..self }
    }
}

/// Hyperbolic distance `arcosh(1 + |z - w|^2 / (2 Im z Im w))`.
pub fn distance(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let u = (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    // acosh(1 + u) without cancellation for small u
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

/// `cosh(d(p, q)) - 1`; monotone in the distance and cheaper to compare.
pub fn cosh_distance_minus_one(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    (dx * dx + dy * dy) / (2.0 * p.y * q.y)
}

/// An element of SL(2,R) acting by `z -> (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    /// Checked constructor: `|ad - bc - 1| <= 1e-9`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { a, b, c, d })
    }

    pub const IDENTITY: Mobius = Mobius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Mobius {
        Mobius { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn apply(&self, p: Point) -> Point {
        let w = self.apply_complex(p.to_complex());
        Point { x: w.re, y: w.im }
    }

    /// Complex derivative `1/(cz + d)^2`.
    pub fn derivative(&self, p: Point) -> Complex64 {
        let q = self.c * p.to_complex() + self.d;
        1.0 / (q * q)
    }

    /// Push-forward of a tangent vector.
    pub fn push(&self, v: &TangentVector) -> TangentVector {
        let w = self.derivative(v.base) * Complex64::new(v.vx, v.vy);
        TangentVector { base: self.apply(v.base), vx: w.re, vy: w.im }
    }

    /// Rescales so that the determinant is exactly 1 again (drift control).
    pub fn renormalized(&self) -> Mobius {
        let s = self.det().abs().sqrt();
        Mobius { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    /// Max-abs entry distance to `o`, up to the sign ambiguity of PSL(2,R).
    pub fn projective_distance(&self, o: &Mobius) -> f64 {
        let plus = (self.a - o.a).abs().max((self.b - o.b).abs()).max((self.c - o.c).abs()).max((self.d - o.d).abs());
        let minus = (self.a + o.a).abs().max((self.b + o.b).abs()).max((self.c + o.c).abs()).max((self.d + o.d).abs());
        plus.min(minus)
    }

    pub(crate) fn diag(t: f64) -> Mobius {
        let e = (0.5 * t).exp();
        Mobius { a: e, b: 0.0, c: 0.0, d: 1.0 / e }
    }

    /// Counterclockwise rotation by `theta` about `i`.
    pub(crate) fn rotation(theta: f64) -> Mobius {
        let (s, c) = (0.5 * theta).sin_cos();
        Mobius { a: c, b: s, c: -s, d: c }
    }
}

/// A tangent vector `(vx, vy)` based at a point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Point,
    pub vx: f64,
    pub vy: f64,
}

impl TangentVector {
    pub fn new(base: Point, vx: f64, vy: f64) -> Self {
        Self { base, vx, vy }
    }

    /// Hyperbolic length `sqrt(vx^2 + vy^2) / y`.
    pub fn norm(&self) -> f64 {
        self.vx.hypot(self.vy) / self.base.y
    }

    /// Counterclockwise rotation by `theta`.
    pub fn rotate(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            base: self.base,
            vx: c * self.vx - s * self.vy,
            vy: s * self.vx + c * self.vy,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { base: self.base, vx: factor * self.vx, vy: factor * self.vy }
    }

    /// The SL(2,R) frame of the unit vector in the direction of `self`.
    pub fn frame(&self) -> Result<Mobius> {
        if !(self.norm() > 0.0) {
            return Err(Error::WrongLength { expected: 1.0, actual: self.norm() });
        }
        let sy = self.base.y.sqrt();
        let lift = Mobius { a: sy, b: self.base.x / sy, c: 0.0, d: 1.0 / sy };
        let theta = self.vy.atan2(self.vx) - std::f64::consts::FRAC_PI_2;
        Ok(lift.compose(&Mobius::rotation(theta)))
    }

    /// The vector of hyperbolic length `speed` described by frame `g`.
    pub fn from_frame(g: &Mobius, speed: f64) -> Self {
        let q = Complex64::new(g.d, g.c); // c*i + d
        let dir = Complex64::i() / (q * q);
        let base = g.apply(Point::i());
        // length from the base point rather than det g, which drifts for long flows
        let dir = dir * (speed * base.y / dir.norm());
        Self { base, vx: dir.re, vy: dir.im }
    }

    pub fn distance_to(&self, o: &TangentVector) -> f64 {
        let d = distance(self.base, o.base);
        let dv = ((self.vx - o.vx).hypot(self.vy - o.vy)) / self.base.y;
        d.max(dv)
    }
}

fn require_length(v: &TangentVector, expected: f64) -> Result<()> {
    let actual = v.norm();
    if (actual - expected).abs() > UNIT_TOL * expected.max(1.0) {
        return Err(Error::WrongLength { expected, actual });
    }
    Ok(())
}

/// A covector `(x, y, xi1, xi2)` in the cotangent bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub x: f64,
    pub y: f64,
    pub xi1: f64,
    pub xi2: f64,
}

/// Magnetic Hamiltonian `((y xi1 - B)^2 + (y xi2)^2) / 2`.
pub fn hamiltonian(b: f64, p: &Covector) -> f64 {
    let u = p.y * p.xi1 - b;
    let w = p.y * p.xi2;
    0.5 * (u * u + w * w)
}

/// Velocity map `(x, y, xi1, xi2) -> (x, y, y^2 xi1 - B y, y^2 xi2)`; `|phi_B(p)| = sqrt(2 H_B(p))`.
pub fn to_velocity(b: f64, p: &Covector) -> Result<TangentVector> {
    let base = Point::new(p.x, p.y)?;
    Ok(TangentVector { base, vx: p.y * p.y * p.xi1 - b * p.y, vy: p.y * p.y * p.xi2 })
}

/// Inverse of [`to_velocity`].
pub fn to_covector(b: f64, v: &TangentVector) -> Covector {
    let y = v.base.y;
    Covector { x: v.base.x, y, xi1: (v.vx + b * y) / (y * y), xi2: v.vy / (y * y) }
}

/// Geodesic flow for time `t`; the base point moves at speed `|v|`.
pub fn geodesic_flow(v: &TangentVector, t: f64) -> Result<TangentVector> {
    let speed = v.norm();
    let g = v.frame()?;
    Ok(TangentVector::from_frame(&g.compose(&Mobius::diag(speed * t)), speed))
}

/// Generator of the horocyclic flow: `(-1, 0)` at `i` traces `t -> (-t, 1)`.
pub(crate) fn horocycle_subgroup(t: f64) -> Mobius {
    Mobius { a: 1.0 + 0.5 * t, b: -0.5 * t, c: 0.5 * t, d: 1.0 - 0.5 * t }
}

/// Horocyclic flow on unit vectors: unit speed, curvature 1, curving right.
pub fn horocyclic_flow(v: &TangentVector, t: f64) -> Result<TangentVector> {
    require_length(v, 1.0)?;
    let g = v.frame()?;
    Ok(TangentVector::from_frame(&g.compose(&horocycle_subgroup(t)), 1.0))
}

/// Length of the vectors moved by the `B`-hypercyclic flow.
pub fn hypercycle_speed(b: f64) -> f64 {
    b.hypot(1.0)
}

/// The frame change sending a unit vector to the unit vector at distance
/// `asinh(B)` on its left, pointing parallel to it.
fn left_shift(b: f64) -> Mobius {
    let half_pi = std::f64::consts::FRAC_PI_2;
    Mobius::rotation(half_pi)
        .compose(&Mobius::diag(b.asinh()))
        .compose(&Mobius::rotation(-half_pi))
}

pub(crate) fn hypercycle_subgroup(b: f64, t: f64) -> Mobius {
    let m = left_shift(b);
    m.inverse().compose(&Mobius::diag(t)).compose(&m)
}

/// `B`-hypercyclic flow on vectors of length `sqrt(B^2 + 1)`: geodesic curvature
/// `B / sqrt(B^2 + 1)`, curving right for `B > 0`. Negative `B` gives the mirror flow.
pub fn hypercyclic_flow(v: &TangentVector, b: f64, t: f64) -> Result<TangentVector> {
    let r = hypercycle_speed(b);
    require_length(v, r)?;
    let g = v.frame()?;
    Ok(TangentVector::from_frame(&g.compose(&hypercycle_subgroup(b, t)), r))
}

/// Transport of a unit vector onto the `B`-hypercycle sharing the ideal points of its
/// geodesic: shift by `asinh(B)` to the left, keep the direction, scale by `sqrt(B^2+1)`.
pub fn transport_tb(v: &TangentVector, b: f64) -> Result<TangentVector> {
    require_length(v, 1.0)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let w = v.rotate(half_pi);
    let w = geodesic_flow(&w, b.asinh())?;
    Ok(w.rotate(-half_pi).scale(hypercycle_speed(b)))
}

/// Maximum hyperbolic distance over `samples` points of `[0, t_max]` between the
/// hypercyclic orbit of `T_B v0` and the equidistant curve of the geodesic of `v0`.
pub fn tb_shift_check(v0: &TangentVector, b: f64, t_max: f64, samples: usize) -> Result<f64> {
    require_length(v0, 1.0)?;
    let start = transport_tb(v0, b)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut worst: f64 = 0.0;
    for k in 0..=samples {
        let t = t_max * k as f64 / samples.max(1) as f64;
        let along = geodesic_flow(v0, t)?;
        let off = geodesic_flow(&along.rotate(half_pi), b.asinh())?;
        let hyper = hypercyclic_flow(&start, b, t)?;
        worst = worst.max(distance(off.base, hyper.base));
    }
    Ok(worst)
}

/// Numerical flow of Hamilton's equations for `H_B`, with output at each of `times`.
pub fn hamiltonian_flow(b: f64, p: &Covector, times: &[f64], rtol: f64) -> Result<Vec<Covector>> {
    let solver = Dopri5::<4>::new(rtol, rtol * 1e-3);
    let mut out = Vec::with_capacity(times.len());
    solver.integrate(
        |_, s, ds| {
            let (y, xi1, xi2) = (s[1], s[2], s[3]);
            let u = y * xi1 - b;
            ds[0] = y * u;
            ds[1] = y * y * xi2;
            ds[2] = 0.0;
            ds[3] = -(u * xi1 + y * xi2 * xi2);
        },
        0.0,
        [p.x, p.y, p.xi1, p.xi2],
        times,
        |_, _, s| out.push(Covector { x: s[0], y: s[1], xi1: s[2], xi2: s[3] }),
    )?;
    Ok(out)
}

/// Maximum distance over `samples` times in `[0, t_max]` between the numerical `H_B` flow
/// started at `to_covector(b, v)` and the closed-form flow of `v`: hypercyclic when `|v|`
/// is `sqrt(B^2 + 1)`, horocyclic when `B = 1` and `|v| = 1`.
pub fn conjugacy_deviation(b: f64, v: &TangentVector, t_max: f64, samples: usize) -> Result<f64> {
    let horocyclic = (v.norm() - 1.0).abs() < UNIT_TOL && b == 1.0;
    if !horocyclic {
        require_length(v, hypercycle_speed(b))?;
    }
    let times: Vec<f64> = (1..=samples).map(|k| t_max * k as f64 / samples as f64).collect();
    let numeric = hamiltonian_flow(b, &to_covector(b, v), &times, 1e-12)?;
    let mut worst: f64 = 0.0;
    for (t, p) in times.iter().zip(&numeric) {
        let exact = if horocyclic { horocyclic_flow(v, *t)? } else { hypercyclic_flow(v, b, *t)? };
        worst = worst.max(to_velocity(b, p)?.distance_to(&exact));
    }
    Ok(worst)
}

/// Signed geodesic curvature (positive to the left) and hyperbolic speed of a
/// parametrised curve at `t`, by fourth-order central differences with step `h`.
pub fn curve_curvature(curve: impl Fn(f64) -> Point, t: f64, h: f64) -> (f64, f64) {
    let p = [curve(t - 2.0 * h), curve(t - h), curve(t), curve(t + h), curve(t + 2.0 * h)];
    let d1 = |f: &dyn Fn(&Point) -> f64| (f(&p[0]) - 8.0 * f(&p[1]) + 8.0 * f(&p[3]) - f(&p[4])) / (12.0 * h);
    let d2 = |f: &dyn Fn(&Point) -> f64| {
        (-f(&p[0]) + 16.0 * f(&p[1]) - 30.0 * f(&p[2]) + 16.0 * f(&p[3]) - f(&p[4])) / (12.0 * h * h)
    };
    let (x1, y1) = (d1(&|q| q.x), d1(&|q| q.y));
    let (x2, y2) = (d2(&|q| q.x), d2(&|q| q.y));
    let euclid = x1.hypot(y1);
    let kappa_e = (x1 * y2 - y1 * x2) / euclid.powi(3);
    let y = p[2].y;
    (y * kappa_e + x1 / euclid, euclid / y)
}
