//! Fuchsian groups used as test surfaces: the hyperbolic cylinder `<diag(e^{l/2}, e^{-l/2})>`
//! and the genus-two surface glued from the regular octagon with angles `pi/4`.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{cosh_distance_minus_one, Mobius, Point};
use crate::numerics::adaptive_gl;

/// Step budget of the greedy reduction.
pub const REDUCTION_GUARD: usize = 10_000;

/// Automorphy factor `((cz + d)/(c conj(z) + d))^tau` on the principal branch.
///
/// It has unit modulus, satisfies the cocycle identity and is insensitive to the
/// sign of the matrix for integer `tau`.
pub fn automorphy_factor(g: &Mobius, z: Point, tau: f64) -> Complex64 {
    let q = Complex64::new(g.c * z.x + g.d, g.c * z.y);
    Complex64::from_polar(1.0, 2.0 * tau * q.arg())
}

/// The surfaces available to the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Surface {
    /// Hyperbolic cylinder with closed geodesic of length `l`.
    Cylinder { l: f64 },
    /// Compact genus-two surface from the regular octagon.
    Octagon,
}

impl std::str::FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "octagon" {
            return Ok(Surface::Octagon);
        }
        if let Some(rest) = s.strip_prefix("cylinder:") {
            let l: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad cylinder length `{rest}`")))?;
            if !(l > 0.0) {
                return Err(Error::InvalidInput("cylinder length must be positive".into()));
            }
            return Ok(Surface::Cylinder { l });
        }
        Err(Error::InvalidInput(format!("unknown surface `{s}` (expected cylinder:<l> or octagon)")))
    }
}

/// A discrete group together with its reduction to a fundamental domain.
#[derive(Debug, Clone)]
pub struct FuchsianGroup {
    pub surface: Surface,
    /// For the octagon: eight side pairings, `generators[k]` maps side `k` onto side
    /// `k + 4` and `generators[k + 4]` is its inverse. For the cylinder: the single
    /// generator.
    pub generators: Vec<Mobius>,
}

/// Distance from the octagon centre `i` to the midpoint of each side.
pub fn octagon_inradius() -> f64 {
    (1.0 / FRAC_PI_8.tan()).acosh()
}

/// Distance from the octagon centre `i` to each vertex.
pub fn octagon_circumradius() -> f64 {
    (1.0 / (FRAC_PI_8.tan() * FRAC_PI_8.tan())).acosh()
}

/// The point at hyperbolic distance `r` from `i` in direction `theta`
/// (measured counterclockwise from straight up).
pub fn polar_point(r: f64, theta: f64) -> Point {
    Mobius::rotation(theta).compose(&Mobius::diag(r)).apply(Point::i())
}

fn translation_towards(theta: f64, len: f64) -> Mobius {
    Mobius::rotation(theta)
        .compose(&Mobius::diag(len))
        .compose(&Mobius::rotation(-theta))
}

impl FuchsianGroup {
    pub fn new(surface: Surface) -> Result<Self> {
        match surface {
            Surface::Cylinder { l } => {
                if !(l > 0.0) {
                    return Err(Error::InvalidInput("cylinder length must be positive".into()));
                }
                Ok(Self { surface, generators: vec![Mobius::diag(l)] })
            }
            Surface::Octagon => {
                let len = 2.0 * octagon_inradius();
                let generators = (0..8)
                    .map(|k| translation_towards(k as f64 * FRAC_PI_4 + PI, len))
                    .collect();
                Ok(Self { surface, generators })
            }
        }
    }

    /// Vertices of the octagon, vertex `k` joining side `k` and side `k + 1`.
    pub fn octagon_vertices() -> [Point; 8] {
        let r = octagon_circumradius();
        std::array::from_fn(|k| polar_point(r, k as f64 * FRAC_PI_4 + FRAC_PI_8))
    }

    /// Endpoints of side `k`, ordered counterclockwise.
    pub fn octagon_side(k: usize) -> (Point, Point) {
        let v = Self::octagon_vertices();
        (v[(k + 7) % 8], v[k % 8])
    }

    /// Product `t0 t3 t6 t1 t4 t7 t2 t5` of side pairings; equals `±I` for the
    /// genus-two gluing.
    pub fn octagon_relator(&self) -> Mobius {
        [0usize, 3, 6, 1, 4, 7, 2, 5]
            .iter()
            .fold(Mobius::IDENTITY, |acc, &k| acc.compose(&self.generators[k]))
    }

    /// Area of the octagon from hyperbolic polar coordinates around its centre.
    pub fn octagon_area() -> Result<f64> {
        let rho_tanh = octagon_inradius().tanh();
        // one sector between the side normal and a vertex, times 16
        let sector = adaptive_gl(
            |phi| {
                let r = (rho_tanh / phi.cos()).atanh();
                r.cosh() - 1.0
            },
            0.0,
            FRAC_PI_8,
            1e-13,
        )?;
        Ok(16.0 * sector)
    }

    /// Distance from the centre to the octagon boundary in direction `theta`.
    pub fn octagon_boundary_radius(theta: f64) -> f64 {
        let rel = (theta / FRAC_PI_4).round() * FRAC_PI_4;
        let phi = theta - rel;
        (octagon_inradius().tanh() / phi.cos()).atanh()
    }

    /// Whether `z` lies in the closed fundamental domain (up to `tol` in `cosh d`).
    pub fn contains(&self, z: Point, tol: f64) -> bool {
        match self.surface {
            Surface::Cylinder { l } => {
                let sigma = 0.5 * (z.x * z.x + z.y * z.y).ln();
                sigma >= -tol && sigma <= l + tol
            }
            Surface::Octagon => {
                let u = cosh_distance_minus_one(z, Point::i());
                self.generators
                    .iter()
                    .all(|g| cosh_distance_minus_one(g.apply(z), Point::i()) >= u - tol)
            }
        }
    }

    /// Reduces `z` into the fundamental domain. Returns `(w, gamma)` with `gamma(w) = z`.
    ///
    /// Octagon: greedy descent of the distance to the centre; points on the boundary
    /// are moved to the side with the smaller index.
    pub fn reduce(&self, z: Point) -> Result<(Point, Mobius)> {
        if !(z.y > 0.0) {
            return Err(Error::OutsideHalfPlane(z.y));
        }
        match self.surface {
            Surface::Cylinder { l } => {
                let sigma = 0.5 * (z.x * z.x + z.y * z.y).ln();
                let k = (sigma / l).floor();
                let gamma = Mobius::diag(k * l);
                Ok((gamma.inverse().apply(z), gamma))
            }
            Surface::Octagon => self.reduce_octagon(z),
        }
    }

    fn reduce_octagon(&self, z: Point) -> Result<(Point, Mobius)> {
        let mut w = z;
        let mut gamma = Mobius::IDENTITY;
        let centre = Point::i();
        for _ in 0..REDUCTION_GUARD {
            let u = cosh_distance_minus_one(w, centre);
            let mut best = None;
            let mut best_u = u;
            for (k, g) in self.generators.iter().enumerate() {
                let cand = cosh_distance_minus_one(g.apply(w), centre);
                if cand < best_u * (1.0 - 1e-13) - 1e-15 {
                    best_u = cand;
                    best = Some(k);
                }
            }
            match best {
                Some(k) => {
                    w = self.generators[k].apply(w);
                    gamma = gamma.compose(&self.generators[(k + 4) % 8]);
                }
                None => return Ok(self.break_ties(w, gamma)),
            }
        }
        Err(Error::ReductionGuard(REDUCTION_GUARD))
    }

    fn break_ties(&self, mut w: Point, mut gamma: Mobius) -> (Point, Mobius) {
        let centre = Point::i();
        for _ in 0..16 {
            let u = cosh_distance_minus_one(w, centre);
            let tol = 1e-12 * (1.0 + u);
            // generators[k] maps side k to side k - 4 for k >= 4
            let moved = (4..8).find(|&k| {
                (cosh_distance_minus_one(self.generators[k].apply(w), centre) - u).abs() <= tol
            });
            match moved {
                Some(k) => {
                    w = self.generators[k].apply(w);
                    gamma = gamma.compose(&self.generators[k - 4]);
                }
                None => break,
            }
        }
        (w, gamma)
    }

    /// Reduces a frame (unit tangent vector as an SL(2,R) element): returns
    /// `gamma^{-1} g` whose base point lies in the fundamental domain.
    pub fn reduce_frame(&self, g: &Mobius) -> Result<Mobius> {
        let (_, gamma) = self.reduce(g.apply(Point::i()))?;
        Ok(gamma.inverse().compose(g))
    }
}
