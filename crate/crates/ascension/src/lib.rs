//! Ascension of Laplace eigenfunctions to magnetic eigenfunctions on hyperbolic
//! surfaces, and the transport of their semiclassical measures from geodesics onto
//! hypercycles.

pub mod ergodics;
pub mod error;
pub mod fuchsian;
pub mod harmonics;
pub mod hyperbolic;
pub mod numerics;
pub mod phase;
pub mod semiclassical;
pub mod whittaker;

pub use error::{Error, Result};
pub use hyperbolic::{Covector, CylPoint, Mobius, Point, TangentVector};
