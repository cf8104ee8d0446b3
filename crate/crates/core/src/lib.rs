//! Vorticity / stream-function simulation of 2D incompressible flow through a
//! bounded domain with prescribed normal flux and Navier slip data, together
//! with numerical checks of the a priori estimates that accompany the
//! vanishing-viscosity construction.
//!
//! Layout:
//! - [`geometry`]: annulus/disk domains, arc-length frames, signed distance.
//! - [`boundary_data`]: raw `(a, alpha, b)` traces and the reduced `(gamma, g, A)`.
//! - [`elliptic`]: polar grid, fields, the stream-function solve and boundary diagnostics.
//! - [`transport`]: vorticity advection-diffusion, marching and Picard slab modes.
//! - [`estimates`]: inequality checks and the per-run report.
//! - [`config`] / [`run`]: configuration parsing and run orchestration used by the CLI.

pub mod boundary_data;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod io;
pub mod par;
pub mod run;
pub mod scenario;
pub mod transport;

mod fourier;

pub use error::{Error, Result};

/// Cubic smoothstep on `[0, 1]`, clamped outside.
#[inline]
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}
