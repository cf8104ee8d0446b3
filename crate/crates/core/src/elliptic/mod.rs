//! Stream-function solve, velocity recovery and boundary diagnostics.

mod diagnostics;
mod grid;
mod poisson;
mod velocity;

pub use diagnostics::{normal_trace_error, omega_trace, slip_residual, SlipResidual};
pub use grid::{abs_pow, discrete_norm, l2_distance, power_sum, Grid, Layout, Quantity, ScalarField};
pub use poisson::{boundary_rows, cells_to_nodes, StreamSolver};
pub use velocity::{gradient_at_cells, velocity_from_stream, VelocityField};
