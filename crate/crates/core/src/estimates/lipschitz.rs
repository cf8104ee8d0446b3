use crate::boundary_data::BoundaryFunction;
use crate::elliptic::{discrete_norm, gradient_at_cells, Grid, ScalarField};
use crate::estimates::report::{CheckContext, EstimateEntry};
use crate::transport::Problem;
use crate::Result;

/// Bound on `max/min` of the difference quotients for the check to pass.
pub const LIPSCHITZ_SPREAD: f64 = 10.0;

/// Stream function of `omega` with zero boundary values.
pub fn zero_boundary_stream(problem: &Problem, omega: &ScalarField) -> Result<ScalarField> {
    problem
        .stream
        .solve_stream(omega, &BoundaryFunction::zeros(problem.grid.ns), &problem.geom)
}

/// `||grad a - grad b||_p` over cells.
pub fn gradient_distance(grid: &Grid, a: &ScalarField, b: &ScalarField, p: f64) -> f64 {
    let (ar, ap) = gradient_at_cells(a, grid);
    let (br, bp) = gradient_at_cells(b, grid);
    let dr = ar.zip_map(&br, |x, y| x - y);
    let dp = ap.zip_map(&bp, |x, y| x - y);
    discrete_norm(grid, &dr.zip_map(&dp, f64::hypot), p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzOutcome {
    pub deltas: Vec<f64>,
    /// `||grad h1(t + delta) - grad h1(t)||_p / delta`.
    pub ratios: Vec<f64>,
    pub entry: EstimateEntry,
}

/// Difference quotients of `grad h1` between `base` (at time `t`) and each `(delta, h1(t + delta))`.
/// Passes when all quotients vanish or when `max/min < 10`.
pub fn time_lipschitz_check(
    grid: &Grid,
    ctx: &CheckContext,
    t: f64,
    base: &ScalarField,
    shifted: &[(f64, ScalarField)],
    p: f64,
) -> LipschitzOutcome {
    let deltas: Vec<f64> = shifted.iter().map(|(d, _)| *d).collect();
    let ratios: Vec<f64> = shifted.iter().map(|(d, h)| gradient_distance(grid, h, base, p) / d.abs()).collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let (spread, pass) = if max == 0.0 {
        (0.0, true)
    } else if min > 0.0 {
        (max / min, max / min < LIPSCHITZ_SPREAD)
    } else {
        (f64::INFINITY, false)
    };
    let entry = EstimateEntry::new("time_lipschitz", ctx, spread, LIPSCHITZ_SPREAD, pass)
        .at_time(t)
        .with_p(p);
    LipschitzOutcome { deltas, ratios, entry }
}
