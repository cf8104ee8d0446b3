//! Vorticity transport: the viscous advection-diffusion step, the coupled
//! march, the slab Picard construction and the boundary-vorticity extension.

mod extension;
mod march;
mod operators;
mod picard;
mod step;

pub use extension::{validate_delta, ExtensionField};
pub use march::{march_coupled, LevelRecord, Snapshot, StepObserver, StepView, Trajectory};
pub use operators::{boundary_vorticity, cutoff, faces_from_nodes, window_average, History};
pub use picard::{picard_slab, PicardOutcome};
pub use step::{cell_outflow, Scheme, StepStats, Stepper};

use crate::boundary_data::{BoundaryData, Mollifier, Reducer};
use crate::elliptic::{Grid, StreamSolver};
use crate::geometry::DomainGeometry;

/// Geometry, grid, data and the cached elliptic solver of one simulation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub geom: DomainGeometry,
    pub grid: Grid,
    pub reducer: Reducer,
    pub stream: StreamSolver,
}

impl Problem {
    pub fn new(geom: DomainGeometry, grid: Grid, data: BoundaryData, mollifier: Option<Mollifier>) -> Self {
        let stream = StreamSolver::new(&grid);
        let reducer = Reducer::new(geom.clone(), data, mollifier);
        Self {
            geom,
            grid,
            reducer,
            stream,
        }
    }
}

/// Exponents at which norms and boundary rates are recorded on every level.
pub const DEFAULT_P_LIST: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub nu: f64,
    /// Cutoff level `R` (may be infinite).
    pub r_cutoff: f64,
    /// Window length for the Picard construction and mollification width.
    pub theta: f64,
    /// Fixed step; `None` selects `cfl` times the advective limit.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub cfl: f64,
    /// Upper bound on adaptive steps.
    pub max_dt: f64,
    pub scheme: Scheme,
    /// Store a snapshot every this many steps (0 disables; the final state is always kept).
    pub snapshot_every: usize,
    pub p_list: Vec<f64>,
}

impl SolverParams {
    pub fn new(nu: f64, t_end: f64) -> Self {
        Self {
            nu,
            r_cutoff: f64::INFINITY,
            theta: 0.0,
            dt: None,
            t_end,
            cfl: 0.5,
            max_dt: t_end / 100.0,
            scheme: Scheme::Upwind,
            snapshot_every: 0,
            p_list: DEFAULT_P_LIST.to_vec(),
        }
    }

    /// Index of `p` in `p_list`, adding it if missing.
    pub fn ensure_p(&mut self, p: f64) -> usize {
        match self.p_list.iter().position(|&q| q == p) {
            Some(k) => k,
            None => {
                self.p_list.push(p);
                self.p_list.len() - 1
            }
        }
    }
}
