use crate::boundary_data::{BoundaryFunction, ReducedTraces};
use crate::elliptic::{abs_pow, power_sum, velocity_from_stream, ScalarField, VelocityField};
use crate::geometry::ComponentId;
use crate::transport::operators::{boundary_vorticity, cutoff, faces_from_nodes};
use crate::transport::step::{StepStats, Stepper};
use crate::transport::{Problem, SolverParams};
use crate::{Error, Result};

/// Everything known at one time level, before the step that leaves it.
pub struct StepView<'a> {
    pub step: usize,
    pub t: f64,
    /// Length of the step leaving this level (0 on the final level).
    pub dt: f64,
    pub omega: &'a ScalarField,
    pub stream: &'a ScalarField,
    pub velocity: &'a VelocityField,
    /// Outward face fluxes (velocity times face length).
    pub fluxes: &'a BoundaryFunction,
    pub omega_gamma_nodes: &'a BoundaryFunction,
    pub omega_gamma_faces: &'a BoundaryFunction,
    pub reduced: &'a ReducedTraces,
}

/// Receives every level of a march, for on-the-fly estimate accumulation.
pub trait StepObserver {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()>;
}

/// Scalar diagnostics of one level.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub max_abs: f64,
    /// `int |omega|^p` for each exponent of the run's `p_list`.
    pub power_sums: Vec<f64>,
    /// `sum over inflow faces |F| |omega_Gamma|^p`.
    pub inflow_rates: Vec<f64>,
    /// `sum over outflow faces F |omega_cell|^p`.
    pub outflow_rates: Vec<f64>,
    pub gamma_max: f64,
    pub g_max: f64,
    pub vs_max: f64,
    pub omega_gamma_max: f64,
    pub total_vorticity: f64,
    pub max_speed: f64,
    pub stats: StepStats,
}

impl LevelRecord {
    /// Instantaneous right-hand side term `|gamma| |v . s| + |g|` of the maximum principle.
    pub fn boundary_bound(&self) -> f64 {
        self.gamma_max * self.vs_max + self.g_max
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub omega: ScalarField,
    pub stream: ScalarField,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub p_list: Vec<f64>,
    pub nu: f64,
    pub initial: ScalarField,
    pub levels: Vec<LevelRecord>,
    pub snapshots: Vec<Snapshot>,
    pub final_omega: ScalarField,
    pub final_stream: ScalarField,
    pub final_velocity: VelocityField,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.t)
    }

    pub fn p_index(&self, p: f64) -> Option<usize> {
        self.p_list.iter().position(|&q| q == p)
    }
}

/// Per-level quantities derived from `(omega, h)` and the reduced data.
pub(crate) struct Level {
    pub stream: ScalarField,
    pub velocity: VelocityField,
    pub fluxes: BoundaryFunction,
    pub omega_gamma_nodes: BoundaryFunction,
    pub omega_gamma_faces: BoundaryFunction,
}

pub(crate) fn level_from_source(problem: &Problem, source: &ScalarField, reduced: &ReducedTraces) -> Result<Level> {
    let stream = problem.stream.solve_stream(source, &reduced.stream, &problem.geom)?;
    let velocity = velocity_from_stream(&stream, &problem.grid, &problem.geom);
    let fluxes = velocity.boundary_fluxes(&problem.geom);
    let omega_gamma_nodes = boundary_vorticity(&velocity.tangential, reduced);
    let omega_gamma_faces = faces_from_nodes(&omega_gamma_nodes);
    Ok(Level {
        stream,
        velocity,
        fluxes,
        omega_gamma_nodes,
        omega_gamma_faces,
    })
}

pub(crate) fn record_level(
    problem: &Problem,
    p_list: &[f64],
    step: usize,
    t: f64,
    dt: f64,
    omega: &ScalarField,
    level: &Level,
    reduced: &ReducedTraces,
) -> LevelRecord {
    let g = &problem.grid;
    let geom = &problem.geom;
    let power_sums = p_list.iter().map(|&p| power_sum(g, omega, p)).collect();
    let mut inflow_rates = vec![0.0; p_list.len()];
    let mut outflow_rates = vec![0.0; p_list.len()];
    for id in ComponentId::ALL {
        let c = geom.component(id);
        let row = match id {
            ComponentId::Outer => g.nr - 1,
            ComponentId::Inner => 0,
        };
        for k in 0..c.n_nodes {
            let f = level.fluxes.get(id)[k];
            if f < 0.0 {
                let w = level.omega_gamma_faces.get(id)[k].abs();
                for (rate, &p) in inflow_rates.iter_mut().zip(p_list) {
                    *rate += -f * abs_pow(w, p);
                }
            } else if f > 0.0 {
                let w = omega.at(row, c.face_column(k)).abs();
                for (rate, &p) in outflow_rates.iter_mut().zip(p_list) {
                    *rate += f * abs_pow(w, p);
                }
            }
        }
    }
    let total_vorticity = (0..g.nr).map(|i| g.cell_area(i) * omega.row(i).iter().sum::<f64>()).sum();
    LevelRecord {
        step,
        t,
        dt,
        max_abs: omega.max_abs(),
        power_sums,
        inflow_rates,
        outflow_rates,
        gamma_max: reduced.gamma.max_abs(),
        g_max: reduced.g.max_abs(),
        vs_max: level.velocity.tangential.max_abs(),
        omega_gamma_max: level.omega_gamma_nodes.max_abs(),
        total_vorticity,
        max_speed: level.velocity.max_speed(g),
        stats: StepStats::default(),
    }
}

/// Step length leaving time `t`.
pub(crate) fn choose_dt(params: &SolverParams, stepper: &Stepper, velocity: &VelocityField, t: f64) -> f64 {
    let remaining = params.t_end - t;
    let dt = match params.dt {
        Some(dt) => dt,
        None => (params.cfl * stepper.advective_limit(velocity)).min(params.max_dt),
    };
    if dt >= remaining * (1.0 - 1e-9) {
        remaining
    } else {
        dt
    }
}

pub(crate) fn is_final(params: &SolverParams, t: f64) -> bool {
    t >= params.t_end - 1e-12 * params.t_end.max(1.0)
}

/// March `omega` with the velocity of the instantaneous (clamped) vorticity.
pub fn march_coupled(problem: &Problem, params: &SolverParams, observers: &mut [&mut dyn StepObserver]) -> Result<Trajectory> {
    let stepper = Stepper::new(&problem.grid, &problem.geom, params.scheme);
    let initial = problem.reducer.initial_vorticity(&problem.grid);
    let mut omega = initial.clone();
    let mut t = 0.0;
    let mut step = 0;
    let mut levels = Vec::new();
    let mut snapshots = Vec::new();
    loop {
        let reduced = problem.reducer.reduced_at(t)?;
        let level = level_from_source(problem, &cutoff(&omega, params.r_cutoff), &reduced)?;
        let last = is_final(params, t);
        let dt = if last {
            0.0
        } else {
            choose_dt(params, &stepper, &level.velocity, t)
        };
        let view = StepView {
            step,
            t,
            dt,
            omega: &omega,
            stream: &level.stream,
            velocity: &level.velocity,
            fluxes: &level.fluxes,
            omega_gamma_nodes: &level.omega_gamma_nodes,
            omega_gamma_faces: &level.omega_gamma_faces,
            reduced: &reduced,
        };
        for obs in observers.iter_mut() {
            obs.observe(&view)?;
        }
        let mut record = record_level(problem, &params.p_list, step, t, dt, &omega, &level, &reduced);
        if params.snapshot_every > 0 && step % params.snapshot_every == 0 || last {
            snapshots.push(Snapshot {
                step,
                t,
                omega: omega.clone(),
                stream: level.stream.clone(),
            });
        }
        if last {
            levels.push(record);
            return Ok(Trajectory {
                p_list: params.p_list.clone(),
                nu: params.nu,
                initial,
                levels,
                snapshots,
                final_omega: omega,
                final_stream: level.stream,
                final_velocity: level.velocity,
            });
        }
        let (next, stats) = stepper.step(&omega, &level.velocity, &level.omega_gamma_faces, params.nu, dt)?;
        if !next.is_finite() {
            return Err(Error::NanDetected { step: step + 1, t: t + dt });
        }
        record.stats = stats;
        levels.push(record);
        omega = next;
        t += dt;
        step += 1;
    }
}
