use crate::elliptic::{l2_distance, ScalarField};
use crate::transport::march::{level_from_source, record_level, Snapshot, StepObserver, StepView, Trajectory};
use crate::transport::operators::{window_average, History};
use crate::transport::step::Stepper;
use crate::transport::{Problem, SolverParams};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub iterations: usize,
    /// `sup_n ||omega^(k+1)(t_n) - omega^(k)(t_n)||_2` per iteration.
    pub diffs: Vec<f64>,
    /// Successive quotients of `diffs`.
    pub ratios: Vec<f64>,
    pub times: Vec<f64>,
    pub fields: Vec<ScalarField>,
    pub trajectory: Trajectory,
}

impl PicardOutcome {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().cloned().fold(0.0, f64::max)
    }
}

/// Fixed-point iteration over whole slab trajectories: the velocity at `t`
/// comes from the forward window average of the previous iterate, and the
/// advection-diffusion problem is re-solved over `[0, t_end]`.
pub fn picard_slab(
    problem: &Problem,
    params: &SolverParams,
    max_iters: usize,
    tol: f64,
    observers: &mut [&mut dyn StepObserver],
) -> Result<PicardOutcome> {
    if params.theta <= 0.0 {
        return Err(Error::BadTheta {
            theta: params.theta,
            max: problem.geom.sigma0().min(params.t_end / 4.0),
        });
    }
    if params.nu <= 0.0 {
        return Err(Error::Validation(vec![format!("picard mode needs nu > 0, got {}", params.nu)]));
    }
    let stepper = Stepper::new(&problem.grid, &problem.geom, params.scheme);
    let initial = problem.reducer.initial_vorticity(&problem.grid);
    let times = time_levels(problem, params, &stepper, &initial)?;

    let mut current = History {
        times: times.clone(),
        fields: vec![initial.clone(); times.len()],
    };
    let mut diffs = Vec::new();
    let mut ratios = Vec::new();
    for k in 0..max_iters {
        let (fields, trajectory) = sweep(problem, params, &stepper, &current, &initial, &mut [])?;
        let diff = fields
            .iter()
            .zip(&current.fields)
            .map(|(a, b)| l2_distance(&problem.grid, a, b))
            .fold(0.0, f64::max);
        if let Some(&prev) = diffs.last() {
            ratios.push(if prev > 0.0 { diff / prev } else { 0.0 });
        }
        diffs.push(diff);
        current.fields = fields;
        if diff < tol {
            // one more application produces the reported trajectory and feeds the observers
            let trajectory = if observers.is_empty() {
                trajectory
            } else {
                sweep(problem, params, &stepper, &current, &initial, observers)?.1
            };
            return Ok(PicardOutcome {
                iterations: k + 1,
                diffs,
                ratios,
                times,
                fields: current.fields,
                trajectory,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        last_diff: diffs.last().copied().unwrap_or(f64::NAN),
        ratio: ratios.last().copied().unwrap_or(f64::NAN),
    })
}

fn time_levels(problem: &Problem, params: &SolverParams, stepper: &Stepper, initial: &ScalarField) -> Result<Vec<f64>> {
    let dt = match params.dt {
        Some(dt) => dt,
        None => {
            let reduced = problem.reducer.reduced_at(0.0)?;
            let level = level_from_source(problem, initial, &reduced)?;
            (0.5 * params.cfl * stepper.advective_limit(&level.velocity)).min(params.max_dt)
        }
    };
    let n = (params.t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    times.push(params.t_end);
    Ok(times)
}

fn sweep(
    problem: &Problem,
    params: &SolverParams,
    stepper: &Stepper,
    iterate: &History,
    initial: &ScalarField,
    observers: &mut [&mut dyn StepObserver],
) -> Result<(Vec<ScalarField>, Trajectory)> {
    let times = &iterate.times;
    let n_levels = times.len();
    let mut fields = Vec::with_capacity(n_levels);
    fields.push(initial.clone());
    let mut levels = Vec::with_capacity(n_levels);
    let mut snapshots = Vec::new();
    for n in 0..n_levels {
        let t = times[n];
        let last = n + 1 == n_levels;
        let dt = if last { 0.0 } else { times[n + 1] - t };
        let reduced = problem.reducer.reduced_at(t)?;
        let source = window_average(iterate, t, params.theta, params.r_cutoff, params.t_end)?;
        let level = level_from_source(problem, &source, &reduced)?;
        let omega = &fields[n];
        let view = StepView {
            step: n,
            t,
            dt,
            omega,
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
        let mut record = record_level(problem, &params.p_list, n, t, dt, omega, &level, &reduced);
        if params.snapshot_every > 0 && n % params.snapshot_every == 0 || last {
            snapshots.push(Snapshot {
                step: n,
                t,
                omega: omega.clone(),
                stream: level.stream.clone(),
            });
        }
        if last {
            levels.push(record);
            let trajectory = Trajectory {
                p_list: params.p_list.clone(),
                nu: params.nu,
                initial: initial.clone(),
                levels,
                snapshots,
                final_omega: omega.clone(),
                final_stream: level.stream,
                final_velocity: level.velocity,
            };
            return Ok((fields, trajectory));
        }
        let (next, stats) = stepper.step(omega, &level.velocity, &level.omega_gamma_faces, params.nu, dt)?;
        if !next.is_finite() {
            return Err(Error::NanDetected { step: n + 1, t: t + dt });
        }
        record.stats = stats;
        levels.push(record);
        fields.push(next);
    }
    unreachable!("time grid has at least two levels")
}
