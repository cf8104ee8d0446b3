//! Run orchestration: one simulation with its checks and artifacts, and parameter sweeps.

use std::path::{Path, PathBuf};

use crate::config::{Mode, RunConfig};
use crate::elliptic::{Grid, ScalarField};
use crate::estimates::{
    budget_series, discrete_gronwall_bound, gronwall_series, lp_budget, max_principle_check, p_infinity_sweep, time_lipschitz_check,
    viscosity_sweep_report, zero_boundary_stream, BudgetMode, CheckContext, EstimateEntry, EstimateReport, GronwallObserver,
    GronwallSample, StripObserver, TestFunction, WeakFormObserver,
};
use crate::io::{save_snapshot, write_log};
use crate::transport::{cutoff, march_coupled, picard_slab, ExtensionField, Problem, SolverParams, StepObserver, StepView, Trajectory};
use crate::{Error, Result};

/// Relative tolerance of the flux-equality check.
pub const EQUALITY_TOLERANCE: f64 = 0.05;

/// Captures `omega` at fixed step offsets after the first level at or beyond `t_base`.
struct LevelCapture {
    t_base: f64,
    offsets: Vec<usize>,
    base_step: Option<usize>,
    captured: Vec<(f64, ScalarField)>,
}

impl StepObserver for LevelCapture {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        if self.base_step.is_none() && view.t >= self.t_base {
            self.base_step = Some(view.step);
        }
        if let Some(b) = self.base_step {
            if view.step == b || self.offsets.contains(&(view.step - b)) {
                self.captured.push((view.t, view.omega.clone()));
            }
        }
        Ok(())
    }
}

/// A finished simulation and the on-the-fly measurements attached to it.
pub struct Simulation {
    pub problem: Problem,
    pub params: SolverParams,
    pub trajectory: Trajectory,
    pub gronwall: Option<Vec<GronwallSample>>,
    /// `(test function, signed residual)`.
    pub weak_form: Option<Vec<(TestFunction, f64)>>,
    /// `(sigma, value)` for the boundary strip and `(sigma_t, value)` for the initial strip.
    pub strip: Option<(Vec<(f64, f64)>, Vec<(f64, f64)>)>,
    pub captures: Vec<(f64, ScalarField)>,
    /// Picard differences per iteration.
    pub picard_diffs: Option<Vec<f64>>,
}

/// Space widths of the strip functional: `2, 8, 16, 32` cell widths, kept below `sigma0 / 2`.
pub fn strip_sigmas(problem: &Problem) -> Vec<f64> {
    let dr = problem.grid.dr;
    let max = 0.5 * problem.geom.sigma0();
    [2.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|m| m * dr)
        .filter(|&s| 2.0 * s <= 2.0 * max)
        .collect()
}

/// Blend width of the extension field: `theta` (where the mollified initial vorticity
/// vanishes, so the extension matches it at `t = 0`), capped at `sigma0 / 2`.
pub fn extension_delta(problem: &Problem, theta: f64) -> f64 {
    let max = 0.5 * problem.geom.sigma0();
    if theta > 0.0 {
        theta.min(max)
    } else {
        max
    }
}

/// Simulate at `nr x ns` with viscosity `nu` and window `theta`, attaching the observers
/// required by the enabled checks when `with_checks` is set.
pub fn simulate(cfg: &RunConfig, nr: usize, ns: usize, nu: f64, theta: f64, with_checks: bool) -> Result<Simulation> {
    let problem = cfg.problem(nr, ns, theta)?;
    let params = cfg.solver_params(nu, theta);
    let t_end = params.t_end;
    let on = |name: &str| with_checks && cfg.check_enabled(name);

    let mut gronwall = on("gronwall").then(|| GronwallObserver::new(&problem.grid, &problem.geom, cfg.solver.p));
    let mut weak =
        on("weak_form").then(|| WeakFormObserver::new(&problem.grid, &problem.geom, TestFunction::defaults(&problem.geom, t_end), nu));
    let mut strip = if on("strip") {
        let omega0 = problem.reducer.initial_vorticity(&problem.grid);
        let ext = ExtensionField::new(extension_delta(&problem, theta), theta, omega0, &problem.geom)?;
        let dt = params.dt.unwrap_or(params.max_dt);
        let psi = TestFunction::outer_collar(&problem.geom, t_end, 0.1 * t_end);
        Some(StripObserver::new(
            &problem.grid,
            &problem.geom,
            ext,
            psi,
            cfg.solver.p,
            strip_sigmas(&problem),
            vec![4.0 * dt, 8.0 * dt, 16.0 * dt],
        ))
    } else {
        None
    };
    let mut capture = on("time_lipschitz").then(|| LevelCapture {
        t_base: 0.5 * t_end,
        offsets: vec![2, 4, 8, 16],
        base_step: None,
        captured: Vec::new(),
    });

    let mut observers: Vec<&mut dyn StepObserver> = Vec::new();
    if let Some(o) = gronwall.as_mut() {
        observers.push(o);
    }
    if let Some(o) = weak.as_mut() {
        observers.push(o);
    }
    if let Some(o) = strip.as_mut() {
        observers.push(o);
    }
    if let Some(o) = capture.as_mut() {
        observers.push(o);
    }

    let (trajectory, picard_diffs) = match cfg.solver.mode {
        Mode::Picard if nu > 0.0 => {
            let out = picard_slab(
                &problem,
                &params,
                cfg.solver.picard_max_iters,
                cfg.solver.picard_tol,
                &mut observers,
            )?;
            (out.trajectory, Some(out.diffs))
        }
        _ => (march_coupled(&problem, &params, &mut observers)?, None),
    };
    drop(observers);

    let weak_form = weak.map(|w| w.psis.iter().cloned().zip(w.residuals().iter().cloned()).collect());
    let strip = strip.map(|s| {
        let flux = s.sigmas.iter().cloned().zip(s.flux_values().iter().cloned()).collect();
        let time = s.time_sigmas.iter().cloned().zip(s.time_values()).collect();
        (flux, time)
    });
    Ok(Simulation {
        problem,
        params,
        trajectory,
        gronwall: gronwall.map(|g| g.samples),
        weak_form,
        strip,
        captures: capture.map(|c| c.captured).unwrap_or_default(),
        picard_diffs,
    })
}

/// Linear interpolation of `(t, v)` samples at `t`.
fn interpolate(series: &[(f64, f64)], t: f64) -> f64 {
    match series.iter().position(|&(s, _)| s >= t) {
        None => series.last().map_or(0.0, |p| p.1),
        Some(0) => series[0].1,
        Some(k) => {
            let (t0, v0) = series[k - 1];
            let (t1, v1) = series[k];
            v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        }
    }
}

/// `rhs - lhs` of the budget inequality at every level.
fn budget_slack(traj: &Trajectory, p: f64) -> Result<Vec<(f64, f64)>> {
    Ok(budget_series(traj, p)?
        .iter()
        .map(|b| (b.t0, b.initial_norm + b.influx - b.final_norm))
        .collect())
}

/// Evaluate the enabled checks. `coarse` is a companion run at half resolution used for the
/// discretisation slack of the budget.
pub fn evaluate(cfg: &RunConfig, sim: &Simulation, coarse: Option<&Trajectory>) -> Result<EstimateReport> {
    let traj = &sim.trajectory;
    let grid = &sim.problem.grid;
    let p = cfg.solver.p;
    let ctx = CheckContext::new(sim.params.nu, sim.params.theta, grid.label());
    let mut report = EstimateReport::default();

    if cfg.check_enabled("max_principle") {
        report.push(max_principle_check(traj, &ctx));
    }
    if cfg.check_enabled("lp_budget") {
        let fine = budget_slack(traj, p)?;
        let coarse = coarse.map(|c| budget_slack(c, p)).transpose()?;
        let mut worst: Option<EstimateEntry> = None;
        for &(t, _) in &fine {
            let eps = coarse.as_ref().map_or(0.0, |c| (interpolate(&fine, t) - interpolate(c, t)).abs());
            let (entry, _) = lp_budget(traj, &ctx, p, t, BudgetMode::Inequality, eps)?;
            let replace = match &worst {
                None => true,
                Some(w) => (entry.pass, entry.slack) < (w.pass, w.slack),
            };
            if replace {
                worst = Some(entry);
            }
        }
        report.extend(EstimateReport {
            entries: worst.into_iter().collect(),
        });
    }
    if cfg.check_enabled("lp_flux_equality") {
        let (entry, _) = lp_budget(
            traj,
            &ctx,
            p,
            traj.final_time(),
            BudgetMode::Equality {
                tolerance: EQUALITY_TOLERANCE,
            },
            0.0,
        )?;
        report.push(entry);
    }
    if cfg.check_enabled("q_sweep") {
        let q_list: Vec<f64> = traj.p_list.iter().cloned().filter(|&q| q > 2.0).collect();
        report.extend(p_infinity_sweep(
            traj,
            grid,
            &ctx,
            &traj.final_omega,
            traj.final_time(),
            &q_list,
            0.0,
        )?);
    }
    if let Some(samples) = &sim.gronwall {
        let theta = if sim.params.theta > 0.0 {
            sim.params.theta
        } else {
            sim.params.max_dt
        };
        let series = gronwall_series(samples, p, theta);
        let entry = match discrete_gronwall_bound(&series.times, &series.y, &series.d, &series.b, theta, sim.params.t_end) {
            Ok(out) => {
                let k = out
                    .bound
                    .iter()
                    .zip(&out.y)
                    .enumerate()
                    .min_by(|a, b| (a.1 .0 - a.1 .1).total_cmp(&(b.1 .0 - b.1 .1)))
                    .map_or(0, |(k, _)| k);
                EstimateEntry::new("gronwall", &ctx, out.y[k], out.bound[k], out.pass).at_time(out.times[k])
            }
            Err(Error::HypothesisFailed { t, lhs, rhs }) => EstimateEntry::new("gronwall_hypothesis", &ctx, lhs, rhs, false).at_time(t),
            Err(e) => return Err(e),
        };
        report.push(entry.with_p(p));
    }
    if sim.captures.len() >= 2 {
        let h1 = |w: &ScalarField| zero_boundary_stream(&sim.problem, &cutoff(w, sim.params.r_cutoff));
        let (t_base, base) = &sim.captures[0];
        let base = h1(base)?;
        let shifted = sim.captures[1..]
            .iter()
            .map(|(t, w)| Ok((t - t_base, h1(w)?)))
            .collect::<Result<Vec<_>>>()?;
        report.push(time_lipschitz_check(grid, &ctx, *t_base, &base, &shifted, p).entry);
    }
    if let Some(residuals) = &sim.weak_form {
        for (k, (_, r)) in residuals.iter().enumerate() {
            let mut e = EstimateEntry::new(&format!("weak_form_{k}"), &ctx, r.abs(), f64::NAN, r.is_finite());
            e.slack = f64::NAN;
            report.push(e.at_time(traj.final_time()));
        }
    }
    if let Some((flux, time)) = &sim.strip {
        for &(sigma, v) in flux {
            let mut e = EstimateEntry::new("strip_flux", &ctx, v, f64::NAN, v.is_finite())
                .with_sigma(sigma)
                .with_p(p);
            e.slack = f64::NAN;
            report.push(e);
        }
        for &(sigma, v) in time {
            let mut e = EstimateEntry::new("time_strip", &ctx, v, f64::NAN, v.is_finite())
                .with_sigma(sigma)
                .with_p(p);
            e.slack = f64::NAN;
            report.push(e);
        }
    }
    Ok(report)
}

/// Write the resolved config, snapshots, `log.csv` and `report.csv` of one run into `dir`.
pub fn write_artifacts(cfg: &RunConfig, sim: &Simulation, report: &EstimateReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir.join("snapshots"))?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml())?;
    for s in &sim.trajectory.snapshots {
        save_snapshot(&dir.join(format!("snapshots/omega_{:06}.bin", s.step)), &s.omega, s.t)?;
        save_snapshot(&dir.join(format!("snapshots/stream_{:06}.bin", s.step)), &s.stream, s.t)?;
    }
    write_log(std::fs::File::create(dir.join("log.csv"))?, &sim.trajectory, cfg.solver.p)?;
    report.save(&dir.join("report.csv"))?;
    if let Some(diffs) = &sim.picard_diffs {
        let mut w = csv::Writer::from_path(dir.join("picard.csv"))?;
        w.write_record(["iteration", "difference"])?;
        for (k, d) in diffs.iter().enumerate() {
            w.write_record([(k + 1).to_string(), d.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub report: EstimateReport,
    pub final_omega: ScalarField,
    pub steps: usize,
}

impl RunSummary {
    /// Name of the first failing check, if any.
    pub fn first_failure(&self) -> Option<&str> {
        self.report.failures().next().map(|e| e.check_name.as_str())
    }
}

fn run_at(cfg: &RunConfig, nr: usize, ns: usize, nu: f64, theta: f64, dir: &Path) -> Result<(Trajectory, RunSummary)> {
    let sim = simulate(cfg, nr, ns, nu, theta, true)?;
    let coarse = if cfg.check_enabled("lp_budget") && nr >= 8 && ns >= 8 {
        Some(simulate(cfg, nr / 2, ns / 2, nu, theta, false)?.trajectory)
    } else {
        None
    };
    let report = evaluate(cfg, &sim, coarse.as_ref())?;
    write_artifacts(cfg, &sim, &report, dir)?;
    let summary = RunSummary {
        dir: dir.to_path_buf(),
        report,
        final_omega: sim.trajectory.final_omega.clone(),
        steps: sim.trajectory.levels.len().saturating_sub(1),
    };
    Ok((sim.trajectory, summary))
}

/// Single run with the configured grid, viscosity and window, written to `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunSummary> {
    run_at(cfg, cfg.geometry.nr, cfg.geometry.ns, cfg.solver.nu, cfg.solver.theta, dir).map(|(_, s)| s)
}

/// One row of `sweep_summary.csv`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub grid: String,
    pub theta: f64,
    pub nu: f64,
    pub status: String,
    pub failed_checks: usize,
    pub l2_to_next: f64,
    pub l2_to_inviscid: f64,
    pub dir: String,
}

#[derive(Debug)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub report: EstimateReport,
}

impl SweepSummary {
    pub fn all_pass(&self) -> bool {
        self.report.all_pass() && self.rows.iter().all(|r| r.status == "ok" && r.failed_checks == 0)
    }

    pub fn first_failure(&self) -> Option<String> {
        if let Some(e) = self.report.failures().next() {
            return Some(e.check_name.clone());
        }
        self.rows
            .iter()
            .find(|r| r.status != "ok" || r.failed_checks > 0)
            .map(|r| format!("{} (nu = {})", r.status, r.nu))
    }
}

/// Every combination of `grid_list x theta_list x nu_list` (each defaulting to the single configured
/// value), plus a `nu = 0` reference per (grid, theta). Each run goes to its own subdirectory.
pub fn sweep(cfg: &RunConfig, dir: &Path) -> Result<SweepSummary> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml())?;
    let grids = if cfg.sweep.grid_list.is_empty() {
        vec![[cfg.geometry.nr, cfg.geometry.ns]]
    } else {
        cfg.sweep.grid_list.clone()
    };
    let thetas = if cfg.sweep.theta_list.is_empty() {
        vec![cfg.solver.theta]
    } else {
        cfg.sweep.theta_list.clone()
    };
    let nus = if cfg.sweep.nu_list.is_empty() {
        vec![cfg.solver.nu]
    } else {
        cfg.sweep.nu_list.clone()
    };

    let mut rows = Vec::new();
    let mut report = EstimateReport::default();
    for &[nr, ns] in &grids {
        for &theta in &thetas {
            let mut sub = dir.to_path_buf();
            if grids.len() > 1 {
                sub.push(format!("grid_{nr}x{ns}"));
            }
            if thetas.len() > 1 {
                sub.push(format!("theta_{theta}"));
            }
            let grid = Grid::for_domain(&cfg.discretisation(nr, ns)?.0, nr)?;
            let result = viscosity_sweep_report(&grid, theta, &nus, |nu| {
                let mut traj_and_summary = run_at(cfg, nr, ns, nu, theta, &sub.join(format!("nu_{nu}")))?;
                traj_and_summary.0.snapshots.clear();
                Ok(traj_and_summary)
            });
            report.extend(result.report);
            let mut push = |run: &crate::estimates::SweepRun<RunSummary>, next: f64, inviscid: f64| {
                let (status, failed) = match &run.outcome {
                    Ok((_, s)) => ("ok".to_string(), s.report.failures().count()),
                    Err(e) => (e.to_string(), 0),
                };
                rows.push(SweepRow {
                    grid: format!("{nr}x{ns}"),
                    theta,
                    nu: run.nu,
                    status,
                    failed_checks: failed,
                    l2_to_next: next,
                    l2_to_inviscid: inviscid,
                    dir: sub.join(format!("nu_{}", run.nu)).display().to_string(),
                });
            };
            for (k, run) in result.runs.iter().enumerate() {
                push(run, result.consecutive.get(k).copied().unwrap_or(f64::NAN), result.to_inviscid[k]);
            }
            push(&result.inviscid, f64::NAN, 0.0);
        }
    }
    let mut w = csv::Writer::from_path(dir.join("sweep_summary.csv"))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    report.save(&dir.join("sweep_report.csv"))?;
    Ok(SweepSummary { rows, report })
}
