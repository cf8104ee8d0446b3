use crate::elliptic::{l2_distance, Grid};
use crate::estimates::budget::max_principle_check;
use crate::estimates::report::{CheckContext, EstimateEntry, EstimateReport};
use crate::par;
use crate::transport::Trajectory;
use crate::Result;

/// Allowed growth factor between consecutive differences.
pub const SWEEP_SLACK: f64 = 1.1;
/// Differences below this are treated as identical states.
pub const SWEEP_ZERO: f64 = 1e-8;

/// One run of a viscosity sweep with caller-defined extras.
#[derive(Debug)]
pub struct SweepRun<T> {
    pub nu: f64,
    pub outcome: Result<(Trajectory, T)>,
}

#[derive(Debug)]
pub struct ViscositySweep<T> {
    pub runs: Vec<SweepRun<T>>,
    /// The `nu = 0` reference run.
    pub inviscid: SweepRun<T>,
    /// `||omega_{nu_i}(T) - omega_{nu_{i+1}}(T)||_2`; `NaN` where a run failed.
    pub consecutive: Vec<f64>,
    /// `||omega_{nu_i}(T) - omega_0(T)||_2`.
    pub to_inviscid: Vec<f64>,
    pub report: EstimateReport,
}

/// True when every entry is below `SWEEP_ZERO` or each is at most `SWEEP_SLACK` times its predecessor.
pub fn decreasing_with_slack(values: &[f64]) -> (bool, f64) {
    if values.iter().any(|v| !v.is_finite()) {
        return (false, f64::INFINITY);
    }
    if values.iter().all(|&v| v < SWEEP_ZERO) {
        return (true, 0.0);
    }
    let worst = values
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                w[1] / w[0]
            } else if w[1] < SWEEP_ZERO {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    (worst <= SWEEP_SLACK, worst)
}

/// Run `run(nu)` for every `nu` in `nu_list` and for `nu = 0`, in parallel, then compare final states.
/// Failed runs are kept in the result; their differences are `NaN` and the corresponding checks fail.
pub fn viscosity_sweep_report<T, F>(grid: &Grid, theta: f64, nu_list: &[f64], run: F) -> ViscositySweep<T>
where
    T: Send,
    F: Fn(f64) -> Result<(Trajectory, T)> + Sync,
{
    let mut all_nu = nu_list.to_vec();
    all_nu.push(0.0);
    let mut outcomes = par::map(all_nu.len(), |k| SweepRun {
        nu: all_nu[k],
        outcome: run(all_nu[k]),
    });
    let inviscid = outcomes.pop().expect("sweep always contains the inviscid run");
    let runs = outcomes;

    let finals: Vec<Option<&Trajectory>> = runs.iter().map(|r| r.outcome.as_ref().ok().map(|(t, _)| t)).collect();
    let zero = inviscid.outcome.as_ref().ok().map(|(t, _)| t);
    let dist = |a: Option<&Trajectory>, b: Option<&Trajectory>| match (a, b) {
        (Some(a), Some(b)) => l2_distance(grid, &a.final_omega, &b.final_omega),
        _ => f64::NAN,
    };
    let consecutive: Vec<f64> = finals.windows(2).map(|w| dist(w[0], w[1])).collect();
    let to_inviscid: Vec<f64> = finals.iter().map(|&f| dist(f, zero)).collect();

    let mut report = EstimateReport::default();
    let label = grid.label();
    let ctx0 = CheckContext::new(nu_list.last().copied().unwrap_or(0.0), theta, label.clone());
    let (ok, worst) = decreasing_with_slack(&consecutive);
    report.push(EstimateEntry::new("viscosity_consecutive", &ctx0, worst, SWEEP_SLACK, ok));
    let (ok, worst) = decreasing_with_slack(&to_inviscid);
    report.push(EstimateEntry::new("viscosity_to_inviscid", &ctx0, worst, SWEEP_SLACK, ok));
    for r in &runs {
        let ctx = CheckContext::new(r.nu, theta, label.clone());
        match &r.outcome {
            Ok((traj, _)) => report.push(max_principle_check(traj, &ctx)),
            Err(_) => report.push(EstimateEntry::new("run_failed", &ctx, f64::NAN, f64::NAN, false)),
        }
    }
    ViscositySweep {
        runs,
        inviscid,
        consecutive,
        to_inviscid,
        report,
    }
}
