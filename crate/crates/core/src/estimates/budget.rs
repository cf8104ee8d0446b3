use crate::elliptic::{discrete_norm, Grid, ScalarField};
use crate::estimates::report::{CheckContext, EstimateEntry, EstimateReport};
use crate::transport::{LevelRecord, Trajectory};
use crate::{Error, Result};

/// Absolute tolerance of the maximum-principle comparison.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-8;

/// `max |omega(t)| <= max(max |omega0|, sup_{s <= t} |gamma| |v . s| + |g|)` at every level.
/// The entry reports the level with the least slack.
pub fn max_principle_check(traj: &Trajectory, ctx: &CheckContext) -> EstimateEntry {
    let omega0 = traj.initial.max_abs();
    let mut boundary: f64 = 0.0;
    let mut worst: Option<(f64, f64, f64)> = None;
    for level in &traj.levels {
        boundary = boundary.max(level.boundary_bound());
        let rhs = omega0.max(boundary);
        let lhs = level.max_abs;
        if worst.is_none_or(|(_, l, r)| rhs - lhs < r - l) {
            worst = Some((level.t, lhs, rhs));
        }
    }
    let (t, lhs, rhs) = worst.unwrap_or((0.0, 0.0, omega0));
    EstimateEntry::new("max_principle", ctx, lhs, rhs, lhs <= rhs + MAX_PRINCIPLE_TOL).at_time(t)
}

/// Terms of the `L_p` balance on `[0, t0]`, all nonnegative, time integrals by the trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetTerms {
    pub t0: f64,
    pub p: f64,
    /// `int |omega(t0)|^p`.
    pub final_norm: f64,
    /// `int |omega0|^p`.
    pub initial_norm: f64,
    /// `int_0^t0 int_{inflow} |a| |omega_Gamma|^p`.
    pub influx: f64,
    /// `int_0^t0 int_{outflow} a |omega|^p`.
    pub outflux: f64,
}

impl BudgetTerms {
    /// The inflow integral with `a` kept signed (`a < 0` on inflow), hence never positive.
    pub fn signed_inflow_term(&self) -> f64 {
        -self.influx
    }

    /// `(lhs + outflux - rhs) / rhs` of the flux equality.
    pub fn relative_imbalance(&self) -> f64 {
        let rhs = self.initial_norm + self.influx;
        (self.final_norm + self.outflux - rhs) / rhs.max(f64::MIN_POSITIVE)
    }
}

fn trapezoid(levels: &[LevelRecord], f: impl Fn(&LevelRecord) -> f64) -> f64 {
    levels.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (f(&w[0]) + f(&w[1]))).sum()
}

/// Index of the last level at or before `t0`.
fn level_index(traj: &Trajectory, t0: f64) -> usize {
    let tol = 1e-9 * t0.abs().max(1.0);
    traj.levels.iter().rposition(|l| l.t <= t0 + tol).unwrap_or(0)
}

pub fn budget_terms(traj: &Trajectory, p: f64, t0: f64) -> Result<BudgetTerms> {
    let k = traj
        .p_index(p)
        .ok_or_else(|| Error::Validation(vec![format!("exponent p = {p} was not recorded during the run")]))?;
    if traj.levels.is_empty() {
        return Err(Error::Validation(vec!["empty trajectory".into()]));
    }
    let n = level_index(traj, t0);
    let levels = &traj.levels[..=n];
    Ok(BudgetTerms {
        t0: levels[n].t,
        p,
        final_norm: levels[n].power_sums[k],
        initial_norm: traj.levels[0].power_sums[k],
        influx: trapezoid(levels, |l| l.inflow_rates[k]),
        outflux: trapezoid(levels, |l| l.outflow_rates[k]),
    })
}

/// Budget terms at every level, with running time integrals.
pub fn budget_series(traj: &Trajectory, p: f64) -> Result<Vec<BudgetTerms>> {
    let k = traj
        .p_index(p)
        .ok_or_else(|| Error::Validation(vec![format!("exponent p = {p} was not recorded during the run")]))?;
    let Some(first) = traj.levels.first() else {
        return Ok(Vec::new());
    };
    let initial_norm = first.power_sums[k];
    let (mut influx, mut outflux) = (0.0, 0.0);
    let mut out = Vec::with_capacity(traj.levels.len());
    for (n, l) in traj.levels.iter().enumerate() {
        if n > 0 {
            let prev = &traj.levels[n - 1];
            let h = 0.5 * (l.t - prev.t);
            influx += h * (l.inflow_rates[k] + prev.inflow_rates[k]);
            outflux += h * (l.outflow_rates[k] + prev.outflow_rates[k]);
        }
        out.push(BudgetTerms {
            t0: l.t,
            p,
            final_norm: l.power_sums[k],
            initial_norm,
            influx,
            outflux,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetMode {
    /// `int |omega(t0)|^p <= int |omega0|^p + inflow term + eps_disc`.
    Inequality,
    /// Relative imbalance of the identity with the outflow term added on the left, against `tolerance`.
    Equality { tolerance: f64 },
}

/// The `L_p` budget as a report entry. `eps_disc` is the discretisation slack,
/// normally from [`crate::estimates::richardson_slack`].
pub fn lp_budget(
    traj: &Trajectory,
    ctx: &CheckContext,
    p: f64,
    t0: f64,
    mode: BudgetMode,
    eps_disc: f64,
) -> Result<(EstimateEntry, BudgetTerms)> {
    let terms = budget_terms(traj, p, t0)?;
    let rhs = terms.initial_norm + terms.influx;
    let entry = match mode {
        BudgetMode::Inequality => {
            let lhs = terms.final_norm;
            EstimateEntry::new("lp_budget", ctx, lhs, rhs + eps_disc, lhs <= rhs + eps_disc + 1e-12 * rhs.max(1.0))
        }
        BudgetMode::Equality { tolerance } => {
            let lhs = terms.final_norm + terms.outflux;
            let pass = terms.relative_imbalance().abs() < tolerance;
            EstimateEntry::new("lp_flux_equality", ctx, lhs, rhs, pass)
        }
    };
    Ok((entry.at_time(terms.t0).with_p(p), terms))
}

/// `(int |f|^q / |Omega|)^(1/q)`, which increases with `q` towards `max |f|`.
pub fn normalized_norm(grid: &Grid, f: &ScalarField, q: f64) -> f64 {
    let area: f64 = (0..grid.nr).map(|i| grid.cell_area(i) * grid.ns as f64).sum();
    discrete_norm(grid, f, q) / area.powf(1.0 / q)
}

/// Relative tolerance of the monotonicity of normalised norms in `q`.
pub const Q_MONOTONE_TOL: f64 = 1e-6;

/// The `q -> infinity` passage at time `t0`:
/// per-`q` budgets `||omega(t0)||_q <= ||omega0||_q + (inflow term)^(1/q) + eps`,
/// monotone growth of the normalised norms towards the maximum, and
/// `max |omega(t0)| <= max |omega0| + C` with `C` the largest boundary bound
/// `|gamma| |v . s| + |g|` seen on `[0, t0]` (the `q -> infinity` limit of the inflow term at `q = 4`).
pub fn p_infinity_sweep(
    traj: &Trajectory,
    grid: &Grid,
    ctx: &CheckContext,
    omega_t0: &ScalarField,
    t0: f64,
    q_list: &[f64],
    eps_disc: f64,
) -> Result<EstimateReport> {
    let mut report = EstimateReport::default();
    for &q in q_list {
        let terms = budget_terms(traj, q, t0)?;
        let lhs = terms.final_norm.powf(1.0 / q);
        let rhs = terms.initial_norm.powf(1.0 / q) + terms.influx.powf(1.0 / q) + eps_disc;
        report.push(
            EstimateEntry::new("q_budget", ctx, lhs, rhs, lhs <= rhs * (1.0 + 1e-12))
                .at_time(terms.t0)
                .with_p(q),
        );
    }

    let max = omega_t0.max_abs();
    let norms: Vec<f64> = q_list.iter().map(|&q| normalized_norm(grid, omega_t0, q)).collect();
    let tol = Q_MONOTONE_TOL * max.max(f64::MIN_POSITIVE);
    let monotone = norms.windows(2).all(|w| w[1] >= w[0] - tol) && norms.iter().all(|&n| n <= max + tol);
    let last = norms.last().copied().unwrap_or(0.0);
    report.push(EstimateEntry::new("q_norm_monotone", ctx, last, max, monotone).at_time(t0));

    let n = level_index(traj, t0);
    let c_bar = traj.levels[..=n].iter().map(|l| l.boundary_bound()).fold(0.0, f64::max);
    let rhs = traj.initial.max_abs() + c_bar;
    report.push(
        EstimateEntry::new("max_bound", ctx, max, rhs, max <= rhs + MAX_PRINCIPLE_TOL)
            .at_time(t0)
            .with_p(4.0),
    );
    Ok(report)
}
