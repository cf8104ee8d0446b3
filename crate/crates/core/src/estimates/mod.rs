//! Numerical checks of the a priori estimates: maximum principle, `L_p` budget and
//! its flux identity, discrete Gronwall lemma, boundary-strip functionals,
//! weak-form residual, time regularity of the stream gradient, the `q -> infinity`
//! passage and viscosity sweeps.

mod budget;
mod gronwall;
mod lipschitz;
mod report;
mod strip;
mod sweep;
mod test_function;
mod weak_form;

pub use budget::{
    budget_series, budget_terms, lp_budget, max_principle_check, normalized_norm, p_infinity_sweep, BudgetMode, BudgetTerms,
    MAX_PRINCIPLE_TOL, Q_MONOTONE_TOL,
};
pub use gronwall::{
    discrete_gronwall_bound, forward_window, gronwall_series, GronwallObserver, GronwallOutcome, GronwallSample, GronwallSeries,
};
pub use lipschitz::{gradient_distance, time_lipschitz_check, zero_boundary_stream, LipschitzOutcome, LIPSCHITZ_SPREAD};
pub use report::{richardson_slack, CheckContext, EstimateEntry, EstimateReport};
pub use strip::{strip_flux_integrand, time_strip_integrand, StripObserver};
pub use sweep::{decreasing_with_slack, viscosity_sweep_report, SweepRun, ViscositySweep, SWEEP_SLACK, SWEEP_ZERO};
pub use test_function::TestFunction;
pub use weak_form::{initial_pairing, weak_form_integrand, WeakFormObserver};
