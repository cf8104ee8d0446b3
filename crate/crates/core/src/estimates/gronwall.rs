use crate::boundary_data::{arc_derivative, Derivative};
use crate::elliptic::{abs_pow, power_sum, Grid};
use crate::geometry::{ComponentId, DomainGeometry};
use crate::transport::{StepObserver, StepView};
use crate::{Error, Result};

/// Exact integral over `[lo, hi]` of the piecewise-linear interpolant of `(times, y)`,
/// taken as zero outside `[times[0], times[last]]`.
fn integrate_linear(times: &[f64], y: &[f64], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..times.len().saturating_sub(1) {
        let (t0, t1) = (times[k], times[k + 1]);
        let a = lo.max(t0);
        let b = hi.min(t1);
        if b <= a || t1 <= t0 {
            continue;
        }
        let at = |t: f64| y[k] + (y[k + 1] - y[k]) * (t - t0) / (t1 - t0);
        total += 0.5 * (b - a) * (at(a) + at(b));
    }
    total
}

/// Forward window average `u(t) = (1/theta) int_t^{t+theta} y`, with `y = 0` beyond the last time.
pub fn forward_window(times: &[f64], y: &[f64], theta: f64) -> Vec<f64> {
    times.iter().map(|&t| integrate_linear(times, y, t, t + theta) / theta).collect()
}

fn cumulative_trapezoid(times: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..times.len() {
        acc += 0.5 * (times[k] - times[k - 1]) * (f[k] + f[k - 1]);
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallOutcome {
    /// Times at which hypothesis and conclusion were checked.
    pub times: Vec<f64>,
    pub y: Vec<f64>,
    /// `y0 + int_0^t (D u + B)`.
    pub hypothesis_rhs: Vec<f64>,
    /// `2 exp(int_0^t D) [y0 + int_0^t B exp(-int_0^r D) dr]`.
    pub bound: Vec<f64>,
    pub pass: bool,
}

impl GronwallOutcome {
    /// Smallest `bound - y` over the checked times.
    pub fn min_slack(&self) -> f64 {
        self.bound.iter().zip(&self.y).map(|(b, y)| b - y).fold(f64::INFINITY, f64::min)
    }

    /// Largest `y / bound` over the checked times.
    pub fn max_ratio(&self) -> f64 {
        self.y
            .iter()
            .zip(&self.bound)
            .map(|(y, b)| if *b > 0.0 { y / b } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

/// Check the integral hypothesis at every sample time up to `check_until` and,
/// only if it holds everywhere, evaluate the factor-2 exponential bound.
/// The samples may extend past `check_until` so that the forward window sees real data.
pub fn discrete_gronwall_bound(times: &[f64], y: &[f64], d: &[f64], b: &[f64], theta: f64, check_until: f64) -> Result<GronwallOutcome> {
    let n = times.len();
    if n == 0 || y.len() != n || d.len() != n || b.len() != n {
        return Err(Error::Validation(vec![
            "gronwall series must be non-empty and of equal length".into()
        ]));
    }
    if theta <= 0.0 {
        return Err(Error::BadTheta { theta, max: f64::INFINITY });
    }
    if y.iter().chain(d).chain(b).any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Validation(vec!["gronwall series must be finite and non-negative".into()]));
    }
    let u = forward_window(times, y, theta);
    let integrand: Vec<f64> = (0..n).map(|k| d[k] * u[k] + b[k]).collect();
    let hyp = cumulative_trapezoid(times, &integrand);
    let y0 = y[0];
    let m = times.iter().rposition(|&t| t <= check_until * (1.0 + 1e-12)).map_or(0, |k| k + 1);

    let mut hypothesis_rhs = Vec::with_capacity(m);
    for k in 0..m {
        let rhs = y0 + hyp[k];
        if y[k] > rhs * (1.0 + 1e-12) {
            return Err(Error::HypothesisFailed {
                t: times[k],
                lhs: y[k],
                rhs,
            });
        }
        hypothesis_rhs.push(rhs);
    }

    let int_d = cumulative_trapezoid(times, d);
    let weighted: Vec<f64> = (0..n).map(|k| b[k] * (-int_d[k]).exp()).collect();
    let int_b = cumulative_trapezoid(times, &weighted);
    let bound: Vec<f64> = (0..m).map(|k| 2.0 * int_d[k].exp() * (y0 + int_b[k])).collect();
    let pass = (0..m).all(|k| y[k] <= bound[k]);
    Ok(GronwallOutcome {
        times: times[..m].to_vec(),
        y: y[..m].to_vec(),
        hypothesis_rhs,
        bound,
        pass,
    })
}

/// Per-level quantities entering the coefficients `D` and `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallSample {
    pub t: f64,
    /// `int |omega|^p`.
    pub y: f64,
    /// `int_{inflow} |gamma|^p ds`.
    pub gamma_p: f64,
    /// `int_{inflow} |g|^p ds`.
    pub g_p: f64,
    /// `max |a|` on the inflow part.
    pub a_max: f64,
    /// `||A||^p` in `W^2_p` over the whole boundary.
    pub stream_norm_p: f64,
    /// `max |v . s|` on the boundary.
    pub vs_max: f64,
}

/// Collects [`GronwallSample`]s during a march.
pub struct GronwallObserver {
    grid: Grid,
    geom: DomainGeometry,
    pub p: f64,
    pub samples: Vec<GronwallSample>,
}

impl GronwallObserver {
    pub fn new(grid: &Grid, geom: &DomainGeometry, p: f64) -> Self {
        Self {
            grid: grid.clone(),
            geom: geom.clone(),
            p,
            samples: Vec::new(),
        }
    }
}

impl StepObserver for GronwallObserver {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        let p = self.p;
        let r = view.reduced;
        let (mut gamma_p, mut g_p, mut a_max, mut stream_norm_p) = (0.0, 0.0, 0.0_f64, 0.0);
        for id in ComponentId::ALL {
            let ds = self.geom.component(id).ds();
            let a = r.a.get(id);
            for k in 0..a.len() {
                if a[k] < 0.0 {
                    gamma_p += ds * abs_pow(r.gamma.get(id)[k], p);
                    g_p += ds * abs_pow(r.g.get(id)[k], p);
                    a_max = a_max.max(-a[k]);
                }
            }
            let big_a = r.stream.get(id);
            let d1 = arc_derivative(big_a, ds, Derivative::Centered);
            let d2 = arc_derivative(&d1, ds, Derivative::Centered);
            stream_norm_p += ds
                * (0..big_a.len())
                    .map(|k| abs_pow(big_a[k], p) + abs_pow(d1[k], p) + abs_pow(d2[k], p))
                    .sum::<f64>();
        }
        self.samples.push(GronwallSample {
            t: view.t,
            y: power_sum(&self.grid, view.omega, p),
            gamma_p,
            g_p,
            a_max,
            stream_norm_p,
            vs_max: view.velocity.tangential.max_abs(),
        });
        Ok(())
    }
}

/// `y`, `D`, `B` built from recorded samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallSeries {
    pub times: Vec<f64>,
    pub y: Vec<f64>,
    pub d: Vec<f64>,
    pub b: Vec<f64>,
    /// Measured constant in `|v|^p <= C_v (u + ||A||^p)` with `u` the forward window average of `y`.
    pub c_v: f64,
}

/// Coefficients `D = 2^(p-1) C_v ||a|| int|gamma|^p` and
/// `B = 2^(p-1) ||a|| (C_v ||A||^p int|gamma|^p + int|g|^p)`,
/// where `C_v` is measured on the run itself.
pub fn gronwall_series(samples: &[GronwallSample], p: f64, theta: f64) -> GronwallSeries {
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.y).collect();
    let u = forward_window(&times, &y, theta);
    let c_v = samples
        .iter()
        .zip(&u)
        .map(|(s, &u)| {
            let denom = u + s.stream_norm_p;
            if denom > 0.0 {
                abs_pow(s.vs_max, p) / denom
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    let a_inf = samples.iter().map(|s| s.a_max).fold(0.0, f64::max);
    let k = 2f64.powf(p - 1.0) * a_inf;
    let d = samples.iter().map(|s| k * c_v * s.gamma_p).collect();
    let b = samples.iter().map(|s| k * (c_v * s.stream_norm_p * s.gamma_p + s.g_p)).collect();
    GronwallSeries { times, y, d, b, c_v }
}
