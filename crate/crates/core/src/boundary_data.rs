//! Boundary traces `(a, alpha, b)`, their reduction to `(gamma, g, A)` and the
//! mollification used by the regularized construction.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::elliptic::{Grid, ScalarField};
use crate::geometry::{ComponentId, DomainGeometry};
use crate::{smoothstep, Error, Result};

/// Values at the equally spaced nodes of both boundary components.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    pub values: [Vec<f64>; 2],
}

impl BoundaryFunction {
    pub fn zeros(n: usize) -> Self {
        Self {
            values: [vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn from_fn(geom: &DomainGeometry, f: impl Fn(ComponentId, f64) -> f64) -> Self {
        let sample = |id: ComponentId| {
            let c = geom.component(id);
            (0..c.n_nodes).map(|k| f(id, c.node_s(k))).collect()
        };
        Self {
            values: [sample(ComponentId::Outer), sample(ComponentId::Inner)],
        }
    }

    pub fn get(&self, id: ComponentId) -> &[f64] {
        &self.values[id.index()]
    }

    pub fn get_mut(&mut self, id: ComponentId) -> &mut Vec<f64> {
        &mut self.values[id.index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: [
                self.values[0].iter().map(|&v| f(v)).collect(),
                self.values[1].iter().map(|&v| f(v)).collect(),
            ],
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let zip = |c: usize| self.values[c].iter().zip(&other.values[c]).map(|(&a, &b)| f(a, b)).collect();
        Self { values: [zip(0), zip(1)] }
    }

    pub fn map_components(&self, f: impl Fn(ComponentId, &[f64]) -> Vec<f64>) -> Self {
        Self {
            values: [f(ComponentId::Outer, &self.values[0]), f(ComponentId::Inner, &self.values[1])],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }

    /// Discrete `L_p` norm over the whole boundary (arc-length weighted); `p = inf` is the max.
    pub fn norm(&self, geom: &DomainGeometry, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let total: f64 = ComponentId::ALL
            .iter()
            .map(|&id| geom.component(id).ds() * self.get(id).iter().map(|v| v.abs().powf(p)).sum::<f64>())
            .sum();
        total.powf(1.0 / p)
    }
}

/// Raw boundary values at one point: normal velocity, friction coefficient and slip forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trace {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
}

/// Closed-form or tabulated boundary data as a function of component, arc length and time.
pub trait TraceSource: Send + Sync {
    fn trace(&self, id: ComponentId, s: f64, t: f64) -> Trace;
}

impl<F> TraceSource for F
where
    F: Fn(ComponentId, f64, f64) -> Trace + Send + Sync,
{
    fn trace(&self, id: ComponentId, s: f64, t: f64) -> Trace {
        self(id, s, t)
    }
}

#[derive(Debug, Clone)]
pub struct RawTraces {
    pub t: f64,
    pub a: BoundaryFunction,
    pub alpha: BoundaryFunction,
    pub b: BoundaryFunction,
}

/// Problem data: boundary traces, initial vorticity and the value of the
/// stream function on the inner circle relative to its own arc origin.
#[derive(Clone)]
pub struct BoundaryData {
    pub source: Arc<dyn TraceSource>,
    pub omega0: ScalarField,
    /// Added to `A` on the inner component; fixes the circulation around the hole.
    pub inner_stream_offset: f64,
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryData")
            .field("omega0_max", &self.omega0.max_abs())
            .field("inner_stream_offset", &self.inner_stream_offset)
            .finish_non_exhaustive()
    }
}

impl BoundaryData {
    /// Sample all traces at time `t`. An impermeable component gets `a = 0` whatever the source says.
    pub fn sample(&self, geom: &DomainGeometry, t: f64) -> RawTraces {
        let n = geom.components[0].n_nodes;
        let mut raw = RawTraces {
            t,
            a: BoundaryFunction::zeros(n),
            alpha: BoundaryFunction::zeros(n),
            b: BoundaryFunction::zeros(n),
        };
        for id in ComponentId::ALL {
            let c = geom.component(id);
            for k in 0..n {
                let tr = self.source.trace(id, c.node_s(k), t);
                raw.a.get_mut(id)[k] = if c.impermeable { 0.0 } else { tr.a };
                raw.alpha.get_mut(id)[k] = tr.alpha;
                raw.b.get_mut(id)[k] = tr.b;
            }
        }
        raw
    }
}

/// `|oint a ds|` by the (periodic) trapezoid rule, summed over components.
pub fn check_compatibility(geom: &DomainGeometry, a: &BoundaryFunction) -> f64 {
    ComponentId::ALL
        .iter()
        .map(|&id| geom.component(id).ds() * a.get(id).iter().sum::<f64>())
        .sum::<f64>()
        .abs()
}

/// Default acceptance threshold for [`check_compatibility`].
pub fn compatibility_tolerance(geom: &DomainGeometry, a: &BoundaryFunction) -> f64 {
    1e-10 * a.max_abs() * geom.perimeter()
}

/// Strict-mode compatibility check.
pub fn ensure_compatible(geom: &DomainGeometry, a: &BoundaryFunction) -> Result<f64> {
    let imbalance = check_compatibility(geom, a);
    let tolerance = compatibility_tolerance(geom, a);
    if imbalance > tolerance {
        return Err(Error::IncompatibleFlux { imbalance, tolerance });
    }
    Ok(imbalance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivative {
    #[default]
    Centered,
    Spectral,
}

/// Derivative of a periodic sample sequence with spacing `ds`.
pub fn arc_derivative(f: &[f64], ds: f64, method: Derivative) -> Vec<f64> {
    let n = f.len();
    match method {
        Derivative::Centered => (0..n).map(|k| (f[(k + 1) % n] - f[(k + n - 1) % n]) / (2.0 * ds)).collect(),
        Derivative::Spectral => {
            let mut planner = FftPlanner::new();
            let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            planner.plan_fft_forward(n).process(&mut buf);
            let length = ds * n as f64;
            for (m, c) in buf.iter_mut().enumerate() {
                let freq = if 2 * m < n {
                    m as f64
                } else if 2 * m == n {
                    0.0
                } else {
                    m as f64 - n as f64
                };
                let k = std::f64::consts::TAU * freq / length;
                *c *= Complex64::new(0.0, k);
            }
            planner.plan_fft_inverse(n).process(&mut buf);
            buf.iter().map(|c| c.re / n as f64).collect()
        }
    }
}

/// Cumulative trapezoid antiderivative with `A(0) = 0`. The closure drift
/// `oint a ds` must not exceed `tolerance`; what remains is removed linearly
/// so the result is single-valued on the closed curve.
#[allow(non_snake_case)]
pub fn accumulate_A(a: &[f64], ds: f64, tolerance: f64) -> Result<Vec<f64>> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        out.push(acc);
        acc += 0.5 * ds * (a[k] + a[(k + 1) % n]);
    }
    if acc.abs() > tolerance {
        return Err(Error::IncompatibleFlux {
            imbalance: acc.abs(),
            tolerance,
        });
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v -= acc * k as f64 / n as f64;
    }
    Ok(out)
}

/// Reduced traces at one time level.
#[derive(Debug, Clone)]
pub struct ReducedTraces {
    pub t: f64,
    pub gamma: BoundaryFunction,
    pub g: BoundaryFunction,
    /// Normal velocity consistent with `stream` (possibly smoothed).
    pub a: BoundaryFunction,
    /// Stream-function boundary values `A`, inner offset included.
    pub stream: BoundaryFunction,
    /// Arc-derivative rule used for `g`.
    pub derivative: Derivative,
}

impl ReducedTraces {
    pub fn zero(n: usize, t: f64) -> Self {
        Self {
            t,
            gamma: BoundaryFunction::zeros(n),
            g: BoundaryFunction::zeros(n),
            a: BoundaryFunction::zeros(n),
            stream: BoundaryFunction::zeros(n),
            derivative: Derivative::Centered,
        }
    }

    /// Friction coefficient recovered as `2k - gamma`.
    pub fn alpha(&self, geom: &DomainGeometry) -> BoundaryFunction {
        self.gamma.map_components(|id, gam| {
            gam.iter()
                .map(|&x| 2.0 * geom.component(id).frame_at_node(0).curvature - x)
                .collect()
        })
    }

    /// Slip forcing recovered as `g + 2 a'`.
    pub fn b(&self, geom: &DomainGeometry) -> BoundaryFunction {
        self.g.map_components(|id, g| {
            let ap = arc_derivative(self.a.get(id), geom.component(id).ds(), self.derivative);
            g.iter().zip(ap).map(|(&g, ap)| g + 2.0 * ap).collect()
        })
    }
}

/// `gamma = 2k - alpha`, `g = b - 2a'`, `A = int_0^s a`.
pub fn reduce_boundary_data(
    raw: &RawTraces,
    geom: &DomainGeometry,
    inner_stream_offset: f64,
    derivative: Derivative,
) -> Result<ReducedTraces> {
    let tol = compatibility_tolerance(geom, &raw.a);
    ensure_compatible(geom, &raw.a)?;
    let mut gamma = raw.alpha.clone();
    let mut g = raw.b.clone();
    let mut stream = raw.a.clone();
    for id in ComponentId::ALL {
        let c = geom.component(id);
        let k = c.frame_at_node(0).curvature;
        for v in gamma.get_mut(id).iter_mut() {
            *v = 2.0 * k - *v;
        }
        let ap = arc_derivative(raw.a.get(id), c.ds(), derivative);
        for (v, d) in g.get_mut(id).iter_mut().zip(ap) {
            *v -= 2.0 * d;
        }
        let mut a_stream = accumulate_A(raw.a.get(id), c.ds(), tol)?;
        if id == ComponentId::Inner {
            for v in a_stream.iter_mut() {
                *v += inner_stream_offset;
            }
        }
        *stream.get_mut(id) = a_stream;
    }
    Ok(ReducedTraces {
        t: raw.t,
        gamma,
        g,
        a: raw.a.clone(),
        stream,
        derivative,
    })
}

/// Time ramp multiplying `gamma` and `g`: 0 on `[0, theta]`, 1 after `2 theta`.
pub fn time_ramp(t: f64, theta: f64) -> f64 {
    if theta <= 0.0 {
        1.0
    } else {
        smoothstep((t - theta) / theta)
    }
}

/// Admissible window: `theta` in `(0, min(sigma0, T / 4))`.
pub fn validate_theta(theta: f64, sigma0: f64, t_end: f64) -> Result<()> {
    let max = sigma0.min(t_end / 4.0);
    if theta > 0.0 && theta < max {
        Ok(())
    } else {
        Err(Error::BadTheta { theta, max })
    }
}

/// Periodic Gaussian smoothing with standard deviation `width` (arc length).
pub fn gaussian_smooth(f: &[f64], ds: f64, width: f64) -> Vec<f64> {
    let n = f.len();
    if width <= 0.0 || width < 0.25 * ds {
        return f.to_vec();
    }
    let half = ((4.0 * width / ds).ceil() as usize).min(n / 2);
    let mut w: Vec<f64> = (0..=half).map(|m| (-0.5 * (m as f64 * ds / width).powi(2)).exp()).collect();
    let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
    for x in w.iter_mut() {
        *x /= total;
    }
    (0..n)
        .map(|k| {
            let mut acc = w[0] * f[k];
            for (m, wm) in w.iter().enumerate().skip(1) {
                acc += wm * (f[(k + m) % n] + f[(k + n - m % n) % n]);
            }
            acc
        })
        .collect()
}

/// Mollification settings shared by the boundary traces and the initial vorticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    pub theta: f64,
    /// Also smooth `(a, gamma, g)` along the boundary with a Gaussian of width `theta / 2`.
    pub smooth_in_s: bool,
}

impl Mollifier {
    pub fn apply_traces(&self, reduced: &ReducedTraces, geom: &DomainGeometry) -> Result<ReducedTraces> {
        let mut out = reduced.clone();
        if self.smooth_in_s {
            let width = 0.5 * self.theta;
            let smooth = |f: &BoundaryFunction| f.map_components(|id, v| gaussian_smooth(v, geom.component(id).ds(), width));
            out.gamma = smooth(&reduced.gamma);
            out.g = smooth(&reduced.g);
            out.a = smooth(&reduced.a);
            for id in ComponentId::ALL {
                let c = geom.component(id);
                let offset = reduced.stream.get(id)[0];
                let mut s = accumulate_A(out.a.get(id), c.ds(), compatibility_tolerance(geom, &out.a))?;
                for v in s.iter_mut() {
                    *v += offset;
                }
                *out.stream.get_mut(id) = s;
            }
        }
        let ramp = time_ramp(reduced.t, self.theta);
        out.gamma = out.gamma.map(|x| x * ramp);
        out.g = out.g.map(|x| x * ramp);
        Ok(out)
    }

    /// Cut `omega0` off in the `theta`-neighbourhood of the boundary.
    pub fn apply_initial(&self, omega0: &ScalarField, grid: &Grid, geom: &DomainGeometry) -> ScalarField {
        let mut out = omega0.clone();
        for i in 0..grid.nr {
            let d = geom.distance_at_radius(grid.cell_r(i));
            let w = smoothstep((d - self.theta) / self.theta);
            for j in 0..grid.ns {
                out.set(i, j, w * omega0.at(i, j));
            }
        }
        out
    }
}

/// Mollify reduced traces and the initial vorticity for window `theta` over horizon `t_end`.
pub fn mollify_data(
    reduced: &ReducedTraces,
    omega0: &ScalarField,
    theta: f64,
    t_end: f64,
    smooth_in_s: bool,
    grid: &Grid,
    geom: &DomainGeometry,
) -> Result<(ReducedTraces, ScalarField)> {
    validate_theta(theta, geom.sigma0(), t_end)?;
    let m = Mollifier { theta, smooth_in_s };
    Ok((m.apply_traces(reduced, geom)?, m.apply_initial(omega0, grid, geom)))
}

/// Produces the (possibly mollified) reduced traces at any time.
#[derive(Clone, Debug)]
pub struct Reducer {
    pub geom: DomainGeometry,
    pub data: BoundaryData,
    pub mollifier: Option<Mollifier>,
    pub derivative: Derivative,
}

impl Reducer {
    pub fn new(geom: DomainGeometry, data: BoundaryData, mollifier: Option<Mollifier>) -> Self {
        Self {
            geom,
            data,
            mollifier,
            derivative: Derivative::Centered,
        }
    }

    pub fn reduced_at(&self, t: f64) -> Result<ReducedTraces> {
        let raw = self.data.sample(&self.geom, t);
        let reduced = reduce_boundary_data(&raw, &self.geom, self.data.inner_stream_offset, self.derivative)?;
        match &self.mollifier {
            Some(m) => m.apply_traces(&reduced, &self.geom),
            None => Ok(reduced),
        }
    }

    pub fn initial_vorticity(&self, grid: &Grid) -> ScalarField {
        match &self.mollifier {
            Some(m) => m.apply_initial(&self.data.omega0, grid, &self.geom),
            None => self.data.omega0.clone(),
        }
    }
}
