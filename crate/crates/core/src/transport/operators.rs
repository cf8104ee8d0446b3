use crate::boundary_data::{BoundaryFunction, ReducedTraces};
use crate::elliptic::ScalarField;
use crate::{Error, Result};

/// Pointwise clamp to `[-r, r]`.
pub fn cutoff(omega: &ScalarField, r: f64) -> ScalarField {
    if r.is_infinite() {
        return omega.clone();
    }
    omega.map(|w| w.clamp(-r, r))
}

/// Stored vorticity levels for the forward window average.
#[derive(Debug, Clone, Default)]
pub struct History {
    pub times: Vec<f64>,
    pub fields: Vec<ScalarField>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, field: ScalarField) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.fields.push(field);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

const TIME_EPS: f64 = 1e-12;

/// `(1/theta) int_t^{t+theta} [omega(s)]_R ds`, with `omega = 0` beyond `t_end`.
/// The history is interpolated linearly between stored levels after clamping.
/// With `theta = 0` the clamped level at `t` itself is returned.
pub fn window_average(history: &History, t: f64, theta: f64, r: f64, t_end: f64) -> Result<ScalarField> {
    let times = &history.times;
    if times.is_empty() {
        return Err(Error::MissingHistory { t });
    }
    let first = times[0];
    let last = *times.last().unwrap();
    if theta == 0.0 {
        let k = times.iter().position(|&s| (s - t).abs() <= TIME_EPS * (1.0 + t.abs()));
        return match k {
            Some(k) => Ok(cutoff(&history.fields[k], r)),
            None => Err(Error::MissingHistory { t }),
        };
    }
    let lo = t;
    let hi = (t + theta).min(t_end);
    let template = history.fields[0].map(|_| 0.0);
    if hi <= lo {
        return Ok(template);
    }
    if lo < first - TIME_EPS || hi > last + TIME_EPS * (1.0 + hi.abs()) {
        return Err(Error::MissingHistory { t });
    }
    let mut acc = template;
    let clamp = |w: f64| w.clamp(-r, r);
    let n = acc.values.len();
    for m in 0..times.len().saturating_sub(1) {
        let (t0, t1) = (times[m], times[m + 1]);
        let u0 = lo.max(t0);
        let u1 = hi.min(t1);
        if u1 <= u0 {
            continue;
        }
        let span = t1 - t0;
        let (f0, f1) = (&history.fields[m].values, &history.fields[m + 1].values);
        let (l0, l1) = ((u0 - t0) / span, (u1 - t0) / span);
        let w = 0.5 * (u1 - u0);
        for q in 0..n {
            let (a, b) = (clamp(f0[q]), clamp(f1[q]));
            let va = a + l0 * (b - a);
            let vb = a + l1 * (b - a);
            acc.values[q] += w * (va + vb);
        }
    }
    let scale = 1.0 / theta;
    for v in acc.values.iter_mut() {
        *v *= scale;
    }
    Ok(acc)
}

/// `omega_Gamma = gamma (v . s) + g` at boundary nodes.
pub fn boundary_vorticity(tangential: &BoundaryFunction, reduced: &ReducedTraces) -> BoundaryFunction {
    let mut out = tangential.zip_map(&reduced.gamma, |vs, gam| gam * vs);
    for c in 0..2 {
        for (o, g) in out.values[c].iter_mut().zip(&reduced.g.values[c]) {
            *o += g;
        }
    }
    out
}

/// Face values as the mean of the two end nodes (face `k` joins nodes `k` and `k + 1`).
pub fn faces_from_nodes(nodes: &BoundaryFunction) -> BoundaryFunction {
    nodes.map_components(|_, v| {
        let n = v.len();
        (0..n).map(|k| 0.5 * (v[k] + v[(k + 1) % n])).collect()
    })
}
