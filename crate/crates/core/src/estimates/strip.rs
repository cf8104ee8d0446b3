use crate::elliptic::{abs_pow, Grid, ScalarField, VelocityField};
use crate::estimates::test_function::TestFunction;
use crate::geometry::{ComponentId, DomainGeometry};
use crate::transport::{ExtensionField, StepObserver, StepView};
use crate::Result;

/// `v . grad d` at cell `(i, j)`: `d` grows inward from the nearest boundary circle.
fn normal_speed(grid: &Grid, geom: &DomainGeometry, v: &VelocityField, i: usize, j: usize) -> f64 {
    let vr = v.cell_velocity(grid, i, j)[0];
    match geom.nearest_component(grid.cell_r(i)) {
        ComponentId::Outer => -vr,
        ComponentId::Inner => vr,
    }
}

/// Instantaneous strip integrand
/// `(1/sigma) int_{sigma < d < 2 sigma} |omega - omega_breve|^p (v . grad d) psi dx`.
#[allow(clippy::too_many_arguments)]
pub fn strip_flux_integrand(
    grid: &Grid,
    geom: &DomainGeometry,
    omega: &ScalarField,
    omega_breve: &ScalarField,
    v: &VelocityField,
    sigma: f64,
    p: f64,
    psi: &TestFunction,
    t: f64,
) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.nr {
        let d = geom.distance_at_radius(grid.cell_r(i));
        if d <= sigma || d >= 2.0 * sigma {
            continue;
        }
        let area = grid.cell_area(i);
        for j in 0..grid.ns {
            let w = psi.value(geom, grid.cell_center(i, j), t);
            if w == 0.0 {
                continue;
            }
            let diff = abs_pow(omega.at(i, j) - omega_breve.at(i, j), p);
            total += area * diff * normal_speed(grid, geom, v, i, j) * w;
        }
    }
    total / sigma
}

/// `int |omega - omega_breve|^p psi dx` at one time.
pub fn time_strip_integrand(
    grid: &Grid,
    geom: &DomainGeometry,
    omega: &ScalarField,
    omega_breve: &ScalarField,
    p: f64,
    psi: &TestFunction,
    t: f64,
) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.nr {
        let area = grid.cell_area(i);
        for j in 0..grid.ns {
            let w = psi.value(geom, grid.cell_center(i, j), t);
            if w != 0.0 {
                total += area * abs_pow(omega.at(i, j) - omega_breve.at(i, j), p) * w;
            }
        }
    }
    total
}

/// Accumulates, by the trapezoid rule in time, the space-time strip functional for each
/// `sigma` in `sigmas` and the initial-time functional
/// `(1/s) int_0^s int |omega - omega_breve|^p psi` for each `s` in `time_sigmas`.
pub struct StripObserver {
    grid: Grid,
    geom: DomainGeometry,
    extension: ExtensionField,
    psi: TestFunction,
    p: f64,
    pub sigmas: Vec<f64>,
    pub time_sigmas: Vec<f64>,
    flux: Vec<f64>,
    time: Vec<f64>,
    last: Option<(f64, Vec<f64>, f64)>,
}

impl StripObserver {
    pub fn new(
        grid: &Grid,
        geom: &DomainGeometry,
        extension: ExtensionField,
        psi: TestFunction,
        p: f64,
        sigmas: Vec<f64>,
        time_sigmas: Vec<f64>,
    ) -> Self {
        let flux = vec![0.0; sigmas.len()];
        let time = vec![0.0; time_sigmas.len()];
        Self {
            grid: grid.clone(),
            geom: geom.clone(),
            extension,
            psi,
            p,
            sigmas,
            time_sigmas,
            flux,
            time,
            last: None,
        }
    }

    /// Space-time strip functionals, one per `sigma`.
    pub fn flux_values(&self) -> &[f64] {
        &self.flux
    }

    /// Initial-time strip functionals, one per time width.
    pub fn time_values(&self) -> Vec<f64> {
        self.time.iter().zip(&self.time_sigmas).map(|(v, s)| v / s).collect()
    }
}

impl StepObserver for StripObserver {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        let breve = self.extension.at(&self.grid, &self.geom, view.t, view.omega_gamma_faces);
        let flux: Vec<f64> = self
            .sigmas
            .iter()
            .map(|&s| {
                strip_flux_integrand(
                    &self.grid,
                    &self.geom,
                    view.omega,
                    &breve,
                    view.velocity,
                    s,
                    self.p,
                    &self.psi,
                    view.t,
                )
            })
            .collect();
        let needs_time = self.time_sigmas.iter().any(|&s| view.t <= s * (1.0 + 1e-9));
        let inner = if needs_time {
            time_strip_integrand(&self.grid, &self.geom, view.omega, &breve, self.p, &self.psi, view.t)
        } else {
            0.0
        };
        if let Some((t_prev, prev_flux, prev_inner)) = self.last.take() {
            let h = view.t - t_prev;
            for (acc, (a, b)) in self.flux.iter_mut().zip(prev_flux.iter().zip(&flux)) {
                *acc += 0.5 * h * (a + b);
            }
            for (acc, &s) in self.time.iter_mut().zip(&self.time_sigmas) {
                if view.t <= s * (1.0 + 1e-9) {
                    *acc += 0.5 * h * (prev_inner + inner);
                }
            }
        }
        self.last = Some((view.t, flux, inner));
        Ok(())
    }
}
