use crate::boundary_data::BoundaryFunction;
use crate::elliptic::{Grid, ScalarField};
use crate::geometry::{ComponentId, DomainGeometry};
use crate::{smoothstep, Error, Result};

/// Blend width must lie in `(0, sigma0 / 2]`.
pub fn validate_delta(delta: f64, geom: &DomainGeometry) -> Result<()> {
    let max = 0.5 * geom.sigma0();
    if delta > 0.0 && delta <= max {
        Ok(())
    } else {
        Err(Error::BadDelta { delta, max })
    }
}

/// `omega_breve = chi(d/delta) omega_Gamma(Pi x, t) + (1 - chi(d/delta)) rho(t) omega0`,
/// with `chi` falling from 1 at the boundary to 0 at `d = delta` and `rho` from 1 at
/// `t = 0` to 0 at `t = 2 theta`.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    pub delta: f64,
    pub theta: f64,
    pub omega0: ScalarField,
}

impl ExtensionField {
    pub fn new(delta: f64, theta: f64, omega0: ScalarField, geom: &DomainGeometry) -> Result<Self> {
        validate_delta(delta, geom)?;
        Ok(Self { delta, theta, omega0 })
    }

    pub fn blend(&self, d: f64) -> f64 {
        1.0 - smoothstep(d / self.delta)
    }

    pub fn time_ramp(&self, t: f64) -> f64 {
        if self.theta > 0.0 {
            1.0 - smoothstep(t / (2.0 * self.theta))
        } else if t == 0.0 {
            1.0
        } else {
            0.0
        }
    }

    /// Cell values at time `t` given face values of `omega_Gamma`.
    pub fn at(&self, grid: &Grid, geom: &DomainGeometry, t: f64, omega_gamma_faces: &BoundaryFunction) -> ScalarField {
        let rho = self.time_ramp(t);
        let mut out = self.omega0.map(|_| 0.0);
        for i in 0..grid.nr {
            let r = grid.cell_r(i);
            let chi = self.blend(geom.distance_at_radius(r));
            let id = geom.nearest_component(r);
            let c = geom.component(id);
            for j in 0..grid.ns {
                let wg = if chi > 0.0 {
                    omega_gamma_faces.get(id)[c.face_of_column(j)]
                } else {
                    0.0
                };
                out.set(i, j, chi * wg + (1.0 - chi) * rho * self.omega0.at(i, j));
            }
        }
        out
    }

    /// Boundary trace: quadratic extrapolation of the blend to `d = 0` at each face.
    pub fn trace(&self, grid: &Grid, geom: &DomainGeometry, t: f64, omega_gamma_faces: &BoundaryFunction) -> BoundaryFunction {
        let field = self.at(grid, geom, t, omega_gamma_faces);
        let mut out = BoundaryFunction::zeros(grid.ns);
        for id in ComponentId::ALL {
            let c = geom.component(id);
            let rows = match id {
                ComponentId::Outer => [grid.nr - 1, grid.nr - 2, grid.nr - 3],
                ComponentId::Inner => [0, 1, 2],
            };
            for k in 0..grid.ns {
                let j = c.face_column(k);
                let [f0, f1, f2] = rows.map(|i| field.at(i, j));
                out.get_mut(id)[k] = (15.0 * f0 - 10.0 * f1 + 3.0 * f2) / 8.0;
            }
        }
        out
    }
}
