use crate::boundary_data::BoundaryFunction;
use crate::elliptic::{Grid, ScalarField, VelocityField};
use crate::estimates::test_function::TestFunction;
use crate::geometry::{ComponentId, DomainGeometry};
use crate::transport::{StepObserver, StepView};
use crate::Result;

/// Spatial part of the weak form at one time:
/// `int omega (psi_t + v . grad psi) dx - sum_{inflow faces} F omega_Gamma psi + nu sum_cells psi L omega`,
/// with `F < 0` the outward face flux and `L` the finite-volume Laplacian of the
/// transport step (Dirichlet face values `omega_Gamma` on both circles).
#[allow(clippy::too_many_arguments)]
pub fn weak_form_integrand(
    grid: &Grid,
    geom: &DomainGeometry,
    omega: &ScalarField,
    v: &VelocityField,
    fluxes: &BoundaryFunction,
    omega_gamma_faces: &BoundaryFunction,
    psi: &TestFunction,
    t: f64,
    nu: f64,
) -> f64 {
    time_part(grid, geom, omega, psi, t)
        + transport_part(grid, geom, omega, v, fluxes, omega_gamma_faces, psi, t)
        + viscous_part(grid, geom, omega, omega_gamma_faces, psi, t, nu)
}

/// `int omega psi_t(x, t) dx`.
fn time_part(grid: &Grid, geom: &DomainGeometry, omega: &ScalarField, psi: &TestFunction, t: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.nr {
        let area = grid.cell_area(i);
        for j in 0..grid.ns {
            let psi_t = psi.eval(geom, grid.cell_center(i, j), t).2;
            if psi_t != 0.0 {
                total += area * omega.at(i, j) * psi_t;
            }
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn transport_part(
    grid: &Grid,
    geom: &DomainGeometry,
    omega: &ScalarField,
    v: &VelocityField,
    fluxes: &BoundaryFunction,
    omega_gamma_faces: &BoundaryFunction,
    psi: &TestFunction,
    t: f64,
) -> f64 {
    let mut interior = 0.0;
    for i in 0..grid.nr {
        let area = grid.cell_area(i);
        for j in 0..grid.ns {
            let grad = psi.eval(geom, grid.cell_center(i, j), t).1;
            if grad == [0.0; 2] {
                continue;
            }
            let u = v.cell_velocity_xy(grid, i, j);
            interior += area * omega.at(i, j) * (u[0] * grad[0] + u[1] * grad[1]);
        }
    }
    let mut boundary = 0.0;
    for id in ComponentId::ALL {
        let c = geom.component(id);
        for k in 0..c.n_nodes {
            let f = fluxes.get(id)[k];
            if f >= 0.0 {
                continue;
            }
            let phi = grid.cell_phi(c.face_column(k));
            let x = [c.radius * phi.cos(), c.radius * phi.sin()];
            boundary += f * omega_gamma_faces.get(id)[k] * psi.value(geom, x, t);
        }
    }
    interior - boundary
}

/// `nu sum_cells psi(x_c, t) (L omega)_c`.
fn viscous_part(
    grid: &Grid,
    geom: &DomainGeometry,
    omega: &ScalarField,
    omega_gamma_faces: &BoundaryFunction,
    psi: &TestFunction,
    t: f64,
    nu: f64,
) -> f64 {
    if nu <= 0.0 {
        return 0.0;
    }
    let (inner, outer) = boundary_rows_faces(grid, geom, omega_gamma_faces);
    let mut total = 0.0;
    for i in 0..grid.nr {
        for j in 0..grid.ns {
            let value = psi.value(geom, grid.cell_center(i, j), t);
            if value != 0.0 {
                total += value * fv_laplacian(grid, omega, &inner, &outer, i, j);
            }
        }
    }
    nu * total
}

/// Face values in grid-column order: (inner circle, outer circle).
fn boundary_rows_faces(grid: &Grid, geom: &DomainGeometry, faces: &BoundaryFunction) -> (Vec<f64>, Vec<f64>) {
    let gather = |id: ComponentId| {
        let c = geom.component(id);
        (0..grid.ns).map(|j| faces.get(id)[c.face_of_column(j)]).collect::<Vec<_>>()
    };
    (gather(ComponentId::Inner), gather(ComponentId::Outer))
}

/// Net diffusive flux into cell `(i, j)` per unit viscosity (integral of `Δomega` over the cell).
fn fv_laplacian(grid: &Grid, omega: &ScalarField, inner: &[f64], outer: &[f64], i: usize, j: usize) -> f64 {
    let (dr, dphi) = (grid.dr, grid.dphi);
    let w = omega.at(i, j);
    let lo = if i == 0 {
        grid.node_r(0) * dphi / (0.5 * dr) * (inner[j] - w)
    } else {
        grid.node_r(i) * dphi / dr * (omega.at(i - 1, j) - w)
    };
    let hi = if i + 1 == grid.nr {
        grid.node_r(grid.nr) * dphi / (0.5 * dr) * (outer[j] - w)
    } else {
        grid.node_r(i + 1) * dphi / dr * (omega.at(i + 1, j) - w)
    };
    let ang = dr / (grid.cell_r(i) * dphi) * (omega.at(i, grid.jp(j)) + omega.at(i, grid.jm(j)) - 2.0 * w);
    lo + hi + ang
}

/// `int omega0 psi(x, 0) dx`.
pub fn initial_pairing(grid: &Grid, geom: &DomainGeometry, omega0: &ScalarField, psi: &TestFunction) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.nr {
        let area = grid.cell_area(i);
        for j in 0..grid.ns {
            total += area * omega0.at(i, j) * psi.value(geom, grid.cell_center(i, j), 0.0);
        }
    }
    total
}

/// Space-time residual of the weak formulation over the levels of a march, one
/// accumulator per test function. The quadrature follows the time levels of the
/// transport step: on `[t_n, t_n+1]` the time-derivative, advective and inflow terms
/// use level `n`, and the viscous term uses `omega(t_n+1)` with the face values of
/// level `n`, all weighted by `psi(t_n)`.
pub struct WeakFormObserver {
    grid: Grid,
    geom: DomainGeometry,
    pub psis: Vec<TestFunction>,
    nu: f64,
    sums: Vec<f64>,
    last: Option<(f64, Vec<f64>, BoundaryFunction)>,
}

impl WeakFormObserver {
    pub fn new(grid: &Grid, geom: &DomainGeometry, psis: Vec<TestFunction>, nu: f64) -> Self {
        let n = psis.len();
        Self {
            grid: grid.clone(),
            geom: geom.clone(),
            psis,
            nu,
            sums: vec![0.0; n],
            last: None,
        }
    }

    /// Signed residual `LHS - RHS` per test function.
    pub fn residuals(&self) -> &[f64] {
        &self.sums
    }
}

impl StepObserver for WeakFormObserver {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        let (g, geom) = (&self.grid, &self.geom);
        match self.last.take() {
            None => {
                for (acc, psi) in self.sums.iter_mut().zip(&self.psis) {
                    *acc += initial_pairing(g, geom, view.omega, psi);
                }
            }
            Some((t_prev, transport, faces)) => {
                let h = view.t - t_prev;
                for ((acc, psi), tr) in self.sums.iter_mut().zip(&self.psis).zip(transport) {
                    *acc += h * (tr + viscous_part(g, geom, view.omega, &faces, psi, t_prev, self.nu));
                }
            }
        }
        let transport = self
            .psis
            .iter()
            .map(|psi| {
                time_part(g, geom, view.omega, psi, view.t)
                    + transport_part(g, geom, view.omega, view.velocity, view.fluxes, view.omega_gamma_faces, psi, view.t)
            })
            .collect();
        self.last = Some((view.t, transport, view.omega_gamma_faces.clone()));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{Layout, Quantity};

    #[test]
    fn zero_everything_gives_zero() {
        let geom = DomainGeometry::annulus(0.5, 1.0, 32).unwrap();
        let grid = Grid::for_domain(&geom, 16).unwrap();
        let w = ScalarField::zeros(&grid, Layout::Cells, Quantity::Vorticity);
        let v = VelocityField::zeros(&grid);
        let z = BoundaryFunction::zeros(32);
        let psi = TestFunction::outer_collar(&geom, 1.0, 0.1);
        assert_eq!(weak_form_integrand(&grid, &geom, &w, &v, &z, &z, &psi, 0.3, 0.0), 0.0);
        assert_eq!(initial_pairing(&grid, &geom, &w, &psi), 0.0);
    }

    #[test]
    fn rigid_rotation_of_radial_profile_is_steady() {
        // omega = f(r) under v = r e_phi is steady; psi interior and time independent
        let geom = DomainGeometry::annulus(0.5, 1.0, 128).unwrap();
        let grid = Grid::for_domain(&geom, 64).unwrap();
        let w = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, |x| x[0].hypot(x[1]).powi(2));
        let mut v = VelocityField::zeros(&grid);
        for i in 0..grid.nr {
            for j in 0..grid.ns {
                let k = i * grid.ns + j;
                // angular flux through the radial face = integral of r dr
                v.angular_flux[k] = 0.5 * (grid.node_r(i + 1).powi(2) - grid.node_r(i).powi(2));
            }
        }
        let psi = TestFunction::SpaceTimeBump {
            center: [0.0, 0.75],
            radius: 0.2,
            t_center: 0.5,
            t_half: 10.0,
        };
        let z = BoundaryFunction::zeros(128);
        let r = weak_form_integrand(&grid, &geom, &w, &v, &z, &z, &psi, 0.5, 0.0);
        let scale = initial_pairing(&grid, &geom, &w, &psi);
        assert!(r.abs() < 1e-3 * scale, "{r} vs {scale}");
    }

    #[test]
    fn viscous_part_matches_laplacian_pairing() {
        // omega = r^2 has Δomega = 4; face values are the exact trace
        let geom = DomainGeometry::annulus(0.5, 1.0, 128).unwrap();
        let grid = Grid::for_domain(&geom, 64).unwrap();
        let w = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, |x| x[0] * x[0] + x[1] * x[1]);
        let faces = BoundaryFunction::from_fn(&geom, |id, _| geom.component(id).radius.powi(2));
        let psi = TestFunction::outer_collar(&geom, 1.0, 0.1);
        let got = viscous_part(&grid, &geom, &w, &faces, &psi, 0.2, 0.5);
        let mut expected = 0.0;
        for i in 0..grid.nr {
            for j in 0..grid.ns {
                expected += grid.cell_area(i) * 4.0 * psi.value(&geom, grid.cell_center(i, j), 0.2);
            }
        }
        assert!((got - 0.5 * expected).abs() < 2e-2 * expected, "{got} vs {}", 0.5 * expected);

        let c = ScalarField::constant(&grid, Layout::Cells, Quantity::Vorticity, 3.0);
        let cf = BoundaryFunction::zeros(128).map(|_| 3.0);
        assert!(viscous_part(&grid, &geom, &c, &cf, &psi, 0.2, 0.5).abs() < 1e-12);
    }
}
