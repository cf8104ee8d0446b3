use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::boundary_data::BoundaryFunction;
use crate::elliptic::{Grid, ScalarField, VelocityField};
use crate::fourier::PeriodicTridiagonal;
use crate::geometry::{ComponentId, DomainGeometry};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// First-order upwind with forward Euler.
    #[default]
    Upwind,
    /// Minmod-limited linear reconstruction with two-stage SSP Runge-Kutta.
    Minmod,
}

/// Boundary bookkeeping of one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub courant: f64,
    /// `dt * sum` of advective vorticity flux entering through the boundary.
    pub advective_inflow: f64,
    /// `dt * sum` of diffusive vorticity flux entering through the boundary.
    pub diffusive_inflow: f64,
}

/// Advection-diffusion stepper for one grid. Diffusion factors are cached per `nu * dt`.
pub struct Stepper {
    grid: Grid,
    geom: DomainGeometry,
    scheme: Scheme,
    diffusion: Mutex<Option<(u64, std::sync::Arc<PeriodicTridiagonal>)>>,
}

impl std::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Stepper({}, {:?})", self.grid.label(), self.scheme)
    }
}

impl Clone for Stepper {
    fn clone(&self) -> Self {
        Self::new(&self.grid, &self.geom, self.scheme)
    }
}

impl Stepper {
    pub fn new(grid: &Grid, geom: &DomainGeometry, scheme: Scheme) -> Self {
        Self {
            grid: grid.clone(),
            geom: geom.clone(),
            scheme,
            diffusion: Mutex::new(None),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Largest admissible step for unit Courant number: `min V / sum(outflow)` over cells.
    pub fn advective_limit(&self, v: &VelocityField) -> f64 {
        let g = &self.grid;
        let worst = par::max(g.nr, |i| {
            let area = g.cell_area(i);
            (0..g.ns).map(|j| cell_outflow(v, g, i, j) / area).fold(0.0, f64::max)
        });
        if worst > 0.0 {
            1.0 / worst
        } else {
            f64::INFINITY
        }
    }

    /// One step of length `dt`. `omega_gamma` holds face values (face-indexed per component).
    pub fn step(
        &self,
        omega: &ScalarField,
        v: &VelocityField,
        omega_gamma: &BoundaryFunction,
        nu: f64,
        dt: f64,
    ) -> Result<(ScalarField, StepStats)> {
        let courant = dt / self.advective_limit(v);
        if courant > 1.0 + 1e-12 {
            return Err(Error::CflViolation { courant, limit: 1.0 });
        }
        let ghost = self.ghost_rows(omega_gamma);
        let (mut next, adv_in) = match self.scheme {
            Scheme::Upwind => self.advect(omega, v, &ghost, dt, false),
            Scheme::Minmod => {
                let (w1, in1) = self.advect(omega, v, &ghost, dt, true);
                let (w2, in2) = self.advect(&w1, v, &ghost, dt, true);
                let mut out = omega.clone();
                for ((o, a), b) in out.values.iter_mut().zip(&omega.values).zip(&w2.values) {
                    *o = 0.5 * (a + b);
                }
                (out, 0.5 * (in1 + in2))
            }
        };
        let mut diff_in = 0.0;
        if nu > 0.0 {
            diff_in = self.diffuse(&mut next, &ghost, nu, dt);
        }
        Ok((
            next,
            StepStats {
                courant,
                advective_inflow: adv_in,
                diffusive_inflow: diff_in,
            },
        ))
    }

    /// Boundary face values in grid-column order: (inner row, outer row).
    fn ghost_rows(&self, omega_gamma: &BoundaryFunction) -> (Vec<f64>, Vec<f64>) {
        let gather = |id: ComponentId| {
            let c = self.geom.component(id);
            (0..self.grid.ns)
                .map(|j| omega_gamma.get(id)[c.face_of_column(j)])
                .collect::<Vec<_>>()
        };
        (gather(ComponentId::Inner), gather(ComponentId::Outer))
    }

    /// Explicit conservative update. Returns the new field and `dt *` boundary advective inflow of vorticity.
    fn advect(&self, omega: &ScalarField, v: &VelocityField, ghost: &(Vec<f64>, Vec<f64>), dt: f64, limited: bool) -> (ScalarField, f64) {
        let g = &self.grid;
        let (nr, ns) = (g.nr, g.ns);
        let (inner, outer) = ghost;
        let slopes = limited.then(|| limited_slopes(omega, g));

        // Face value carried by radial face (i, j), flux-weighted.
        let radial_face = |i: usize, j: usize| -> f64 {
            let f = v.radial(i, j);
            let value = if i == 0 {
                if f > 0.0 {
                    inner[j]
                } else {
                    face_value(omega, &slopes, 0, j, Side::RadialLow)
                }
            } else if i == nr {
                if f < 0.0 {
                    outer[j]
                } else {
                    face_value(omega, &slopes, nr - 1, j, Side::RadialHigh)
                }
            } else if f > 0.0 {
                face_value(omega, &slopes, i - 1, j, Side::RadialHigh)
            } else {
                face_value(omega, &slopes, i, j, Side::RadialLow)
            };
            f * value
        };
        let angular_face = |i: usize, j: usize| -> f64 {
            let f = v.angular(i, j);
            let value = if f > 0.0 {
                face_value(omega, &slopes, i, g.jm(j), Side::AngularHigh)
            } else {
                face_value(omega, &slopes, i, j, Side::AngularLow)
            };
            f * value
        };

        let mut rad = vec![0.0; (nr + 1) * ns];
        par::for_each_row(&mut rad, ns, |i, row| {
            for (j, x) in row.iter_mut().enumerate() {
                *x = radial_face(i, j);
            }
        });
        let mut ang = vec![0.0; nr * ns];
        par::for_each_row(&mut ang, ns, |i, row| {
            for (j, x) in row.iter_mut().enumerate() {
                *x = angular_face(i, j);
            }
        });

        let mut out = omega.clone();
        par::for_each_row(&mut out.values, ns, |i, row| {
            let k = dt / g.cell_area(i);
            for (j, w) in row.iter_mut().enumerate() {
                let net = rad[(i + 1) * ns + j] - rad[i * ns + j] + ang[i * ns + g.jp(j)] - ang[i * ns + j];
                *w -= k * net;
            }
        });
        let inflow: f64 = rad[..ns].iter().sum::<f64>() - rad[nr * ns..].iter().sum::<f64>();
        (out, dt * inflow)
    }

    fn diffusion_solver(&self, nu_dt: f64) -> std::sync::Arc<PeriodicTridiagonal> {
        let key = nu_dt.to_bits();
        let mut cache = self.diffusion.lock().expect("diffusion cache poisoned");
        if let Some((k, s)) = cache.as_ref() {
            if *k == key {
                return s.clone();
            }
        }
        let g = &self.grid;
        let nr = g.nr;
        let mut lower = vec![0.0; nr];
        let mut upper = vec![0.0; nr];
        let mut diag = vec![0.0; nr];
        let mut coupling = vec![0.0; nr];
        for i in 0..nr {
            let t_lo = if i == 0 {
                boundary_transmissivity(g, 0)
            } else {
                g.node_r(i) * g.dphi / g.dr
            };
            let t_hi = if i == nr - 1 {
                boundary_transmissivity(g, nr)
            } else {
                g.node_r(i + 1) * g.dphi / g.dr
            };
            if i > 0 {
                lower[i] = -nu_dt * t_lo;
            }
            if i < nr - 1 {
                upper[i] = -nu_dt * t_hi;
            }
            diag[i] = g.cell_area(i) + nu_dt * (t_lo + t_hi);
            coupling[i] = nu_dt * g.dr / (g.cell_r(i) * g.dphi);
        }
        let solver = std::sync::Arc::new(PeriodicTridiagonal::new(lower, diag, upper, coupling, g.ns));
        *cache = Some((key, solver.clone()));
        solver
    }

    /// Backward-Euler diffusion with Dirichlet face values. Returns `dt *` diffusive boundary inflow.
    fn diffuse(&self, omega: &mut ScalarField, ghost: &(Vec<f64>, Vec<f64>), nu: f64, dt: f64) -> f64 {
        let g = &self.grid;
        let (nr, ns) = (g.nr, g.ns);
        let nu_dt = nu * dt;
        let solver = self.diffusion_solver(nu_dt);
        let (inner, outer) = ghost;
        let (tb_in, tb_out) = (boundary_transmissivity(g, 0), boundary_transmissivity(g, nr));
        let mut rhs = omega.values.clone();
        par::for_each_row(&mut rhs, ns, |i, row| {
            let area = g.cell_area(i);
            for x in row.iter_mut() {
                *x *= area;
            }
            if i == 0 {
                for (x, b) in row.iter_mut().zip(inner) {
                    *x += nu_dt * tb_in * b;
                }
            }
            if i == nr - 1 {
                for (x, b) in row.iter_mut().zip(outer) {
                    *x += nu_dt * tb_out * b;
                }
            }
        });
        solver.solve(&mut rhs);
        omega.values = rhs;
        let mut inflow = 0.0;
        for j in 0..ns {
            inflow += tb_in * (inner[j] - omega.at(0, j)) + tb_out * (outer[j] - omega.at(nr - 1, j));
        }
        nu_dt * inflow
    }
}

/// Face length over centre-to-face distance for the boundary face at node radius index `i`.
fn boundary_transmissivity(g: &Grid, i: usize) -> f64 {
    g.node_r(i) * g.dphi / (0.5 * g.dr)
}

/// Total outflow through the four faces of cell `(i, j)`.
pub fn cell_outflow(v: &VelocityField, g: &Grid, i: usize, j: usize) -> f64 {
    v.radial(i + 1, j).max(0.0) + (-v.radial(i, j)).max(0.0) + v.angular(i, g.jp(j)).max(0.0) + (-v.angular(i, j)).max(0.0)
}

#[derive(Clone, Copy)]
enum Side {
    RadialLow,
    RadialHigh,
    AngularLow,
    AngularHigh,
}

struct Slopes {
    radial: Vec<f64>,
    angular: Vec<f64>,
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

fn limited_slopes(omega: &ScalarField, g: &Grid) -> Slopes {
    let (nr, ns) = (g.nr, g.ns);
    let mut radial = vec![0.0; nr * ns];
    let mut angular = vec![0.0; nr * ns];
    for i in 0..nr {
        for j in 0..ns {
            if i > 0 && i + 1 < nr {
                radial[i * ns + j] = minmod(omega.at(i, j) - omega.at(i - 1, j), omega.at(i + 1, j) - omega.at(i, j));
            }
            angular[i * ns + j] = minmod(omega.at(i, j) - omega.at(i, g.jm(j)), omega.at(i, g.jp(j)) - omega.at(i, j));
        }
    }
    Slopes { radial, angular }
}

#[inline]
fn face_value(omega: &ScalarField, slopes: &Option<Slopes>, i: usize, j: usize, side: Side) -> f64 {
    let w = omega.at(i, j);
    match slopes {
        None => w,
        Some(s) => {
            let k = i * omega.cols + j;
            match side {
                Side::RadialLow => w - 0.5 * s.radial[k],
                Side::RadialHigh => w + 0.5 * s.radial[k],
                Side::AngularLow => w - 0.5 * s.angular[k],
                Side::AngularHigh => w + 0.5 * s.angular[k],
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{velocity_from_stream, Layout, Quantity};

    fn setup(nr: usize, ns: usize) -> (DomainGeometry, Grid) {
        let geom = DomainGeometry::annulus(0.5, 1.0, ns).unwrap();
        let grid = Grid::for_domain(&geom, nr).unwrap();
        (geom, grid)
    }

    fn swirl(grid: &Grid, geom: &DomainGeometry) -> VelocityField {
        let h = ScalarField::nodes_from_polar(grid, Quantity::Stream, |r, p| {
            0.4 * r * p.sin() + 0.3 * (r - 0.5) * (1.0 - r) * (2.0 * p).cos() + 0.1 * r * r
        });
        velocity_from_stream(&h, grid, geom)
    }

    #[test]
    fn constant_state_is_preserved() {
        let (geom, grid) = setup(16, 32);
        let v = swirl(&grid, &geom);
        for scheme in [Scheme::Upwind, Scheme::Minmod] {
            let stepper = Stepper::new(&grid, &geom, scheme);
            let dt = 0.5 * stepper.advective_limit(&v);
            let omega = ScalarField::constant(&grid, Layout::Cells, Quantity::Vorticity, 1.7);
            let faces = BoundaryFunction::zeros(32).map(|_| 1.7);
            for nu in [0.0, 0.01] {
                let (next, _) = stepper.step(&omega, &v, &faces, nu, dt).unwrap();
                assert!(next.values.iter().all(|&w| (w - 1.7).abs() < 1e-12), "{scheme:?} {nu}");
            }
        }
    }

    #[test]
    fn total_vorticity_budget_telescopes() {
        let (geom, grid) = setup(12, 24);
        let v = swirl(&grid, &geom);
        let stepper = Stepper::new(&grid, &geom, Scheme::Upwind);
        let dt = 0.8 * stepper.advective_limit(&v);
        let omega = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, |x| (3.0 * x[0]).sin() + x[1]);
        let faces = BoundaryFunction::from_fn(&geom, |_, s| (2.0 * s).cos());
        let total = |w: &ScalarField| -> f64 { (0..grid.nr).map(|i| grid.cell_area(i) * w.row(i).iter().sum::<f64>()).sum() };
        for nu in [0.0, 0.05] {
            let (next, stats) = stepper.step(&omega, &v, &faces, nu, dt).unwrap();
            let change = total(&next) - total(&omega);
            assert!(
                (change - stats.advective_inflow - stats.diffusive_inflow).abs() < 1e-10,
                "nu = {nu}"
            );
        }
    }

    #[test]
    fn cfl_violation_is_reported() {
        let (geom, grid) = setup(8, 16);
        let v = swirl(&grid, &geom);
        let stepper = Stepper::new(&grid, &geom, Scheme::Upwind);
        let dt = 2.0 * stepper.advective_limit(&v);
        let omega = ScalarField::zeros(&grid, Layout::Cells, Quantity::Vorticity);
        let r = stepper.step(&omega, &v, &BoundaryFunction::zeros(16), 0.0, dt);
        assert!(matches!(r, Err(Error::CflViolation { .. })));
    }

    #[test]
    fn discrete_max_principle() {
        let (geom, grid) = setup(16, 32);
        let v = swirl(&grid, &geom);
        let stepper = Stepper::new(&grid, &geom, Scheme::Upwind);
        let dt = stepper.advective_limit(&v);
        let mut omega = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, |x| (5.0 * x[0]).sin() * (4.0 * x[1]).cos());
        let faces = BoundaryFunction::from_fn(&geom, |_, s| 0.5 * s.sin());
        for _ in 0..20 {
            omega = stepper.step(&omega, &v, &faces, 0.01, dt).unwrap().0;
            assert!(omega.max_abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn inviscid_rotation_transport_converges() {
        // rigid rotation v_phi = r, one full turn of a radial step profile
        let err = |nr: usize, ns: usize| {
            let (geom, grid) = setup(nr, ns);
            let h = ScalarField::nodes_from_polar(&grid, Quantity::Stream, |r, _| -0.5 * r * r);
            let v = velocity_from_stream(&h, &grid, &geom);
            let stepper = Stepper::new(&grid, &geom, Scheme::Upwind);
            let profile = |x: [f64; 2]| {
                if x[1].atan2(x[0]).rem_euclid(std::f64::consts::TAU) < std::f64::consts::PI {
                    1.0
                } else {
                    0.0
                }
            };
            let start = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, profile);
            let limit = stepper.advective_limit(&v);
            let t_end = std::f64::consts::TAU;
            let steps = (t_end / (0.5 * limit)).ceil() as usize;
            let dt = t_end / steps as f64;
            let mut w = start.clone();
            let faces = BoundaryFunction::zeros(ns);
            for _ in 0..steps {
                w = stepper.step(&w, &v, &faces, 0.0, dt).unwrap().0;
            }
            (0..grid.nr)
                .map(|i| grid.cell_area(i) * w.row(i).iter().zip(start.row(i)).map(|(a, b)| (a - b).abs()).sum::<f64>())
                .sum::<f64>()
        };
        let (e1, e2, e3) = (err(4, 32), err(4, 64), err(4, 128));
        assert!(e2 < e1 && e3 < e2);
        assert!(e1 / e2 > 1.3 && e2 / e3 > 1.3, "{e1} {e2} {e3}");
    }
}
