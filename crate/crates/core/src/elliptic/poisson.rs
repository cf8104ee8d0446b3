use std::sync::Arc;

use crate::boundary_data::BoundaryFunction;
use crate::elliptic::grid::{Grid, Layout, Quantity, ScalarField};
use crate::fourier::PeriodicTridiagonal;
use crate::geometry::{ComponentId, DomainGeometry};
use crate::{Error, Result};

/// Finite-volume `-Δh = f` on the nodes of a polar grid with Dirichlet data
/// on both circles. The factorization is built once and shared.
#[derive(Clone)]
pub struct StreamSolver {
    grid: Grid,
    solver: Arc<PeriodicTridiagonal>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl std::fmt::Debug for StreamSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StreamSolver({})", self.grid.label())
    }
}

impl StreamSolver {
    pub fn new(grid: &Grid) -> Self {
        let rows = grid.nr - 1;
        let (dr, dphi) = (grid.dr, grid.dphi);
        let mut lower = Vec::with_capacity(rows);
        let mut diag = Vec::with_capacity(rows);
        let mut upper = Vec::with_capacity(rows);
        let mut coupling = Vec::with_capacity(rows);
        for i in 1..grid.nr {
            let r_minus = grid.node_r(i) - 0.5 * dr;
            let r_plus = grid.node_r(i) + 0.5 * dr;
            lower.push(-r_minus * dphi / dr);
            upper.push(-r_plus * dphi / dr);
            diag.push((r_minus + r_plus) * dphi / dr);
            coupling.push(dr / (grid.node_r(i) * dphi));
        }
        let solver = PeriodicTridiagonal::new(lower.clone(), diag, upper.clone(), coupling, grid.ns);
        Self {
            grid: grid.clone(),
            solver: Arc::new(solver),
            lower,
            upper,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Solve with a source given at nodes (boundary rows of `source` are ignored) and
    /// Dirichlet rows `inner_row`, `outer_row` indexed by grid column.
    pub fn solve_nodes(&self, source: &ScalarField, inner_row: &[f64], outer_row: &[f64]) -> Result<ScalarField> {
        let g = &self.grid;
        let (nr, ns) = (g.nr, g.ns);
        assert_eq!(source.layout, Layout::Nodes);
        let mut rhs = vec![0.0; (nr - 1) * ns];
        for i in 1..nr {
            let vol = g.node_r(i) * g.dr * g.dphi;
            let row = &mut rhs[(i - 1) * ns..i * ns];
            for (j, v) in row.iter_mut().enumerate() {
                *v = source.at(i, j) * vol;
            }
        }
        for j in 0..ns {
            rhs[j] -= self.lower[0] * inner_row[j];
            rhs[(nr - 2) * ns + j] -= self.upper[nr - 2] * outer_row[j];
        }
        self.solver.solve(&mut rhs);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverDiverged);
        }
        let mut h = ScalarField::zeros(g, Layout::Nodes, Quantity::Stream);
        h.values[..ns].copy_from_slice(inner_row);
        h.values[ns..nr * ns].copy_from_slice(&rhs);
        h.values[nr * ns..].copy_from_slice(outer_row);
        Ok(h)
    }

    /// `-Δh = omega` for a cell-centred `omega` with `h = A` on the boundary.
    pub fn solve_stream(&self, omega: &ScalarField, stream_data: &BoundaryFunction, geom: &DomainGeometry) -> Result<ScalarField> {
        let source = cells_to_nodes(&self.grid, omega);
        let (inner, outer) = boundary_rows(&self.grid, geom, stream_data);
        self.solve_nodes(&source, &inner, &outer)
    }

    /// The two parts of the stream function: zero boundary data (`h1`) and zero source (`h2`).
    pub fn decomposed(
        &self,
        omega: &ScalarField,
        stream_data: &BoundaryFunction,
        geom: &DomainGeometry,
    ) -> Result<(ScalarField, ScalarField)> {
        let zero = BoundaryFunction::zeros(self.grid.ns);
        let h1 = self.solve_stream(omega, &zero, geom)?;
        let blank = ScalarField::zeros(&self.grid, Layout::Cells, Quantity::Vorticity);
        let h2 = self.solve_stream(&blank, stream_data, geom)?;
        Ok((h1, h2))
    }
}

/// Node values averaged from the (up to four) adjacent cells; boundary rows use the two adjacent cells.
pub fn cells_to_nodes(grid: &Grid, omega: &ScalarField) -> ScalarField {
    let (nr, ns) = (grid.nr, grid.ns);
    let mut out = ScalarField::zeros(grid, Layout::Nodes, Quantity::Generic);
    for i in 0..=nr {
        for j in 0..ns {
            let jm = grid.jm(j);
            let v = if i == 0 {
                0.5 * (omega.at(0, jm) + omega.at(0, j))
            } else if i == nr {
                0.5 * (omega.at(nr - 1, jm) + omega.at(nr - 1, j))
            } else {
                0.25 * (omega.at(i - 1, jm) + omega.at(i - 1, j) + omega.at(i, jm) + omega.at(i, j))
            };
            out.set(i, j, v);
        }
    }
    out
}

/// Dirichlet rows (inner, outer) in grid-column order from per-component boundary values.
pub fn boundary_rows(grid: &Grid, geom: &DomainGeometry, f: &BoundaryFunction) -> (Vec<f64>, Vec<f64>) {
    let gather = |id: ComponentId| {
        let c = geom.component(id);
        (0..grid.ns).map(|j| f.get(id)[c.node_of_column(j)]).collect::<Vec<_>>()
    };
    (gather(ComponentId::Inner), gather(ComponentId::Outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(nr: usize, ns: usize) -> (DomainGeometry, Grid, StreamSolver) {
        let geom = DomainGeometry::annulus(0.5, 1.0, ns).unwrap();
        let grid = Grid::for_domain(&geom, nr).unwrap();
        let solver = StreamSolver::new(&grid);
        (geom, grid, solver)
    }

    fn max_node_error(grid: &Grid, h: &ScalarField, exact: impl Fn(f64, f64) -> f64) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..=grid.nr {
            for j in 0..grid.ns {
                e = e.max((h.at(i, j) - exact(grid.node_r(i), grid.node_phi(j))).abs());
            }
        }
        e
    }

    #[test]
    fn constants_are_discrete_harmonic() {
        let (geom, grid, solver) = setup(16, 32);
        let omega = ScalarField::zeros(&grid, Layout::Cells, Quantity::Vorticity);
        let data = BoundaryFunction::zeros(32).map(|_| 2.5);
        let h = solver.solve_stream(&omega, &data, &geom).unwrap();
        assert!(h.values.iter().all(|&v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn uniform_flow_is_recovered() {
        let eps = 0.3;
        let err = |nr: usize, ns: usize| {
            let (geom, grid, solver) = setup(nr, ns);
            let omega = ScalarField::zeros(&grid, Layout::Cells, Quantity::Vorticity);
            let data = BoundaryFunction::from_fn(&geom, |id, s| {
                let c = geom.component(id);
                eps * c.radius * c.angle(s).sin()
            });
            let h = solver.solve_stream(&omega, &data, &geom).unwrap();
            max_node_error(&grid, &h, |r, phi| eps * r * phi.sin())
        };
        let (e1, e2) = (err(16, 32), err(32, 64));
        assert!(e2 < 1e-3 * eps);
        assert!(e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn uniform_vorticity_radial_solution() {
        let exact = |r: f64, _phi: f64| (1.0 - r * r) / 4.0 + 3.0 / (16.0 * 2f64.ln()) * r.ln();
        let err = |nr: usize, ns: usize| {
            let (geom, grid, solver) = setup(nr, ns);
            let omega = ScalarField::constant(&grid, Layout::Cells, Quantity::Vorticity, 1.0);
            let h = solver.solve_stream(&omega, &BoundaryFunction::zeros(ns), &geom).unwrap();
            max_node_error(&grid, &h, exact)
        };
        let (e1, e2) = (err(32, 16), err(64, 16));
        assert!(e2 < 1e-4, "{e2}");
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn harmonic_part_obeys_max_principle() {
        let (geom, grid, solver) = setup(24, 48);
        let omega = ScalarField::zeros(&grid, Layout::Cells, Quantity::Vorticity);
        let data = BoundaryFunction::from_fn(&geom, |id, s| match id {
            ComponentId::Outer => (3.0 * s).sin() + 0.2,
            ComponentId::Inner => (s * 4.0).cos() * 0.5,
        });
        let h = solver.solve_stream(&omega, &data, &geom).unwrap();
        let lo = data.values.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        let hi = data.values.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(h.values.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    #[test]
    fn solve_is_linear() {
        let (geom, grid, solver) = setup(12, 24);
        let w1 = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, |x| x[0] * x[1]);
        let w2 = ScalarField::cells_from_fn(&grid, Quantity::Vorticity, |x| (3.0 * x[0]).cos());
        let a1 = BoundaryFunction::from_fn(&geom, |_, s| s.sin());
        let a2 = BoundaryFunction::from_fn(&geom, |_, s| (2.0 * s).cos());
        let h1 = solver.solve_stream(&w1, &a1, &geom).unwrap();
        let h2 = solver.solve_stream(&w2, &a2, &geom).unwrap();
        let h12 = solver
            .solve_stream(&w1.zip_map(&w2, |a, b| a + b), &a1.zip_map(&a2, |a, b| a + b), &geom)
            .unwrap();
        for k in 0..h12.values.len() {
            assert!((h12.values[k] - h1.values[k] - h2.values[k]).abs() < 1e-12);
        }
        let (p1, p2) = solver.decomposed(&w1, &a1, &geom).unwrap();
        for k in 0..h1.values.len() {
            assert!((p1.values[k] + p2.values[k] - h1.values[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        // h = (r - 1/2)(1 - r) sin 2phi, -Δh = f
        let f = |r: f64, phi: f64| {
            let q = (r - 0.5) * (1.0 - r);
            let qr = 1.5 - 2.0 * r;
            let qrr = -2.0;
            -(qrr + qr / r - 4.0 * q / (r * r)) * (2.0 * phi).sin()
        };
        let exact = |r: f64, phi: f64| (r - 0.5) * (1.0 - r) * (2.0 * phi).sin();
        let err = |nr: usize, ns: usize| {
            let (_, grid, solver) = setup(nr, ns);
            let src = ScalarField::nodes_from_polar(&grid, Quantity::Generic, f);
            let h = solver.solve_nodes(&src, &vec![0.0; ns], &vec![0.0; ns]).unwrap();
            max_node_error(&grid, &h, exact)
        };
        let ratio = err(16, 32) / err(32, 64);
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
        let _ = PI;
    }
}
