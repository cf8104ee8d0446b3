use crate::boundary_data::{BoundaryFunction, ReducedTraces};
use crate::elliptic::grid::{Grid, Layout, ScalarField};
use crate::elliptic::velocity::{velocity_from_stream, VelocityField};
use crate::geometry::{ComponentId, DomainGeometry};

/// Largest `|v . n - a|` over boundary faces; `a_mid` holds `a` at face midpoints.
pub fn normal_trace_error(v: &VelocityField, geom: &DomainGeometry, a_mid: &BoundaryFunction) -> f64 {
    let mut err: f64 = 0.0;
    for id in ComponentId::ALL {
        let c = geom.component(id);
        for k in 0..c.n_nodes {
            let vn = v.outward_flux(geom, id, k) / c.ds();
            err = err.max((vn - a_mid.get(id)[k]).abs());
        }
    }
    err
}

/// Vorticity extrapolated from the three nearest cell rows to the boundary
/// nodes (quadratic in `r`, averaged over the two cells sharing the node).
pub fn omega_trace(grid: &Grid, geom: &DomainGeometry, omega: &ScalarField) -> BoundaryFunction {
    debug_assert_eq!(omega.layout, Layout::Cells);
    let nr = grid.nr;
    let extrap =
        |i0: usize, i1: usize, i2: usize, j: usize| (15.0 * omega.at(i0, j) - 10.0 * omega.at(i1, j) + 3.0 * omega.at(i2, j)) / 8.0;
    let mut out = BoundaryFunction::zeros(grid.ns);
    for id in ComponentId::ALL {
        let c = geom.component(id);
        for k in 0..grid.ns {
            let j = c.node_column(k);
            let jm = grid.jm(j);
            let (i0, i1, i2) = match id {
                ComponentId::Outer => (nr - 1, nr - 2, nr - 3),
                ComponentId::Inner => (0, 1, 2),
            };
            out.get_mut(id)[k] = 0.5 * (extrap(i0, i1, i2, j) + extrap(i0, i1, i2, jm));
        }
    }
    out
}

/// Slip-condition residuals at boundary nodes.
#[derive(Debug, Clone)]
pub struct SlipResidual {
    /// `2 D(v) n . s + alpha v . s - b` from second derivatives of `h`.
    pub direct: BoundaryFunction,
    /// `omega - gamma v . s - g` from the extrapolated vorticity trace.
    pub reduced: BoundaryFunction,
}

impl SlipResidual {
    pub fn max_direct(&self) -> f64 {
        self.direct.max_abs()
    }

    pub fn max_reduced(&self) -> f64 {
        self.reduced.max_abs()
    }

    pub fn max_difference(&self) -> f64 {
        self.direct.zip_map(&self.reduced, |a, b| a - b).max_abs()
    }
}

pub fn slip_residual(grid: &Grid, geom: &DomainGeometry, h: &ScalarField, omega: &ScalarField, traces: &ReducedTraces) -> SlipResidual {
    let v = velocity_from_stream(h, grid, geom);
    let alpha = traces.alpha(geom);
    let b = traces.b(geom);
    let wt = omega_trace(grid, geom, omega);
    let nr = grid.nr;
    let (dr, dphi) = (grid.dr, grid.dphi);
    let mut direct = BoundaryFunction::zeros(grid.ns);
    let mut reduced = BoundaryFunction::zeros(grid.ns);
    for id in ComponentId::ALL {
        let c = geom.component(id);
        let r = c.radius;
        for k in 0..grid.ns {
            let j = c.node_column(k);
            let (jp, jm) = (grid.jp(j), grid.jm(j));
            let (h_r, h_rr, row) = match id {
                ComponentId::Outer => (
                    (3.0 * h.at(nr, j) - 4.0 * h.at(nr - 1, j) + h.at(nr - 2, j)) / (2.0 * dr),
                    (2.0 * h.at(nr, j) - 5.0 * h.at(nr - 1, j) + 4.0 * h.at(nr - 2, j) - h.at(nr - 3, j)) / (dr * dr),
                    nr,
                ),
                ComponentId::Inner => (
                    (-3.0 * h.at(0, j) + 4.0 * h.at(1, j) - h.at(2, j)) / (2.0 * dr),
                    (2.0 * h.at(0, j) - 5.0 * h.at(1, j) + 4.0 * h.at(2, j) - h.at(3, j)) / (dr * dr),
                    0,
                ),
            };
            let h_pp = (h.at(row, jp) - 2.0 * h.at(row, j) + h.at(row, jm)) / (dphi * dphi);
            let strain = -h_rr + h_r / r + h_pp / (r * r);
            let vs = v.tangential.get(id)[k];
            direct.get_mut(id)[k] = strain + alpha.get(id)[k] * vs - b.get(id)[k];
            reduced.get_mut(id)[k] = wt.get(id)[k] - traces.gamma.get(id)[k] * vs - traces.g.get(id)[k];
        }
    }
    SlipResidual { direct, reduced }
}
