use crate::boundary_data::BoundaryFunction;
use crate::elliptic::grid::{Grid, Layout, ScalarField};
use crate::geometry::{ComponentId, DomainGeometry};

/// Face fluxes on the staggered polar grid, derived from node values of the stream function.
///
/// `radial_flux[i * ns + j]` crosses the arc at `r_i` between `phi_j` and `phi_{j+1}`
/// in the `+r` direction (`i = 0..=nr`). `angular_flux[i * ns + j]` crosses the ray
/// at `phi_j` between `r_i` and `r_{i+1}` in the `+phi` direction. Fluxes are
/// velocity times face length.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub nr: usize,
    pub ns: usize,
    pub radial_flux: Vec<f64>,
    pub angular_flux: Vec<f64>,
    /// Tangential velocity `v . s` at boundary nodes (one-sided second-order stencil).
    pub tangential: BoundaryFunction,
}

impl VelocityField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            nr: grid.nr,
            ns: grid.ns,
            radial_flux: vec![0.0; (grid.nr + 1) * grid.ns],
            angular_flux: vec![0.0; grid.nr * grid.ns],
            tangential: BoundaryFunction::zeros(grid.ns),
        }
    }

    #[inline]
    pub fn radial(&self, i: usize, j: usize) -> f64 {
        self.radial_flux[i * self.ns + j]
    }

    #[inline]
    pub fn angular(&self, i: usize, j: usize) -> f64 {
        self.angular_flux[i * self.ns + j]
    }

    /// Net outflow of cell `(i, j)`.
    pub fn divergence(&self, i: usize, j: usize) -> f64 {
        let jp = if j + 1 == self.ns { 0 } else { j + 1 };
        self.radial(i + 1, j) - self.radial(i, j) + self.angular(i, jp) - self.angular(i, j)
    }

    /// Outward flux through boundary face `k` of component `id`.
    pub fn outward_flux(&self, geom: &DomainGeometry, id: ComponentId, k: usize) -> f64 {
        let j = geom.component(id).face_column(k);
        match id {
            ComponentId::Outer => self.radial(self.nr, j),
            ComponentId::Inner => -self.radial(0, j),
        }
    }

    /// Outward fluxes of all boundary faces, indexed by face.
    pub fn boundary_fluxes(&self, geom: &DomainGeometry) -> BoundaryFunction {
        let n = self.ns;
        let mut out = BoundaryFunction::zeros(n);
        for id in ComponentId::ALL {
            for k in 0..n {
                out.get_mut(id)[k] = self.outward_flux(geom, id, k);
            }
        }
        out
    }

    /// Cell-centre velocity `(v_r, v_phi)` from averaged face velocities.
    pub fn cell_velocity(&self, grid: &Grid, i: usize, j: usize) -> [f64; 2] {
        let jp = grid.jp(j);
        let vr_in = self.radial(i, j) / (grid.node_r(i) * grid.dphi);
        let vr_out = self.radial(i + 1, j) / (grid.node_r(i + 1) * grid.dphi);
        let vphi = 0.5 * (self.angular(i, j) + self.angular(i, jp)) / grid.dr;
        [0.5 * (vr_in + vr_out), vphi]
    }

    /// Cartesian cell-centre velocity.
    pub fn cell_velocity_xy(&self, grid: &Grid, i: usize, j: usize) -> [f64; 2] {
        let [vr, vp] = self.cell_velocity(grid, i, j);
        let (s, c) = grid.cell_phi(j).sin_cos();
        [vr * c - vp * s, vr * s + vp * c]
    }

    /// Largest face speed.
    pub fn max_speed(&self, grid: &Grid) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=grid.nr {
            let len = grid.node_r(i) * grid.dphi;
            for j in 0..grid.ns {
                m = m.max(self.radial(i, j).abs() / len);
            }
        }
        for v in &self.angular_flux {
            m = m.max(v.abs() / grid.dr);
        }
        m
    }
}

/// `v = rot h`: radial fluxes are angular differences of `h`, angular fluxes minus radial differences.
pub fn velocity_from_stream(h: &ScalarField, grid: &Grid, geom: &DomainGeometry) -> VelocityField {
    assert_eq!(h.layout, Layout::Nodes);
    let (nr, ns) = (grid.nr, grid.ns);
    let mut v = VelocityField::zeros(grid);
    for i in 0..=nr {
        for j in 0..ns {
            v.radial_flux[i * ns + j] = h.at(i, grid.jp(j)) - h.at(i, j);
        }
    }
    for i in 0..nr {
        for j in 0..ns {
            v.angular_flux[i * ns + j] = -(h.at(i + 1, j) - h.at(i, j));
        }
    }
    let two_dr = 2.0 * grid.dr;
    for id in ComponentId::ALL {
        let c = geom.component(id);
        for k in 0..ns {
            let j = c.node_column(k);
            v.tangential.get_mut(id)[k] = match id {
                ComponentId::Outer => -(3.0 * h.at(nr, j) - 4.0 * h.at(nr - 1, j) + h.at(nr - 2, j)) / two_dr,
                ComponentId::Inner => (-3.0 * h.at(0, j) + 4.0 * h.at(1, j) - h.at(2, j)) / two_dr,
            };
        }
    }
    v
}

/// `(dh/dr, (1/r) dh/dphi)` at cell centres from the four corner nodes.
pub fn gradient_at_cells(h: &ScalarField, grid: &Grid) -> (ScalarField, ScalarField) {
    let mut gr = ScalarField::zeros(grid, Layout::Cells, h.quantity);
    let mut gp = gr.clone();
    for i in 0..grid.nr {
        let r = grid.cell_r(i);
        for j in 0..grid.ns {
            let jp = grid.jp(j);
            let dr = 0.5 * ((h.at(i + 1, j) - h.at(i, j)) + (h.at(i + 1, jp) - h.at(i, jp))) / grid.dr;
            let dp = 0.5 * ((h.at(i, jp) - h.at(i, j)) + (h.at(i + 1, jp) - h.at(i + 1, j))) / (r * grid.dphi);
            gr.set(i, j, dr);
            gp.set(i, j, dp);
        }
    }
    (gr, gp)
}
