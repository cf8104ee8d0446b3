use std::f64::consts::TAU;

use crate::geometry::DomainGeometry;
use crate::{Error, Result};

/// Uniform polar grid on `r_inner <= r <= r_outer`, periodic in the angle.
///
/// Cells `(i, j)` span `[r_i, r_{i+1}] x [phi_j, phi_{j+1}]` with `r_i = r_inner + i dr`
/// and `phi_j = j dphi`. Nodes `(i, j)` sit at `(r_i, phi_j)`, `i = 0..=nr`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nr: usize,
    pub ns: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub dr: f64,
    pub dphi: f64,
    node_r: Vec<f64>,
    cell_r: Vec<f64>,
}

impl Grid {
    pub fn new(r_inner: f64, r_outer: f64, nr: usize, ns: usize) -> Result<Self> {
        if nr < 4 || ns < 4 {
            return Err(Error::InvalidGeometry(format!("grid needs nr >= 4 and ns >= 4, got {nr} x {ns}")));
        }
        if !(r_inner > 0.0 && r_outer > r_inner) {
            return Err(Error::InvalidGeometry(format!("bad radii ({r_inner}, {r_outer})")));
        }
        let dr = (r_outer - r_inner) / nr as f64;
        let node_r = (0..=nr).map(|i| r_inner + i as f64 * dr).collect();
        let cell_r = (0..nr).map(|i| r_inner + (i as f64 + 0.5) * dr).collect();
        Ok(Self {
            nr,
            ns,
            r_inner,
            r_outer,
            dr,
            dphi: TAU / ns as f64,
            node_r,
            cell_r,
        })
    }

    /// Grid matching `geom`, whose boundary node count must equal `ns`.
    pub fn for_domain(geom: &DomainGeometry, nr: usize) -> Result<Self> {
        Self::new(geom.core_radius, geom.r_outer, nr, geom.components[0].n_nodes)
    }

    pub fn node_r(&self, i: usize) -> f64 {
        self.node_r[i]
    }

    pub fn cell_r(&self, i: usize) -> f64 {
        self.cell_r[i]
    }

    pub fn cell_radii(&self) -> &[f64] {
        &self.cell_r
    }

    pub fn node_phi(&self, j: usize) -> f64 {
        j as f64 * self.dphi
    }

    pub fn cell_phi(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dphi
    }

    /// Area of any cell in row `i` (exact for the annular sector).
    pub fn cell_area(&self, i: usize) -> f64 {
        self.cell_r[i] * self.dr * self.dphi
    }

    pub fn n_cells(&self) -> usize {
        self.nr * self.ns
    }

    pub fn n_nodes(&self) -> usize {
        (self.nr + 1) * self.ns
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let (s, c) = self.cell_phi(j).sin_cos();
        [self.cell_r[i] * c, self.cell_r[i] * s]
    }

    /// Smallest cell dimension, used for CFL and strip widths.
    pub fn min_spacing(&self) -> f64 {
        self.dr.min(self.r_inner * self.dphi)
    }

    /// Representative spacing `max(dr, r_outer dphi)`.
    pub fn spacing(&self) -> f64 {
        self.dr.max(self.r_outer * self.dphi)
    }

    #[inline]
    pub fn jp(&self, j: usize) -> usize {
        if j + 1 == self.ns {
            0
        } else {
            j + 1
        }
    }

    #[inline]
    pub fn jm(&self, j: usize) -> usize {
        if j == 0 {
            self.ns - 1
        } else {
            j - 1
        }
    }

    pub fn label(&self) -> String {
        format!("{}x{}", self.nr, self.ns)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `nr x ns`, values at cell centres.
    Cells,
    /// `(nr + 1) x ns`, values at nodes including both boundary circles.
    Nodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Vorticity,
    Stream,
    Generic,
}

impl Quantity {
    pub fn tag(self) -> &'static str {
        match self {
            Quantity::Vorticity => "omega",
            Quantity::Stream => "stream",
            Quantity::Generic => "generic",
        }
    }
}

/// Row-major grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub layout: Layout,
    pub quantity: Quantity,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid, layout: Layout, quantity: Quantity) -> Self {
        let rows = match layout {
            Layout::Cells => grid.nr,
            Layout::Nodes => grid.nr + 1,
        };
        Self {
            layout,
            quantity,
            rows,
            cols: grid.ns,
            values: vec![0.0; rows * grid.ns],
        }
    }

    pub fn constant(grid: &Grid, layout: Layout, quantity: Quantity, c: f64) -> Self {
        let mut f = Self::zeros(grid, layout, quantity);
        f.values.fill(c);
        f
    }

    /// Cell field from a function of the cell-centre point.
    pub fn cells_from_fn(grid: &Grid, quantity: Quantity, f: impl Fn([f64; 2]) -> f64) -> Self {
        let mut out = Self::zeros(grid, Layout::Cells, quantity);
        for i in 0..grid.nr {
            for j in 0..grid.ns {
                out.values[i * grid.ns + j] = f(grid.cell_center(i, j));
            }
        }
        out
    }

    /// Node field from a function of `(r, phi)`.
    pub fn nodes_from_polar(grid: &Grid, quantity: Quantity, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid, Layout::Nodes, quantity);
        for i in 0..=grid.nr {
            for j in 0..grid.ns {
                out.values[i * grid.ns + j] = f(grid.node_r(i), grid.node_phi(j));
            }
        }
        out
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        Self {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            ..self.clone()
        }
    }
}

/// Area-weighted `sum |f|^p dA` over the cells of `f` (which must be a cell field).
pub fn power_sum(grid: &Grid, f: &ScalarField, p: f64) -> f64 {
    debug_assert_eq!(f.layout, Layout::Cells);
    let mut total = 0.0;
    for i in 0..grid.nr {
        let row: f64 = f.row(i).iter().map(|v| abs_pow(*v, p)).sum();
        total += row * grid.cell_area(i);
    }
    total
}

/// `|x|^p`, using repeated multiplication for integral exponents.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        x.abs().powi(p as i32)
    } else {
        x.abs().powf(p)
    }
}

/// Area-weighted discrete `L_p` norm of a cell field; `p = inf` gives the max norm.
pub fn discrete_norm(grid: &Grid, f: &ScalarField, p: f64) -> f64 {
    if p.is_infinite() {
        f.max_abs()
    } else {
        power_sum(grid, f, p).powf(1.0 / p)
    }
}

/// Area-weighted `L_2` distance between two cell fields.
pub fn l2_distance(grid: &Grid, a: &ScalarField, b: &ScalarField) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.nr {
        let row: f64 = a.row(i).iter().zip(b.row(i)).map(|(x, y)| (x - y) * (x - y)).sum();
        total += row * grid.cell_area(i);
    }
    total.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cell_areas_sum_to_domain_area() {
        let g = Grid::new(0.5, 1.0, 37, 53).unwrap();
        let total: f64 = (0..g.nr).map(|i| g.cell_area(i) * g.ns as f64).sum();
        let exact = PI * (1.0 - 0.25);
        assert!(((total - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_of_one() {
        let g = Grid::new(0.5, 1.0, 16, 32).unwrap();
        let f = ScalarField::constant(&g, Layout::Cells, Quantity::Generic, 1.0);
        let n = discrete_norm(&g, &f, 2.0);
        assert!((n - (0.75 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn max_norm_of_constant() {
        let g = Grid::new(0.5, 1.0, 8, 8).unwrap();
        let f = ScalarField::constant(&g, Layout::Cells, Quantity::Generic, -2.5);
        assert_eq!(discrete_norm(&g, &f, f64::INFINITY), 2.5);
    }

    #[test]
    fn normalized_norms_increase_towards_max_for_gaussian() {
        let g = Grid::new(0.5, 1.0, 32, 64).unwrap();
        let f = ScalarField::cells_from_fn(&g, Quantity::Generic, |x| {
            let d2 = (x[0] - 0.75).powi(2) + x[1].powi(2);
            (-d2 / 0.02).exp()
        });
        let area = 0.75 * PI;
        let max = f.max_abs();
        let mut prev = 0.0;
        for p in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
            let normalized = discrete_norm(&g, &f, p) / area.powf(1.0 / p);
            assert!(normalized > prev);
            assert!(normalized <= max + 1e-12);
            prev = normalized;
        }
        assert!(max - prev < 0.1 * max);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Grid::new(0.5, 1.0, 2, 16).is_err());
        assert!(Grid::new(1.0, 0.5, 8, 16).is_err());
    }
}
