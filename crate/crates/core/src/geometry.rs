//! Domain shapes and boundary frames.
//!
//! Both supported domains are annular in the solver: the disk is represented
//! by an annulus whose inner circle is a small impermeable core. Every domain
//! therefore has exactly two boundary components, the outer circle
//! ([`ComponentId::Outer`]) and the inner circle ([`ComponentId::Inner`]).
//!
//! Arc length runs so that the tangent is the outward normal rotated by +90°.
//! On the outer circle that is counter-clockwise (`phi = s / R`); on the inner
//! circle the outward normal points to the origin and arc length runs
//! clockwise (`phi = -s / r_inner`).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Annulus,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentId {
    Outer,
    Inner,
}

impl ComponentId {
    pub const ALL: [ComponentId; 2] = [ComponentId::Outer, ComponentId::Inner];

    pub fn index(self) -> usize {
        match self {
            ComponentId::Outer => 0,
            ComponentId::Inner => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComponentId::Outer => "outer",
            ComponentId::Inner => "inner",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.trim() {
            "outer" | "0" => Some(ComponentId::Outer),
            "inner" | "1" => Some(ComponentId::Inner),
            _ => None,
        }
    }
}

/// Position, outward normal, unit tangent and signed curvature at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub point: Point,
    pub normal: Point,
    pub tangent: Point,
    pub curvature: f64,
}

/// One closed boundary circle, sampled at `n_nodes` equally spaced arc-length nodes.
#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub id: ComponentId,
    pub radius: f64,
    /// +1 if arc length runs counter-clockwise, -1 otherwise.
    pub orientation: f64,
    pub total_length: f64,
    pub n_nodes: usize,
    /// True for the excised core of a disk domain, where the normal flux is forced to zero.
    pub impermeable: bool,
}

impl BoundaryComponent {
    fn new(id: ComponentId, radius: f64, n_nodes: usize, impermeable: bool) -> Self {
        let orientation = match id {
            ComponentId::Outer => 1.0,
            ComponentId::Inner => -1.0,
        };
        Self {
            id,
            radius,
            orientation,
            total_length: TAU * radius,
            n_nodes,
            impermeable,
        }
    }

    pub fn ds(&self) -> f64 {
        self.total_length / self.n_nodes as f64
    }

    /// Arc length of node `k`.
    pub fn node_s(&self, k: usize) -> f64 {
        k as f64 * self.ds()
    }

    /// Polar angle of the point at arc length `s`.
    pub fn angle(&self, s: f64) -> f64 {
        self.orientation * s / self.radius
    }

    /// Grid column of the stream-function node that coincides with boundary node `k`.
    pub fn node_column(&self, k: usize) -> usize {
        let n = self.n_nodes;
        match self.id {
            ComponentId::Outer => k % n,
            ComponentId::Inner => (n - k % n) % n,
        }
    }

    /// Grid column of the boundary-adjacent cell whose face runs from node `k` to node `k + 1`.
    pub fn face_column(&self, k: usize) -> usize {
        let n = self.n_nodes;
        match self.id {
            ComponentId::Outer => k % n,
            ComponentId::Inner => (2 * n - k % n - 1) % n,
        }
    }

    /// Boundary node index sitting at grid column `j`.
    pub fn node_of_column(&self, j: usize) -> usize {
        self.node_column(j)
    }

    /// Boundary face index adjacent to the cell in grid column `j`.
    pub fn face_of_column(&self, j: usize) -> usize {
        self.face_column(j)
    }

    pub fn frame_at_node(&self, k: usize) -> Frame {
        arc_frame(self, self.node_s(k))
    }
}

/// Frame at arc length `s` (taken modulo the component length).
pub fn arc_frame(component: &BoundaryComponent, s: f64) -> Frame {
    let s = s.rem_euclid(component.total_length);
    let phi = component.angle(s);
    let (sin, cos) = phi.sin_cos();
    let r = component.radius;
    let (normal, curvature) = match component.id {
        ComponentId::Outer => ([cos, sin], 1.0 / r),
        ComponentId::Inner => ([-cos, -sin], -1.0 / r),
    };
    Frame {
        point: [r * cos, r * sin],
        normal,
        tangent: [-normal[1], normal[0]],
        curvature,
    }
}

#[derive(Debug, Clone)]
pub struct DomainGeometry {
    pub kind: DomainKind,
    /// Inner radius of an annulus; `None` for a disk.
    pub r_inner: Option<f64>,
    pub r_outer: f64,
    /// Radius of the inner computational boundary (the excised core for a disk).
    pub core_radius: f64,
    pub components: [BoundaryComponent; 2],
}

impl DomainGeometry {
    pub fn annulus(r_inner: f64, r_outer: f64, n_nodes: usize) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "annulus needs 0 < r_inner < r_outer, got ({r_inner}, {r_outer})"
            )));
        }
        Self::build(DomainKind::Annulus, Some(r_inner), r_inner, r_outer, n_nodes, false)
    }

    /// Disk of radius `r_outer` approximated by excising an impermeable core of radius `core_radius`.
    pub fn disk(r_outer: f64, core_radius: f64, n_nodes: usize) -> Result<Self> {
        if !(core_radius > 0.0 && r_outer > core_radius && r_outer.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "disk needs 0 < core_radius < r_outer, got ({core_radius}, {r_outer})"
            )));
        }
        Self::build(DomainKind::Disk, None, core_radius, r_outer, n_nodes, true)
    }

    fn build(kind: DomainKind, r_inner: Option<f64>, core: f64, r_outer: f64, n: usize, impermeable_core: bool) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidGeometry(format!("need at least 4 boundary nodes, got {n}")));
        }
        Ok(Self {
            kind,
            r_inner,
            r_outer,
            core_radius: core,
            components: [
                BoundaryComponent::new(ComponentId::Outer, r_outer, n, false),
                BoundaryComponent::new(ComponentId::Inner, core, n, impermeable_core),
            ],
        })
    }

    pub fn component(&self, id: ComponentId) -> &BoundaryComponent {
        &self.components[id.index()]
    }

    pub fn area(&self) -> f64 {
        0.5 * TAU * (self.r_outer * self.r_outer - self.core_radius * self.core_radius)
    }

    pub fn perimeter(&self) -> f64 {
        self.components.iter().map(|c| c.total_length).sum()
    }

    /// Width of the tubular neighbourhood on which the distance function is smooth.
    pub fn sigma0(&self) -> f64 {
        0.5 * (self.r_outer - self.core_radius)
    }

    /// Signed distance from `|x|` to the boundary; positive inside.
    pub fn distance_at_radius(&self, r: f64) -> f64 {
        (self.r_outer - r).min(r - self.core_radius)
    }

    /// Component closest to radius `r`.
    pub fn nearest_component(&self, r: f64) -> ComponentId {
        if self.r_outer - r <= r - self.core_radius {
            ComponentId::Outer
        } else {
            ComponentId::Inner
        }
    }

    /// Closest boundary point of `x`, as (component, arc length).
    pub fn project(&self, x: Point) -> (ComponentId, f64) {
        let r = x[0].hypot(x[1]);
        let id = self.nearest_component(r);
        let comp = self.component(id);
        let phi = x[1].atan2(x[0]);
        let s = (comp.orientation * phi * comp.radius).rem_euclid(comp.total_length);
        (id, s)
    }
}

/// Signed distance to the boundary: positive inside, zero on the boundary, negative outside.
pub fn signed_distance(geom: &DomainGeometry, x: Point) -> f64 {
    geom.distance_at_radius(x[0].hypot(x[1]))
}

/// Piecewise-linear strip ramp: 0 below `sigma`, `(d - sigma) / sigma` on `[sigma, 2 sigma)`, 1 beyond.
pub fn strip_indicator(d: f64, sigma: f64) -> f64 {
    debug_assert!(sigma > 0.0);
    ((d - sigma) / sigma).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowRegion {
    Inflow,
    Impermeable,
    Outflow,
}

impl FlowRegion {
    pub fn classify(a: f64, eps: f64) -> Self {
        if a < -eps {
            FlowRegion::Inflow
        } else if a > eps {
            FlowRegion::Outflow
        } else {
            FlowRegion::Impermeable
        }
    }
}

pub const DEFAULT_SIGN_EPS: f64 = 1e-12;

/// Label each sampled value of the normal velocity.
pub fn boundary_partition(a: &[f64], eps: f64) -> Vec<FlowRegion> {
    a.iter().map(|&x| FlowRegion::classify(x, eps)).collect()
}

/// Signed distance sampled at cell centres of a polar grid.
#[derive(Debug, Clone)]
pub struct DistanceField {
    /// Row-major `nr x ns`; constant along rows because the domain is rotationally symmetric.
    pub values: Vec<f64>,
    pub nr: usize,
    pub ns: usize,
    pub sigma0: f64,
}

impl DistanceField {
    pub fn new(geom: &DomainGeometry, cell_radii: &[f64], ns: usize) -> Self {
        let nr = cell_radii.len();
        let mut values = Vec::with_capacity(nr * ns);
        for &r in cell_radii {
            let d = geom.distance_at_radius(r);
            values.extend(std::iter::repeat_n(d, ns));
        }
        Self {
            values,
            nr,
            ns,
            sigma0: geom.sigma0(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ns + j]
    }
}
