use std::f64::consts::{PI, TAU};

use crate::geometry::{ComponentId, DomainGeometry, Point};
use crate::smoothstep;

/// `(1 - x^2)^3` on `|x| < 1`, with its derivative.
fn bump(x: f64) -> (f64, f64) {
    if x.abs() >= 1.0 {
        (0.0, 0.0)
    } else {
        let u = 1.0 - x * x;
        (u * u * u, -6.0 * x * u * u)
    }
}

/// Taper that is 1 up to `t_end - 2 sigma` and 0 from `t_end - sigma` on.
fn time_taper(t: f64, t_end: f64, sigma: f64) -> (f64, f64) {
    let x = (t - (t_end - 2.0 * sigma)) / sigma;
    if x <= 0.0 {
        (1.0, 0.0)
    } else if x >= 1.0 {
        (0.0, 0.0)
    } else {
        (1.0 - smoothstep(x), -6.0 * x * (1.0 - x) / sigma)
    }
}

/// Closed-form test functions with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// Radial bump around `center`, tapered off before `t_end`.
    InteriorBump {
        center: Point,
        radius: f64,
        t_end: f64,
        sigma_bar: f64,
    },
    /// Collar along an inflow arc of one boundary component:
    /// angular bump of half-width `half_width` around `phi_center`,
    /// times a radial profile vanishing at distance `depth`, times the time taper.
    InflowCollar {
        component: ComponentId,
        phi_center: f64,
        half_width: f64,
        depth: f64,
        t_end: f64,
        sigma_bar: f64,
    },
    /// Product of a spatial bump and a time bump centred at `t_center`.
    SpaceTimeBump {
        center: Point,
        radius: f64,
        t_center: f64,
        t_half: f64,
    },
}

impl TestFunction {
    /// Collar on the outer arc centred at `phi = pi`, reaching `sigma0` into the domain.
    pub fn outer_collar(geom: &DomainGeometry, t_end: f64, sigma_bar: f64) -> Self {
        TestFunction::InflowCollar {
            component: ComponentId::Outer,
            phi_center: PI,
            half_width: PI / 3.0,
            depth: geom.sigma0(),
            t_end,
            sigma_bar,
        }
    }

    /// One function of each family, sized to `geom` and `[0, t_end]`:
    /// the outer collar, an interior bump and a space-time bump on the mid circle.
    pub fn defaults(geom: &DomainGeometry, t_end: f64) -> Vec<Self> {
        let mid = 0.5 * (geom.r_outer + geom.core_radius);
        let width = geom.r_outer - geom.core_radius;
        vec![
            Self::outer_collar(geom, t_end, 0.1 * t_end),
            TestFunction::InteriorBump {
                center: [0.0, mid],
                radius: 0.4 * width,
                t_end,
                sigma_bar: 0.1 * t_end,
            },
            TestFunction::SpaceTimeBump {
                center: [-mid, 0.0],
                radius: 0.4 * width,
                t_center: 0.5 * t_end,
                t_half: 0.4 * t_end,
            },
        ]
    }

    /// Width of the zero layer at the end of the time interval.
    pub fn sigma_bar(&self) -> f64 {
        match *self {
            TestFunction::InteriorBump { sigma_bar, .. } | TestFunction::InflowCollar { sigma_bar, .. } => sigma_bar,
            TestFunction::SpaceTimeBump { .. } => 0.0,
        }
    }

    /// `(psi, [dpsi/dx, dpsi/dy], dpsi/dt)` at `(x, t)`.
    pub fn eval(&self, geom: &DomainGeometry, x: Point, t: f64) -> (f64, [f64; 2], f64) {
        match *self {
            TestFunction::InteriorBump {
                center,
                radius,
                t_end,
                sigma_bar,
            } => {
                let (s, ds) = spatial_bump(x, center, radius);
                let (tau, dtau) = time_taper(t, t_end, sigma_bar);
                (s * tau, [ds[0] * tau, ds[1] * tau], s * dtau)
            }
            TestFunction::SpaceTimeBump {
                center,
                radius,
                t_center,
                t_half,
            } => {
                let (s, ds) = spatial_bump(x, center, radius);
                let (tau, dtau) = bump((t - t_center) / t_half);
                (s * tau, [ds[0] * tau, ds[1] * tau], s * dtau / t_half)
            }
            TestFunction::InflowCollar {
                component,
                phi_center,
                half_width,
                depth,
                t_end,
                sigma_bar,
            } => {
                let r = x[0].hypot(x[1]);
                if r == 0.0 {
                    return (0.0, [0.0; 2], 0.0);
                }
                let phi = x[1].atan2(x[0]);
                let dphi = (phi - phi_center + PI).rem_euclid(TAU) - PI;
                let (ang, dang) = bump(dphi / half_width);
                let radius = geom.component(component).radius;
                // distance to the chosen circle and its radial derivative
                let (d, dd_dr) = match component {
                    ComponentId::Outer => (radius - r, -1.0),
                    ComponentId::Inner => (r - radius, 1.0),
                };
                let (w, dw) = if d < 0.0 { (0.0, 0.0) } else { bump(d / depth) };
                let (tau, dtau) = time_taper(t, t_end, sigma_bar);
                let s = ang * w;
                let ds_dr = ang * dw * dd_dr / depth;
                let ds_dphi = dang * w / half_width;
                let (sn, cs) = (x[1] / r, x[0] / r);
                let gx = ds_dr * cs - ds_dphi * sn / r;
                let gy = ds_dr * sn + ds_dphi * cs / r;
                (s * tau, [gx * tau, gy * tau], s * dtau)
            }
        }
    }

    pub fn value(&self, geom: &DomainGeometry, x: Point, t: f64) -> f64 {
        self.eval(geom, x, t).0
    }
}

fn spatial_bump(x: Point, c: Point, radius: f64) -> (f64, [f64; 2]) {
    let dx = [x[0] - c[0], x[1] - c[1]];
    let q = (dx[0] * dx[0] + dx[1] * dx[1]) / (radius * radius);
    if q >= 1.0 {
        return (0.0, [0.0; 2]);
    }
    let u = 1.0 - q;
    let f = -6.0 * u * u / (radius * radius);
    (u * u * u, [f * dx[0], f * dx[1]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> DomainGeometry {
        DomainGeometry::annulus(0.5, 1.0, 64).unwrap()
    }

    fn check_derivatives(psi: &TestFunction, x: Point, t: f64) {
        let g = geom();
        let h = 1e-6;
        let (_, grad, dt) = psi.eval(&g, x, t);
        let fx = (psi.value(&g, [x[0] + h, x[1]], t) - psi.value(&g, [x[0] - h, x[1]], t)) / (2.0 * h);
        let fy = (psi.value(&g, [x[0], x[1] + h], t) - psi.value(&g, [x[0], x[1] - h], t)) / (2.0 * h);
        let ft = (psi.value(&g, x, t + h) - psi.value(&g, x, t - h)) / (2.0 * h);
        assert!((fx - grad[0]).abs() < 1e-6, "{fx} vs {}", grad[0]);
        assert!((fy - grad[1]).abs() < 1e-6, "{fy} vs {}", grad[1]);
        assert!((ft - dt).abs() < 1e-6, "{ft} vs {dt}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        let interior = TestFunction::InteriorBump {
            center: [0.0, 0.75],
            radius: 0.2,
            t_end: 1.0,
            sigma_bar: 0.1,
        };
        check_derivatives(&interior, [0.05, 0.7], 0.85);
        let collar = TestFunction::outer_collar(&geom(), 1.0, 0.1);
        check_derivatives(&collar, [-0.9, 0.1], 0.3);
        check_derivatives(&collar, [-0.8, -0.2], 0.85);
        let st = TestFunction::SpaceTimeBump {
            center: [0.7, 0.0],
            radius: 0.15,
            t_center: 0.5,
            t_half: 0.3,
        };
        check_derivatives(&st, [0.72, 0.05], 0.4);
    }

    #[test]
    fn collar_vanishes_outside_its_support() {
        let g = geom();
        let psi = TestFunction::outer_collar(&geom(), 1.0, 0.1);
        // outflow side, inner side, and the final time layer
        assert_eq!(psi.value(&g, [0.95, 0.0], 0.2), 0.0);
        assert_eq!(psi.value(&g, [-0.6, 0.0], 0.2), 0.0);
        assert_eq!(psi.value(&g, [-0.95, 0.0], 0.95), 0.0);
        assert!(psi.value(&g, [-1.0, 0.0], 0.2) == 1.0);
        assert_eq!(psi.value(&g, [0.0, 1.0], 0.2), 0.0);
    }

    #[test]
    fn interior_bump_taper() {
        let g = geom();
        let psi = TestFunction::InteriorBump {
            center: [0.0, 0.75],
            radius: 0.2,
            t_end: 1.0,
            sigma_bar: 0.1,
        };
        assert_eq!(psi.value(&g, [0.0, 0.75], 0.5), 1.0);
        assert_eq!(psi.value(&g, [0.0, 0.75], 0.9), 0.0);
        assert_eq!(psi.value(&g, [0.0, 0.96], 0.5), 0.0);
    }
}
