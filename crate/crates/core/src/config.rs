//! TOML run configuration: parsing with unknown-key rejection, defaults, and range validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boundary_data::{Derivative, Mollifier};
use crate::elliptic::Grid;
use crate::geometry::{DomainGeometry, DomainKind};
use crate::scenario::{build_scenario, list_scenarios, Params};
use crate::transport::{Problem, Scheme, SolverParams};
use crate::{Error, Result};

/// Names accepted in `output.checks`.
pub const CHECK_NAMES: [&str; 8] = [
    "max_principle",
    "lp_budget",
    "lp_flux_equality",
    "gronwall",
    "q_sweep",
    "time_lipschitz",
    "weak_form",
    "strip",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: DomainKind,
    #[serde(default = "default_r_inner")]
    pub r_inner: f64,
    #[serde(default = "default_r_outer")]
    pub r_outer: f64,
    /// Radius of the excised impermeable core of a disk.
    #[serde(default = "default_core")]
    pub core_radius: f64,
    pub nr: usize,
    pub ns: usize,
}

fn default_r_inner() -> f64 {
    0.5
}
fn default_r_outer() -> f64 {
    1.0
}
fn default_core() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    March,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub nu: f64,
    pub t_end: f64,
    #[serde(default = "default_cutoff")]
    pub r_cutoff: f64,
    #[serde(default)]
    pub theta: f64,
    /// Mollify data and initial vorticity with window `theta`.
    #[serde(default = "default_true")]
    pub mollify: bool,
    /// Also smooth the boundary data along the arc.
    #[serde(default)]
    pub smooth_in_s: bool,
    #[serde(default)]
    pub arc_derivative: Derivative,
    /// Fixed step; 0 selects adaptive steps.
    #[serde(default)]
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Cap on adaptive steps; 0 means `t_end / 100`.
    #[serde(default)]
    pub max_dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_picard_iters")]
    pub picard_max_iters: usize,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default)]
    pub snapshot_every: usize,
    /// Exponent of the budget checks.
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_cutoff() -> f64 {
    f64::INFINITY
}
fn default_true() -> bool {
    true
}
fn default_cfl() -> f64 {
    0.5
}
fn default_picard_iters() -> usize {
    30
}
fn default_picard_tol() -> f64 {
    1e-8
}
fn default_p() -> f64 {
    4.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub nu_list: Vec<f64>,
    #[serde(default)]
    pub theta_list: Vec<f64>,
    /// `[nr, ns]` pairs.
    #[serde(default)]
    pub grid_list: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_checks() -> Vec<String> {
    ["max_principle", "lp_budget", "q_sweep"].iter().map(|s| s.to_string()).collect()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            checks: default_checks(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub scenario: ScenarioConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory against which relative paths in scenario parameters are resolved.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parse, fill defaults and validate.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if cfg.solver.max_dt == 0.0 {
            cfg.solver.max_dt = cfg.solver.t_end / 100.0;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// The configuration with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    /// Every violated range, collected into one `Validation` error.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let g = &self.geometry;
        let geom = self.geometry_with(g.ns);
        if let Err(e) = &geom {
            errs.push(e.to_string());
        }
        for (name, n) in [("geometry.nr", g.nr), ("geometry.ns", g.ns)] {
            if n < 4 {
                errs.push(format!("{name} = {n} must be at least 4"));
            }
        }
        if !list_scenarios().iter().any(|s| s.name == self.scenario.name) {
            errs.push(format!("unknown scenario '{}'", self.scenario.name));
        }
        let s = &self.solver;
        check_nu("solver.nu", s.nu, &mut errs);
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            errs.push(format!("solver.t_end = {} must be positive", s.t_end));
        }
        let needs_theta = s.mollify || s.mode == Mode::Picard || s.theta != 0.0;
        if let Ok(geom) = &geom {
            if needs_theta {
                check_theta("solver.theta", s.theta, geom.sigma0(), s.t_end, &mut errs);
            }
            for &th in &self.sweep.theta_list {
                check_theta("sweep.theta_list", th, geom.sigma0(), s.t_end, &mut errs);
            }
        }
        if !(s.r_cutoff > 0.0) {
            errs.push(format!("solver.r_cutoff = {} must be positive", s.r_cutoff));
        }
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            errs.push(format!("solver.cfl = {} must lie in (0, 1]", s.cfl));
        }
        if !(s.dt >= 0.0) {
            errs.push(format!("solver.dt = {} must be non-negative", s.dt));
        }
        if !(s.max_dt > 0.0) {
            errs.push(format!("solver.max_dt = {} must be positive", s.max_dt));
        }
        if !(s.p > 2.0 && s.p.is_finite()) {
            errs.push(format!("solver.p = {} must lie in (2, inf)", s.p));
        }
        if s.mode == Mode::Picard {
            if s.nu <= 0.0 {
                errs.push("solver.mode = picard needs nu > 0".into());
            }
            if s.picard_max_iters == 0 || !(s.picard_tol > 0.0) {
                errs.push("solver.picard_max_iters and solver.picard_tol must be positive".into());
            }
        }
        for &nu in &self.sweep.nu_list {
            check_nu("sweep.nu_list", nu, &mut errs);
        }
        for &[nr, ns] in &self.sweep.grid_list {
            if nr < 4 || ns < 4 {
                errs.push(format!("sweep.grid_list entry [{nr}, {ns}] must have both sizes at least 4"));
            }
        }
        for c in &self.output.checks {
            if !CHECK_NAMES.contains(&c.as_str()) {
                errs.push(format!("output.checks: unknown check '{c}' (known: {})", CHECK_NAMES.join(", ")));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn check_enabled(&self, name: &str) -> bool {
        self.output.checks.iter().any(|c| c == name)
    }

    fn geometry_with(&self, n_nodes: usize) -> Result<DomainGeometry> {
        let g = &self.geometry;
        match g.kind {
            DomainKind::Annulus => DomainGeometry::annulus(g.r_inner, g.r_outer, n_nodes),
            DomainKind::Disk => DomainGeometry::disk(g.r_outer, g.core_radius, n_nodes),
        }
    }

    /// Geometry and grid at resolution `nr x ns`.
    pub fn discretisation(&self, nr: usize, ns: usize) -> Result<(DomainGeometry, Grid)> {
        let geom = self.geometry_with(ns)?;
        let grid = Grid::for_domain(&geom, nr)?;
        Ok((geom, grid))
    }

    /// Assemble the problem at resolution `nr x ns` with window `theta`.
    pub fn problem(&self, nr: usize, ns: usize, theta: f64) -> Result<Problem> {
        let (geom, grid) = self.discretisation(nr, ns)?;
        let data = build_scenario(&self.scenario.name, &self.scenario.params, &geom, &grid, self.base_dir.as_deref())?;
        let mollifier = (self.solver.mollify && theta > 0.0).then_some(Mollifier {
            theta,
            smooth_in_s: self.solver.smooth_in_s,
        });
        let mut problem = Problem::new(geom, grid, data, mollifier);
        problem.reducer.derivative = self.solver.arc_derivative;
        Ok(problem)
    }

    pub fn solver_params(&self, nu: f64, theta: f64) -> SolverParams {
        let s = &self.solver;
        let mut params = SolverParams::new(nu, s.t_end);
        params.r_cutoff = s.r_cutoff;
        params.theta = theta;
        params.dt = (s.dt > 0.0).then_some(s.dt);
        params.cfl = s.cfl;
        params.max_dt = s.max_dt;
        params.scheme = s.scheme;
        params.snapshot_every = s.snapshot_every;
        params.ensure_p(s.p);
        params
    }
}

fn check_nu(name: &str, nu: f64, errs: &mut Vec<String>) {
    if !(nu == 0.0 || (nu > 0.0 && nu < 1.0)) {
        errs.push(format!("{name}: nu = {nu} must be 0 or lie in (0, 1)"));
    }
}

fn check_theta(name: &str, theta: f64, sigma0: f64, t_end: f64, errs: &mut Vec<String>) {
    if !(theta > 0.0) {
        errs.push(format!("{name}: theta = {theta} must be positive"));
    }
    if theta >= t_end / 4.0 {
        errs.push(format!("{name}: theta = {theta} violates theta < T/4 = {}", t_end / 4.0));
    }
    if theta >= sigma0 {
        errs.push(format!("{name}: theta = {theta} violates theta < sigma0 = {sigma0}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[geometry]
kind = "annulus"
nr = 16
ns = 32

[scenario]
name = "solid_rotation"

[solver]
nu = 0.01
t_end = 1.0
theta = 0.05
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.geometry.r_inner, 0.5);
        assert_eq!(cfg.solver.cfl, 0.5);
        assert_eq!(cfg.solver.max_dt, 0.01);
        assert_eq!(cfg.solver.p, 4.0);
        assert_eq!(cfg.solver.mode, Mode::March);
        assert!(cfg.solver.r_cutoff.is_infinite());
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        let text = cfg.to_toml();
        assert!(text.contains("picard_tol"));
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn theta_half_horizon_cites_quarter_bound() {
        let text = MINIMAL.replace("theta = 0.05", "theta = 0.5");
        match RunConfig::parse(&text) {
            Err(Error::Validation(v)) => assert!(v.iter().any(|m| m.contains("theta < T/4")), "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_violation_is_listed() {
        let text = MINIMAL
            .replace("nu = 0.01", "nu = 2.0")
            .replace("theta = 0.05", "theta = 0.5")
            .replace("ns = 32", "ns = 2");
        match RunConfig::parse(&text) {
            Err(Error::Validation(v)) => assert!(v.len() >= 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_geometry_is_a_parse_error() {
        let text = MINIMAL.replace("[geometry]\nkind = \"annulus\"\nnr = 16\nns = 32\n", "");
        assert!(matches!(RunConfig::parse(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("t_end = 1.0", "t_end = 1.0\nspeed = 3");
        assert!(matches!(RunConfig::parse(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn unknown_scenario_and_check_rejected() {
        let text = MINIMAL.replace("solid_rotation", "vortex_street") + "\n[output]\nchecks = [\"nonsense\"]\n";
        match RunConfig::parse(&text) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 2, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }
}
