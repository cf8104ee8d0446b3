//! Registry of named problem set-ups.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::boundary_data::{BoundaryData, Trace, TraceSource};
use crate::elliptic::{Grid, Quantity, ScalarField};
use crate::geometry::{ComponentId, DomainGeometry};
use crate::{Error, Result};

pub type Params = BTreeMap<String, toml::Value>;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const REGISTRY: [ScenarioInfo; 5] = [
    ScenarioInfo {
        name: "custom_table",
        description: "per-node (a, alpha, b) from a CSV table (component,s,t,a,alpha,b), linear in s and t",
    },
    ScenarioInfo {
        name: "shear_inflow",
        description: "a = a0 cos s on the outer circle, gamma = gamma0 and g = b0 + shear sin s there; impermeable hole with g = b0",
    },
    ScenarioInfo {
        name: "solid_rotation",
        description: "a = 0, alpha = 2k, b = c, omega0 = c: steady rigid-rotation-like state",
    },
    ScenarioInfo {
        name: "uniform_throughflow",
        description: "uniform stream (eps, 0) through both circles with alpha = 2k, b = 2a': vorticity stays zero",
    },
    ScenarioInfo {
        name: "zero",
        description: "all data zero",
    },
];

/// Registered scenarios in alphabetical order.
pub fn list_scenarios() -> &'static [ScenarioInfo] {
    &REGISTRY
}

struct ParamReader<'a> {
    scenario: &'a str,
    params: &'a Params,
    used: Vec<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(scenario: &'a str, params: &'a Params) -> Self {
        Self {
            scenario,
            params,
            used: Vec::new(),
        }
    }

    fn f64(&mut self, key: &'static str, default: f64) -> Result<f64> {
        self.used.push(key);
        match self.params.get(key) {
            None => Ok(default),
            Some(toml::Value::Float(x)) => Ok(*x),
            Some(toml::Value::Integer(x)) => Ok(*x as f64),
            Some(other) => Err(Error::Validation(vec![format!(
                "scenario.params.{key}: expected a number, got {other}"
            )])),
        }
    }

    fn string(&mut self, key: &'static str) -> Result<String> {
        self.used.push(key);
        match self.params.get(key) {
            Some(toml::Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(Error::Validation(vec![format!(
                "scenario.params.{key}: expected a string, got {other}"
            )])),
            None => Err(Error::Validation(vec![format!("scenario '{}' needs params.{key}", self.scenario)])),
        }
    }

    fn finish(self) -> Result<()> {
        let unknown: Vec<String> = self
            .params
            .keys()
            .filter(|k| !self.used.contains(&k.as_str()))
            .map(|k| format!("scenario '{}' has no parameter '{k}'", self.scenario))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(unknown))
        }
    }
}

fn curvature(geom: &DomainGeometry, id: ComponentId) -> f64 {
    geom.component(id).frame_at_node(0).curvature
}

/// Build the data of scenario `name` on `geom`/`grid`. `base_dir` resolves relative table paths.
pub fn build_scenario(name: &str, params: &Params, geom: &DomainGeometry, grid: &Grid, base_dir: Option<&Path>) -> Result<BoundaryData> {
    let mut rd = ParamReader::new(name, params);
    let k_out = curvature(geom, ComponentId::Outer);
    let k_in = curvature(geom, ComponentId::Inner);
    let kk = move |id: ComponentId| match id {
        ComponentId::Outer => k_out,
        ComponentId::Inner => k_in,
    };
    let data = match name {
        "zero" => BoundaryData {
            source: Arc::new(|_: ComponentId, _: f64, _: f64| Trace {
                a: 0.0,
                alpha: 0.0,
                b: 0.0,
            }),
            omega0: ScalarField::zeros(grid, crate::elliptic::Layout::Cells, Quantity::Vorticity),
            inner_stream_offset: 0.0,
        },
        "solid_rotation" => {
            let c = rd.f64("c", 1.0)?;
            BoundaryData {
                source: Arc::new(move |id: ComponentId, _: f64, _: f64| Trace {
                    a: 0.0,
                    alpha: 2.0 * kk(id),
                    b: c,
                }),
                omega0: ScalarField::cells_from_fn(grid, Quantity::Vorticity, |_| c),
                inner_stream_offset: 0.0,
            }
        }
        "uniform_throughflow" => {
            let eps = rd.f64("eps", 0.5)?;
            let radii = [geom.r_outer, geom.core_radius];
            let orient = [1.0, -1.0];
            let hole_open = !geom.component(ComponentId::Inner).impermeable;
            BoundaryData {
                source: Arc::new(move |id: ComponentId, s: f64, _: f64| {
                    let (r, o) = (radii[id.index()], orient[id.index()]);
                    let phi = o * s / r;
                    // outward normal is +e_r outside, -e_r on the hole
                    let sign = if id == ComponentId::Outer { 1.0 } else { -1.0 };
                    let a = sign * eps * phi.cos();
                    let a_s = -sign * eps * phi.sin() * o / r;
                    if id == ComponentId::Inner && !hole_open {
                        return Trace {
                            a: 0.0,
                            alpha: 2.0 * kk(id),
                            b: 0.0,
                        };
                    }
                    Trace {
                        a,
                        alpha: 2.0 * kk(id),
                        b: 2.0 * a_s,
                    }
                }),
                omega0: ScalarField::zeros(grid, crate::elliptic::Layout::Cells, Quantity::Vorticity),
                inner_stream_offset: 0.0,
            }
        }
        "shear_inflow" => {
            let a0 = rd.f64("a0", 1.0)?;
            let gamma0 = rd.f64("gamma0", 0.5)?;
            let b0 = rd.f64("b0", 1.0)?;
            let shear = rd.f64("shear", 0.25)?;
            let flux_offset = rd.f64("flux_offset", 0.0)?;
            let r_out = geom.r_outer;
            BoundaryData {
                source: Arc::new(move |id: ComponentId, s: f64, _: f64| match id {
                    ComponentId::Outer => {
                        let phi = s / r_out;
                        let a_s = -a0 * phi.sin() / r_out;
                        Trace {
                            a: a0 * phi.cos() + flux_offset,
                            alpha: 2.0 * kk(id) - gamma0,
                            b: b0 + shear * phi.sin() + 2.0 * a_s,
                        }
                    }
                    ComponentId::Inner => Trace {
                        a: 0.0,
                        alpha: 2.0 * kk(id),
                        b: b0,
                    },
                }),
                omega0: ScalarField::cells_from_fn(grid, Quantity::Vorticity, |_| b0),
                inner_stream_offset: 0.0,
            }
        }
        "custom_table" => {
            let path = rd.string("path")?;
            let omega0 = rd.f64("omega0", 0.0)?;
            let offset = rd.f64("inner_stream_offset", 0.0)?;
            let full = match base_dir {
                Some(dir) if Path::new(&path).is_relative() => dir.join(&path),
                _ => Path::new(&path).to_path_buf(),
            };
            let table = TraceTable::from_csv(&full, geom)?;
            BoundaryData {
                source: Arc::new(table),
                omega0: ScalarField::cells_from_fn(grid, Quantity::Vorticity, |_| omega0),
                inner_stream_offset: offset,
            }
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    rd.finish()?;
    Ok(data)
}

/// Tabulated traces, periodic-linear in arc length and linear (clamped) in time.
#[derive(Debug, Clone)]
pub struct TraceTable {
    /// Per component: time levels, each with rows `(s, a, alpha, b)` sorted by `s`.
    levels: [Vec<(f64, Vec<[f64; 4]>)>; 2],
    lengths: [f64; 2],
}

#[derive(Debug, serde::Deserialize)]
struct Row {
    component: String,
    s: f64,
    t: f64,
    a: f64,
    alpha: f64,
    b: f64,
}

impl TraceTable {
    pub fn from_csv(path: &Path, geom: &DomainGeometry) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::from_reader(file, geom)
    }

    pub fn from_reader(reader: impl std::io::Read, geom: &DomainGeometry) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut levels: [Vec<(f64, Vec<[f64; 4]>)>; 2] = [Vec::new(), Vec::new()];
        for (line, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Table(format!("row {}: {e}", line + 1)))?;
            let id = ComponentId::parse(&row.component)
                .ok_or_else(|| Error::Table(format!("row {}: unknown component '{}'", line + 1, row.component)))?;
            let list = &mut levels[id.index()];
            let entry = [row.s, row.a, row.alpha, row.b];
            match list.iter_mut().find(|(t, _)| *t == row.t) {
                Some((_, rows)) => rows.push(entry),
                None => list.push((row.t, vec![entry])),
            }
        }
        let lengths = [geom.components[0].total_length, geom.components[1].total_length];
        for (c, list) in levels.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(Error::Table(format!("no rows for component {}", ComponentId::ALL[c].name())));
            }
            list.sort_by(|x, y| x.0.total_cmp(&y.0));
            for (_, rows) in list.iter_mut() {
                for r in rows.iter_mut() {
                    r[0] = r[0].rem_euclid(lengths[c]);
                }
                rows.sort_by(|x, y| x[0].total_cmp(&y[0]));
            }
        }
        Ok(Self { levels, lengths })
    }

    fn at_level(rows: &[[f64; 4]], s: f64, length: f64) -> [f64; 3] {
        let n = rows.len();
        if n == 1 {
            return [rows[0][1], rows[0][2], rows[0][3]];
        }
        let s = s.rem_euclid(length);
        let hi = rows.partition_point(|r| r[0] <= s);
        let (lo_row, hi_row, s_lo, s_hi) = if hi == 0 {
            (rows[n - 1], rows[0], rows[n - 1][0] - length, rows[0][0])
        } else if hi == n {
            (rows[n - 1], rows[0], rows[n - 1][0], rows[0][0] + length)
        } else {
            (rows[hi - 1], rows[hi], rows[hi - 1][0], rows[hi][0])
        };
        let w = if s_hi > s_lo { (s - s_lo) / (s_hi - s_lo) } else { 0.0 };
        [1, 2, 3].map(|q| lo_row[q] + w * (hi_row[q] - lo_row[q]))
    }
}

impl TraceSource for TraceTable {
    fn trace(&self, id: ComponentId, s: f64, t: f64) -> Trace {
        let list = &self.levels[id.index()];
        let len = self.lengths[id.index()];
        let k = list.partition_point(|(tk, _)| *tk <= t);
        let v = if k == 0 {
            Self::at_level(&list[0].1, s, len)
        } else if k == list.len() {
            Self::at_level(&list[k - 1].1, s, len)
        } else {
            let (t0, r0) = &list[k - 1];
            let (t1, r1) = &list[k];
            let w = (t - t0) / (t1 - t0);
            let (v0, v1) = (Self::at_level(r0, s, len), Self::at_level(r1, s, len));
            [0, 1, 2].map(|q| v0[q] + w * (v1[q] - v0[q]))
        };
        Trace {
            a: v[0],
            alpha: v[1],
            b: v[2],
        }
    }
}
