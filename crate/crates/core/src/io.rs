//! On-disk formats: binary field snapshots and the per-level CSV log.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::elliptic::{Layout, Quantity, ScalarField};
use crate::transport::Trajectory;
use crate::{Error, Result};

pub const SNAPSHOT_MAGIC: &str = "VSFSNAP1";

/// Header line `VSFSNAP1 <rows> <cols> <time> <tag>` followed by row-major little-endian `f64`s.
pub fn write_snapshot(mut out: impl Write, field: &ScalarField, t: f64) -> Result<()> {
    writeln!(out, "{SNAPSHOT_MAGIC} {} {} {t:e} {}", field.rows, field.cols, field.quantity.tag())?;
    let mut buf = Vec::with_capacity(8 * field.values.len());
    for v in &field.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn save_snapshot(path: &Path, field: &ScalarField, t: f64) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(&mut f, field, t)?;
    f.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub rows: usize,
    pub cols: usize,
    pub t: f64,
    pub tag: String,
    pub values: Vec<f64>,
}

impl SnapshotFile {
    pub fn into_field(self, layout: Layout) -> ScalarField {
        let quantity = match self.tag.as_str() {
            "omega" => Quantity::Vorticity,
            "stream" => Quantity::Stream,
            _ => Quantity::Generic,
        };
        ScalarField {
            layout,
            quantity,
            rows: self.rows,
            cols: self.cols,
            values: self.values,
        }
    }
}

pub fn read_snapshot(input: impl Read) -> Result<SnapshotFile> {
    let mut reader = BufReader::new(input);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let bad = |msg: &str| Error::Parse(format!("snapshot header: {msg}"));
    let parts: Vec<&str> = header.trim_end().split(' ').collect();
    if parts.len() != 5 || parts[0] != SNAPSHOT_MAGIC {
        return Err(bad("expected 'VSFSNAP1 <rows> <cols> <time> <tag>'"));
    }
    let rows: usize = parts[1].parse().map_err(|_| bad("rows"))?;
    let cols: usize = parts[2].parse().map_err(|_| bad("cols"))?;
    let t: f64 = parts[3].parse().map_err(|_| bad("time"))?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * rows * cols {
        return Err(bad(&format!("expected {} payload bytes, found {}", 8 * rows * cols, bytes.len())));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(SnapshotFile {
        rows,
        cols,
        t,
        tag: parts[4].to_string(),
        values,
    })
}

pub fn load_snapshot(path: &Path) -> Result<SnapshotFile> {
    read_snapshot(std::fs::File::open(path)?)
}

/// One row per level: step, time, step length, `max |omega|`, `||omega||_p` per recorded `p`,
/// the inflow and outflow rates at the budget exponent, circulation, speed and Courant number.
pub fn write_log(out: impl Write, traj: &Trajectory, budget_p: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = traj.p_index(budget_p);
    let mut header: Vec<String> = ["step", "t", "dt", "max_abs"].iter().map(|s| s.to_string()).collect();
    header.extend(traj.p_list.iter().map(|p| format!("norm_p{p}")));
    header.extend(
        [
            "inflow_rate",
            "outflow_rate",
            "boundary_bound",
            "total_vorticity",
            "max_speed",
            "courant",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    for l in &traj.levels {
        let mut row = vec![l.step.to_string(), l.t.to_string(), l.dt.to_string(), l.max_abs.to_string()];
        row.extend(l.power_sums.iter().zip(&traj.p_list).map(|(s, p)| s.powf(1.0 / p).to_string()));
        let (inflow, outflow) = k.map_or((f64::NAN, f64::NAN), |k| (l.inflow_rates[k], l.outflow_rates[k]));
        row.extend(
            [inflow, outflow, l.boundary_bound(), l.total_vorticity, l.max_speed, l.stats.courant]
                .iter()
                .map(|v| v.to_string()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
