use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::Result;

/// Parameters shared by every entry of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckContext {
    pub nu: f64,
    pub theta: f64,
    pub grid: String,
}

impl CheckContext {
    pub fn new(nu: f64, theta: f64, grid: impl Into<String>) -> Self {
        Self {
            nu,
            theta,
            grid: grid.into(),
        }
    }
}

/// One evaluated inequality. `slack = rhs - lhs` is kept even when the check fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateEntry {
    pub check_name: String,
    pub t0: f64,
    pub p: f64,
    pub nu: f64,
    pub theta: f64,
    pub sigma: f64,
    pub grid: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl EstimateEntry {
    pub fn new(check_name: &str, ctx: &CheckContext, lhs: f64, rhs: f64, pass: bool) -> Self {
        Self {
            check_name: check_name.to_string(),
            t0: f64::NAN,
            p: f64::NAN,
            nu: ctx.nu,
            theta: ctx.theta,
            sigma: f64::NAN,
            grid: ctx.grid.clone(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass,
        }
    }

    pub fn at_time(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub entries: Vec<EstimateEntry>,
}

impl EstimateReport {
    pub fn push(&mut self, entry: EstimateEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: EstimateReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EstimateEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn find(&self, name: &str) -> Option<&EstimateEntry> {
        self.entries.iter().find(|e| e.check_name == name)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.entries.is_empty() {
            w.write_record([
                "check_name",
                "t0",
                "p",
                "nu",
                "theta",
                "sigma",
                "grid",
                "lhs",
                "rhs",
                "slack",
                "pass",
            ])?;
        }
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv(input: impl std::io::Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let entries = r.deserialize().collect::<std::result::Result<Vec<EstimateEntry>, _>>()?;
        Ok(Self { entries })
    }
}

/// Richardson-style discretisation slack from the same quantity on the two finest grids.
pub fn richardson_slack(coarse: f64, fine: f64) -> f64 {
    (fine - coarse).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_failures() {
        let ctx = CheckContext::new(1e-3, 0.05, "64x128");
        let mut report = EstimateReport::default();
        report.push(EstimateEntry::new("max_principle", &ctx, 1.0, 1.5, true).at_time(0.5));
        report.push(EstimateEntry::new("lp_budget", &ctx, 2.0, 1.0, false).with_p(4.0));
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("check_name,t0,p,nu,theta,sigma,grid,lhs,rhs,slack,pass\n"));
        let back = EstimateReport::read_csv(&buf[..]).unwrap();
        assert_eq!(back.entries.len(), 2);
        assert_eq!(back.entries[1].slack, -1.0);
        assert!(!back.all_pass());
        assert_eq!(back.failures().count(), 1);
    }

    #[test]
    fn empty_report_still_has_header() {
        let mut buf = Vec::new();
        EstimateReport::default().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }
}
