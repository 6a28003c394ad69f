//! Error reports and the CSV they are written as.

use std::io::Write;

use super::counter::OpCounter;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = ["method", "scene", "claim", "paper_bound", "measured", "pass", "divs", "muls", "adds"];

/// One checked number.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimRow {
    /// acceptance criterion this row feeds, 0 for plain measurements
    pub criterion: u8,
    pub method: String,
    pub scene: String,
    pub claim: String,
    /// NaN when there is no bound (plain measurement)
    pub paper_bound: f64,
    pub measured: f64,
    pub pass: bool,
    /// informational rows never fail a run
    pub fatal: bool,
    pub ops: OpCounter,
}

impl ClaimRow {
    pub fn new(criterion: u8, method: &str, scene: &str, claim: &str) -> Self {
        ClaimRow {
            criterion,
            method: method.to_string(),
            scene: scene.to_string(),
            claim: claim.to_string(),
            paper_bound: f64::NAN,
            measured: f64::NAN,
            pass: true,
            fatal: true,
            ops: OpCounter::ZERO,
        }
    }

    /// measured <= bound
    pub fn at_most(mut self, measured: f64, bound: f64) -> Self {
        self.measured = measured;
        self.paper_bound = bound;
        self.pass = measured <= bound;
        self
    }

    /// measured == bound exactly (counts)
    pub fn equals(mut self, measured: f64, bound: f64) -> Self {
        self.measured = measured;
        self.paper_bound = bound;
        self.pass = measured == bound;
        self
    }

    pub fn check(mut self, measured: f64, bound: f64, pass: bool) -> Self {
        self.measured = measured;
        self.paper_bound = bound;
        self.pass = pass;
        self
    }

    pub fn info(mut self) -> Self {
        self.fatal = false;
        self
    }

    pub fn with_ops(mut self, ops: OpCounter) -> Self {
        self.ops = ops;
        self
    }

    pub fn failed_fatally(&self) -> bool {
        self.fatal && !self.pass
    }

    fn record(&self) -> [String; 9] {
        let num = |v: f64| if v.is_nan() { String::new() } else { format!("{v}") };
        [
            self.method.clone(),
            self.scene.clone(),
            self.claim.clone(),
            num(self.paper_bound),
            num(self.measured),
            self.pass.to_string(),
            self.ops.divisions.to_string(),
            self.ops.multiplications.to_string(),
            self.ops.additions.to_string(),
        ]
    }
}

/// Per-pixel error of one method on one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub method: String,
    pub scene: String,
    pub pixels: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    pub mean_rel: f64,
    pub ops: OpCounter,
    pub claims: Vec<ClaimRow>,
}

impl ErrorReport {
    /// Summary row in the CSV schema: the claim column holds `max_rel`.
    pub fn summary_row(&self, pass: bool) -> ClaimRow {
        ClaimRow {
            pass,
            ..ClaimRow::new(0, &self.method, &self.scene, "max_rel")
                .check(self.max_rel, f64::NAN, pass)
                .with_ops(self.ops)
        }
    }
}

pub fn write_csv<W: Write>(rows: &[ClaimRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_blank_bound() {
        let rows = vec![
            ClaimRow::new(10, "nrl", "tri", "divisions").equals(5.0, 5.0),
            ClaimRow::new(0, "exact", "s", "max_rel").check(0.0, f64::NAN, true),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "method,scene,claim,paper_bound,measured,pass,divs,muls,adds");
        assert_eq!(lines.next().unwrap(), "nrl,tri,divisions,5,5,true,0,0,0");
        assert_eq!(lines.next().unwrap(), "exact,s,max_rel,,0,true,0,0,0");
    }

    #[test]
    fn info_rows_never_fail() {
        let r = ClaimRow::new(2, "m", "s", "c").at_most(2.0, 1.0).info();
        assert!(!r.pass && !r.failed_fatally());
    }
}
