//! Versioned oracle reference table.
//!
//! `golden-regen` evaluates the ball kernel at a fixed set of interior
//! points and data windows and writes the values as CSV. The committed
//! copy pins the oracle: regenerating must reproduce it byte for byte,
//! and the acceptance suite cross-checks live oracle evaluations
//! against the stored rows.

use std::io;
use std::path::{Path, PathBuf};

use fraclap_core::{BallKernel, Point};

use crate::report::fmt_float;

/// Name of the reference table inside the output directory.
pub const GOLDEN_FILE: &str = "ball_oracle.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    pub dim: usize,
    pub s: f64,
    pub x0: f64,
    pub x1: f64,
    pub g_lo: f64,
    pub g_hi: f64,
    pub value: f64,
}

const ORDERS: [f64; 3] = [0.25, 0.5, 0.75];
const LINE_POINTS: [f64; 7] = [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
const PLANE_POINTS: [[f64; 2]; 4] = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [-0.25, 0.25]];

/// Evaluate the full table for the unit ball and the window [1, 2]:
/// interval data on the line, annulus data in the plane.
pub fn golden_rows() -> Vec<GoldenRow> {
    let mut rows = Vec::new();
    for &s in &ORDERS {
        let kernel = BallKernel::new(1, Point::one_d(0.0), 1.0, s)
            .expect("unit-ball kernel parameters are valid");
        for &x in &LINE_POINTS {
            let value = kernel
                .measure_of_interval(Point::one_d(x), 1.0, 2.0)
                .expect("interior point and exterior window");
            rows.push(GoldenRow {
                dim: 1,
                s,
                x0: x,
                x1: 0.0,
                g_lo: 1.0,
                g_hi: 2.0,
                value,
            });
        }
    }
    for &s in &ORDERS {
        let kernel = BallKernel::new(2, Point::new(0.0, 0.0), 1.0, s)
            .expect("unit-disk kernel parameters are valid");
        for &[x0, x1] in &PLANE_POINTS {
            let value = kernel
                .measure_of_annulus(Point::new(x0, x1), 1.0, 2.0)
                .expect("interior point and exterior annulus");
            rows.push(GoldenRow {
                dim: 2,
                s,
                x0,
                x1,
                g_lo: 1.0,
                g_hi: 2.0,
                value,
            });
        }
    }
    rows
}

/// Write the table as `<dir>/ball_oracle.csv`; returns the path and
/// the number of data rows.
pub fn write_goldens(dir: &Path) -> io::Result<(PathBuf, usize)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(GOLDEN_FILE);
    let rows = golden_rows();
    let mut writer = csv::Writer::from_path(&path)?;
    writer.write_record(["dim", "s", "x0", "x1", "g_lo", "g_hi", "value"])?;
    for row in &rows {
        writer.write_record([
            row.dim.to_string(),
            format!("{}", row.s),
            format!("{}", row.x0),
            format!("{}", row.x1),
            format!("{}", row.g_lo),
            format!("{}", row.g_hi),
            fmt_float(row.value),
        ])?;
    }
    writer.flush()?;
    Ok((path, rows.len()))
}

/// Parse a golden table written by [`write_goldens`].
pub fn read_goldens(path: &Path) -> io::Result<Vec<GoldenRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| -> io::Result<f64> {
            record
                .get(i)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| io::Error::other(format!("bad golden row: {record:?}")))
        };
        rows.push(GoldenRow {
            dim: field(0)? as usize,
            s: field(1)?,
            x0: field(2)?,
            x1: field(3)?,
            g_lo: field(4)?,
            g_hi: field(5)?,
            value: field(6)?,
        });
    }
    Ok(rows)
}
