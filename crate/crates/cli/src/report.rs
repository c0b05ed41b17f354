//! Report files: `report.json`, `report.csv`, and optional SVG charts.
//!
//! Everything numeric is serialized through deterministic formatters,
//! and all wall-clock data is quarantined in the trailing `timing`
//! block, so two runs of the same config produce byte-identical
//! reports once that block is dropped.

use serde::Serialize;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::config::{ExperimentConfig, Kind};
use crate::experiments::{Check, Series};
use crate::plots;

/// Where the numbers in a report came from.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub grid_h: f64,
    pub box_factor: f64,
    /// Relative residual target of the conjugate-gradient solver that
    /// produced the headline numbers.
    pub solver_tolerance: f64,
}

/// Wall-clock data, kept out of the deterministic part of the report.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub started_unix_ms: u64,
    pub wall_seconds: f64,
}

impl Timing {
    pub fn start() -> (Timing, std::time::Instant) {
        let started = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        (
            Timing {
                started_unix_ms: started,
                wall_seconds: 0.0,
            },
            std::time::Instant::now(),
        )
    }
}

/// The machine-readable summary written as `report.json`.
///
/// Field order is the serialization order; `timing` stays last so the
/// deterministic prefix of the file is contiguous.
#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'a str,
    pub domain: &'a str,
    pub config_hash: &'a str,
    pub inputs: &'a ExperimentConfig,
    pub provenance: Provenance,
    pub checks: &'a [Check],
    pub series: &'a [Series],
    pub passed: bool,
    pub timing: Timing,
}

/// Solver tolerance to cite for a given experiment kind: the loosest
/// solver in the chain is the one that bounds the reported numbers.
pub fn solver_tolerance(kind: Kind, has_extension: bool) -> f64 {
    match kind {
        Kind::CsCheck => fraclap_core::extension::CG_TOL,
        Kind::Capacity if has_extension => fraclap_core::extension::CG_TOL,
        _ => fraclap_core::nonlocal::CG_TOL,
    }
}

/// Fixed-width scientific notation; the CSV analogue of the JSON
/// serializer's shortest-round-trip floats.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.12e}")
}

/// Write `report.json`, `report.csv`, and (optionally) one SVG per
/// series into `dir`. Returns the JSON path.
pub fn write_report(dir: &Path, report: &Report<'_>, with_plots: bool) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    json.push('\n');
    std::fs::write(&json_path, json)?;

    let csv_path = dir.join("report.csv");
    let mut writer = csv::Writer::from_path(&csv_path)?;
    writer.write_record([
        "row",
        "name",
        "x",
        "value",
        "threshold",
        "passed",
        "slope",
        "intercept",
        "config_hash",
        "grid_h",
        "solver_tolerance",
    ])?;
    let hash = report.config_hash;
    let grid_h = fmt_float(report.provenance.grid_h);
    let tol = fmt_float(report.provenance.solver_tolerance);
    for check in report.checks {
        writer.write_record([
            "check",
            &check.name,
            "",
            &fmt_float(check.value),
            &check.threshold.map(fmt_float).unwrap_or_default(),
            if check.passed { "true" } else { "false" },
            "",
            "",
            hash,
            &grid_h,
            &tol,
        ])?;
    }
    for series in report.series {
        let slope = series.slope.map(fmt_float).unwrap_or_default();
        let intercept = series.intercept.map(fmt_float).unwrap_or_default();
        for (&x, &y) in series.x.iter().zip(&series.y) {
            writer.write_record([
                "point",
                &series.name,
                &fmt_float(x),
                &fmt_float(y),
                "",
                "",
                &slope,
                &intercept,
                hash,
                &grid_h,
                &tol,
            ])?;
        }
    }
    writer.flush()?;

    if with_plots {
        for series in report.series {
            let svg = plots::line_chart(series);
            std::fs::write(dir.join(format!("{}.svg", series.name)), svg)?;
        }
    }

    Ok(json_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{hash_bytes, resolve};

    fn sample_config() -> crate::config::Resolved {
        let text = "kind = \"solve\"\n\n[domain]\nname = \"interval\"\n\n[fractional]\ns = 0.5\n\n[grid]\nh = 0.125\n";
        let config: ExperimentConfig = toml::from_str(text).unwrap();
        resolve(config, hash_bytes(text.as_bytes())).unwrap()
    }

    fn sample_report(resolved: &crate::config::Resolved) -> (Vec<Check>, Vec<Series>) {
        let checks = vec![
            Check {
                name: "alpha".into(),
                passed: true,
                value: 0.25,
                threshold: Some(0.5),
                detail: "below bound".into(),
            },
            Check {
                name: "beta".into(),
                passed: false,
                value: 2.0,
                threshold: None,
                detail: "informational".into(),
            },
        ];
        let series = vec![Series {
            name: "ladder".into(),
            xlabel: "radius".into(),
            ylabel: "capacity".into(),
            loglog: true,
            x: vec![0.25, 0.5, 1.0],
            y: vec![0.5, 0.7, 1.0],
            slope: Some(0.5),
            intercept: Some(0.0),
        }];
        let _ = resolved;
        (checks, series)
    }

    #[test]
    fn report_files_land_on_disk_and_json_parses_back() {
        let resolved = sample_config();
        let (checks, series) = sample_report(&resolved);
        let (timing, _) = Timing::start();
        let report = Report {
            tool: "fraclap",
            version: "0.0.0",
            kind: resolved.config.kind.as_str(),
            domain: resolved.entry.name,
            config_hash: &resolved.hash,
            inputs: &resolved.config,
            provenance: Provenance {
                grid_h: 0.125,
                box_factor: 2.0,
                solver_tolerance: solver_tolerance(Kind::Solve, false),
            },
            checks: &checks,
            series: &series,
            passed: false,
            timing,
        };
        let dir = std::env::temp_dir().join(format!("fraclap-report-{}", std::process::id()));
        let json_path = write_report(&dir, &report, true).unwrap();

        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(parsed["tool"], "fraclap");
        assert_eq!(parsed["passed"], false);
        assert_eq!(parsed["checks"][0]["name"], "alpha");
        assert_eq!(parsed["checks"][1]["threshold"], serde_json::Value::Null);
        assert_eq!(parsed["provenance"]["solver_tolerance"], 1e-12);
        // Timing is the final key of the document.
        let text = std::fs::read_to_string(&json_path).unwrap();
        assert!(text.rfind("\"timing\"").unwrap() > text.rfind("\"passed\"").unwrap());

        let csv_text = std::fs::read_to_string(dir.join("report.csv")).unwrap();
        let rows: Vec<&str> = csv_text.lines().collect();
        // Header, two checks, three series points.
        assert_eq!(rows.len(), 6);
        assert!(rows[1].starts_with("check,alpha"));
        assert!(rows[3].starts_with("point,ladder"));
        for row in &rows[1..] {
            assert!(row.contains(&resolved.hash), "{row}");
        }
        assert!(dir.join("ladder.svg").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn float_formatting_is_fixed_width_scientific() {
        assert_eq!(fmt_float(0.5), "5.000000000000e-1");
        assert_eq!(fmt_float(1e-12), "1.000000000000e-12");
        assert_eq!(fmt_float(0.0), "0.000000000000e0");
    }

    #[test]
    fn cited_solver_tolerance_tracks_the_loosest_solver_used() {
        assert_eq!(solver_tolerance(Kind::Solve, false), 1e-12);
        assert_eq!(solver_tolerance(Kind::CsCheck, true), 1e-10);
        assert_eq!(solver_tolerance(Kind::Capacity, true), 1e-10);
        assert_eq!(solver_tolerance(Kind::Capacity, false), 1e-12);
        assert_eq!(solver_tolerance(Kind::EquivalenceSuite, false), 1e-12);
    }
}
