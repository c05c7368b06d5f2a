//! CSV and metadata writers.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so parsing a
//! file back yields bit-identical values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analysis::{
    p_error, p_error_bit0, p_error_bit1, p_error_components_scaled, p_error_scaled, stability_surface,
};
use crate::error::{Error, Result};
use crate::harness::config::SimConfig;
use crate::harness::sim::{RunSummary, TraceRecord, GENERATOR_ID};
use crate::harness::sweep::SweepOutcome;

pub const TRACE_HEADER: &str = "t_min,tip_position_um,wire_length";
pub const STABILITY_HEADER: &str = "E,M,L,stability";
pub const ERROR_CURVE_HEADER: &str = "x,p_e0,p_e1,p_e";
pub const SUMMARY_HEADER: &str = "seed,completed,formation_time_min,final_wire_length";
pub const SWEEP_HEADER: &str = "value,runs,completed,completion_rate,mean_formation_time_min,median_formation_time_min";
pub const SWEEP_RUNS_HEADER: &str = "value,seed,completed,formation_time_min,final_wire_length";

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut s = String::with_capacity(32 * (trace.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in trace {
        let _ = writeln!(s, "{},{},{}", r.t, r.tip_axial_position, r.wire_length);
    }
    s
}

pub fn export_trace_csv(trace: &[TraceRecord], path: &Path) -> Result<()> {
    write(path, &trace_csv(trace))
}

/// Parses a file produced by [`export_trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(TRACE_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(format!("row {}: expected 3 fields, got {}", k + 1, f.len()));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", k + 1));
            Ok(TraceRecord {
                t: num(f[0])?,
                tip_axial_position: num(f[1])?,
                wire_length: f[2].parse().map_err(|e| format!("row {}: {e}", k + 1))?,
            })
        })
        .collect()
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace_csv(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

/// Long-format stability table, one row per `(E, M, L)` in grid order.
pub fn stability_csv(e_grid: &[f64], m_grid: &[f64], l_grid: &[f64], k: f64) -> Result<String> {
    let surface = stability_surface(e_grid, m_grid, l_grid, k)?;
    let mut s = String::new();
    s.push_str(STABILITY_HEADER);
    s.push('\n');
    for (i, &e) in e_grid.iter().enumerate() {
        for (j, &m) in m_grid.iter().enumerate() {
            for (l_idx, &l) in l_grid.iter().enumerate() {
                let _ = writeln!(s, "{e},{m},{l},{}", surface[i][j][l_idx]);
            }
        }
    }
    Ok(s)
}

pub fn export_stability_csv(e_grid: &[f64], m_grid: &[f64], l_grid: &[f64], k: f64, path: &Path) -> Result<()> {
    write(path, &stability_csv(e_grid, m_grid, l_grid, k)?)
}

/// Error-density curve. With `sd`, every column is the location-scale version.
pub fn error_curve_csv(xs: &[f64], a: f64, sd: Option<f64>) -> Result<String> {
    if xs.is_empty() {
        return Err(Error::invalid("error curve needs at least one x value"));
    }
    let mut s = String::new();
    s.push_str(ERROR_CURVE_HEADER);
    s.push('\n');
    for &x in xs {
        let (p0, p1, pe) = match sd {
            Some(sd) => {
                let (p0, p1) = p_error_components_scaled(x, a, sd)?;
                (p0, p1, p_error_scaled(x, a, sd)?)
            }
            None => (p_error_bit0(x), p_error_bit1(x, a), p_error(x, a)),
        };
        let _ = writeln!(s, "{x},{p0},{p1},{pe}");
    }
    Ok(s)
}

pub fn export_error_curve_csv(xs: &[f64], a: f64, sd: Option<f64>, path: &Path) -> Result<()> {
    write(path, &error_curve_csv(xs, a, sd)?)
}

pub fn summary_csv(summary: &RunSummary) -> String {
    format!(
        "{SUMMARY_HEADER}\n{},{},{},{}\n",
        summary.seed,
        summary.completed,
        opt(summary.formation_time),
        summary.final_wire_length
    )
}

pub fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut s = String::new();
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for r in &outcome.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.value,
            r.runs,
            r.completed,
            r.completion_rate,
            opt(r.mean_formation_time),
            opt(r.median_formation_time)
        );
    }
    s
}

pub fn sweep_runs_csv(outcome: &SweepOutcome) -> String {
    let mut s = String::new();
    s.push_str(SWEEP_RUNS_HEADER);
    s.push('\n');
    for (value, r) in &outcome.runs {
        let _ = writeln!(
            s,
            "{value},{},{},{},{}",
            r.seed,
            r.completed,
            opt(r.formation_time),
            r.final_wire_length
        );
    }
    s
}

/// `key = value` provenance record written next to simulation outputs.
pub fn run_meta(config: &SimConfig, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "config_hash = {}", config.hash());
    let _ = writeln!(s, "seed = {}", config.seed);
    let _ = writeln!(s, "generator = {GENERATOR_ID}");
    let _ = writeln!(s, "version = {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    for (k, v) in extra {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    write(path, contents)
}
