//! Experiment orchestration: configuration, runs, sweeps and file output.

pub mod config;
pub mod export;
pub mod sim;
pub mod sweep;

pub use config::SimConfig;
pub use sim::{run_simulation, RunSummary, Simulation, TraceRecord};
pub use sweep::{sweep, SweepOutcome, SweepParam, SweepRow};

/// Parses `a:b:n` into `n` evenly spaced values from `a` to `b` inclusive.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("range '{text}' must look like start:stop:count"));
    };
    let a: f64 = a.trim().parse().map_err(|e| format!("range start '{a}': {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("range stop '{b}': {e}"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("range count '{n}': {e}"))?;
    if n == 0 {
        return Err(format!("range '{text}' must contain at least one point"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(format!("range '{text}' has non-finite bounds"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { b } else { a + step * k as f64 })
        .collect())
}

/// Parses `v1,v2,...`.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("value '{v}': {e}")))
        .collect()
}
