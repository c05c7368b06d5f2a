//! Seeded parameter sweeps over field intensity or enzyme concentration.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::SimConfig;
use crate::harness::sim::{run_simulation, RunSummary};
use crate::stats::{mean, median};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    FieldIntensity,
    EnzymeConcentration,
}

impl SweepParam {
    pub fn apply(self, config: &mut SimConfig, value: f64) {
        match self {
            SweepParam::FieldIntensity => config.assembly.field_intensity = value,
            SweepParam::EnzymeConcentration => config.assembly.enzyme_concentration = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::FieldIntensity => "field",
            SweepParam::EnzymeConcentration => "enzyme",
        })
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "field" | "field_intensity" | "M" => Ok(SweepParam::FieldIntensity),
            "enzyme" | "enzyme_concentration" | "C" => Ok(SweepParam::EnzymeConcentration),
            other => Err(format!("unknown sweep parameter '{other}' (expected field or enzyme)")),
        }
    }
}

/// Aggregate over all seeds for one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub runs: usize,
    pub completed: usize,
    pub completion_rate: f64,
    /// Over completed runs only.
    pub mean_formation_time: Option<f64>,
    pub median_formation_time: Option<f64>,
}

impl SweepRow {
    pub fn from_summaries(value: f64, summaries: &[RunSummary]) -> Self {
        let times: Vec<f64> = summaries.iter().filter_map(|s| s.formation_time).collect();
        SweepRow {
            value,
            runs: summaries.len(),
            completed: times.len(),
            completion_rate: times.len() as f64 / summaries.len().max(1) as f64,
            mean_formation_time: mean(&times),
            median_formation_time: median(&times),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    /// Every run, in value-then-seed order.
    pub runs: Vec<(f64, RunSummary)>,
}

impl SweepOutcome {
    /// Formation times for one value, with non-completing runs as `+inf`.
    pub fn censored_times(&self, value: f64) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|(v, _)| *v == value)
            .map(|(_, s)| s.formation_time.unwrap_or(f64::INFINITY))
            .collect()
    }
}

/// Runs `values x seeds`, seeds being `config.seed .. config.seed + n_seeds`.
pub fn sweep(config: &SimConfig, param: SweepParam, values: &[f64], n_seeds: usize) -> Result<SweepOutcome> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    if n_seeds == 0 {
        return Err(Error::invalid("sweep needs at least one seed"));
    }
    let mut jobs = Vec::with_capacity(values.len() * n_seeds);
    for &value in values {
        for k in 0..n_seeds {
            let mut cfg = config.clone();
            param.apply(&mut cfg, value);
            cfg.seed = config.seed.wrapping_add(k as u64);
            jobs.push((value, cfg));
        }
    }
    for (_, cfg) in jobs.iter().take(values.len() * n_seeds).step_by(n_seeds) {
        cfg.validate()?;
    }
    let runs: Vec<(f64, RunSummary)> = jobs
        .into_par_iter()
        .map(|(value, cfg)| run_simulation(&cfg).map(|(_, summary)| (value, summary)))
        .collect::<Result<_>>()?;
    let rows = values
        .iter()
        .zip(runs.chunks(n_seeds))
        .map(|(&value, chunk)| {
            let summaries: Vec<RunSummary> = chunk.iter().map(|(_, s)| *s).collect();
            SweepRow::from_summaries(value, &summaries)
        })
        .collect();
    Ok(SweepOutcome { param, rows, runs })
}
