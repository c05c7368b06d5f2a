use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nanowire::harness::{export, parse_range, parse_values, run_simulation, sweep, SimConfig, SweepParam};
use nanowire::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nanowire",
    version,
    about = "Nanowire self-assembly simulator and channel analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded simulation and write trace.csv, summary.csv and run_meta.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep field intensity or enzyme concentration over several seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `field` or `enzyme`.
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. `10,20`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        seeds: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the stability surface k*E*M/L on a grid.
    Stability {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// `start:stop:count`.
        #[arg(long)]
        e_range: String,
        #[arg(long)]
        m_range: String,
        #[arg(long)]
        l_range: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the bit error density curve.
    ErrorCurve {
        /// Skewness coefficient of the bit-1 noise.
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        sd: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x_range: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn range(flag: &str, text: &str) -> Result<Vec<f64>> {
    parse_range(text).map_err(|e| Error::invalid(format!("--{flag}: {e}")))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = SimConfig::from_file(&config)?;
            let (trace, summary) = run_simulation(&cfg)?;
            ensure_dir(&out)?;
            export::export_trace_csv(&trace, &out.join("trace.csv"))?;
            export::write_text(&out.join("summary.csv"), &export::summary_csv(&summary))?;
            export::write_text(&out.join("run_meta"), &export::run_meta(&cfg, &[]))?;
            match summary.formation_time {
                Some(t) => println!("wire complete at t = {t} min ({} members)", summary.final_wire_length),
                None => println!(
                    "wire incomplete after {} min ({} members)",
                    cfg.t_max, summary.final_wire_length
                ),
            }
        }
        Command::Sweep {
            config,
            param,
            values,
            seeds,
            out,
        } => {
            let cfg = SimConfig::from_file(&config)?;
            let param: SweepParam = param.parse().map_err(Error::invalid)?;
            let values = parse_values(&values).map_err(|e| Error::invalid(format!("--values: {e}")))?;
            let outcome = sweep(&cfg, param, &values, seeds)?;
            ensure_dir(&out)?;
            export::write_text(&out.join("sweep.csv"), &export::sweep_csv(&outcome))?;
            export::write_text(&out.join("runs.csv"), &export::sweep_runs_csv(&outcome))?;
            let extra = [
                ("sweep_param", param.to_string()),
                (
                    "sweep_values",
                    values.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
                ),
                ("sweep_seeds", seeds.to_string()),
            ];
            export::write_text(&out.join("run_meta"), &export::run_meta(&cfg, &extra))?;
            for row in &outcome.rows {
                println!(
                    "{param} = {}: {}/{} complete, mean {:?} min, median {:?} min",
                    row.value, row.completed, row.runs, row.mean_formation_time, row.median_formation_time
                );
            }
        }
        Command::Stability {
            k,
            e_range,
            m_range,
            l_range,
            out,
        } => {
            let e = range("e-range", &e_range)?;
            let m = range("m-range", &m_range)?;
            let l = range("l-range", &l_range)?;
            export::export_stability_csv(&e, &m, &l, k, &out)?;
        }
        Command::ErrorCurve { a, sd, x_range, out } => {
            let xs = range("x-range", &x_range)?;
            export::export_error_curve_csv(&xs, a, sd, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
