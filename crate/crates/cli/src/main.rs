//! `umbilic-atlas`: batch analysis of curvature lines and umbilics.

mod commands;
mod error;
mod output;
mod spec;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Curvatures, Codazzi data and product data at one point.
    Analyze,
    /// Find umbilics on a grid and refine them.
    Scan,
    /// Trace curvature lines and optionally draw them.
    Lines,
    /// Interior index at --at, or boundary vertex indices of the disk.
    Index,
    /// Poincaré–Hopf audit of a disk, or of a closed gallery surface.
    Audit,
    /// Hypothesis checks and verdict for the umbilical-disk theorem.
    Verdict,
    /// Check the expected properties of a gallery entry.
    Verify,
    /// List gallery entries, or describe one with --gallery.
    Gallery,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "umbilic-atlas", version, about = "Curvature lines, umbilics and index audits of surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Surface definition file (JSON).
    #[arg(long, global = true, conflicts_with = "gallery")]
    pub surface: Option<PathBuf>,
    /// Gallery entry name.
    #[arg(long, global = true)]
    pub gallery: Option<String>,
    /// Gallery parameters, `k=v,k=v`; may be repeated.
    #[arg(long, global = true)]
    pub params: Vec<String>,
    /// Chart point `u,v`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Grid size for scans and audits.
    #[arg(long, global = true, default_value_t = 64)]
    pub grid: usize,
    /// Floor on the normalised skew curvature.
    #[arg(long = "q-floor", global = true, default_value_t = umbilic_core::lines::DEFAULT_Q_FLOOR)]
    pub q_floor: f64,
    /// Loop radius for `index --at`.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Disk `u0,u1,v0,v1` overriding the attached one.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub disk: Option<String>,
    /// Audit the closed atlas of a gallery surface instead of its disk.
    #[arg(long, global = true)]
    pub closed: bool,
    /// Seeds per side for `lines`.
    #[arg(long, global = true, default_value_t = 10)]
    pub seeds: usize,
    /// SVG portrait for `lines`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV export of the grid for `scan`.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// JSON report on stdout (the default).
    #[arg(long, global = true, conflicts_with = "human")]
    pub json: bool,
    /// Indented plain-text report instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
    /// Disable grid parallelism.
    #[arg(long, global = true)]
    pub sequential: bool,
}

fn run(cli: &Cli) -> CliResult<String> {
    let doc = commands::dispatch(cli)?;
    Ok(if cli.human { output::human(&doc) } else { output::json(&doc)? })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(text) => {
            // A closed pipe (`| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("umbilic-atlas: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

pub(crate) fn parse_pair(s: &str, what: &str) -> CliResult<[f64; 2]> {
    let v = parse_list(s, what)?;
    match v[..] {
        [a, b] => Ok([a, b]),
        _ => Err(CliError::Usage(format!("--{what} expects two numbers, got '{s}'"))),
    }
}

pub(crate) fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--{what}: '{x}' is not a number"))))
        .collect()
}
