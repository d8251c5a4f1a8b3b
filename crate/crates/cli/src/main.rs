//! `samrot`: normalize, propagate and validate short-axis-mode rigid-body
//! rotation from the command line.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 numeric failure.

#![allow(non_snake_case)]

mod checks;
mod config;
mod output;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use samrot_core::charts::{andoyer_to_nonsingular, derive_params, nonsingular_to_complex};
use samrot_core::gravgrad::{geometry, report, GravGradPoint};
use samrot_core::lie::{normalize, NormalizationResult, VariableSeries};
use samrot_core::oracle::integrate;
use samrot_core::propagator::{analytic_trajectory, compare_trajectories};
use samrot_core::series::{GaussianRational, Series};

use config::{parse_inertia, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "samrot",
    about = "Short-axis-mode rigid-body rotation: exact Lie-series normalization, \
             analytic propagation and numerical validation",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the shape parameters alpha, beta, omega, gamma from A,B,C.
    Params {
        /// Principal moments of inertia, e.g. 1,2,3
        #[arg(long, value_parser = parse_inertia)]
        inertia: [f64; 3],
    },
    /// Normalize to the given order and write the full series data as JSON.
    Series {
        #[arg(long, value_parser = parse_inertia)]
        inertia: [f64; 3],
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Propagate analytically on the config grid and write a trajectory CSV.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the order in the config file.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the exact equations of motion and write a trajectory CSV.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        /// Overrides oracle_tol in the config file.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Propagate both ways and print the error report as JSON.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Evaluate the gravity-gradient objects at the epoch state.
    Gravgrad {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the invariant suite of every module.
    Check {
        /// Smaller sample counts and lower normalization order.
        #[arg(long)]
        quick: bool,
    },
}

/// Wire form of the normalization output: per-order arrays in the shared
/// series JSON schema.
#[derive(Serialize)]
struct SeriesDoc<'a> {
    order: usize,
    K: &'a [Series],
    S: &'a [Series],
    p: &'a [Series],
    p_phases: &'a [GaussianRational],
    s: &'a [Option<Series>],
    direct: &'a VariableSeries,
    inverse: &'a VariableSeries,
}

fn series_json(res: &NormalizationResult) -> Result<String, CliError> {
    let doc = SeriesDoc {
        order: res.order,
        K: &res.k_terms,
        S: &res.s_terms,
        p: &res.p_polys,
        p_phases: &res.p_phases,
        s: &res.s_polys,
        direct: &res.direct,
        inverse: &res.inverse,
    };
    serde_json::to_string(&doc).map_err(|e| CliError::Numeric(e.to_string()))
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Params { inertia } => {
            let p = derive_params(inertia[0], inertia[1], inertia[2])
                .map_err(|e| CliError::Validation(e.to_string()))?;
            println!("{}", output::params_json(&p));
        }
        Command::Series { inertia, order, out } => {
            derive_params(inertia[0], inertia[1], inertia[2])
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let res = normalize(order).map_err(|e| CliError::Validation(e.to_string()))?;
            write_file(&out, &series_json(&res)?)?;
        }
        Command::Propagate { config, order, out } => {
            let cfg = RunConfig::load(&config)?;
            let order = order.unwrap_or(cfg.order);
            let p = cfg.params()?;
            let res = normalize(order).map_err(|e| CliError::Validation(e.to_string()))?;
            let traj = analytic_trajectory(&cfg.andoyer, &p, &res, order, &cfg.times())
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            write_file(&out, &output::trajectory_csv(&traj))?;
        }
        Command::Oracle { config, tol, out } => {
            let cfg = RunConfig::load(&config)?;
            let tol = tol.unwrap_or(cfg.oracle_tol);
            let p = cfg.params()?;
            let ns0 = andoyer_to_nonsingular(&cfg.andoyer)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let traj = integrate(&ns0, &p, &cfg.times(), tol)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            write_file(&out, &output::trajectory_csv(&traj))?;
        }
        Command::Compare { config, order } => {
            let cfg = RunConfig::load(&config)?;
            let order = order.unwrap_or(cfg.order);
            let p = cfg.params()?;
            let times = cfg.times();
            let res = normalize(order).map_err(|e| CliError::Validation(e.to_string()))?;
            let analytic = analytic_trajectory(&cfg.andoyer, &p, &res, order, &times)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let ns0 = andoyer_to_nonsingular(&cfg.andoyer)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let oracle_traj = integrate(&ns0, &p, &times, cfg.oracle_tol)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let rep = compare_trajectories(&analytic, &oracle_traj, order)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            println!("{}", output::error_report_json(&rep));
        }
        Command::Gravgrad { config } => {
            let cfg = RunConfig::load(&config)?;
            let p = cfg.params()?;
            let orbit = cfg.orbit()?;
            let a0 = &cfg.andoyer;
            let geom = geometry(&orbit, a0.lambda, a0.Lambda, a0.M, 0.0)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let ns = andoyer_to_nonsingular(a0)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let cs = nonsingular_to_complex(&ns, &p)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let pt = GravGradPoint { y: ns.y, w: cs.u * cs.U, V: cs.V };
            let rep = report(&orbit, &geom, &p, &pt)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            println!("{}", output::gravgrad_json(&rep));
        }
        Command::Check { quick } => {
            if !checks::run_all(quick) {
                return Err(CliError::Numeric("invariant suite failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
