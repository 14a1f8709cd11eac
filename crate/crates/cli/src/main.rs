//! Command-line interface: fit the slope posterior, export density grids,
//! compare classical estimators, run Bland-Altman reports and the coverage
//! simulation.
//!
//! Exit codes: 0 on success, 2 on input parse errors, 3 on numerical or
//! statistical failures. Errors are reported to stderr as JSON.

mod input;
mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eiv_core::estimators::{
    agreement_stats, bootstrap_ci, limit_variants, slope_estimates, EstimatorKind,
};
use eiv_core::posterior::{PosteriorModel, QuadSettings};
use eiv_core::simulate::{coverage_experiment, standard_settings};
use eiv_core::{Error as CoreError, SufficientStats};

use render::FitReport;

#[derive(Parser)]
#[command(
    name = "eiv",
    version,
    about = "Errors-in-variables slope estimation: invariant posterior, classical estimators, coverage simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct IoArgs {
    /// Input data file: two numeric columns, comma- or whitespace-delimited,
    /// optional header line.
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior fit: median slope, shortest probability interval and the
    /// plug-in intercept. Always JSON.
    Fit {
        #[command(flatten)]
        io: IoArgs,
        /// Probability carried by the reported interval.
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Export the posterior density over a theta grid as
    /// (beta, theta, density, cdf) rows.
    Density {
        #[command(flatten)]
        io: IoArgs,
        /// Number of grid rows.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Classical slope estimates with basic bootstrap confidence intervals.
    Estimators {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// Bootstrap replicates per estimator.
        #[arg(long = "boot-reps", default_value_t = 999)]
        boot_reps: usize,
        /// Master RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Bland-Altman agreement statistics plus the per-point
    /// difference/mean table.
    Agreement {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Interval coverage experiment over the standard simulation grid.
    Simulate {
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Nominal interval level.
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// Datasets per setting (default 200; 1000 with --full-table1).
        #[arg(long)]
        replicates: Option<usize>,
        /// Bootstrap replicates per dataset (default 199; 999 with
        /// --full-table1).
        #[arg(long = "boot-reps")]
        boot_reps: Option<usize>,
        /// Master RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Full-scale run: 1000 datasets, 999 bootstrap replicates and
        /// tight quadrature tolerances.
        #[arg(long = "full-table1", default_value_t = false)]
        full_table1: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Failures carrying their exit code class.
enum CliError {
    /// Exit code 2.
    Parse(String),
    /// Exit code 3.
    Numeric(String),
}

impl From<input::ParseError> for CliError {
    fn from(e: input::ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Parse(message)) => {
            eprint!("{}", render::error_json("parse", &message));
            ExitCode::from(2)
        }
        Err(CliError::Numeric(message)) => {
            eprint!("{}", render::error_json("numeric", &message));
            ExitCode::from(3)
        }
    }
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fit { io, level } => {
            let data = input::parse_input(&io.input)?;
            let stats = SufficientStats::from_data(&data)?;
            let model = PosteriorModel::from_stats(&stats, QuadSettings::default())?;
            let interval = model.shortest_interval(level)?;
            let median = interval.median;
            let fit = FitReport {
                n: stats.n,
                r: stats.r,
                l: stats.l,
                median,
                interval,
                plugin_intercept: stats.mean2 - median * stats.mean1,
            };
            emit(io.output.as_ref(), &render::fit_json(&fit))
        }
        Command::Density { io, grid, format } => {
            let data = input::parse_input(&io.input)?;
            let stats = SufficientStats::from_data(&data)?;
            let model = PosteriorModel::from_stats(&stats, QuadSettings::default())?;
            let rows = model.density_grid(grid)?;
            let content = match format {
                Format::Json => render::grid_json(&rows),
                Format::Csv => render::grid_csv(&rows),
            };
            emit(io.output.as_ref(), &content)
        }
        Command::Estimators {
            io,
            level,
            boot_reps,
            seed,
            format,
        } => {
            let data = input::parse_input(&io.input)?;
            let stats = SufficientStats::from_data(&data)?;
            let slopes = slope_estimates(&stats)?;
            let limits = if slopes.b1 > 0.0 && slopes.b2 > 0.0 {
                Some(limit_variants(slopes.b1, slopes.b2)?)
            } else {
                None
            };
            let kinds = [
                EstimatorKind::GeometricMean,
                EstimatorKind::OlsBisector,
                EstimatorKind::Orthogonal,
            ];
            let mut cis = Vec::with_capacity(kinds.len());
            for kind in kinds {
                cis.push(bootstrap_ci(&data, kind, level, boot_reps, seed)?);
            }
            let content = match format {
                Format::Json => render::estimators_json(stats.n, &slopes, limits.as_ref(), &cis),
                Format::Csv => render::estimators_csv(&slopes, limits.as_ref(), &cis),
            };
            emit(io.output.as_ref(), &content)
        }
        Command::Agreement { io, format } => {
            let data = input::parse_input(&io.input)?;
            let stats = agreement_stats(&data)?;
            let content = match format {
                Format::Json => render::agreement_json(&stats, &data),
                Format::Csv => render::agreement_csv(&stats, &data),
            };
            emit(io.output.as_ref(), &content)
        }
        Command::Simulate {
            output,
            level,
            replicates,
            boot_reps,
            seed,
            full_table1,
            format,
        } => {
            let datasets = replicates.unwrap_or(if full_table1 { 1000 } else { 200 });
            let boot_reps = boot_reps.unwrap_or(if full_table1 { 999 } else { 199 });
            let quad = if full_table1 {
                QuadSettings::default()
            } else {
                QuadSettings::fast()
            };
            let report = coverage_experiment(
                &standard_settings(),
                datasets,
                boot_reps,
                level,
                seed,
                quad,
            )?;
            let content = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(output.as_ref(), &content)
        }
    }
}
