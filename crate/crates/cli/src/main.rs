//! Delay-feasibility planner for Gaussian multiple-access systems.
//!
//! Exit codes: 0 success (feasible / allocation produced), 1 usage or
//! input error, 2 infeasible verdict or keep-sum below the threshold.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use macfeas::allocate::{run_allocate, AllocateMode};
use macfeas::bench::{run_bench, BenchParams};
use macfeas::check::{run_check, MethodChoice};
use macfeas::exit_code;
use macfeas::region::run_region;
use macfeas::report::emit;
use macfeas::scenario::ScenarioFile;

#[derive(Parser)]
#[command(
    name = "macfeas",
    version,
    about = "Decide whether a Gaussian multiple-access system can meet per-user delay bounds, \
             and reallocate power when it cannot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Brute,
    #[value(name = "equal-power")]
    EqualPower,
    Sfm,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Optimal,
    #[value(name = "keep-sum")]
    KeepSum,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether the required rates fit the capacity region.
    Check {
        /// Scenario file (TOML, SI units).
        scenario: PathBuf,
        /// Membership test to run.
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compute the minimum sum power and a power reallocation.
    Allocate {
        scenario: PathBuf,
        /// optimal: minimum sum power; keep-sum: redistribute the current sum.
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        json: bool,
    },
    /// Time traversal search against submodular minimization on seeded
    /// random scenarios.
    Bench {
        /// Comma-separated user counts.
        #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Write capacity-region plot data (2 or 3 users) to a file.
    Region {
        scenario: PathBuf,
        /// Output path for the tab-delimited region data.
        #[arg(long)]
        out: PathBuf,
        /// Extra boundary sample points (2-user regions only; 0 = none).
        #[arg(long, default_value_t = 0)]
        resolution: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit_code::SUCCESS,
                _ => exit_code::USAGE,
            };
            // Help/version go to stdout, diagnostics to stderr.
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code::USAGE)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Check {
            scenario,
            method,
            json,
        } => {
            let scenario = ScenarioFile::load(&scenario)?;
            let method = match method {
                MethodArg::Auto => MethodChoice::Auto,
                MethodArg::Brute => MethodChoice::Brute,
                MethodArg::EqualPower => MethodChoice::EqualPower,
                MethodArg::Sfm => MethodChoice::Sfm,
            };
            let report = run_check(&scenario, method)?;
            emit(&report, report.render_text(), json)?;
            Ok(report.exit_code())
        }
        Command::Allocate {
            scenario,
            mode,
            json,
        } => {
            let scenario = ScenarioFile::load(&scenario)?;
            let mode = match mode {
                ModeArg::Optimal => AllocateMode::Optimal,
                ModeArg::KeepSum => AllocateMode::KeepSum,
            };
            let report = run_allocate(&scenario, mode)?;
            emit(&report, report.render_text(), json)?;
            Ok(report.exit_code())
        }
        Command::Bench {
            n,
            trials,
            seed,
            json,
        } => {
            let report = run_bench(&BenchParams {
                n_values: n,
                trials,
                seed,
            })?;
            emit(&report, report.render_text(), json)?;
            Ok(exit_code::SUCCESS)
        }
        Command::Region {
            scenario,
            out,
            resolution,
        } => {
            let scenario = ScenarioFile::load(&scenario)?;
            let summary = run_region(&scenario, resolution, &out)?;
            print!("{}", summary.render_text());
            Ok(exit_code::SUCCESS)
        }
    }
}
