use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsure_cli::checks::{run_oracle, run_scenario, run_single, run_stabilize, RunOptions};
use qsure_cli::report::Report;
use qsure_cli::scenario::{parse_rational, CheckRequest, Scenario};
use qsure_cli::uvol::gen_uncertain_vol;
use qsure_cli::CliError;

/// Worst-case expectations over mutually singular measure families on
/// finite spaces, checked exactly.
#[derive(Parser)]
#[command(name = "qsure", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (structured text).
    #[arg(long)]
    scenario: PathBuf,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Member cap for stabilisation closures.
    #[arg(long, default_value_t = 500)]
    budget: usize,
    /// Seed for generated sample variables.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exhaustive sweeps run only up to this many atoms.
    #[arg(long, default_value_t = 12)]
    exhaustive_limit: usize,
    /// Record per-check wall time (reports stop being byte-identical).
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            budget: self.budget,
            seed: self.seed,
            exhaustive_limit: self.exhaustive_limit,
            timings: self.timings,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every check listed in the scenario.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify a dominating partition, or check a countable cover.
    Hahn {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        #[arg(long)]
        sigma_algebra: String,
        /// Sub-family for the countable-cover criterion.
        #[arg(long, value_delimiter = ',')]
        phi: Option<Vec<String>>,
    },
    /// Conditional expectation battery for one variable.
    Condexp {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        #[arg(long)]
        sigma_algebra: String,
        #[arg(long)]
        variable: String,
        /// Check the linear conditional under this measure instead of the
        /// worst-case envelope.
        #[arg(long)]
        measure: Option<String>,
    },
    /// Close a family under pasting and report the result.
    Stabilize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        #[arg(long)]
        sigma_algebra: String,
    },
    /// Classify the conditional chain of a variable.
    Martingale {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        #[arg(long)]
        variable: String,
        /// Expected class: martingale, submartingale, supermartingale, none.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Generate an uncertain-volatility tree scenario.
    GenUvol {
        /// Number of tree steps.
        #[arg(long)]
        steps: usize,
        /// Comma-separated volatilities, e.g. 1,2 or 1/2,3/2.
        #[arg(long, value_delimiter = ',')]
        vols: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute every check by brute force and report divergences.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Check { common } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = run_scenario(&scenario, &common.options())?;
            emit(&report, common.out.as_deref())
        }
        Command::Hahn {
            common,
            family,
            sigma_algebra,
            phi,
        } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = run_single(
                &scenario,
                CheckRequest::Hahn {
                    family,
                    sigma_algebra,
                    phi,
                },
                &common.options(),
            )?;
            emit(&report, common.out.as_deref())
        }
        Command::Condexp {
            common,
            family,
            sigma_algebra,
            variable,
            measure,
        } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = run_single(
                &scenario,
                CheckRequest::Condexp {
                    family,
                    sigma_algebra,
                    variable,
                    measure,
                },
                &common.options(),
            )?;
            emit(&report, common.out.as_deref())
        }
        Command::Stabilize {
            common,
            family,
            sigma_algebra,
        } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = run_stabilize(&scenario, &family, &sigma_algebra, &common.options())?;
            emit(&report, common.out.as_deref())
        }
        Command::Martingale {
            common,
            family,
            variable,
            expect,
        } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = run_single(
                &scenario,
                CheckRequest::Martingale {
                    family,
                    variable,
                    expect,
                },
                &common.options(),
            )?;
            emit(&report, common.out.as_deref())
        }
        Command::GenUvol { steps, vols, out } => {
            let vols = vols
                .iter()
                .map(|v| parse_rational(v, "vols"))
                .collect::<Result<Vec<_>, _>>()?;
            let scenario = gen_uncertain_vol(steps, &vols)?;
            std::fs::write(&out, scenario.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { common } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = run_oracle(&scenario, &common.options())?;
            emit(&report, common.out.as_deref())
        }
    }
}

fn emit(report: &Report, out: Option<&std::path::Path>) -> Result<ExitCode, CliError> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}
