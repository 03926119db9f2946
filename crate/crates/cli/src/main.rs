//! `svcurve`: delay, buffer and capacity bounds for wired-cum-wireless paths.
//!
//! Exit codes: 0 success, 1 usage, 2 input (unreadable or invalid file or
//! flag values), 3 verification failure, 4 analysis or output error.

mod config;
mod export;
mod render;
mod units;
mod verify;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use svcurve::rational::parse_rational;
use svcurve::scenario::{reproduce_paper_tables, PaperParameters};
use svcurve::{BoundsReport, Curve, Rational};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_ANALYSIS: u8 = 4;

#[derive(Parser)]
#[command(
    name = "svcurve",
    version,
    about = "Worst-case delay, buffer and capacity bounds by exact min-plus algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Human,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a scenario file: per-segment and end-to-end bounds
    Analyze {
        /// Scenario file (TOML)
        config: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Bounds of one envelope against one service curve
    Bounds(Box<BoundsArgs>),
    /// Recompute the reference tables and list every value that does not reproduce
    Tables {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a scenario's bounds against grid simulations
    Verify(Box<VerifyArgs>),
    /// Sample curves to CSV for plotting
    ExportCurve(ExportArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("service").required(true).args(["rate", "link"])))]
struct BoundsArgs {
    /// Envelope burst, e.g. 5kb
    #[arg(long, value_parser = units::parse_data)]
    sigma: Rational,
    /// Envelope sustained rate, e.g. 200kbps
    #[arg(long, value_parser = units::parse_rate)]
    rho: Rational,
    /// Envelope peak rate
    #[arg(long, value_parser = units::parse_rate)]
    peak: Option<Rational>,
    /// Rate of a rate-latency lower service curve
    #[arg(long, value_parser = units::parse_rate, conflicts_with = "link")]
    rate: Option<Rational>,
    /// Latency of the rate-latency lower service curve
    #[arg(long, value_parser = units::parse_time, requires = "rate", conflicts_with = "link")]
    latency: Option<Rational>,
    /// Constant-rate link as the service curve
    #[arg(long, value_parser = units::parse_rate)]
    link: Option<Rational>,
    /// Rate of the upper service curve (defaults to the lower curve)
    #[arg(long, value_parser = units::parse_rate)]
    upper_rate: Option<Rational>,
    /// Latency of the upper service curve
    #[arg(long, value_parser = units::parse_time, requires = "upper_rate")]
    upper_latency: Option<Rational>,
    /// Delay target for the minimum-capacity computation
    #[arg(long, value_parser = units::parse_time)]
    target_delay: Option<Rational>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario file (TOML)
    config: PathBuf,
    #[arg(long, value_parser = units::parse_time, default_value = "0.1ms")]
    step: Rational,
    #[arg(long, value_parser = units::parse_time, default_value = "2s")]
    horizon: Rational,
    /// Seed for the random conforming traces
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random conforming traces on the end-to-end path
    #[arg(long, default_value_t = 4)]
    traces: usize,
    #[arg(long, hide = true, value_parser = parse_factor)]
    corrupt_dmax_factor: Option<Rational>,
}

#[derive(Args)]
struct ExportArgs {
    /// NAME=SPEC, repeatable; the first curve is compared against the others
    #[arg(long = "curve", required = true, value_parser = export::parse_named_curve)]
    curves: Vec<export::NamedCurve>,
    #[arg(long, value_parser = units::parse_time, default_value = "1ms")]
    step: Rational,
    #[arg(long, value_parser = units::parse_time, default_value = "200ms")]
    horizon: Rational,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_factor(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait OrExit<T> {
    fn or_exit(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

/// Writes to stdout. A closed pipe ends output quietly.
fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure {
            code: EXIT_ANALYSIS,
            error: anyhow::Error::new(e).context("cannot write output"),
        }),
        _ => Ok(()),
    }
}

fn emit(
    format: Format,
    human: impl FnOnce() -> String,
    csv: impl FnOnce() -> String,
    json: impl FnOnce() -> serde_json::Value,
) -> Result<(), Failure> {
    let text = match format {
        Format::Human => human(),
        Format::Csv => csv(),
        Format::Json => {
            serde_json::to_string_pretty(&json()).expect("json values serialize") + "\n"
        }
    };
    write_stdout(&text)
}

fn cmd_analyze(config: &std::path::Path, format: Format) -> Result<(), Failure> {
    let scenario = config::load_scenario(config).or_exit(EXIT_INPUT)?;
    let report = scenario.analyze().or_exit(EXIT_ANALYSIS)?;
    emit(
        format,
        || render::analysis_human(&report),
        || render::analysis_csv(&report),
        || render::analysis_json(&report),
    )
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let envelope = match &args.peak {
        Some(peak) => Curve::peak_rate_envelope(peak, &args.sigma, &args.rho),
        None => Curve::token_bucket(&args.sigma, &args.rho),
    }
    .or_exit(EXIT_INPUT)?;
    let lower = match (&args.link, &args.rate) {
        (Some(link), _) => Curve::link_rate(link),
        (None, Some(rate)) => Curve::rate_latency(
            rate,
            args.latency
                .as_ref()
                .unwrap_or(&Rational::from_integer(0.into())),
        ),
        (None, None) => unreachable!("clap requires --rate or --link"),
    }
    .or_exit(EXIT_INPUT)?;
    let upper = match &args.upper_rate {
        Some(rate) => Curve::rate_latency(
            rate,
            args.upper_latency
                .as_ref()
                .unwrap_or(&Rational::from_integer(0.into())),
        )
        .or_exit(EXIT_INPUT)?,
        None => lower.clone(),
    };
    if !lower.is_below(&upper) {
        return Err(Failure {
            code: EXIT_USAGE,
            error: anyhow!("the upper service curve lies below the lower one"),
        });
    }
    let report = BoundsReport::compute(&envelope, &lower, &upper, args.target_delay.as_ref())
        .or_exit(EXIT_INPUT)?;
    emit(
        args.format,
        || render::bounds_human(&report),
        || render::bounds_csv(&report),
        || render::bounds_json(&report),
    )
}

fn cmd_tables(format: Format) -> Result<(), Failure> {
    let tables = reproduce_paper_tables(&PaperParameters::default()).or_exit(EXIT_ANALYSIS)?;
    emit(
        format,
        || render::tables_human(&tables),
        || render::tables_csv(&tables),
        || render::tables_json(&tables),
    )
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let scenario = config::load_scenario(&args.config).or_exit(EXIT_INPUT)?;
    let report = scenario.analyze().or_exit(EXIT_ANALYSIS)?;
    let opts = verify::Options {
        step: args.step.clone(),
        horizon: args.horizon.clone(),
        seed: args.seed,
        traces: args.traces,
        corrupt_dmax_factor: args.corrupt_dmax_factor.clone(),
    };
    let results = verify::run(&scenario, &report, &opts).or_exit(EXIT_INPUT)?;
    write_stdout(&verify::render(&results))?;
    if results.iter().all(|r| r.verdict.passed()) {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            error: anyhow!("a simulated trace exceeded its bounds"),
        })
    }
}

fn cmd_export(args: &ExportArgs) -> Result<(), Failure> {
    let written = export::export(&args.curves, &args.step, &args.horizon, &args.out)
        .context("export failed")
        .or_exit(EXIT_ANALYSIS)?;
    let listing: String = written.iter().map(|p| format!("wrote {p}\n")).collect();
    write_stdout(&listing)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Analyze { config, format } => cmd_analyze(config, *format),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Tables { format } => cmd_tables(*format),
        Command::Verify(args) => cmd_verify(args),
        Command::ExportCurve(args) => cmd_export(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
