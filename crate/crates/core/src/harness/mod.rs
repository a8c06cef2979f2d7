//! Command-line front end: `bounds`, `simulate`, `sweep`, `tolerance` and
//! `validate`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad usage or configuration,
//! 3 jammer threshold infeasible, 4 validation check failed.

pub mod config;
pub mod sweep;
pub mod validate;

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_outage_with, load_balance, tolerance_search, LoadBalanceStats, OutageSummary,
    SimOptions, DEFAULT_SEED,
};
use config::{CommonArgs, Format, Resolved};
use sweep::{
    append_csv, bound_inputs, grid, run_sweep, to_csv, Outputs, ResultRow, SweepSpec,
    SweptParameter,
};
use validate::{run_validation, ValidateOptions, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "relaysec",
    version,
    about = "Secure two-hop relaying with cooperative jamming"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form tolerance bounds and jammer-threshold interval
    Bounds(BoundsArgs),
    /// Monte Carlo outage estimate for one scenario
    Simulate(SimulateArgs),
    /// Bounds and simulation over a grid of one parameter
    Sweep(SweepArgs),
    /// Largest eavesdropper count meeting the secrecy target, by simulation
    Tolerance(ToleranceArgs),
    /// Compare simulation against exact references
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also report relay load balance over this many slots
    #[arg(long)]
    pub slots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub param: SweptParameter,
    /// Comma-separated values; alternative to --from/--to/--step
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "step"])]
    pub values: Option<Vec<f64>>,
    #[arg(long, requires_all = ["to", "step"])]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, value_enum, default_value_t = Outputs::Both)]
    pub outputs: Outputs,
    #[arg(long)]
    pub slots: Option<u64>,
    /// Evaluate rows concurrently
    #[arg(long)]
    pub parallel_rows: bool,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest eavesdropper count probed
    #[arg(long, default_value_t = 64)]
    pub m_cap: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// About ten times fewer samples
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Evaluate the intercept reference at a wrong threshold
    #[arg(long)]
    pub inject_gamma_e: Option<f64>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    resolved: &'a Resolved,
    #[serde(skip_serializing_if = "Option::is_none")]
    infeasible: Option<String>,
    result: T,
}

#[derive(Debug, Serialize)]
struct SimulateResult {
    estimate: OutageSummary,
    bounds: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    load_balance: Option<LoadBalanceStats>,
}

#[derive(Debug, Serialize)]
struct SweepResult<'a> {
    parameter: SweptParameter,
    rows: &'a [ResultRow],
}

/// Map an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) => EXIT_USAGE,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_FAILURE,
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit_json(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// CSV goes to `out` (appended) or stdout; the resolved settings go to the
/// other stream so the CSV stays machine-readable.
fn emit_csv(resolved: &Resolved, rows: &[ResultRow], out: Option<&Path>) -> Result<()> {
    let echo = serde_json::to_string(resolved)?;
    match out {
        Some(path) => {
            append_csv(path, rows)?;
            println!("{echo}");
        }
        None => {
            eprintln!("{echo}");
            std::io::stdout().write_all(to_csv(rows, true)?.as_bytes())?;
        }
    }
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<i32> {
    let resolved = args.common.resolve()?;
    let report = BoundReport::compute(bound_inputs(&resolved.config));
    let infeasible = report
        .tau_interval
        .infeasible
        .as_ref()
        .map(ToString::to_string);
    let code = if infeasible.is_some() {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    };
    if let Some(why) = &infeasible {
        eprintln!("jammer threshold interval is empty: {why}");
    }
    match args.common.format {
        Format::Json => {
            let text = json(&Report {
                command: "bounds",
                resolved: &resolved,
                infeasible,
                result: &report,
            })?;
            emit_json(&text, args.common.out.as_deref())?;
        }
        Format::Csv => {
            let mut row = ResultRow {
                status: "ok".into(),
                ..Default::default()
            };
            row.set_bounds(&report);
            if let Some(why) = infeasible {
                row.status = format!("infeasible: {why}");
            }
            emit_csv(&resolved, &[row], args.common.out.as_deref())?;
        }
    }
    Ok(code)
}

fn simulate(args: &SimulateArgs) -> Result<i32> {
    let resolved = args.common.resolve()?;
    let options = SimOptions {
        sampling: resolved.sampling,
        workers: args.common.workers(),
    };
    let est = estimate_outage_with(
        &resolved.config,
        &resolved.protocol,
        resolved.trials,
        resolved.seed,
        options,
    )?;
    let load = match args.slots {
        Some(slots) => Some(load_balance(
            &resolved.config,
            &resolved.protocol,
            slots,
            resolved.seed,
        )?),
        None => None,
    };
    match args.common.format {
        Format::Json => {
            let result = SimulateResult {
                estimate: est.summary(),
                bounds: BoundReport::compute(bound_inputs(&resolved.config)),
                load_balance: load,
            };
            let text = json(&Report {
                command: "simulate",
                resolved: &resolved,
                infeasible: None,
                result,
            })?;
            emit_json(&text, args.common.out.as_deref())?;
        }
        Format::Csv => {
            let mut row = ResultRow {
                status: "ok".into(),
                ..Default::default()
            };
            row.set_bounds(&BoundReport::compute(bound_inputs(&resolved.config)));
            row.set_simulation(&est);
            row.jain_index = load.map(|l| l.jain_index);
            emit_csv(&resolved, &[row], args.common.out.as_deref())?;
        }
    }
    Ok(EXIT_OK)
}

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>> {
    match (&args.values, args.from, args.to, args.step) {
        (Some(v), ..) => Ok(v.clone()),
        (None, Some(from), Some(to), Some(step)) => grid(from, to, step),
        _ => Err(Error::InvalidConfig(
            "sweep needs --values or --from/--to/--step".into(),
        )),
    }
}

/// Fill `value` into the swept field so the base scenario resolves even when
/// that field is only given through the sweep.
fn seeded_common(common: &CommonArgs, param: SweptParameter, value: f64) -> CommonArgs {
    let mut c = common.clone();
    match param {
        SweptParameter::N if c.n.is_none() => c.n = Some(value.max(1.0) as usize),
        SweptParameter::M if c.m.is_none() => c.m = Some(value.max(0.0) as usize),
        SweptParameter::GammaR if c.gamma_r.is_none() => c.gamma_r = Some(value),
        SweptParameter::GammaE if c.gamma_e.is_none() => c.gamma_e = Some(value),
        _ => {}
    }
    c
}

fn sweep(args: &SweepArgs) -> Result<i32> {
    let values = sweep_values(args)?;
    let first = *values
        .first()
        .ok_or_else(|| Error::InvalidConfig("sweep needs at least one value".into()))?;
    let mut common = seeded_common(&args.common, args.param, first);
    if args.param == SweptParameter::Tau && common.tau.is_none() && common.tau_policy.is_none() {
        common.tau = Some(first);
    }
    let resolved = common.resolve()?;
    let spec = SweepSpec {
        parameter: args.param,
        values,
        base: resolved.config.clone(),
        protocol: resolved.protocol,
        trials: resolved.trials,
        seed: resolved.seed,
        sampling: resolved.sampling,
        outputs: args.outputs,
        slots: args.slots,
    };
    let rows = run_sweep(&spec, args.common.workers(), args.parallel_rows)?;
    match args.common.format {
        Format::Json => {
            let result = SweepResult {
                parameter: args.param,
                rows: &rows,
            };
            let text = json(&Report {
                command: "sweep",
                resolved: &resolved,
                infeasible: None,
                result,
            })?;
            emit_json(&text, args.common.out.as_deref())?;
        }
        Format::Csv => emit_csv(&resolved, &rows, args.common.out.as_deref())?,
    }
    Ok(EXIT_OK)
}

fn tolerance(args: &ToleranceArgs) -> Result<i32> {
    let mut common = args.common.clone();
    if common.m.is_none() && common.file()?.m.is_none() {
        common.m = Some(1);
    }
    let resolved = common.resolve()?;
    let options = SimOptions {
        sampling: resolved.sampling,
        workers: args.common.workers(),
    };
    let result = tolerance_search(
        &resolved.config,
        &resolved.protocol,
        resolved.config.eps_s,
        resolved.trials,
        args.m_cap,
        resolved.seed,
        options,
    )?;
    if args.common.format == Format::Csv {
        return Err(Error::InvalidConfig("tolerance only writes JSON".into()));
    }
    let text = json(&Report {
        command: "tolerance",
        resolved: &resolved,
        infeasible: None,
        result,
    })?;
    emit_json(&text, args.common.out.as_deref())?;
    Ok(EXIT_OK)
}

fn print_checks(report: &ValidationReport) {
    for c in &report.checks {
        println!(
            "{} {:<40} observed={:.6} reference={:.6} tolerance={:.6}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.reference,
            c.tolerance
        );
    }
}

fn validate_cmd(args: &ValidateArgs) -> Result<i32> {
    let opts = ValidateOptions {
        quick: args.quick,
        seed: args.seed,
        workers: args
            .workers
            .unwrap_or_else(rayon::current_num_threads)
            .max(1),
        inject_gamma_e: args.inject_gamma_e,
    };
    let report = run_validation(&opts)?;
    print_checks(&report);
    if let Some(path) = &args.out {
        fs::write(path, json(&report)?)?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}

/// Run a parsed command and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Tolerance(a) => tolerance(a),
        Command::Validate(a) => validate_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
