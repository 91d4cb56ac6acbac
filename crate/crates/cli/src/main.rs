//! Command-line front end: load a scenario file, simulate it, and write CSV
//! artifacts; or compute design bounds, grade the canned experiments, and
//! sweep the two trigger design parameters over a grid.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 simulation
//! failure, 3 reproduction report with failing rows.

mod reproduce;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mietsim::bounds::miet_upper_limit;
use mietsim::error::{Error, Result};
use mietsim::scenario::{ResolvedScenario, ScenarioConfig, TriggerConfig, TriggerRuntime};
use mietsim::sim::{simulate_resolved, write_events_csv, write_trace_csv};

const EXIT_REPORT_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mietsim",
    version,
    about = "Event-triggered control simulation with enforced minimum inter-event times"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its trace and event CSV files
    Run(RunArgs),
    /// Print a countdown scenario's design constants without simulating
    Bound(BoundArgs),
    /// Re-run a canned experiment suite and grade expected vs observed
    Reproduce(ReproduceArgs),
    /// Simulate a grid of reset values and rates, tabulating bound vs observation
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the integrator step (seconds)
    #[arg(long)]
    dt: Option<f64>,
    /// Override the simulation horizon (seconds)
    #[arg(long)]
    horizon: Option<f64>,
    /// Reserved; current scenarios are deterministic
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundArgs {
    /// Scenario file (TOML); must use the countdown trigger
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which experiment suite to grade
    #[arg(value_enum)]
    suite: reproduce::Suite,
    /// Directory for the JSON report
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Base scenario file (TOML); must use the countdown trigger
    #[arg(long)]
    config: PathBuf,
    /// Directory for the table CSV
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Reset values to sweep, comma separated
    #[arg(long = "z-bar", value_delimiter = ',', required = true)]
    z_bar: Vec<f64>,
    /// Rate floors to sweep, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    epsilon: Vec<f64>,
    /// Override the integrator step (seconds)
    #[arg(long)]
    dt: Option<f64>,
    /// Override the simulation horizon (seconds)
    #[arg(long)]
    horizon: Option<f64>,
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::NotSymmetric { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::DimensionMismatch(_)
        | Error::NotHurwitz
        | Error::ZeroErrorNorm
        | Error::InsufficientData(_) => 1,
        Error::NonFinite { .. }
        | Error::NumericalFailure(_)
        | Error::SingularSystem(_)
        | Error::TriggerConsistency(_)
        | Error::Divergence { .. }
        | Error::Zeno { .. }
        | Error::Internal(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Reproduce(args) => reproduce::cmd_reproduce(args.suite, &args.out),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn load_config(path: &PathBuf, dt: Option<f64>, horizon: Option<f64>) -> Result<ScenarioConfig> {
    let mut config = ScenarioConfig::from_toml_file(path)?;
    if let Some(dt) = dt {
        config.dt = dt;
    }
    if let Some(h) = horizon {
        config.horizon = h;
    }
    Ok(config)
}

fn resolve_with_warnings(config: &ScenarioConfig) -> Result<ResolvedScenario> {
    let resolved = config.resolve()?;
    for w in &resolved.warnings {
        eprintln!("warning: {w}");
    }
    Ok(resolved)
}

fn cmd_run(args: RunArgs) -> Result<u8> {
    if args.seed.is_some() {
        eprintln!("note: --seed is reserved; current scenarios are deterministic");
    }
    let config = load_config(&args.config, args.dt, args.horizon)?;
    let resolved = resolve_with_warnings(&config)?;
    let trace = simulate_resolved(&resolved).map_err(|e| {
        eprintln!("scenario {} failed", config.id);
        e
    })?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::Internal(format!("cannot create {}: {e}", args.out.display())))?;
    let trace_path = args.out.join(format!("{}_trace.csv", config.id));
    let events_path = args.out.join(format!("{}_events.csv", config.id));
    let file = File::create(&trace_path)
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", trace_path.display())))?;
    write_trace_csv(&trace, BufWriter::new(file))
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", trace_path.display())))?;
    let file = File::create(&events_path)
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", events_path.display())))?;
    write_events_csv(&trace, BufWriter::new(file))
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", events_path.display())))?;

    println!(
        "scenario {}: {} events over {} s",
        config.id,
        trace.events.len(),
        config.horizon
    );
    println!("wrote {} and {}", trace_path.display(), events_path.display());
    if let Some(meta) = &trace.miet {
        let note = if (meta.b_effective - meta.b_formula).abs() > 1e-9 * meta.b_formula {
            format!(
                " (envelope constant {:.4}, configured as {})",
                meta.b_formula, meta.b_effective
            )
        } else {
            format!(" (envelope constant {:.4})", meta.b_formula)
        };
        println!("analytic minimum gap: {:.6} s{note}", meta.bound);
    }
    match trace.stats() {
        Ok(stats) => {
            println!(
                "intervals after {} s warmup: min {:.6} s, max {:.6} s, mean {:.6} s over {}",
                config.warmup, stats.min_dt, stats.max_dt, stats.mean_dt, stats.count
            );
            if let Some(period) = stats.period_estimate {
                println!("interval pattern repeats about every {period:.4} s");
            }
        }
        Err(e) => println!("interval statistics unavailable: {e}"),
    }
    Ok(0)
}

fn cmd_bound(args: BoundArgs) -> Result<u8> {
    let config = load_config(&args.config, None, None)?;
    let resolved = resolve_with_warnings(&config)?;
    match &resolved.trigger {
        TriggerRuntime::Miet(rt) => {
            match rt.b_design {
                Some(bd) if (bd - rt.b_formula).abs() > 1e-9 * rt.b_formula => {
                    println!("b = {:.4} (and configured override {})", rt.b_formula, bd);
                }
                _ => println!("b = {:.4}", rt.b_formula),
            }
            println!("tau = {:.6} s", rt.bound);
            println!("tau_max = {:.6} s", miet_upper_limit(rt.b_effective())?);
            Ok(0)
        }
        _ => Err(Error::InvalidParameter(
            "the bound command applies to countdown-trigger scenarios only".into(),
        )),
    }
}

struct SweepCell {
    z_bar: f64,
    epsilon: f64,
    dt: f64,
    bound: f64,
    resolved: ResolvedScenario,
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let base = load_config(&args.config, args.dt, args.horizon)?;
    let b_design = match &base.trigger {
        TriggerConfig::Miet { b_design, .. } => *b_design,
        _ => {
            return Err(Error::InvalidParameter(
                "the sweep command applies to countdown-trigger scenarios only".into(),
            ))
        }
    };
    for &v in args.z_bar.iter().chain(&args.epsilon) {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sweep values must be positive, got {v}"
            )));
        }
    }
    let mut z_values = args.z_bar.clone();
    z_values.sort_by(|a, b| a.total_cmp(b));
    z_values.dedup();
    let mut eps_values = args.epsilon.clone();
    eps_values.sort_by(|a, b| a.total_cmp(b));
    eps_values.dedup();

    // Resolve every cell upfront; the step size is tightened per cell so the
    // grid can always resolve its own guaranteed gap.
    let mut cells = Vec::new();
    for &z_bar in &z_values {
        for &epsilon in &eps_values {
            let mut config = base.clone();
            config.id = format!("{}-z{}-e{}", base.id, z_bar, epsilon);
            config.trigger = TriggerConfig::Miet { z_bar, epsilon, b_design };
            let probe = config.resolve();
            let bound = match &probe {
                Ok(r) => match &r.trigger {
                    TriggerRuntime::Miet(rt) => rt.bound,
                    _ => unreachable!("sweep builds countdown triggers only"),
                },
                Err(_) => {
                    // dt may be the only objection; tighten and retry below.
                    config.dt = 1e-6;
                    match config.resolve()? .trigger {
                        TriggerRuntime::Miet(ref rt) => rt.bound,
                        _ => unreachable!("sweep builds countdown triggers only"),
                    }
                }
            };
            config.dt = base.dt.min(bound / 50.0);
            let resolved = config.resolve()?;
            cells.push(SweepCell { z_bar, epsilon, dt: config.dt, bound, resolved });
        }
    }

    // The analytic bound must order monotonically along both axes.
    let ne = eps_values.len();
    for (i, cell) in cells.iter().enumerate() {
        if i >= ne {
            let above = &cells[i - ne]; // same epsilon, previous z_bar
            if cell.bound <= above.bound {
                return Err(Error::Internal(format!(
                    "bound not increasing in the reset value: {} at z_bar {} vs {} at {}",
                    cell.bound, cell.z_bar, above.bound, above.z_bar
                )));
            }
        }
        if i % ne != 0 {
            let left = &cells[i - 1]; // same z_bar, previous epsilon
            if cell.bound >= left.bound {
                return Err(Error::Internal(format!(
                    "bound not decreasing in the rate floor: {} at epsilon {} vs {} at {}",
                    cell.bound, cell.epsilon, left.bound, left.epsilon
                )));
            }
        }
    }

    // Run the grid concurrently; rows keep the (z_bar, epsilon) order.
    let traces: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|cell| scope.spawn(|| simulate_resolved(&cell.resolved)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::Internal(format!("cannot create {}: {e}", args.out.display())))?;
    let table_path = args.out.join("sweep.csv");
    let mut csv = String::from("z_bar,epsilon,dt,bound,events,min_dt,max_dt,mean_dt\n");
    println!("   z_bar  epsilon        bound   events       min       max      mean");
    for (cell, outcome) in cells.iter().zip(traces) {
        let trace = outcome.map_err(|e| {
            eprintln!("scenario {} failed", cell.resolved.id);
            e
        })?;
        let intervals: Vec<f64> =
            trace.events.iter().filter_map(|e| e.inter_event_dt).collect();
        let (min_s, max_s, mean_s, min_p, max_p, mean_p);
        if intervals.is_empty() {
            (min_s, max_s, mean_s) = (String::new(), String::new(), String::new());
            (min_p, max_p, mean_p) = ("-".into(), "-".into(), String::from("-"));
        } else {
            let min = intervals.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = intervals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean = intervals.iter().sum::<f64>() / intervals.len() as f64;
            min_s = format!("{min:.9e}");
            max_s = format!("{max:.9e}");
            mean_s = format!("{mean:.9e}");
            min_p = format!("{min:.6}");
            max_p = format!("{max:.6}");
            mean_p = format!("{mean:.6}");
        }
        csv.push_str(&format!(
            "{},{},{:.9e},{:.9e},{},{},{},{}\n",
            cell.z_bar,
            cell.epsilon,
            cell.dt,
            cell.bound,
            trace.events.len(),
            min_s,
            max_s,
            mean_s
        ));
        println!(
            "{:>8} {:>8} {:>12.6} {:>8} {:>9} {:>9} {:>9}",
            cell.z_bar,
            cell.epsilon,
            cell.bound,
            trace.events.len(),
            min_p,
            max_p,
            mean_p
        );
    }
    std::fs::write(&table_path, csv)
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", table_path.display())))?;
    println!("wrote {}", table_path.display());
    Ok(0)
}
