//! Canned experiment suites graded as pass/fail reports.
//!
//! Each suite re-runs a reference experiment and compares the measured
//! quantities against their expected values at a fixed tolerance. The rows
//! are printed to stdout and serialized to JSON; a simulation failure marks
//! its rows as failed instead of aborting the report.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use mietsim::error::{Error, Result};
use mietsim::scenario::{presets, ScenarioConfig, TriggerRuntime};
use mietsim::sim::{simulate, SimulationTrace};

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    /// Oscillator with the countdown trigger at reset values 1 and 3
    Vdp,
    /// Linear plant with the designed envelope constant
    Linear,
    /// Linear plant under bounded and decaying disturbances
    Robustness,
    /// Interval periodicity across initial states
    Period,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Vdp => "vdp",
            Suite::Linear => "linear",
            Suite::Robustness => "robustness",
            Suite::Period => "period",
        }
    }
}

#[derive(Serialize)]
struct MetricRow {
    name: String,
    expected: String,
    observed: String,
    tolerance: String,
    pass: bool,
}

#[derive(Serialize)]
struct ReproReport {
    scenario_id: String,
    metrics: Vec<MetricRow>,
    overall: bool,
}

fn row(name: &str, expected: &str, observed: String, tolerance: &str, pass: bool) -> MetricRow {
    MetricRow {
        name: name.into(),
        expected: expected.into(),
        observed,
        tolerance: tolerance.into(),
        pass,
    }
}

fn failed_rows(specs: &[(&str, &str, &str)], err: &Error) -> Vec<MetricRow> {
    specs
        .iter()
        .map(|(name, expected, tolerance)| {
            row(name, expected, format!("simulation error: {err}"), tolerance, false)
        })
        .collect()
}

fn within(observed: f64, expected: f64, rel: f64) -> bool {
    (observed - expected).abs() <= rel * expected
}

fn final_norm(trace: &SimulationTrace) -> f64 {
    let last = trace.states.last().expect("trace has rows");
    last.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn min_interval(trace: &SimulationTrace) -> Option<f64> {
    trace
        .events
        .iter()
        .filter_map(|e| e.inter_event_dt)
        .min_by(|a, b| a.total_cmp(b))
}

/// Mean interval over the second half of the run, once transients have died.
fn steady_interval(trace: &SimulationTrace, horizon: f64) -> Option<f64> {
    let tail: Vec<f64> = trace
        .events
        .iter()
        .filter(|e| e.time >= horizon / 2.0)
        .filter_map(|e| e.inter_event_dt)
        .collect();
    if tail.is_empty() {
        None
    } else {
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }
}

fn countdown_bound(config: &ScenarioConfig) -> Result<(f64, f64)> {
    match config.resolve()?.trigger {
        TriggerRuntime::Miet(ref rt) => Ok((rt.b_formula, rt.bound)),
        _ => Err(Error::Internal("suite scenario lost its countdown trigger".into())),
    }
}

fn option_metric(
    name: &str,
    expected: &str,
    tolerance: &str,
    value: Option<f64>,
    pass: impl Fn(f64) -> bool,
) -> MetricRow {
    match value {
        Some(v) => row(name, expected, format!("{v:.4} s"), tolerance, pass(v)),
        None => row(name, expected, "no intervals observed".into(), tolerance, false),
    }
}

fn vdp_suite() -> Result<ReproReport> {
    let mut metrics = Vec::new();

    let nominal = presets::vdp_nominal();
    let (_, bound) = countdown_bound(&nominal)?;
    metrics.push(row(
        "analytic minimum gap",
        "0.189 s",
        format!("{bound:.6} s"),
        "+/- 0.001 s",
        (bound - 0.189).abs() <= 0.001,
    ));

    match simulate(&nominal) {
        Ok(trace) => {
            metrics.push(option_metric(
                "smallest observed interval",
                ">= 0.189 s",
                "hard floor",
                min_interval(&trace),
                |v| v >= 0.189,
            ));
            metrics.push(option_metric(
                "steady-state interval, reset 1",
                "0.9 s",
                "+/- 25%",
                steady_interval(&trace, nominal.horizon),
                |v| within(v, 0.9, 0.25),
            ));
        }
        Err(e) => metrics.extend(failed_rows(
            &[
                ("smallest observed interval", ">= 0.189 s", "hard floor"),
                ("steady-state interval, reset 1", "0.9 s", "+/- 25%"),
            ],
            &e,
        )),
    }

    let larger_reset = presets::vdp_with_reset(3.0);
    match simulate(&larger_reset) {
        Ok(trace) => metrics.push(option_metric(
            "steady-state interval, reset 3",
            "3.722 s",
            "+/- 25%",
            steady_interval(&trace, larger_reset.horizon),
            |v| within(v, 3.722, 0.25),
        )),
        Err(e) => metrics.extend(failed_rows(
            &[("steady-state interval, reset 3", "3.722 s", "+/- 25%")],
            &e,
        )),
    }

    Ok(report("vdp", metrics))
}

fn linear_suite() -> Result<ReproReport> {
    let mut metrics = Vec::new();

    let nominal = presets::linear_nominal();
    let (b_formula, bound) = countdown_bound(&nominal)?;
    metrics.push(row(
        "envelope constant",
        "54.61",
        format!("{b_formula:.4}"),
        "+/- 0.05",
        (b_formula - 54.61).abs() <= 0.05,
    ));
    metrics.push(row(
        "analytic minimum gap at the configured constant",
        "0.009 s",
        format!("{bound:.6} s"),
        "+/- 0.0005 s",
        (bound - 0.009).abs() <= 0.0005,
    ));

    match simulate(&nominal) {
        Ok(trace) => {
            let stats = trace.stats()?;
            metrics.push(row(
                "smallest interval after warmup",
                "0.036 s",
                format!("{:.4} s", stats.min_dt),
                "+/- 25%",
                within(stats.min_dt, 0.036, 0.25),
            ));
            metrics.push(row(
                "largest interval after warmup",
                "0.086 s",
                format!("{:.4} s", stats.max_dt),
                "+/- 25%",
                within(stats.max_dt, 0.086, 0.25),
            ));
            metrics.push(row(
                "state norm at the horizon",
                "<= 0.1",
                format!("{:.2e}", final_norm(&trace)),
                "hard ceiling",
                final_norm(&trace) <= 0.1,
            ));
        }
        Err(e) => metrics.extend(failed_rows(
            &[
                ("smallest interval after warmup", "0.036 s", "+/- 25%"),
                ("largest interval after warmup", "0.086 s", "+/- 25%"),
                ("state norm at the horizon", "<= 0.1", "hard ceiling"),
            ],
            &e,
        )),
    }

    Ok(report("linear", metrics))
}

fn robustness_suite() -> Result<ReproReport> {
    let mut metrics = Vec::new();

    for amplitude in [0.1, 1.0, 10.0] {
        let config = presets::linear_sinusoid(amplitude);
        let name = format!("smallest interval, sinusoid amplitude {amplitude}");
        match simulate(&config) {
            Ok(trace) => metrics.push(option_metric(
                &name,
                ">= 0.009 s",
                "hard floor",
                min_interval(&trace),
                |v| v >= 0.009,
            )),
            Err(e) => {
                metrics.extend(failed_rows(&[(name.as_str(), ">= 0.009 s", "hard floor")], &e))
            }
        }
    }

    let decaying = presets::linear_decaying();
    let x0_norm = decaying.x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    match simulate(&decaying) {
        Ok(trace) => {
            let norm = final_norm(&trace);
            metrics.push(row(
                "state norm at the horizon, decaying disturbance",
                "<= 10% of the initial norm",
                format!("{:.2e} (initial {x0_norm})", norm),
                "hard ceiling",
                norm <= 0.1 * x0_norm,
            ));
        }
        Err(e) => metrics.extend(failed_rows(
            &[(
                "state norm at the horizon, decaying disturbance",
                "<= 10% of the initial norm",
                "hard ceiling",
            )],
            &e,
        )),
    }

    Ok(report("robustness", metrics))
}

fn period_suite() -> Result<ReproReport> {
    let mut metrics = Vec::new();
    let states: [[f64; 2]; 5] = [
        [10.0, 0.0],
        [-10.0, 0.0],
        [0.0, 10.0],
        [0.0, -10.0],
        [5.0, 5.0],
    ];
    let mut periods = Vec::new();

    for x0 in states {
        let config = presets::linear_from_state(x0);
        let name = format!("interval period from ({}, {})", x0[0], x0[1]);
        match simulate(&config).and_then(|trace| trace.stats()) {
            Ok(stats) => match stats.period_estimate {
                Some(period) => {
                    periods.push(period);
                    metrics.push(row(
                        &name,
                        "3.6277 s",
                        format!("{period:.4} s"),
                        "+/- 5%",
                        within(period, 3.6277, 0.05),
                    ));
                }
                None => metrics.push(row(
                    &name,
                    "3.6277 s",
                    "no repetition detected".into(),
                    "+/- 5%",
                    false,
                )),
            },
            Err(e) => {
                metrics.extend(failed_rows(&[(name.as_str(), "3.6277 s", "+/- 5%")], &e))
            }
        }
    }

    let spread_row = if periods.len() == states.len() {
        let lo = periods.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = periods.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let spread = (hi - lo) / lo;
        row(
            "period spread across initial states",
            "<= 5%",
            format!("{:.2}%", 100.0 * spread),
            "hard ceiling",
            spread <= 0.05,
        )
    } else {
        row(
            "period spread across initial states",
            "<= 5%",
            "not all periods available".into(),
            "hard ceiling",
            false,
        )
    };
    metrics.push(spread_row);

    Ok(report("period", metrics))
}

fn report(scenario_id: &str, metrics: Vec<MetricRow>) -> ReproReport {
    let overall = metrics.iter().all(|m| m.pass);
    ReproReport {
        scenario_id: scenario_id.into(),
        metrics,
        overall,
    }
}

pub fn cmd_reproduce(suite: Suite, out: &Path) -> Result<u8> {
    let report = match suite {
        Suite::Vdp => vdp_suite()?,
        Suite::Linear => linear_suite()?,
        Suite::Robustness => robustness_suite()?,
        Suite::Period => period_suite()?,
    };

    for m in &report.metrics {
        let tag = if m.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {}: observed {} (expected {}, tolerance {})",
            m.name, m.observed, m.expected, m.tolerance
        );
    }
    println!(
        "overall: {}",
        if report.overall { "PASS" } else { "FAIL" }
    );

    std::fs::create_dir_all(out)
        .map_err(|e| Error::Internal(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(format!("report_{}.json", suite.name()));
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Internal(format!("cannot serialize report: {e}")))?;
    std::fs::write(&path, json)
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());

    Ok(if report.overall { 0 } else { crate::EXIT_REPORT_FAILURE })
}
