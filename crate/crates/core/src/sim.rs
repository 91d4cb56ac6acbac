//! Closed-loop simulation of sample-and-hold feedback under event triggers.
//!
//! The engine integrates the plant jointly with the trigger's internal
//! variable (countdown clock or storage) using fixed-step RK4, holding the
//! input from the last sampled state. Trigger conditions are evaluated at
//! step boundaries; when one fires mid-step, the crossing is localized by
//! bisection on the step before the sample is latched and the clock reset.
//! A condition that is already true at the start of a fresh step — i.e. the
//! trigger demands a new sample immediately after a reset — is reported as a
//! [`Error::Zeno`] failure rather than silently spinning.
//!
//! Traces are decimated: one row every `trace_stride` accepted steps plus the
//! endpoints. Event records are exact and independent of the decimation.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, Matrix};
use crate::scenario::{PlantRuntime, ResolvedScenario, ScenarioConfig, TriggerRuntime};
use crate::trigger::{
    error_is_negligible, miet_trigger_check, omega, varpi_from_ratio, TriggerState,
    VarpiCoefficients, CONSISTENCY_TOL,
};

/// States larger than this are treated as divergence.
const DIVERGENCE_LIMIT: f64 = 1e9;

/// Event crossings are localized to this fraction of one step.
const LOCALIZATION_REL: f64 = 1e-9;

/// One trigger firing: the moment a fresh sample was latched.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerEvent {
    /// Position in the event sequence; the initial latch at time zero is 0.
    pub index: usize,
    pub time: f64,
    /// State sampled at the event, held by the controller until the next one.
    pub x_latched: Vec<f64>,
    /// Time since the previous event; absent on the initial latch.
    pub inter_event_dt: Option<f64>,
}

/// Countdown-trigger constants recorded on the trace for later inspection.
#[derive(Debug, Clone)]
pub struct MietTraceMeta {
    pub z_bar: f64,
    pub epsilon: f64,
    pub coeffs: VarpiCoefficients,
    /// Envelope constant derived from the design matrices.
    pub b_formula: f64,
    /// Constant actually used for the reported bound (override or derived).
    pub b_effective: f64,
    /// Guaranteed minimum inter-event time.
    pub bound: f64,
}

/// Result of one simulation run. Column vectors are aligned with `times`.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub scenario_id: String,
    pub state_dim: usize,
    /// Warmup used by default for interval statistics.
    pub warmup: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Sampling error `held - x` at each row.
    pub errors: Vec<Vec<f64>>,
    /// Trigger-internal value: countdown clock, storage variable, or the
    /// static rule's margin `sigma*alpha(|x|) - gamma(|e|)`.
    pub trigger_var: Vec<f64>,
    /// Countdown rate at each row; only present for the countdown trigger.
    pub omega: Option<Vec<f64>>,
    /// Monitored energy, including the clock-weighted error term.
    pub lyapunov: Vec<f64>,
    /// The clock-weighted error term alone.
    pub cross_term: Vec<f64>,
    pub events: Vec<TriggerEvent>,
    pub miet: Option<MietTraceMeta>,
}

impl SimulationTrace {
    /// Interval statistics using the scenario's own warmup.
    pub fn stats(&self) -> Result<InterEventStats> {
        inter_event_stats(self, self.warmup)
    }
}

/// Summary of the inter-event intervals after warmup.
#[derive(Debug, Clone, PartialEq)]
pub struct InterEventStats {
    /// Number of intervals included.
    pub count: usize,
    pub min_dt: f64,
    pub max_dt: f64,
    pub mean_dt: f64,
    /// Dominant period of the interval sequence, when one stands out.
    pub period_estimate: Option<f64>,
}

/// How the monitored energy is assembled for a scenario.
pub enum LyapunovSpec<'a> {
    /// Quadratic energy for the nonlinear plant: `1/2 x'Vx` (identity `V`
    /// when absent) plus `1/2 Z e'We` when a countdown weight is in play.
    Nonlinear { v: Option<&'a Matrix>, cross_weight: Option<&'a Matrix> },
    /// `1/2 x'Px + 1/2 Z e'Pe` for the linear plant.
    Linear { p: &'a Matrix },
}

/// Monitored energy split into its total and the clock-weighted error part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovValue {
    pub total: f64,
    pub cross: f64,
}

/// Evaluates the monitored energy at one sample. `z` is the countdown clock,
/// zero for the baseline triggers (their energy has no error term).
pub fn lyapunov_w(x: &[f64], e: &[f64], z: f64, spec: &LyapunovSpec<'_>) -> LyapunovValue {
    match spec {
        LyapunovSpec::Nonlinear { v, cross_weight } => {
            let base = match v {
                Some(v) => 0.5 * v.quad_form(x),
                None => 0.5 * x.iter().map(|xi| xi * xi).sum::<f64>(),
            };
            let cross = match cross_weight {
                Some(w) => 0.5 * z * w.quad_form(e),
                None => 0.0,
            };
            LyapunovValue { total: base + cross, cross }
        }
        LyapunovSpec::Linear { p } => {
            let cross = 0.5 * z * p.quad_form(e);
            LyapunovValue { total: 0.5 * p.quad_form(x) + cross, cross }
        }
    }
}

impl ResolvedScenario {
    /// The energy specification this scenario monitors.
    pub fn lyapunov_spec(&self) -> LyapunovSpec<'_> {
        match &self.plant {
            PlantRuntime::Nonlinear { weight, v, .. } => LyapunovSpec::Nonlinear {
                v: v.as_ref(),
                cross_weight: match &self.trigger {
                    TriggerRuntime::Miet(_) => Some(weight),
                    _ => None,
                },
            },
            PlantRuntime::Linear(lp) => LyapunovSpec::Linear { p: lp.p() },
        }
    }
}

/// Norms of the state and of the sampling error `held - x`.
fn state_error_norms(x: &[f64], held: &[f64]) -> (f64, f64) {
    let mut nx2 = 0.0;
    let mut ne2 = 0.0;
    for i in 0..x.len() {
        nx2 += x[i] * x[i];
        let e = held[i] - x[i];
        ne2 += e * e;
    }
    (nx2.sqrt(), ne2.sqrt())
}

/// The controller-side value held between events: the input itself for the
/// nonlinear plant, the state-feedback injection `BK x_held` for the linear.
fn held_injection(plant: &PlantRuntime, x_held: &[f64]) -> Vec<f64> {
    match plant {
        PlantRuntime::Nonlinear { plant, .. } => plant.feedback(x_held),
        PlantRuntime::Linear(lp) => lp.input_injection(x_held),
    }
}

/// Everything the right-hand side needs that is frozen within one step.
struct StepCtx<'a> {
    scenario: &'a ResolvedScenario,
    n: usize,
    held: &'a [f64],
    injection: &'a [f64],
}

/// Joint right-hand side: plant states in `y[..n]`, trigger variable (clock
/// or storage) in `y[n]` when the trigger has one.
fn eval_deriv(ctx: &StepCtx<'_>, t: f64, y: &[f64], out: &mut [f64]) {
    let n = ctx.n;
    let x = &y[..n];
    match &ctx.scenario.plant {
        PlantRuntime::Nonlinear { plant, .. } => {
            plant.vector_field_into(x, ctx.injection, &mut out[..n]);
        }
        PlantRuntime::Linear(lp) => {
            lp.a().mul_vec_into(x, &mut out[..n]);
            for i in 0..n {
                out[i] += ctx.injection[i];
            }
            if let Some(d) = &ctx.scenario.disturbance {
                let h = lp.h().expect("resolution guarantees a disturbance matrix");
                let dv = d.value(t);
                for i in 0..n {
                    out[i] += h[(i, 0)] * dv;
                }
            }
        }
    }
    match &ctx.scenario.trigger {
        TriggerRuntime::Miet(rt) => {
            let (nx, ne) = state_error_norms(x, ctx.held);
            let eps = rt.params.epsilon;
            out[n] = if ne <= 1e-12 * nx.max(1.0) {
                omega(0.0, eps, true)
            } else {
                omega(varpi_from_ratio(nx / ne, y[n], &rt.coeffs), eps, false)
            };
        }
        TriggerRuntime::Dynamic(p) => {
            let (nx, ne) = state_error_norms(x, ctx.held);
            out[n] = -p.zeta_rate * y[n] + p.sigma * p.alpha.eval(nx) - p.gamma.eval(ne);
        }
        TriggerRuntime::Static(_) => {}
    }
}

struct Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
        }
    }
}

fn rk4_step(ctx: &StepCtx<'_>, t: f64, y: &[f64], h: f64, out: &mut [f64], scr: &mut Scratch) {
    eval_deriv(ctx, t, y, &mut scr.k1);
    for i in 0..y.len() {
        scr.stage[i] = y[i] + 0.5 * h * scr.k1[i];
    }
    eval_deriv(ctx, t + 0.5 * h, &scr.stage, &mut scr.k2);
    for i in 0..y.len() {
        scr.stage[i] = y[i] + 0.5 * h * scr.k2[i];
    }
    eval_deriv(ctx, t + 0.5 * h, &scr.stage, &mut scr.k3);
    for i in 0..y.len() {
        scr.stage[i] = y[i] + h * scr.k3[i];
    }
    eval_deriv(ctx, t + h, &scr.stage, &mut scr.k4);
    for i in 0..y.len() {
        out[i] = y[i] + h / 6.0 * (scr.k1[i] + 2.0 * scr.k2[i] + 2.0 * scr.k3[i] + scr.k4[i]);
    }
}

/// Trigger condition at a candidate point, free of side effects so the
/// bisection can probe it repeatedly.
fn fire_condition(s: &ResolvedScenario, held: &[f64], y: &[f64], n: usize) -> bool {
    match &s.trigger {
        TriggerRuntime::Miet(_) => y[n] <= 0.0,
        TriggerRuntime::Static(p) => {
            let (nx, ne) = state_error_norms(&y[..n], held);
            p.gamma.eval(ne) >= p.sigma * p.alpha.eval(nx)
        }
        TriggerRuntime::Dynamic(p) => {
            let (nx, ne) = state_error_norms(&y[..n], held);
            y[n] + p.theta * (p.sigma * p.alpha.eval(nx) - p.gamma.eval(ne)) <= 0.0
        }
    }
}

/// Parses, resolves, and runs a scenario in one call.
pub fn simulate(config: &ScenarioConfig) -> Result<SimulationTrace> {
    simulate_resolved(&config.resolve()?)
}

/// Runs an already-resolved scenario to its horizon.
pub fn simulate_resolved(s: &ResolvedScenario) -> Result<SimulationTrace> {
    let n = s.plant.state_dim();
    let has_aux = !matches!(s.trigger, TriggerRuntime::Static(_));
    let dim = if has_aux { n + 1 } else { n };

    let mut y = vec![0.0; dim];
    y[..n].copy_from_slice(&s.x0);
    let mut state = match &s.trigger {
        TriggerRuntime::Miet(rt) => {
            y[n] = rt.params.z_bar;
            TriggerState::for_miet(&s.x0, &rt.params)
        }
        TriggerRuntime::Dynamic(p) => {
            y[n] = p.eta0;
            TriggerState::for_dynamic(&s.x0, p)
        }
        TriggerRuntime::Static(_) => TriggerState::for_static(&s.x0),
    };
    let mut injection = held_injection(&s.plant, state.held.state());
    let mut held_buf = state.held.state().to_vec();

    let mut trace = SimulationTrace {
        scenario_id: s.id.clone(),
        state_dim: n,
        warmup: s.warmup,
        times: Vec::new(),
        states: Vec::new(),
        errors: Vec::new(),
        trigger_var: Vec::new(),
        omega: match &s.trigger {
            TriggerRuntime::Miet(_) => Some(Vec::new()),
            _ => None,
        },
        lyapunov: Vec::new(),
        cross_term: Vec::new(),
        events: vec![TriggerEvent {
            index: 0,
            time: 0.0,
            x_latched: s.x0.clone(),
            inter_event_dt: None,
        }],
        miet: match &s.trigger {
            TriggerRuntime::Miet(rt) => Some(MietTraceMeta {
                z_bar: rt.params.z_bar,
                epsilon: rt.params.epsilon,
                coeffs: rt.coeffs.clone(),
                b_formula: rt.b_formula,
                b_effective: rt.b_effective(),
                bound: rt.bound,
            }),
            _ => None,
        },
    };

    let spec = s.lyapunov_spec();
    push_row(&mut trace, s, &spec, 0.0, &y, &state);

    let mut scr = Scratch::new(dim);
    let mut y_next = vec![0.0; dim];
    let mut y_probe = vec![0.0; dim];
    let loc_tol = LOCALIZATION_REL * s.dt;

    let mut t = 0.0;
    let mut steps: u64 = 0;
    while s.horizon - t > loc_tol {
        let h = s.dt.min(s.horizon - t);
        held_buf.copy_from_slice(state.held.state());
        if fire_condition(s, &held_buf, &y, n) {
            return Err(Error::Zeno { t });
        }
        let ctx = StepCtx { scenario: s, n, held: &held_buf, injection: &injection };
        rk4_step(&ctx, t, &y, h, &mut y_next, &mut scr);

        let norm_next = vec_norm(&y_next[..n]);
        if !norm_next.is_finite() || !y_next[dim - 1].is_finite() {
            return Err(Error::NonFinite {
                context: format!("integration state near t = {:.6}", t + h),
            });
        }
        if norm_next > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { t: t + h, norm: norm_next });
        }

        let fired = fire_condition(s, &held_buf, &y_next, n);
        if fired {
            // The condition flipped inside (t, t+h]; shrink onto the crossing
            // and accept the first sub-step on which it holds.
            let mut lo = 0.0;
            let mut hi = h;
            while hi - lo > loc_tol {
                let mid = 0.5 * (lo + hi);
                rk4_step(&ctx, t, &y, mid, &mut y_probe, &mut scr);
                if fire_condition(s, &held_buf, &y_probe, n) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            rk4_step(&ctx, t, &y, hi, &mut y_next, &mut scr);
            t += hi;
            std::mem::swap(&mut y, &mut y_next);

            let prev = *state.event_times.last().expect("initial event always present");
            let interval = t - prev;
            if interval <= 2.0 * loc_tol {
                return Err(Error::Zeno { t });
            }
            state.record_event(t, &y[..n]);
            if let TriggerRuntime::Miet(rt) = &s.trigger {
                y[n] = rt.params.z_bar;
            }
            injection = held_injection(&s.plant, state.held.state());
            trace.events.push(TriggerEvent {
                index: state.event_count - 1,
                time: t,
                x_latched: y[..n].to_vec(),
                inter_event_dt: Some(interval),
            });
        } else {
            t += h;
            std::mem::swap(&mut y, &mut y_next);
        }

        // Post-step consistency: keep the trigger state in sync with the
        // integrated variable and let the flavor-specific checks run.
        match &s.trigger {
            TriggerRuntime::Miet(_) => {
                state.z = y[n];
                miet_trigger_check(&state)?;
            }
            TriggerRuntime::Dynamic(_) => {
                state.eta = y[n];
                let tol = CONSISTENCY_TOL * (1.0 + y[n].abs());
                if !fired && y[n] < -tol {
                    return Err(Error::TriggerConsistency(format!(
                        "storage variable fell to {} at t = {:.6} without an event",
                        y[n], t
                    )));
                }
            }
            TriggerRuntime::Static(_) => {}
        }

        if let Some(d) = &s.disturbance {
            let dv = d.value(t);
            if dv.abs() > d.bound() * (1.0 + 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "disturbance magnitude {} exceeds its declared bound {} at t = {:.6}",
                    dv.abs(),
                    d.bound(),
                    t
                )));
            }
        }

        steps += 1;
        if steps % s.trace_stride as u64 == 0 {
            push_row(&mut trace, s, &spec, t, &y, &state);
        }
    }

    if trace.times.last() != Some(&t) {
        push_row(&mut trace, s, &spec, t, &y, &state);
    }
    Ok(trace)
}

fn push_row(
    trace: &mut SimulationTrace,
    s: &ResolvedScenario,
    spec: &LyapunovSpec<'_>,
    t: f64,
    y: &[f64],
    state: &TriggerState,
) {
    let n = trace.state_dim;
    let x = &y[..n];
    let e = state.held.error(x);

    let (var, z_for_energy) = match &s.trigger {
        TriggerRuntime::Miet(_) => (y[n], y[n]),
        TriggerRuntime::Dynamic(_) => (y[n], 0.0),
        TriggerRuntime::Static(p) => {
            let (nx, ne) = state_error_norms(x, state.held.state());
            (p.sigma * p.alpha.eval(nx) - p.gamma.eval(ne), 0.0)
        }
    };

    if let (Some(col), TriggerRuntime::Miet(rt)) = (trace.omega.as_mut(), &s.trigger) {
        let w = if error_is_negligible(x, &e) {
            omega(0.0, rt.params.epsilon, true)
        } else {
            let (nx, ne) = state_error_norms(x, state.held.state());
            omega(varpi_from_ratio(nx / ne, y[n], &rt.coeffs), rt.params.epsilon, false)
        };
        col.push(w);
    }

    let energy = lyapunov_w(x, &e, z_for_energy, spec);
    trace.times.push(t);
    trace.states.push(x.to_vec());
    trace.errors.push(e);
    trace.trigger_var.push(var);
    trace.lyapunov.push(energy.total);
    trace.cross_term.push(energy.cross);
}

/// Interval statistics over events after `warmup`. Needs at least three
/// intervals to say anything.
pub fn inter_event_stats(trace: &SimulationTrace, warmup: f64) -> Result<InterEventStats> {
    let pts: Vec<(f64, f64)> = trace
        .events
        .iter()
        .filter_map(|ev| ev.inter_event_dt.map(|d| (ev.time, d)))
        .filter(|(t, _)| *t >= warmup)
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} inter-event intervals after a warmup of {} s",
            pts.len(),
            warmup
        )));
    }
    let mut min_dt = f64::INFINITY;
    let mut max_dt = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &(_, d) in &pts {
        min_dt = min_dt.min(d);
        max_dt = max_dt.max(d);
        sum += d;
    }
    Ok(InterEventStats {
        count: pts.len(),
        min_dt,
        max_dt,
        mean_dt: sum / pts.len() as f64,
        period_estimate: estimate_period(&pts),
    })
}

/// Dominant period of the interval sequence: the intervals are resampled
/// onto a uniform grid, and the best local maximum of the (lag-damped)
/// autocorrelation is taken — absent when no peak clears 0.5.
fn estimate_period(pts: &[(f64, f64)]) -> Option<f64> {
    let count = pts.len();
    let t0 = pts[0].0;
    let span = pts[count - 1].0 - t0;
    if !(span > 0.0) {
        return None;
    }
    let n = 512usize.max(8 * count);
    let g = span / (n - 1) as f64;

    let mut signal = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let t = t0 + g * i as f64;
        while j + 1 < count && pts[j + 1].0 < t {
            j += 1;
        }
        let v = if t <= pts[0].0 {
            pts[0].1
        } else if t >= pts[count - 1].0 {
            pts[count - 1].1
        } else {
            let (ta, va) = pts[j];
            let (tb, vb) = pts[j + 1];
            if tb > ta {
                va + (vb - va) * (t - ta) / (tb - ta)
            } else {
                va
            }
        };
        signal.push(v);
    }

    let mean = signal.iter().sum::<f64>() / n as f64;
    for v in &mut signal {
        *v -= mean;
    }
    let denom: f64 = signal.iter().map(|v| v * v).sum();
    if denom <= 1e-30 {
        return None;
    }

    // Normalizing every lag by the lag-0 energy damps long lags, so the
    // fundamental peak wins over its own multiples.
    let mut corr = Vec::with_capacity(n - 2);
    corr.push(1.0);
    for lag in 1..n - 2 {
        let mut acc = 0.0;
        for i in 0..n - lag {
            acc += signal[i] * signal[i + lag];
        }
        corr.push(acc / denom);
    }

    let mut best: Option<(usize, f64)> = None;
    for lag in 1..corr.len() - 1 {
        if corr[lag] > corr[lag - 1]
            && corr[lag] >= corr[lag + 1]
            && best.map_or(true, |(_, r)| corr[lag] > r)
        {
            best = Some((lag, corr[lag]));
        }
    }
    match best {
        Some((lag, r)) if r >= 0.5 => Some(lag as f64 * g),
        _ => None,
    }
}

/// Re-evaluates the countdown rate along a trace for inspection.
pub fn omega_trace(trace: &SimulationTrace) -> Result<Vec<(f64, f64)>> {
    let meta = trace.miet.as_ref().ok_or_else(|| {
        Error::InvalidParameter("rate inspection requires a countdown-trigger trace".into())
    })?;
    let mut out = Vec::with_capacity(trace.times.len());
    for i in 0..trace.times.len() {
        let x = &trace.states[i];
        let e = &trace.errors[i];
        let z = trace.trigger_var[i];
        let w = if error_is_negligible(x, e) {
            omega(0.0, meta.epsilon, true)
        } else {
            omega(
                varpi_from_ratio(vec_norm(x) / vec_norm(e), z, &meta.coeffs),
                meta.epsilon,
                false,
            )
        };
        out.push((trace.times[i], w));
    }
    Ok(out)
}

/// Writes the decimated trace as CSV with full float precision.
pub fn write_trace_csv<W: Write>(trace: &SimulationTrace, mut w: W) -> io::Result<()> {
    let n = trace.state_dim;
    write!(w, "t")?;
    for i in 1..=n {
        write!(w, ",x_{i}")?;
    }
    for i in 1..=n {
        write!(w, ",e_{i}")?;
    }
    write!(w, ",trigger_var")?;
    if trace.omega.is_some() {
        write!(w, ",omega")?;
    }
    writeln!(w, ",W,cross_term")?;

    for r in 0..trace.times.len() {
        write!(w, "{:.16e}", trace.times[r])?;
        for v in &trace.states[r] {
            write!(w, ",{v:.16e}")?;
        }
        for v in &trace.errors[r] {
            write!(w, ",{v:.16e}")?;
        }
        write!(w, ",{:.16e}", trace.trigger_var[r])?;
        if let Some(col) = &trace.omega {
            write!(w, ",{:.16e}", col[r])?;
        }
        writeln!(w, ",{:.16e},{:.16e}", trace.lyapunov[r], trace.cross_term[r])?;
    }
    Ok(())
}

/// Writes the exact event sequence as CSV.
pub fn write_events_csv<W: Write>(trace: &SimulationTrace, mut w: W) -> io::Result<()> {
    let n = trace.state_dim;
    write!(w, "index,t,inter_event_dt")?;
    for i in 1..=n {
        write!(w, ",x_latched_{i}")?;
    }
    writeln!(w)?;
    for ev in &trace.events {
        write!(w, "{},{:.16e},", ev.index, ev.time)?;
        if let Some(d) = ev.inter_event_dt {
            write!(w, "{d:.16e}")?;
        }
        for v in &ev.x_latched {
            write!(w, ",{v:.16e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
