//! Declarative scenario configuration.
//!
//! A [`ScenarioConfig`] is the complete, serializable description of one run:
//! plant, trigger, initial state, horizon, step size, and optional
//! disturbance. Configs are plain data — loading one performs no numerics.
//! [`ScenarioConfig::resolve`] turns the data into validated runtime objects
//! (plants, trigger parameters, derived constants) and is where every
//! cross-field consistency rule lives. The built-in [`presets`] cover the two
//! reference experiments and their variants.
//!
//! Times are in seconds throughout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::miet_lower_bound;
use crate::error::{Error, Result};
use crate::linalg::{sym_eig_min, Matrix};
use crate::plant::{Disturbance, DisturbanceKind, LinearPlant, NonlinearPlant};
use crate::trigger::{
    DynamicTriggerParams, KFunction, MietFlavor, MietTriggerParams, StaticTriggerParams,
    VarpiCoefficients,
};

fn default_trace_stride() -> usize {
    10
}

fn default_warmup() -> f64 {
    1.0
}

fn default_sigma() -> f64 {
    0.5
}

fn default_one() -> f64 {
    1.0
}

/// What to do when the step size is too coarse for the trigger's guaranteed
/// minimum inter-event time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DtPolicy {
    /// Reject the scenario (the default).
    #[default]
    Error,
    /// Keep going but record a warning on the resolved scenario.
    Warn,
}

/// Plant selection and its numeric data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PlantConfig {
    /// The built-in van der Pol oscillator under its damping controller.
    Vdp {
        lipschitz: f64,
        /// Weight matrix of the countdown design and the error energy term.
        m: Matrix,
        /// Optional quadratic energy weight for monitoring; `1/2 |x|^2` when
        /// omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<Matrix>,
    },
    Linear {
        a: Matrix,
        b: Matrix,
        k: Matrix,
        q: Matrix,
        /// Steady-state matrix; solved from `(A+BK)'P + P(A+BK) = -Q` when
        /// omitted, verified against it when supplied.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<Matrix>,
        /// Disturbance input matrix (one column); required to attach a
        /// disturbance signal.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<Matrix>,
    },
}

/// Trigger selection and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TriggerConfig {
    /// Countdown trigger with designable minimum inter-event time.
    Miet {
        z_bar: f64,
        epsilon: f64,
        /// Optional envelope-constant override used for bound reporting. The
        /// formula value is a guarantee for any value at or above it, so a
        /// larger design constant gives a smaller, still-valid bound.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b_design: Option<f64>,
    },
    Static {
        #[serde(default = "default_sigma")]
        sigma: f64,
        alpha: KFunction,
        gamma: KFunction,
    },
    Dynamic {
        #[serde(default = "default_sigma")]
        sigma: f64,
        #[serde(default = "default_one")]
        theta: f64,
        #[serde(default = "default_one")]
        zeta_rate: f64,
        #[serde(default)]
        eta0: f64,
        alpha: KFunction,
        gamma: KFunction,
    },
}

/// Disturbance signal selection; `none` and an absent table mean the same.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DisturbanceConfig {
    #[default]
    None,
    Constant {
        level: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Sinusoid {
        amplitude: f64,
        frequency_hz: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    DecayingExponential {
        amplitude: f64,
        decay_rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    PiecewiseTable {
        points: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
}

impl DisturbanceConfig {
    fn is_none(&self) -> bool {
        matches!(self, Self::None)
    }

    fn build(&self) -> Result<Option<Disturbance>> {
        let (kind, bound) = match self.clone() {
            Self::None => return Ok(None),
            Self::Constant { level, bound } => (DisturbanceKind::Constant { level }, bound),
            Self::Sinusoid { amplitude, frequency_hz, phase, bound } => {
                (DisturbanceKind::Sinusoid { amplitude, frequency_hz, phase }, bound)
            }
            Self::DecayingExponential { amplitude, decay_rate, bound } => {
                (DisturbanceKind::DecayingExponential { amplitude, decay_rate }, bound)
            }
            Self::PiecewiseTable { points, bound } => {
                (DisturbanceKind::PiecewiseTable { points }, bound)
            }
        };
        Disturbance::new(kind, bound).map(Some)
    }
}

/// One complete simulation description. See the module docs for semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub x0: Vec<f64>,
    /// Simulation length in seconds.
    pub horizon: f64,
    /// Integrator step in seconds.
    pub dt: f64,
    /// Log every `trace_stride`-th integrator step (plus the endpoints).
    #[serde(default = "default_trace_stride")]
    pub trace_stride: usize,
    /// Events before this time are excluded from interval statistics.
    #[serde(default = "default_warmup")]
    pub warmup: f64,
    #[serde(default)]
    pub dt_policy: DtPolicy,
    pub plant: PlantConfig,
    pub trigger: TriggerConfig,
    #[serde(default, skip_serializing_if = "DisturbanceConfig::is_none")]
    pub disturbance: DisturbanceConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("scenario parse failed: {e}")))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read scenario file {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("scenario serialization failed: {e}")))
    }

    /// Validates every field and cross-field rule and builds the runtime
    /// objects a simulation needs. All numerics derived from the config
    /// (steady-state solve, envelope constant, guaranteed bound) happen here.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let mut warnings = Vec::new();

        if self.id.trim().is_empty() {
            return Err(Error::Config("scenario id must be non-empty".into()));
        }
        if self.x0.is_empty() || self.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("initial state must be non-empty and finite".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon >= 10.0 * self.dt) {
            return Err(Error::Config(format!(
                "horizon must cover at least 10 steps: horizon {} with dt {}",
                self.horizon, self.dt
            )));
        }
        if self.trace_stride == 0 {
            return Err(Error::Config("trace_stride must be at least 1".into()));
        }
        if !(self.warmup >= 0.0 && self.warmup.is_finite()) {
            return Err(Error::Config(format!(
                "warmup must be non-negative, got {}",
                self.warmup
            )));
        }

        let plant = match &self.plant {
            PlantConfig::Vdp { lipschitz, m, v } => {
                if self.x0.len() != 2 {
                    return Err(Error::Config(format!(
                        "the oscillator plant has 2 states, initial state has {}",
                        self.x0.len()
                    )));
                }
                m.check_symmetric()?;
                let m_min = sym_eig_min(m)?;
                if m_min <= 0.0 {
                    return Err(Error::NotPositiveDefinite {
                        context: "weight matrix".into(),
                        lambda_min: m_min,
                    });
                }
                if let Some(v) = v {
                    if v.rows() != 2 {
                        return Err(Error::Config("energy weight must be 2x2".into()));
                    }
                    let v_min = sym_eig_min(v)?;
                    if v_min <= 0.0 {
                        return Err(Error::NotPositiveDefinite {
                            context: "energy weight".into(),
                            lambda_min: v_min,
                        });
                    }
                }
                PlantRuntime::Nonlinear {
                    plant: NonlinearPlant::vdp(*lipschitz)?,
                    weight: m.clone(),
                    v: v.clone(),
                }
            }
            PlantConfig::Linear { a, b, k, q, p, h } => {
                let lp = LinearPlant::new(
                    a.clone(),
                    b.clone(),
                    k.clone(),
                    q.clone(),
                    p.clone(),
                    h.clone(),
                )?;
                if self.x0.len() != lp.state_dim() {
                    return Err(Error::Config(format!(
                        "plant has {} states, initial state has {}",
                        lp.state_dim(),
                        self.x0.len()
                    )));
                }
                PlantRuntime::Linear(lp)
            }
        };

        let disturbance = self.disturbance.build()?;
        if disturbance.is_some() {
            match &plant {
                PlantRuntime::Linear(lp) => match lp.disturbance_dim() {
                    None => {
                        return Err(Error::Config(
                            "disturbance configured but the plant has no disturbance matrix h".into(),
                        ))
                    }
                    Some(1) => {}
                    Some(d) => {
                        return Err(Error::Config(format!(
                            "disturbance signals are scalar; the disturbance matrix has {d} columns"
                        )))
                    }
                },
                PlantRuntime::Nonlinear { .. } => {
                    return Err(Error::Config(
                        "disturbances are only supported on the linear plant".into(),
                    ))
                }
            }
        }

        let trigger = match &self.trigger {
            TriggerConfig::Miet { z_bar, epsilon, b_design } => {
                let flavor = match &plant {
                    PlantRuntime::Nonlinear { plant, weight, .. } => MietFlavor::Nonlinear {
                        lipschitz: plant.lipschitz(),
                        weight: weight.clone(),
                    },
                    PlantRuntime::Linear(lp) => MietFlavor::Linear {
                        p: lp.p().clone(),
                        b: lp.b().clone(),
                        k: lp.k().clone(),
                        q: lp.q().clone(),
                    },
                };
                let params = MietTriggerParams::new(*z_bar, *epsilon, flavor)?;
                let coeffs = params.varpi_coefficients()?;
                let b_formula = coeffs.envelope_b();
                if let Some(bd) = b_design {
                    if !(*bd > 0.0 && bd.is_finite()) {
                        return Err(Error::Config(format!(
                            "design envelope constant must be positive, got {bd}"
                        )));
                    }
                    if *bd < b_formula * (1.0 - 1e-9) {
                        warnings.push(format!(
                            "design envelope constant {bd} is below the derived value {b_formula:.6}; \
                             the reported bound is not guaranteed"
                        ));
                    }
                }
                let b_effective = b_design.unwrap_or(b_formula);
                let bound = miet_lower_bound(b_effective, *epsilon, *z_bar)?;
                TriggerRuntime::Miet(MietRuntime {
                    params,
                    coeffs,
                    b_formula,
                    b_design: *b_design,
                    bound,
                })
            }
            TriggerConfig::Static { sigma, alpha, gamma } => {
                TriggerRuntime::Static(StaticTriggerParams::new(*sigma, *alpha, *gamma)?)
            }
            TriggerConfig::Dynamic { sigma, theta, zeta_rate, eta0, alpha, gamma } => {
                TriggerRuntime::Dynamic(DynamicTriggerParams::new(
                    *sigma, *theta, *zeta_rate, *eta0, *alpha, *gamma,
                )?)
            }
        };

        // A guaranteed-minimum-interval trigger deserves a step size that can
        // resolve that interval. The baselines give no guarantee, so their
        // crossings are only trustworthy on a fine grid; cap their dt outright.
        let dt_note = match &trigger {
            TriggerRuntime::Miet(rt) if self.dt > rt.bound / 20.0 => Some(format!(
                "dt {} is coarser than a twentieth of the guaranteed interval {:.6}",
                self.dt, rt.bound
            )),
            TriggerRuntime::Static(_) | TriggerRuntime::Dynamic(_) if self.dt > 1e-4 => {
                Some(format!(
                    "baseline triggers need dt <= 1e-4 to localize crossings, got {}",
                    self.dt
                ))
            }
            _ => None,
        };
        if let Some(note) = dt_note {
            match self.dt_policy {
                DtPolicy::Error => return Err(Error::Config(note)),
                DtPolicy::Warn => warnings.push(note),
            }
        }

        Ok(ResolvedScenario {
            id: self.id.clone(),
            x0: self.x0.clone(),
            horizon: self.horizon,
            dt: self.dt,
            trace_stride: self.trace_stride,
            warmup: self.warmup,
            plant,
            trigger,
            disturbance,
            warnings,
        })
    }
}

/// A plant ready to integrate.
pub enum PlantRuntime {
    Nonlinear {
        plant: NonlinearPlant,
        /// Countdown/error weight matrix from the config.
        weight: Matrix,
        /// Optional quadratic energy weight for monitoring.
        v: Option<Matrix>,
    },
    Linear(LinearPlant),
}

impl PlantRuntime {
    pub fn state_dim(&self) -> usize {
        match self {
            Self::Nonlinear { plant, .. } => plant.state_dim(),
            Self::Linear(lp) => lp.state_dim(),
        }
    }
}

/// Countdown trigger with all derived design constants resolved.
#[derive(Debug, Clone)]
pub struct MietRuntime {
    pub params: MietTriggerParams,
    pub coeffs: VarpiCoefficients,
    /// Envelope constant derived from the flavor matrices.
    pub b_formula: f64,
    /// Optional configured override for bound reporting.
    pub b_design: Option<f64>,
    /// Guaranteed minimum inter-event time at the effective constant.
    pub bound: f64,
}

impl MietRuntime {
    pub fn b_effective(&self) -> f64 {
        self.b_design.unwrap_or(self.b_formula)
    }
}

/// A trigger ready to run.
pub enum TriggerRuntime {
    Miet(MietRuntime),
    Static(StaticTriggerParams),
    Dynamic(DynamicTriggerParams),
}

/// A fully validated scenario with runtime objects built.
pub struct ResolvedScenario {
    pub id: String,
    pub x0: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub trace_stride: usize,
    pub warmup: f64,
    pub plant: PlantRuntime,
    pub trigger: TriggerRuntime,
    pub disturbance: Option<Disturbance>,
    /// Non-fatal findings from resolution (dt policy, bound overrides, ...).
    pub warnings: Vec<String>,
}

/// Canned scenarios for the two reference experiments and their variants.
pub mod presets {
    use super::*;

    fn weight_m() -> Matrix {
        Matrix::from_rows(vec![vec![1.0, 0.25], vec![0.25, 1.0]]).unwrap()
    }

    fn linear_plant_config() -> PlantConfig {
        PlantConfig::Linear {
            a: Matrix::from_rows(vec![vec![0.0, 1.0], vec![-2.0, 3.0]]).unwrap(),
            b: Matrix::from_rows(vec![vec![0.0], vec![1.0]]).unwrap(),
            k: Matrix::from_rows(vec![vec![1.0, -4.0]]).unwrap(),
            q: Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 1.5]]).unwrap(),
            p: None,
            h: Some(Matrix::from_rows(vec![vec![0.0], vec![1.0]]).unwrap()),
        }
    }

    /// Baseline comparison functions for the linear experiment, derived from
    /// its energy decay estimate: the quadratic pair
    /// `alpha(r) = (lambda_min(Q)/4) r^2` and
    /// `gamma(r) = (|PBK|^2/lambda_min(Q)) r^2`.
    fn linear_baseline_functions() -> (KFunction, KFunction) {
        let lambda_q = 1.0 - 0.3125f64.sqrt();
        let pbk = 4.25;
        (
            KFunction::quadratic(0.25 * lambda_q).unwrap(),
            KFunction::quadratic(pbk * pbk / lambda_q).unwrap(),
        )
    }

    /// Oscillator under the countdown trigger, the first reference experiment.
    pub fn vdp_nominal() -> ScenarioConfig {
        vdp_with_reset(1.0)
    }

    /// Oscillator run with a custom countdown reset value.
    pub fn vdp_with_reset(z_bar: f64) -> ScenarioConfig {
        ScenarioConfig {
            id: if z_bar == 1.0 {
                "vdp-nominal".into()
            } else {
                format!("vdp-zbar{z_bar}")
            },
            x0: vec![1.0, -0.5],
            horizon: 40.0,
            dt: 1e-4,
            trace_stride: 10,
            warmup: 1.0,
            dt_policy: DtPolicy::Error,
            plant: PlantConfig::Vdp { lipschitz: 1.0, m: weight_m(), v: None },
            trigger: TriggerConfig::Miet { z_bar, epsilon: 1.0, b_design: None },
            disturbance: DisturbanceConfig::None,
        }
    }

    /// Linear plant under the countdown trigger, the second reference
    /// experiment; bound reporting uses the rounded-up design constant 55.
    pub fn linear_nominal() -> ScenarioConfig {
        linear_from_state([10.0, 0.0])
    }

    /// The linear experiment from an arbitrary initial state.
    pub fn linear_from_state(x0: [f64; 2]) -> ScenarioConfig {
        ScenarioConfig {
            id: format!("linear-from-{}-{}", x0[0], x0[1]),
            x0: x0.to_vec(),
            horizon: 20.0,
            dt: 1e-4,
            trace_stride: 10,
            warmup: 1.0,
            dt_policy: DtPolicy::Error,
            plant: linear_plant_config(),
            trigger: TriggerConfig::Miet { z_bar: 1.0, epsilon: 1.0, b_design: Some(55.0) },
            disturbance: DisturbanceConfig::None,
        }
        .with_id_for_nominal(x0)
    }

    /// Linear experiment with a sinusoidal disturbance of amplitude `d_bar`.
    pub fn linear_sinusoid(d_bar: f64) -> ScenarioConfig {
        let mut config = linear_nominal();
        config.id = format!("linear-sinusoid-{d_bar}");
        config.disturbance = DisturbanceConfig::Sinusoid {
            amplitude: d_bar,
            frequency_hz: 1.0,
            phase: 0.0,
            bound: None,
        };
        config
    }

    /// Linear experiment with a decaying disturbance over a longer horizon.
    pub fn linear_decaying() -> ScenarioConfig {
        let mut config = linear_nominal();
        config.id = "linear-decaying".into();
        config.horizon = 40.0;
        config.disturbance = DisturbanceConfig::DecayingExponential {
            amplitude: 1.0,
            decay_rate: 0.5,
            bound: None,
        };
        config
    }

    /// Linear plant under the static baseline trigger.
    pub fn linear_static_baseline() -> ScenarioConfig {
        let (alpha, gamma) = linear_baseline_functions();
        let mut config = linear_nominal();
        config.id = "linear-static".into();
        config.horizon = 5.0;
        config.trigger = TriggerConfig::Static { sigma: 0.5, alpha, gamma };
        config
    }

    /// Linear plant under the dynamic baseline trigger.
    pub fn linear_dynamic_baseline() -> ScenarioConfig {
        let (alpha, gamma) = linear_baseline_functions();
        let mut config = linear_nominal();
        config.id = "linear-dynamic".into();
        config.horizon = 5.0;
        config.trigger = TriggerConfig::Dynamic {
            sigma: 0.5,
            theta: 1.0,
            zeta_rate: 1.0,
            eta0: 0.0,
            alpha,
            gamma,
        };
        config
    }

    impl ScenarioConfig {
        fn with_id_for_nominal(mut self, x0: [f64; 2]) -> Self {
            if x0 == [10.0, 0.0] {
                self.id = "linear-nominal".into();
            }
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve_cleanly() {
        let configs = [
            presets::vdp_nominal(),
            presets::vdp_with_reset(3.0),
            presets::linear_nominal(),
            presets::linear_sinusoid(1.0),
            presets::linear_decaying(),
            presets::linear_static_baseline(),
            presets::linear_dynamic_baseline(),
        ];
        for config in configs {
            let resolved = config.resolve().unwrap_or_else(|e| panic!("{}: {e}", config.id));
            assert!(resolved.warnings.is_empty(), "{}: {:?}", resolved.id, resolved.warnings);
        }
    }

    #[test]
    fn preset_round_trips_through_toml() {
        for config in [
            presets::vdp_nominal(),
            presets::linear_nominal(),
            presets::linear_sinusoid(10.0),
            presets::linear_static_baseline(),
            presets::linear_dynamic_baseline(),
        ] {
            let text = config.to_toml_string().unwrap();
            let back = ScenarioConfig::from_toml_str(&text).unwrap();
            assert_eq!(back, config, "round trip changed {}", config.id);
        }
    }

    #[test]
    fn resolve_derives_countdown_constants() {
        let resolved = presets::vdp_nominal().resolve().unwrap();
        match &resolved.trigger {
            TriggerRuntime::Miet(rt) => {
                assert!((rt.b_formula - 25.0 / 12.0).abs() < 1e-10);
                assert!((rt.bound - 0.1884).abs() < 1e-3);
                assert_eq!(rt.b_design, None);
            }
            _ => panic!("expected countdown trigger"),
        }

        let resolved = presets::linear_nominal().resolve().unwrap();
        match &resolved.trigger {
            TriggerRuntime::Miet(rt) => {
                assert!((rt.b_formula - 54.6129).abs() < 1e-3);
                assert_eq!(rt.b_effective(), 55.0);
                assert!((rt.bound - 0.0089956396).abs() < 1e-9);
            }
            _ => panic!("expected countdown trigger"),
        }
    }

    #[test]
    fn resolve_computes_steady_state_matrix() {
        let resolved = presets::linear_nominal().resolve().unwrap();
        match &resolved.plant {
            PlantRuntime::Linear(lp) => {
                let expected = [[1.0, 0.25], [0.25, 1.0]];
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((lp.p()[(i, j)] - expected[i][j]).abs() < 1e-10);
                    }
                }
            }
            _ => panic!("expected linear plant"),
        }
    }

    #[test]
    fn dt_policy_blocks_or_warns() {
        let mut config = presets::vdp_nominal();
        config.dt = 0.05; // guaranteed interval is ~0.188, so the cap is ~0.0094
        assert!(matches!(config.resolve(), Err(Error::Config(_))));
        config.dt_policy = DtPolicy::Warn;
        let resolved = config.resolve().unwrap();
        assert_eq!(resolved.warnings.len(), 1);
    }

    #[test]
    fn low_design_constant_warns() {
        let mut config = presets::linear_nominal();
        config.trigger = TriggerConfig::Miet { z_bar: 1.0, epsilon: 1.0, b_design: Some(10.0) };
        let resolved = config.resolve().unwrap();
        assert_eq!(resolved.warnings.len(), 1);
        assert!(resolved.warnings[0].contains("not guaranteed"));
    }

    #[test]
    fn resolve_rejects_inconsistent_scenarios() {
        let mut config = presets::vdp_nominal();
        config.x0 = vec![1.0];
        assert!(config.resolve().is_err());

        let mut config = presets::vdp_nominal();
        config.horizon = 5.0 * config.dt;
        assert!(config.resolve().is_err());

        // Disturbance on the oscillator plant is not supported.
        let mut config = presets::vdp_nominal();
        config.disturbance = DisturbanceConfig::Constant { level: 1.0, bound: None };
        assert!(config.resolve().is_err());

        // Disturbance without a channel matrix.
        let mut config = presets::linear_nominal();
        if let PlantConfig::Linear { h, .. } = &mut config.plant {
            *h = None;
        }
        config.disturbance = DisturbanceConfig::Constant { level: 1.0, bound: None };
        assert!(config.resolve().is_err());
    }

    #[test]
    fn parse_errors_carry_position_information() {
        let err = ScenarioConfig::from_toml_str("id = \"x\"\nhorizon = \"oops\"").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line"), "wanted line info, got: {text}");

        let unknown = "
id = \"x\"
x0 = [1.0]
horizon = 1.0
dt = 0.01
unknown_knob = 3
[plant]
kind = \"vdp\"
lipschitz = 1.0
m = [[1.0, 0.25], [0.25, 1.0]]
[trigger]
kind = \"miet\"
z_bar = 1.0
epsilon = 1.0
";
        assert!(ScenarioConfig::from_toml_str(unknown).is_err());
    }

    #[test]
    fn missing_file_reports_path() {
        let err = ScenarioConfig::from_toml_file(Path::new("/nonexistent/sc.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/sc.toml"));
    }
}
