//! Event-trigger mechanisms.
//!
//! Three rules decide when the controller resamples the state:
//!
//! * **static** — fire when `gamma(|e|) >= sigma * alpha(|x|)`;
//! * **dynamic** — filter the same comparison through a non-negative storage
//!   variable `eta` and fire when `eta + theta*(sigma*alpha(|x|) - gamma(|e|))`
//!   drops to zero;
//! * **countdown** (the designable one) — integrate a clock `Z` from `Z_bar`
//!   down at rate `omega` and fire when it reaches zero. The rate is built
//!   from the estimate `varpi` so that the time for `Z` to run out never falls
//!   below a closed-form positive bound, which makes the minimum inter-event
//!   time a design quantity rather than an observation.
//!
//! `varpi` has the same shape for both plant families,
//! `c_quad * rho^2 - (1+Z) * c_lin * rho` with `rho = |x|/|e|`; only the
//! coefficients differ. [`VarpiCoefficients`] captures that split so the
//! simulator and the bound formulas share one implementation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{induced_two_norm, sym_eig_min, vec_norm, Matrix};
use crate::plant::HeldSample;

/// `|e|` at or below this threshold (relative to `max(1, |x|)`) is treated as
/// a zero sampling error: the ratio `|x|/|e|` is no longer meaningful and the
/// countdown falls back to its constant `-epsilon` branch.
pub const NEGLIGIBLE_ERROR_REL: f64 = 1e-12;

/// Tolerance scale for "this trigger variable left its admissible set" checks.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Returns true when the sampling error is negligible next to the state.
pub fn error_is_negligible(x: &[f64], e: &[f64]) -> bool {
    vec_norm(e) <= NEGLIGIBLE_ERROR_REL * vec_norm(x).max(1.0)
}

/// A class-K-infinity comparison function from a small registered family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KFunction {
    /// `r -> coefficient * r^2`
    Quadratic { coefficient: f64 },
    /// `r -> coefficient * r`
    Linear { coefficient: f64 },
}

impl KFunction {
    pub fn quadratic(coefficient: f64) -> Result<Self> {
        let k = Self::Quadratic { coefficient };
        k.validate()?;
        Ok(k)
    }

    pub fn linear(coefficient: f64) -> Result<Self> {
        let k = Self::Linear { coefficient };
        k.validate()?;
        Ok(k)
    }

    /// A positive coefficient is what makes these strictly increasing and
    /// unbounded, i.e. class K-infinity.
    pub fn validate(&self) -> Result<()> {
        let c = match self {
            Self::Quadratic { coefficient } | Self::Linear { coefficient } => *coefficient,
        };
        if c > 0.0 && c.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "comparison-function coefficient must be positive and finite, got {c}"
            )))
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Quadratic { coefficient } => coefficient * r * r,
            Self::Linear { coefficient } => coefficient * r,
        }
    }
}

/// Parameters of the static rule `gamma(|e|) >= sigma * alpha(|x|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticTriggerParams {
    pub sigma: f64,
    pub alpha: KFunction,
    pub gamma: KFunction,
}

impl StaticTriggerParams {
    pub fn new(sigma: f64, alpha: KFunction, gamma: KFunction) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must lie strictly between 0 and 1, got {sigma}"
            )));
        }
        alpha.validate()?;
        gamma.validate()?;
        Ok(Self { sigma, alpha, gamma })
    }
}

/// Parameters of the dynamic rule with storage variable `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicTriggerParams {
    pub sigma: f64,
    pub theta: f64,
    /// Decay rate `lambda` of the storage dynamics `eta_dot = -lambda*eta + ...`.
    pub zeta_rate: f64,
    pub eta0: f64,
    pub alpha: KFunction,
    pub gamma: KFunction,
}

impl DynamicTriggerParams {
    pub fn new(
        sigma: f64,
        theta: f64,
        zeta_rate: f64,
        eta0: f64,
        alpha: KFunction,
        gamma: KFunction,
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must lie strictly between 0 and 1, got {sigma}"
            )));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta must be positive, got {theta}"
            )));
        }
        if !(zeta_rate > 0.0 && zeta_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "storage decay rate must be positive, got {zeta_rate}"
            )));
        }
        if !(eta0 >= 0.0 && eta0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "initial storage must be non-negative, got {eta0}"
            )));
        }
        alpha.validate()?;
        gamma.validate()?;
        Ok(Self { sigma, theta, zeta_rate, eta0, alpha, gamma })
    }
}

/// Which plant family the countdown trigger is designed against; this fixes
/// the coefficients of `varpi`.
#[derive(Debug, Clone)]
pub enum MietFlavor {
    Nonlinear { lipschitz: f64, weight: Matrix },
    Linear { p: Matrix, b: Matrix, k: Matrix, q: Matrix },
}

impl MietFlavor {
    /// Resolves the `varpi` coefficients for this flavor. Matrix work happens
    /// here once; the per-step evaluation is then two multiplies.
    pub fn varpi_coefficients(&self) -> Result<VarpiCoefficients> {
        self.validate()?;
        match self {
            Self::Nonlinear { lipschitz, weight } => {
                let lambda = sym_eig_min(weight)?;
                let norm = induced_two_norm(weight)?;
                Ok(VarpiCoefficients {
                    quadratic: 1.0 / lambda,
                    linear: 2.0 * lipschitz * norm / lambda,
                })
            }
            Self::Linear { p, b, k, q } => {
                let lambda_p = sym_eig_min(p)?;
                let lambda_q = sym_eig_min(q)?;
                let pbk_norm = induced_two_norm(&p.mul(b)?.mul(k)?)?;
                Ok(VarpiCoefficients {
                    quadratic: lambda_q / lambda_p,
                    linear: 2.0 * pbk_norm / lambda_p,
                })
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Nonlinear { lipschitz, weight } => {
                if !(*lipschitz > 0.0 && lipschitz.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "Lipschitz constant must be positive, got {lipschitz}"
                    )));
                }
                let min = sym_eig_min(weight)?;
                if min <= 0.0 {
                    return Err(Error::NotPositiveDefinite {
                        context: "countdown weight matrix".into(),
                        lambda_min: min,
                    });
                }
            }
            Self::Linear { p, b, k, q } => {
                let n = p.rows();
                if !p.is_square() || !q.is_square() || q.rows() != n {
                    return Err(Error::DimensionMismatch(
                        "P and Q must be square with matching dimensions".into(),
                    ));
                }
                if b.rows() != n || k.cols() != n || k.rows() != b.cols() {
                    return Err(Error::DimensionMismatch(format!(
                        "gain path dimensions inconsistent: P {n}x{n}, B {}x{}, K {}x{}",
                        b.rows(),
                        b.cols(),
                        k.rows(),
                        k.cols()
                    )));
                }
                for (m, name) in [(p, "P"), (q, "Q")] {
                    let min = sym_eig_min(m)?;
                    if min <= 0.0 {
                        return Err(Error::NotPositiveDefinite {
                            context: format!("countdown design matrix {name}"),
                            lambda_min: min,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The two coefficients of `varpi(rho, Z) = quadratic*rho^2 - (1+Z)*linear*rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarpiCoefficients {
    pub quadratic: f64,
    pub linear: f64,
}

impl VarpiCoefficients {
    /// The quadratic-envelope constant `b = linear^2 / (4*quadratic)`: by the
    /// arithmetic-geometric inequality, `varpi >= -b*(1+Z)^2` pointwise, which
    /// is what every lower-bound formula in this library leans on.
    pub fn envelope_b(&self) -> f64 {
        self.linear * self.linear / (4.0 * self.quadratic)
    }
}

/// Countdown trigger parameters: reset value, drain floor, design flavor.
#[derive(Debug, Clone)]
pub struct MietTriggerParams {
    pub z_bar: f64,
    pub epsilon: f64,
    pub flavor: MietFlavor,
}

impl MietTriggerParams {
    pub fn new(z_bar: f64, epsilon: f64, flavor: MietFlavor) -> Result<Self> {
        if !(z_bar > 0.0 && z_bar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "countdown reset value must be positive, got {z_bar}"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        flavor.validate()?;
        Ok(Self { z_bar, epsilon, flavor })
    }

    /// Resolves the `varpi` coefficients for this trigger's flavor.
    pub fn varpi_coefficients(&self) -> Result<VarpiCoefficients> {
        self.flavor.varpi_coefficients()
    }
}

/// `varpi` evaluated from the state/error ratio `rho = |x|/|e|`.
pub fn varpi_from_ratio(rho: f64, z: f64, coeffs: &VarpiCoefficients) -> f64 {
    coeffs.quadratic * rho * rho - (1.0 + z) * coeffs.linear * rho
}

/// The countdown-rate estimate for the nonlinear flavor:
/// `(1/lambda_min(M)) * rho^2 - (1+Z) * (2 L |M| / lambda_min(M)) * rho`.
pub fn varpi_nonlinear(x: &[f64], e: &[f64], z: f64, lipschitz: f64, weight: &Matrix) -> Result<f64> {
    if error_is_negligible(x, e) {
        return Err(Error::ZeroErrorNorm);
    }
    let lambda = sym_eig_min(weight)?;
    if lambda <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            context: "countdown weight matrix".into(),
            lambda_min: lambda,
        });
    }
    let norm = induced_two_norm(weight)?;
    let coeffs = VarpiCoefficients {
        quadratic: 1.0 / lambda,
        linear: 2.0 * lipschitz * norm / lambda,
    };
    Ok(varpi_from_ratio(vec_norm(x) / vec_norm(e), z, &coeffs))
}

/// The countdown-rate estimate for the linear flavor:
/// `(lambda_min(Q)/lambda_min(P)) * rho^2 - (1+Z) * (2 |PBK| / lambda_min(P)) * rho`.
///
/// `pbk_norm` is `induced_two_norm(P*B*K)`, precomputed once per scenario.
pub fn varpi_linear(
    x: &[f64],
    e: &[f64],
    z: f64,
    p: &Matrix,
    q: &Matrix,
    pbk_norm: f64,
) -> Result<f64> {
    if error_is_negligible(x, e) {
        return Err(Error::ZeroErrorNorm);
    }
    let lambda_p = sym_eig_min(p)?;
    if lambda_p <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            context: "countdown design matrix P".into(),
            lambda_min: lambda_p,
        });
    }
    let lambda_q = sym_eig_min(q)?;
    let coeffs = VarpiCoefficients {
        quadratic: lambda_q / lambda_p,
        linear: 2.0 * pbk_norm / lambda_p,
    };
    Ok(varpi_from_ratio(vec_norm(x) / vec_norm(e), z, &coeffs))
}

/// The countdown rate: `min(0, varpi) - epsilon` while the error is nonzero,
/// `-epsilon` on the zero-error branch. Always at most `-epsilon`.
pub fn omega(varpi: f64, epsilon: f64, e_is_zero: bool) -> f64 {
    if e_is_zero {
        -epsilon
    } else {
        varpi.min(0.0) - epsilon
    }
}

/// Live trigger bookkeeping for one simulation run. Time zero always counts
/// as an event: the first sample is latched before the run starts.
#[derive(Debug, Clone)]
pub struct TriggerState {
    pub held: HeldSample,
    /// Countdown clock; meaningful for the countdown flavor only.
    pub z: f64,
    /// Storage variable; meaningful for the dynamic flavor only.
    pub eta: f64,
    pub event_count: usize,
    pub event_times: Vec<f64>,
    z_bar: Option<f64>,
}

impl TriggerState {
    pub fn for_miet(x0: &[f64], params: &MietTriggerParams) -> Self {
        Self {
            held: HeldSample::latch(0.0, x0),
            z: params.z_bar,
            eta: 0.0,
            event_count: 1,
            event_times: vec![0.0],
            z_bar: Some(params.z_bar),
        }
    }

    pub fn for_dynamic(x0: &[f64], params: &DynamicTriggerParams) -> Self {
        Self {
            held: HeldSample::latch(0.0, x0),
            z: 0.0,
            eta: params.eta0,
            event_count: 1,
            event_times: vec![0.0],
            z_bar: None,
        }
    }

    pub fn for_static(x0: &[f64]) -> Self {
        Self {
            held: HeldSample::latch(0.0, x0),
            z: 0.0,
            eta: 0.0,
            event_count: 1,
            event_times: vec![0.0],
            z_bar: None,
        }
    }

    /// Latches a new sample and, for the countdown flavor, resets the clock to
    /// its ceiling. The sampling error is zero from here until the state moves.
    pub fn record_event(&mut self, t: f64, x: &[f64]) {
        debug_assert!(
            self.event_times.last().map_or(true, |&last| t > last),
            "event times must be strictly increasing"
        );
        self.held = HeldSample::latch(t, x);
        self.event_count += 1;
        self.event_times.push(t);
        if let Some(z_bar) = self.z_bar {
            self.z = z_bar;
        }
    }
}

/// Fire check for the countdown flavor: true exactly when the clock has run
/// out. A clock above its reset ceiling means an event reset was missed.
pub fn miet_trigger_check(state: &TriggerState) -> Result<bool> {
    let z_bar = state.z_bar.ok_or_else(|| {
        Error::Internal("countdown check on a trigger state without a reset ceiling".into())
    })?;
    let tol = CONSISTENCY_TOL * z_bar.max(1.0);
    if state.z > z_bar + tol {
        return Err(Error::TriggerConsistency(format!(
            "countdown {} exceeds its reset value {} — a reset was missed",
            state.z, z_bar
        )));
    }
    Ok(state.z <= 0.0)
}

/// Fire check for the static rule: `gamma(|e|) >= sigma * alpha(|x|)`.
pub fn static_trigger_check(x: &[f64], e: &[f64], params: &StaticTriggerParams) -> bool {
    params.gamma.eval(vec_norm(e)) >= params.sigma * params.alpha.eval(vec_norm(x))
}

/// One integrator step of the dynamic rule's storage variable, followed by the
/// fire check `eta + theta*(sigma*alpha(|x|) - gamma(|e|)) <= 0` at step end.
///
/// `x` and `e` are treated as frozen over the step; the full simulator
/// integrates the storage jointly with the plant instead of calling this.
/// The storage is guaranteed non-negative while events fire on time, so a
/// clearly negative `eta` without a fire is reported as an inconsistency.
pub fn dynamic_trigger_step(
    x: &[f64],
    e: &[f64],
    eta: f64,
    dt: f64,
    params: &DynamicTriggerParams,
) -> Result<(f64, bool)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive, got {dt}"
        )));
    }
    let tol = CONSISTENCY_TOL * (1.0 + eta.abs());
    if eta < -tol {
        return Err(Error::TriggerConsistency(format!(
            "storage variable is negative on entry: {eta}"
        )));
    }
    let eta = eta.max(0.0);
    let supply = params.sigma * params.alpha.eval(vec_norm(x)) - params.gamma.eval(vec_norm(e));
    let rate = |v: f64| -params.zeta_rate * v + supply;
    let k1 = rate(eta);
    let k2 = rate(eta + 0.5 * dt * k1);
    let k3 = rate(eta + 0.5 * dt * k2);
    let k4 = rate(eta + dt * k3);
    let new_eta = eta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    let fired = new_eta + params.theta * supply <= 0.0;
    if !fired && new_eta < -tol {
        return Err(Error::TriggerConsistency(format!(
            "storage variable went negative ({new_eta}) without firing"
        )));
    }
    Ok((new_eta, fired))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight_m() -> Matrix {
        Matrix::from_rows(vec![vec![1.0, 0.25], vec![0.25, 1.0]]).unwrap()
    }

    fn linear_design() -> (Matrix, Matrix, Matrix, Matrix) {
        (
            Matrix::from_rows(vec![vec![1.0, 0.25], vec![0.25, 1.0]]).unwrap(),
            Matrix::from_rows(vec![vec![0.0], vec![1.0]]).unwrap(),
            Matrix::from_rows(vec![vec![1.0, -4.0]]).unwrap(),
            Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 1.5]]).unwrap(),
        )
    }

    #[test]
    fn varpi_nonlinear_examples() {
        // |x| = |e| = 1, Z = 1: 1/0.75 - 2*(2*1.25/0.75).
        let v = varpi_nonlinear(&[1.0, 0.0], &[0.0, 1.0], 1.0, 1.0, &weight_m()).unwrap();
        assert!((v - (4.0 / 3.0 - 20.0 / 3.0)).abs() < 1e-12);
        assert!((v + 5.3333).abs() < 1e-3);

        let v = varpi_nonlinear(&[10.0, 0.0], &[1.0, 0.0], 0.0, 1.0, &weight_m()).unwrap();
        assert!((v - 100.0).abs() < 1e-10);

        // |x| = 0 kills both terms.
        let v = varpi_nonlinear(&[0.0, 0.0], &[0.5, 0.5], 3.0, 1.0, &weight_m()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn varpi_linear_examples() {
        let (p, b, k, q) = linear_design();
        let pbk = induced_two_norm(&p.mul(&b).unwrap().mul(&k).unwrap()).unwrap();
        assert!((pbk - 4.25).abs() < 1e-10);

        let lambda_q = 1.0 - 0.3125f64.sqrt();
        let v = varpi_linear(&[1.0, 0.0], &[1.0, 0.0], 1.0, &p, &q, pbk).unwrap();
        let expected = lambda_q / 0.75 - 2.0 * 2.0 * 4.25 / 0.75;
        assert!((v - expected).abs() < 1e-12);
        assert!((v + 22.079).abs() < 1e-3);

        let v = varpi_linear(&[100.0, 0.0], &[1.0, 0.0], 0.0, &p, &q, pbk).unwrap();
        assert!((v - 4746.4).abs() < 0.1);
    }

    #[test]
    fn varpi_guards_zero_error() {
        assert!(matches!(
            varpi_nonlinear(&[1.0, 0.0], &[0.0, 0.0], 0.0, 1.0, &weight_m()),
            Err(Error::ZeroErrorNorm)
        ));
        // Error tiny relative to the state counts as zero too.
        assert!(matches!(
            varpi_nonlinear(&[1e6, 0.0], &[1e-7, 0.0], 0.0, 1.0, &weight_m()),
            Err(Error::ZeroErrorNorm)
        ));
        let (p, _, _, q) = linear_design();
        assert!(matches!(
            varpi_linear(&[1.0, 0.0], &[0.0, 0.0], 0.0, &p, &q, 4.25),
            Err(Error::ZeroErrorNorm)
        ));
    }

    #[test]
    fn omega_examples_and_ceiling() {
        assert_eq!(omega(100.0, 1.0, false), -1.0);
        assert!((omega(-5.3333, 1.0, false) + 6.3333).abs() < 1e-12);
        assert_eq!(omega(f64::NAN, 1.0, true), -1.0);
        for &v in &[-3.0, 0.0, 0.5, 42.0] {
            assert!(omega(v, 0.25, false) <= -0.25);
            assert!(omega(v, 0.25, false) < v);
        }
    }

    #[test]
    fn envelope_constant_bounds_varpi_from_below() {
        let coeffs = VarpiCoefficients { quadratic: 4.0 / 3.0, linear: 10.0 / 3.0 };
        let b = coeffs.envelope_b();
        assert!((b - 25.0 / 12.0).abs() < 1e-12);
        for rho in [0.01, 0.1, 1.0, 2.0, 10.0, 250.0] {
            for z in [0.0, 0.3, 1.0, 5.0] {
                let floor = -b * (1.0 + z) * (1.0 + z);
                assert!(varpi_from_ratio(rho, z, &coeffs) >= floor - 1e-12 * floor.abs());
            }
        }
    }

    #[test]
    fn miet_check_examples() {
        let params = MietTriggerParams::new(
            1.0,
            1.0,
            MietFlavor::Nonlinear { lipschitz: 1.0, weight: weight_m() },
        )
        .unwrap();
        let mut state = TriggerState::for_miet(&[1.0, -0.5], &params);
        assert!(!miet_trigger_check(&state).unwrap());
        state.z = 0.5;
        assert!(!miet_trigger_check(&state).unwrap());
        state.z = 0.0;
        assert!(miet_trigger_check(&state).unwrap());
        state.z = -1e-12;
        assert!(miet_trigger_check(&state).unwrap());
        state.z = 1.0 + 1e-3;
        assert!(matches!(
            miet_trigger_check(&state),
            Err(Error::TriggerConsistency(_))
        ));
    }

    #[test]
    fn record_event_resets_clock_and_error() {
        let params = MietTriggerParams::new(
            2.0,
            0.5,
            MietFlavor::Nonlinear { lipschitz: 1.0, weight: weight_m() },
        )
        .unwrap();
        let mut state = TriggerState::for_miet(&[1.0, 0.0], &params);
        assert_eq!(state.event_count, 1);
        assert_eq!(state.event_times, vec![0.0]);
        state.z = 0.0;
        state.record_event(0.7, &[0.3, -0.2]);
        assert_eq!(state.z, 2.0);
        assert_eq!(state.event_count, 2);
        assert_eq!(state.held.error(&[0.3, -0.2]), vec![0.0, 0.0]);
    }

    #[test]
    fn static_check_examples() {
        let params = StaticTriggerParams::new(
            0.5,
            KFunction::quadratic(0.5).unwrap(),
            KFunction::linear(1.0).unwrap(),
        )
        .unwrap();
        assert!(!static_trigger_check(&[2.0, 0.0], &[0.4, 0.0], &params));
        assert!(static_trigger_check(&[2.0, 0.0], &[1.0, 0.0], &params));
        // Zero error never fires against a nonzero state.
        assert!(!static_trigger_check(&[2.0, 0.0], &[0.0, 0.0], &params));
    }

    #[test]
    fn dynamic_step_examples() {
        let params = DynamicTriggerParams::new(
            0.5,
            1.0,
            1.0,
            0.0,
            KFunction::quadratic(0.5).unwrap(),
            KFunction::linear(1.0).unwrap(),
        )
        .unwrap();

        // e = 0 with positive storage: nothing to fire on.
        let (eta, fired) = dynamic_trigger_step(&[1.0, 0.0], &[0.0, 0.0], 1.0, 0.1, &params).unwrap();
        assert!(!fired && eta > 0.0);

        // Zero state, zero storage, nonzero error: fires immediately.
        let (_, fired) = dynamic_trigger_step(&[0.0, 0.0], &[0.1, 0.0], 0.0, 0.01, &params).unwrap();
        assert!(fired);

        // Condition value 1 + (0.25 - 2) = -0.75 at entry: fired, and the
        // storage follows eta_dot = -eta - 1.75 closely over one step.
        let (eta, fired) = dynamic_trigger_step(&[1.0, 0.0], &[2.0, 0.0], 1.0, 0.1, &params).unwrap();
        assert!(fired);
        let exact = -1.75 + 2.75 * (-0.1f64).exp();
        assert!((eta - exact).abs() < 1e-6);
    }

    #[test]
    fn dynamic_step_rejects_bad_entry() {
        let params = DynamicTriggerParams::new(
            0.5,
            1.0,
            1.0,
            0.0,
            KFunction::quadratic(0.5).unwrap(),
            KFunction::linear(1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            dynamic_trigger_step(&[1.0, 0.0], &[0.0, 0.0], -0.5, 0.1, &params),
            Err(Error::TriggerConsistency(_))
        ));
        assert!(dynamic_trigger_step(&[1.0, 0.0], &[0.0, 0.0], 1.0, 0.0, &params).is_err());
    }

    #[test]
    fn param_validation() {
        assert!(StaticTriggerParams::new(
            1.0,
            KFunction::quadratic(1.0).unwrap(),
            KFunction::linear(1.0).unwrap()
        )
        .is_err());
        assert!(KFunction::quadratic(0.0).is_err());
        assert!(KFunction::linear(-1.0).is_err());
        assert!(MietTriggerParams::new(
            0.0,
            1.0,
            MietFlavor::Nonlinear { lipschitz: 1.0, weight: weight_m() }
        )
        .is_err());
        assert!(MietTriggerParams::new(
            1.0,
            -1.0,
            MietFlavor::Nonlinear { lipschitz: 1.0, weight: weight_m() }
        )
        .is_err());
        let not_pd = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            MietTriggerParams::new(
                1.0,
                1.0,
                MietFlavor::Nonlinear { lipschitz: 1.0, weight: not_pd }
            ),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn coefficients_for_both_flavors() {
        let nl = MietTriggerParams::new(
            1.0,
            1.0,
            MietFlavor::Nonlinear { lipschitz: 1.0, weight: weight_m() },
        )
        .unwrap()
        .varpi_coefficients()
        .unwrap();
        assert!((nl.quadratic - 4.0 / 3.0).abs() < 1e-12);
        assert!((nl.linear - 10.0 / 3.0).abs() < 1e-10);
        assert!((nl.envelope_b() - 25.0 / 12.0).abs() < 1e-10);

        let (p, b, k, q) = linear_design();
        let lin = MietTriggerParams::new(1.0, 1.0, MietFlavor::Linear { p, b, k, q })
            .unwrap()
            .varpi_coefficients()
            .unwrap();
        let lambda_q = 1.0 - 0.3125f64.sqrt();
        assert!((lin.quadratic - lambda_q / 0.75).abs() < 1e-10);
        assert!((lin.linear - 2.0 * 4.25 / 0.75).abs() < 1e-10);
    }
}
