//! Closed-form guarantees for the countdown trigger.
//!
//! During a hold period the countdown `Z` satisfies
//! `Z_dot = omega >= -b*(1+Z)^2 - epsilon`, where `b` collapses the `varpi`
//! coefficients into one constant via the arithmetic-geometric inequality.
//! Comparing `Z` against the worst-case clock `phi` with
//! `phi_dot = -b*(1+phi)^2 - epsilon` gives the guaranteed minimum time for
//! `Z` to drain from `Z_bar` to zero:
//!
//! ```text
//! tau(b, epsilon, Z_bar) = sqrt(1/(b*epsilon)) *
//!     ( atan(sqrt(b/epsilon) * (1 + Z_bar)) - atan(sqrt(b/epsilon)) )
//! ```
//!
//! [`phi_oracle`] integrates the worst-case clock numerically and serves as an
//! independent check that the formula and its implementation agree.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::trigger::MietFlavor;

/// Number of integrator steps the oracle aims to spend before the crossing.
const ORACLE_RESOLUTION: f64 = 1e5;

fn check_positive(value: f64, name: &str) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

/// The guaranteed minimum inter-event time for a countdown trigger with
/// envelope constant `b`, drain floor `epsilon`, and reset value `z_bar`.
///
/// Strictly increasing in `z_bar`, strictly decreasing in `b` and `epsilon`,
/// and always below both ceilings `1/b` and `z_bar/epsilon`.
pub fn miet_lower_bound(b: f64, epsilon: f64, z_bar: f64) -> Result<f64> {
    check_positive(b, "envelope constant")?;
    check_positive(epsilon, "epsilon")?;
    check_positive(z_bar, "reset value")?;
    let s = (b / epsilon).sqrt();
    Ok((1.0 / (b * epsilon)).sqrt() * ((s * (1.0 + z_bar)).atan() - s.atan()))
}

/// Envelope constant for a flavor already packaged as [`MietFlavor`].
pub fn b_for_flavor(flavor: &MietFlavor) -> Result<f64> {
    Ok(flavor.varpi_coefficients()?.envelope_b())
}

/// Envelope constant for the nonlinear flavor:
/// `b = L^2 |M|^2 / lambda_min(M)`.
pub fn b_nonlinear(lipschitz: f64, weight: &Matrix) -> Result<f64> {
    b_for_flavor(&MietFlavor::Nonlinear { lipschitz, weight: weight.clone() })
}

/// Envelope constant for the linear flavor:
/// `b = |PBK|^2 / (lambda_min(P) * lambda_min(Q))`.
///
/// A zero gain gives `b = 0`; that value is a valid limit here but is
/// rejected by [`miet_lower_bound`], whose domain is positive `b`.
pub fn b_linear(p: &Matrix, b: &Matrix, k: &Matrix, q: &Matrix) -> Result<f64> {
    b_for_flavor(&MietFlavor::Linear {
        p: p.clone(),
        b: b.clone(),
        k: k.clone(),
        q: q.clone(),
    })
}

/// The supremum of [`miet_lower_bound`] over all `(epsilon, z_bar)`: as
/// `epsilon -> 0` and `z_bar -> inf` the bound approaches `1/b` but never
/// reaches it.
pub fn miet_upper_limit(b: f64) -> Result<f64> {
    check_positive(b, "envelope constant")?;
    Ok(1.0 / b)
}

fn integrate_worst_case_clock(
    b: f64,
    epsilon: f64,
    z_bar: f64,
    dt: f64,
    mut on_sample: impl FnMut(f64, f64),
) -> Result<f64> {
    check_positive(b, "envelope constant")?;
    check_positive(epsilon, "epsilon")?;
    check_positive(z_bar, "reset value")?;
    check_positive(dt, "oracle step size")?;
    let rate = |phi: f64| -b * (1.0 + phi) * (1.0 + phi) - epsilon;
    // The drain rate is at least epsilon, so the crossing happens within
    // z_bar/epsilon; anything beyond that margin means the stepping is broken.
    let t_limit = z_bar / epsilon + 1.0;
    let mut t = 0.0;
    let mut phi = z_bar;
    on_sample(t, phi);
    while t <= t_limit {
        let k1 = rate(phi);
        let k2 = rate(phi + 0.5 * dt * k1);
        let k3 = rate(phi + 0.5 * dt * k2);
        let k4 = rate(phi + dt * k3);
        let next = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        on_sample(t + dt, next);
        if next <= 0.0 {
            // Linear interpolation inside the bracketing step.
            return Ok(t + dt * phi / (phi - next));
        }
        phi = next;
        t += dt;
    }
    Err(Error::Internal(format!(
        "worst-case clock failed to reach zero within {t_limit} s (b = {b}, epsilon = {epsilon}, z_bar = {z_bar})"
    )))
}

/// Numerically integrates the worst-case clock `phi_dot = -b(1+phi)^2 - eps`
/// from `z_bar` and returns the time of its zero crossing. Independent of the
/// closed form — this is the check, not the product.
pub fn phi_oracle(b: f64, epsilon: f64, z_bar: f64, dt: f64) -> Result<f64> {
    integrate_worst_case_clock(b, epsilon, z_bar, dt, |_, _| {})
}

/// [`phi_oracle`] with a step size chosen from the worst-case drain rate so
/// the crossing is resolved by roughly [`ORACLE_RESOLUTION`] steps.
pub fn phi_oracle_auto(b: f64, epsilon: f64, z_bar: f64) -> Result<f64> {
    check_positive(b, "envelope constant")?;
    check_positive(epsilon, "epsilon")?;
    check_positive(z_bar, "reset value")?;
    let fastest_drain = b * (1.0 + z_bar) * (1.0 + z_bar) + epsilon;
    let dt = z_bar / fastest_drain / ORACLE_RESOLUTION;
    phi_oracle(b, epsilon, z_bar, dt)
}

/// The sampled worst-case clock, ending at the first non-positive sample.
/// Simulations compare their countdown against this curve pointwise.
pub fn phi_trajectory(b: f64, epsilon: f64, z_bar: f64, dt: f64) -> Result<Vec<(f64, f64)>> {
    let mut samples = Vec::new();
    integrate_worst_case_clock(b, epsilon, z_bar, dt, |t, phi| samples.push((t, phi)))?;
    Ok(samples)
}
