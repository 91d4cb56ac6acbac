//! Plant models under sample-and-hold feedback.
//!
//! Two families are supported: a general nonlinear plant described by closures
//! (with the forced van der Pol oscillator as the built-in instance) and a
//! linear plant `xdot = A x + B u + H d` whose stabilizing gain, decay matrix,
//! and steady-state matrix are carried together so trigger design can read
//! them. Between events the input is frozen at the last sampled state; the
//! [`HeldSample`] type owns that bookkeeping and recomputes the sampling error
//! on demand so it can never go stale.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{solve_lyapunov, sym_eig_min, Matrix};

/// Right-hand side of the forced van der Pol oscillator.
pub fn vdp_vector_field(x: [f64; 2], u: f64) -> [f64; 2] {
    [x[1], (1.0 - x[0] * x[0]) * x[1] - x[0] + u]
}

/// Feedback law that cancels the van der Pol damping and adds linear damping:
/// with fresh state samples the closed loop becomes a damped linear oscillator.
pub fn vdp_feedback(x: [f64; 2]) -> f64 {
    -x[1] - (1.0 - x[0] * x[0]) * x[1]
}

/// State-to-derivative map `(x, u, out)` for a controlled plant.
pub type VectorField = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;

/// Sampled-state-to-input map `(x_sampled, u_out)`.
pub type FeedbackLaw = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A nonlinear plant with a feedback law and the global Lipschitz constant of
/// its closed-loop right-hand side in the sampling error.
#[derive(Clone)]
pub struct NonlinearPlant {
    state_dim: usize,
    input_dim: usize,
    vector_field: VectorField,
    feedback_law: FeedbackLaw,
    lipschitz: f64,
}

impl NonlinearPlant {
    pub fn new(
        state_dim: usize,
        input_dim: usize,
        vector_field: VectorField,
        feedback_law: FeedbackLaw,
        lipschitz: f64,
    ) -> Result<Self> {
        if state_dim == 0 || input_dim == 0 {
            return Err(Error::DimensionMismatch(
                "plant dimensions must be positive".into(),
            ));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constant must be positive and finite, got {lipschitz}"
            )));
        }
        Ok(Self { state_dim, input_dim, vector_field, feedback_law, lipschitz })
    }

    /// The van der Pol oscillator under [`vdp_feedback`]. The error growth
    /// rate of this closed loop admits the Lipschitz constant 1.
    pub fn vdp(lipschitz: f64) -> Result<Self> {
        Self::new(
            2,
            1,
            Arc::new(|x, u, out| {
                let dx = vdp_vector_field([x[0], x[1]], u[0]);
                out.copy_from_slice(&dx);
            }),
            Arc::new(|x, u| u[0] = vdp_feedback([x[0], x[1]])),
            lipschitz,
        )
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Evaluates the feedback law at a sampled state.
    pub fn feedback_into(&self, x_sampled: &[f64], u: &mut [f64]) {
        debug_assert_eq!(x_sampled.len(), self.state_dim);
        debug_assert_eq!(u.len(), self.input_dim);
        (self.feedback_law)(x_sampled, u);
    }

    pub fn feedback(&self, x_sampled: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.input_dim];
        self.feedback_into(x_sampled, &mut u);
        u
    }

    /// Evaluates the vector field at `(x, u)`.
    pub fn vector_field_into(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.state_dim);
        debug_assert_eq!(u.len(), self.input_dim);
        debug_assert_eq!(out.len(), self.state_dim);
        (self.vector_field)(x, u, out);
    }
}

/// A linear plant `xdot = A x + B u + H d` with stabilizing gain `K` and the
/// pair `(P, Q)` certifying that `A + B K` is Hurwitz:
/// `(A+BK)' P + P (A+BK) = -Q`.
#[derive(Debug, Clone)]
pub struct LinearPlant {
    a: Matrix,
    b: Matrix,
    k: Matrix,
    h: Option<Matrix>,
    p: Matrix,
    q: Matrix,
    a_cl: Matrix,
}

impl LinearPlant {
    /// Builds and validates a linear plant. When `p` is omitted it is solved
    /// from the steady-state equation (which also certifies that `A + B K` is
    /// Hurwitz); when supplied it is checked against the equation with a
    /// residual tolerance of `1e-8 ||Q||`.
    pub fn new(
        a: Matrix,
        b: Matrix,
        k: Matrix,
        q: Matrix,
        p: Option<Matrix>,
        h: Option<Matrix>,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "state matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let m = b.cols();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "input matrix is {}x{}, expected {n} rows",
                b.rows(),
                b.cols()
            )));
        }
        if k.rows() != m || k.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "gain is {}x{}, expected {m}x{n}",
                k.rows(),
                k.cols()
            )));
        }
        if q.rows() != n || q.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "decay matrix is {}x{}, expected {n}x{n}",
                q.rows(),
                q.cols()
            )));
        }
        if let Some(h) = &h {
            if h.rows() != n || h.cols() == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "disturbance matrix is {}x{}, expected {n} rows",
                    h.rows(),
                    h.cols()
                )));
            }
            h.check_finite("disturbance matrix")?;
        }
        a.check_finite("state matrix")?;
        b.check_finite("input matrix")?;
        k.check_finite("gain")?;
        q.check_finite("decay matrix")?;
        q.check_symmetric()?;
        let q_min = sym_eig_min(&q)?;
        if q_min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                context: "decay matrix".into(),
                lambda_min: q_min,
            });
        }

        let a_cl = a.add(&b.mul(&k)?)?;
        let p = match p {
            None => solve_lyapunov(&a_cl, &q)?,
            Some(p) => {
                if p.rows() != n || p.cols() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "steady-state matrix is {}x{}, expected {n}x{n}",
                        p.rows(),
                        p.cols()
                    )));
                }
                p.check_finite("steady-state matrix")?;
                p.check_symmetric()?;
                let p_min = sym_eig_min(&p)?;
                if p_min <= 0.0 {
                    return Err(Error::NotPositiveDefinite {
                        context: "steady-state matrix".into(),
                        lambda_min: p_min,
                    });
                }
                let residual = a_cl.transpose().mul(&p)?.add(&p.mul(&a_cl)?)?.add(&q)?;
                let limit = 1e-8 * q.frobenius_norm();
                if residual.frobenius_norm() > limit {
                    return Err(Error::InvalidParameter(format!(
                        "supplied steady-state matrix leaves residual {:.3e} (limit {:.3e}); \
                         it does not certify this closed loop",
                        residual.frobenius_norm(),
                        limit
                    )));
                }
                p
            }
        };

        Ok(Self { a, b, k, h, p, q, a_cl })
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn disturbance_dim(&self) -> Option<usize> {
        self.h.as_ref().map(Matrix::cols)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn k(&self) -> &Matrix {
        &self.k
    }

    pub fn h(&self) -> Option<&Matrix> {
        self.h.as_ref()
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    /// The closed-loop matrix `A + B K` seen under fresh sampling.
    pub fn a_cl(&self) -> &Matrix {
        &self.a_cl
    }

    /// The frozen actuation term `B K x_held` for a hold period.
    pub fn input_injection(&self, x_held: &[f64]) -> Vec<f64> {
        let n = self.state_dim();
        let m = self.input_dim();
        debug_assert_eq!(x_held.len(), n);
        let mut u = vec![0.0; m];
        self.k.mul_vec_into(x_held, &mut u);
        let mut inj = vec![0.0; n];
        self.b.mul_vec_into(&u, &mut inj);
        inj
    }
}

/// Closed-loop derivative under a held sample:
/// `A x + B K x_held` plus `H d` when a disturbance value is given.
pub fn closed_loop_deriv(
    plant: &LinearPlant,
    x: &[f64],
    x_held: &[f64],
    d: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = plant.state_dim();
    if x.len() != n || x_held.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "state and held sample must have length {n}, got {} and {}",
            x.len(),
            x_held.len()
        )));
    }
    let mut out = vec![0.0; n];
    plant.a().mul_vec_into(x, &mut out);
    for (o, inj) in out.iter_mut().zip(plant.input_injection(x_held)) {
        *o += inj;
    }
    if let Some(d) = d {
        let h = plant.h().ok_or_else(|| {
            Error::DimensionMismatch("disturbance given but the plant has no disturbance matrix".into())
        })?;
        if d.len() != h.cols() {
            return Err(Error::DimensionMismatch(format!(
                "disturbance has length {}, expected {}",
                d.len(),
                h.cols()
            )));
        }
        let mut hd = vec![0.0; n];
        h.mul_vec_into(d, &mut hd);
        for (o, v) in out.iter_mut().zip(hd) {
            *o += v;
        }
    }
    Ok(out)
}

/// Exogenous disturbance signals with a known amplitude bound.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceKind {
    Constant { level: f64 },
    Sinusoid { amplitude: f64, frequency_hz: f64, phase: f64 },
    DecayingExponential { amplitude: f64, decay_rate: f64 },
    /// Sample points `(t, value)` joined by linear interpolation and held
    /// constant outside the table's time range.
    PiecewiseTable { points: Vec<(f64, f64)> },
}

impl DisturbanceKind {
    fn natural_bound(&self) -> f64 {
        match self {
            Self::Constant { level } => level.abs(),
            Self::Sinusoid { amplitude, .. } => amplitude.abs(),
            Self::DecayingExponential { amplitude, .. } => amplitude.abs(),
            Self::PiecewiseTable { points } => {
                points.iter().fold(0.0, |m, &(_, v)| m.max(v.abs()))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let all_finite = match self {
            Self::Constant { level } => level.is_finite(),
            Self::Sinusoid { amplitude, frequency_hz, phase } => {
                amplitude.is_finite() && frequency_hz.is_finite() && phase.is_finite()
            }
            Self::DecayingExponential { amplitude, decay_rate } => {
                if !(*decay_rate > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "decay rate must be positive, got {decay_rate}"
                    )));
                }
                amplitude.is_finite() && decay_rate.is_finite()
            }
            Self::PiecewiseTable { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidParameter(
                        "piecewise disturbance table is empty".into(),
                    ));
                }
                if points.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::InvalidParameter(
                        "piecewise disturbance times must be strictly increasing".into(),
                    ));
                }
                points.iter().all(|(t, v)| t.is_finite() && v.is_finite())
            }
        };
        if all_finite {
            Ok(())
        } else {
            Err(Error::NonFinite { context: "disturbance parameters".into() })
        }
    }
}

/// A disturbance signal together with the bound `|d(t)| <= bound` that the
/// simulation re-checks on its own grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance {
    kind: DisturbanceKind,
    bound: f64,
}

impl Disturbance {
    /// Wraps a disturbance signal; the bound defaults to the signal's supremum
    /// and an explicit bound below the supremum is rejected.
    pub fn new(kind: DisturbanceKind, bound: Option<f64>) -> Result<Self> {
        kind.validate()?;
        let natural = kind.natural_bound();
        let bound = bound.unwrap_or(natural);
        if !bound.is_finite() || bound < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "disturbance bound must be finite and non-negative, got {bound}"
            )));
        }
        if bound < natural * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "declared disturbance bound {bound} is below the signal supremum {natural}"
            )));
        }
        Ok(Self { kind, bound })
    }

    pub fn kind(&self) -> &DisturbanceKind {
        &self.kind
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            DisturbanceKind::Constant { level } => *level,
            DisturbanceKind::Sinusoid { amplitude, frequency_hz, phase } => {
                amplitude * (2.0 * std::f64::consts::PI * frequency_hz * t + phase).sin()
            }
            DisturbanceKind::DecayingExponential { amplitude, decay_rate } => {
                amplitude * (-decay_rate * t.max(0.0)).exp()
            }
            DisturbanceKind::PiecewiseTable { points } => {
                if t <= points[0].0 {
                    return points[0].1;
                }
                let last = points[points.len() - 1];
                if t >= last.0 {
                    return last.1;
                }
                let hi = points.partition_point(|&(pt, _)| pt <= t);
                let (t0, v0) = points[hi - 1];
                let (t1, v1) = points[hi];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// The most recent sampled state and its timestamp. The sampling error is
/// always recomputed from the current state so it cannot go stale.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldSample {
    time: f64,
    state: Vec<f64>,
}

impl HeldSample {
    pub fn latch(time: f64, state: &[f64]) -> Self {
        Self { time, state: state.to_vec() }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    /// Sampling error `e = x_held - x` written into `out`.
    pub fn error_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.state.len());
        for ((o, held), xi) in out.iter_mut().zip(&self.state).zip(x) {
            *o = held - xi;
        }
    }

    pub fn error(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.state.len()];
        self.error_into(x, &mut out);
        out
    }
}
