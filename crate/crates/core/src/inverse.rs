//! Semi-analytical differential inverse kinematics.
//!
//! Each forward case's tip coordinate is differentiated in time, giving an
//! ODE for the actuation input whose right-hand side is a quadrature over
//! the current configuration. Integrating that ODE (explicit Euler by
//! default, RK4 optionally) makes the tip track a prescribed trajectory.
//! Near-singular sensitivities are handled with damped least squares rather
//! than rejected.

use crate::error::{Error, Result};
use crate::forward::{
    extensible_state, tip_position, CaseKind, ExtensibleCoefficients, ForwardCase,
};
use crate::params::{ActuationState, RobotParams};
use crate::quadrature::gauss_legendre_rule;
use crate::series::{dsinc, dversinc, sinc, versinc};

/// Time integration scheme for [`track`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationScheme {
    ExplicitEuler,
    Rk4,
}

/// Damping and integration options for the inverse solvers.
#[derive(Debug, Clone, Copy)]
pub struct InverseConfig {
    pub scheme: IntegrationScheme,
    /// Damped-least-squares factor applied near singular sensitivities.
    pub damping: f64,
    /// Threshold below which a denominator or determinant counts as singular.
    pub epsilon: f64,
    /// Allowed mismatch between the initial tip and the trajectory start.
    pub consistency_tol: f64,
}

impl Default for InverseConfig {
    fn default() -> Self {
        Self {
            scheme: IntegrationScheme::ExplicitEuler,
            damping: 1e-6,
            epsilon: 1e-8,
            consistency_tol: 1e-6,
        }
    }
}

impl InverseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if self.damping < 0.0 || self.damping.is_nan() {
            return Err(Error::InvalidParameter(
                "damping must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// A single-input actuation rate together with singularity diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct RateResult {
    /// The actuation rate (N/s or m/s depending on the input mode).
    pub rate: f64,
    /// Raw sensitivity denominator d; the tip Jacobian is -d.
    pub denominator: f64,
    /// True when |d| fell below epsilon and damping was applied.
    pub singular: bool,
}

fn damped_rate(xdot: f64, denominator: f64, cfg: &InverseConfig) -> RateResult {
    if denominator.abs() < cfg.epsilon {
        RateResult {
            rate: xdot * (-denominator) / (denominator * denominator + cfg.damping * cfg.damping),
            denominator,
            singular: true,
        }
    } else {
        RateResult {
            rate: -xdot / denominator,
            denominator,
            singular: false,
        }
    }
}

/// Integral of sin(theta(s)) * kernel(s) over the rod with a 64-point Gauss
/// rule; the common form of every single-input sensitivity denominator.
fn sensitivity_integral(
    length: f64,
    theta: impl Fn(f64) -> f64,
    kernel: impl Fn(f64) -> f64,
) -> f64 {
    let (nodes, weights) = gauss_legendre_rule(64);
    let mid = 0.5 * length;
    let mut acc = 0.0;
    for (&xi, &wi) in nodes.iter().zip(&weights) {
        let s = mid + mid * xi;
        acc += wi * theta(s).sin() * kernel(s);
    }
    acc * mid
}

/// Constant case: d = int sin(W dF s/2EI) (W s/2EI) ds for force input, or
/// d = int sin(2 dl s/(W L)) (2 s/(W L)) ds for displacement input.
pub fn inverse_rate_constant(
    params: &RobotParams,
    act: ActuationState,
    xdot_target: f64,
    cfg: &InverseConfig,
) -> Result<RateResult> {
    cfg.validate()?;
    let w = params.constant_spacing()?;
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    let l = params.length;
    let den = match act {
        ActuationState::ForceDifferential(df) => {
            let slope = w / (2.0 * ei);
            sensitivity_integral(l, |s| slope * df * s, |s| slope * s)
        }
        ActuationState::DisplacementDifferential(dl) => {
            let slope = 2.0 / (w * l);
            sensitivity_integral(l, |s| slope * dl * s, |s| slope * s)
        }
        other => {
            return Err(Error::ActuationMode {
                expected: "force or displacement differential",
                got: other.mode_name(),
            })
        }
    };
    Ok(damped_rate(xdot_target, den, cfg))
}

/// Routing case: kernel int_0^s W scaled by 1/(2EI) (force) or
/// 2/int_0^L W^2 (displacement).
pub fn inverse_rate_routing(
    params: &RobotParams,
    act: ActuationState,
    xdot_target: f64,
    cfg: &InverseConfig,
) -> Result<RateResult> {
    cfg.validate()?;
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    let l = params.length;
    let df = crate::forward::routing_force_input(params, act)?;
    let theta = |s: f64| df / (2.0 * ei) * params.spacing.integral(s, l);
    let den = match act {
        ActuationState::ForceDifferential(_) => {
            sensitivity_integral(l, theta, |s| params.spacing.integral(s, l) / (2.0 * ei))
        }
        ActuationState::DisplacementDifferential(_) => {
            let w2 = params.spacing.integral_squared(l);
            sensitivity_integral(l, theta, |s| 2.0 * params.spacing.integral(s, l) / w2)
        }
        _ => unreachable!("routing_force_input rejects pair modes"),
    };
    Ok(damped_rate(xdot_target, den, cfg))
}

/// Nonuniform-rigidity case: kernel beta(s) scaled by W/2 (force) or
/// 2/(W beta(L)) (displacement).
pub fn inverse_rate_nonuniform(
    params: &RobotParams,
    act: ActuationState,
    xdot_target: f64,
    cfg: &InverseConfig,
) -> Result<RateResult> {
    cfg.validate()?;
    let w = params.constant_spacing()?;
    let l = params.length;
    let df = crate::forward::nonuniform_force_input(params, act)?;
    let theta = |s: f64| w * df / 2.0 * params.beta(s).unwrap_or(f64::NAN);
    let den = match act {
        ActuationState::ForceDifferential(_) => {
            sensitivity_integral(l, theta, |s| w / 2.0 * params.beta(s).unwrap_or(f64::NAN))
        }
        ActuationState::DisplacementDifferential(_) => {
            let beta_l = params.beta(l)?;
            sensitivity_integral(l, theta, |s| {
                2.0 * params.beta(s).unwrap_or(f64::NAN) / (w * beta_l)
            })
        }
        _ => unreachable!("nonuniform_force_input rejects pair modes"),
    };
    Ok(damped_rate(xdot_target, den, cfg))
}

/// Tip Jacobian of the extensible case with respect to (dl1, dl2).
///
/// Assembled from the partials through the bending channel x = (dl1-dl2)/W
/// and the stretch channel u = -(dl1+dl2)/(2L):
/// J = [[A1+A2, A1-A2], [A3+A4, A3-A4]].
pub fn extensible_jacobian_displacement(
    params: &RobotParams,
    dl1: f64,
    dl2: f64,
) -> Result<[[f64; 2]; 2]> {
    let coeffs = displacement_coefficients(params, dl1, dl2)?;
    Ok(assemble_jacobian(coeffs))
}

/// Tip Jacobian of the extensible case with respect to (f1, f2).
pub fn extensible_jacobian_force(params: &RobotParams, f1: f64, f2: f64) -> Result<[[f64; 2]; 2]> {
    let coeffs = force_coefficients(params, f1, f2)?;
    Ok(assemble_jacobian(coeffs))
}

fn assemble_jacobian(a: [f64; 4]) -> [[f64; 2]; 2] {
    [[a[0] + a[1], a[0] - a[1]], [a[2] + a[3], a[2] - a[3]]]
}

/// A1..A4 for displacement inputs: A1, A3 carry the stretch channel,
/// A2, A4 the bending channel.
fn displacement_coefficients(params: &RobotParams, dl1: f64, dl2: f64) -> Result<[f64; 4]> {
    let st = extensible_state(params, ActuationState::DisplacementPair { dl1, dl2 })?;
    let w = params.constant_spacing()?;
    let l = params.length;
    let x = st.kappa * l; // tip angle = (dl1 - dl2)/W
    let one_u = 1.0 + st.strain;
    Ok([
        -0.5 * sinc(x),
        one_u * (l / w) * dsinc(x),
        -0.5 * versinc(x),
        one_u * (l / w) * dversinc(x),
    ])
}

/// A1..A4 for force inputs, chained through dF and sum(F) with B1, B2.
fn force_coefficients(params: &RobotParams, f1: f64, f2: f64) -> Result<[f64; 4]> {
    let st = extensible_state(params, ActuationState::ForcePair { f1, f2 })?;
    let c = ExtensibleCoefficients::from_params(params)?;
    let w = params.constant_spacing()?;
    let l = params.length;
    let x = st.kappa * l; // tip angle = 2 B1 dF / W
    let one_u = 1.0 + st.strain;
    Ok([
        -c.b2 * sinc(x),
        one_u * l * (2.0 * c.b1 / w) * dsinc(x),
        -c.b2 * versinc(x),
        one_u * l * (2.0 * c.b1 / w) * dversinc(x),
    ])
}

/// Pair of actuation rates with singularity diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct PairRates {
    pub rates: [f64; 2],
    pub determinant: f64,
    /// True when |det| fell below epsilon and damping was applied.
    pub singular: bool,
}

/// Extensible case: damped 2x2 solve of `J rates = (xdot, ydot)`.
///
/// When |det J| < epsilon the inverse is regularized as
/// adj(J) v det/(det^2 + lambda^2), the two-input analogue of the scalar
/// damped form.
pub fn inverse_rate_extensible(
    params: &RobotParams,
    act: ActuationState,
    xdot_target: f64,
    ydot_target: f64,
    cfg: &InverseConfig,
) -> Result<PairRates> {
    cfg.validate()?;
    let j = match act {
        ActuationState::DisplacementPair { dl1, dl2 } => {
            extensible_jacobian_displacement(params, dl1, dl2)?
        }
        ActuationState::ForcePair { f1, f2 } => extensible_jacobian_force(params, f1, f2)?,
        other => {
            return Err(Error::ActuationMode {
                expected: "force or displacement pair",
                got: other.mode_name(),
            })
        }
    };
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let adj_v = [
        j[1][1] * xdot_target - j[0][1] * ydot_target,
        -j[1][0] * xdot_target + j[0][0] * ydot_target,
    ];
    let (scale, singular) = if det.abs() < cfg.epsilon {
        (det / (det * det + cfg.damping * cfg.damping), true)
    } else {
        (1.0 / det, false)
    };
    Ok(PairRates {
        rates: [adj_v[0] * scale, adj_v[1] * scale],
        determinant: det,
        singular,
    })
}

/// Quotient form of the displacement-mode extensible inverse:
/// rate1 = [(A3-A4) xdot - (A1-A2) ydot] / (2 (A2 A3 - A1 A4)), and the
/// matching expression for rate2. Algebraically identical to the 2x2 solve
/// away from singularities; kept as an independent route for testing.
pub fn extensible_rates_quotient_displacement(
    params: &RobotParams,
    dl1: f64,
    dl2: f64,
    xdot: f64,
    ydot: f64,
) -> Result<[f64; 2]> {
    let a = displacement_coefficients(params, dl1, dl2)?;
    quotient_rates(a, xdot, ydot)
}

/// Quotient form of the force-mode extensible inverse.
pub fn extensible_rates_quotient_force(
    params: &RobotParams,
    f1: f64,
    f2: f64,
    xdot: f64,
    ydot: f64,
) -> Result<[f64; 2]> {
    let a = force_coefficients(params, f1, f2)?;
    quotient_rates(a, xdot, ydot)
}

fn quotient_rates(a: [f64; 4], xdot: f64, ydot: f64) -> Result<[f64; 2]> {
    let det = 2.0 * (a[1] * a[2] - a[0] * a[3]);
    if det == 0.0 {
        return Err(Error::Domain(
            "quotient form is singular at this state".into(),
        ));
    }
    Ok([
        ((a[2] - a[3]) * xdot - (a[0] - a[1]) * ydot) / det,
        (-(a[2] + a[3]) * xdot + (a[0] + a[1]) * ydot) / det,
    ])
}

/// Time-parameterized tip target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryKind {
    /// Hold the initial tip position.
    Hold,
    /// x_d(t) = x0 + amplitude e^{-decay t} sin(2 pi f t); x-only target.
    DampedSine {
        amplitude: f64,
        decay: f64,
        frequency_hz: f64,
    },
    /// Planar circle centered at (x0 - r_start, y0) whose radius shrinks
    /// linearly from r_start to r_end over the horizon.
    ShrinkingCircle { r_start: f64, r_end: f64 },
}

/// A tracking task: target curve, horizon, step, and the starting actuation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    /// Total duration T, s.
    pub horizon: f64,
    /// Time step, s.
    pub dt: f64,
    /// Actuation at t = 0; must place the tip on the trajectory start.
    pub initial: ActuationState,
    /// Optional explicit trajectory origin. When set, the initial tip must
    /// match it within the configured consistency tolerance.
    pub origin: Option<(f64, f64)>,
}

impl TrajectorySpec {
    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || self.dt.is_nan() {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        if self.horizon < self.dt {
            return Err(Error::InvalidParameter(
                "horizon must be at least one step".into(),
            ));
        }
        Ok(())
    }

    /// Target position at time `t`, relative to the origin `(x0, y0)`.
    /// The y component is `None` for x-only targets.
    pub fn target(&self, t: f64, origin: (f64, f64)) -> (f64, Option<f64>) {
        let (x0, y0) = origin;
        match self.kind {
            TrajectoryKind::Hold => (x0, Some(y0)),
            TrajectoryKind::DampedSine {
                amplitude,
                decay,
                frequency_hz,
            } => {
                let w = 2.0 * std::f64::consts::PI * frequency_hz;
                (x0 + amplitude * (-decay * t).exp() * (w * t).sin(), None)
            }
            TrajectoryKind::ShrinkingCircle { r_start, r_end } => {
                let w = 2.0 * std::f64::consts::PI / self.horizon;
                let r = r_start - (r_start - r_end) * t / self.horizon;
                (
                    x0 - r_start + r * (w * t).cos(),
                    Some(y0 + r * (w * t).sin()),
                )
            }
        }
    }

    /// Analytic time derivative of the target.
    pub fn target_rate(&self, t: f64) -> (f64, Option<f64>) {
        match self.kind {
            TrajectoryKind::Hold => (0.0, Some(0.0)),
            TrajectoryKind::DampedSine {
                amplitude,
                decay,
                frequency_hz,
            } => {
                let w = 2.0 * std::f64::consts::PI * frequency_hz;
                let env = amplitude * (-decay * t).exp();
                (env * (w * (w * t).cos() - decay * (w * t).sin()), None)
            }
            TrajectoryKind::ShrinkingCircle { r_start, r_end } => {
                let w = 2.0 * std::f64::consts::PI / self.horizon;
                let r = r_start - (r_start - r_end) * t / self.horizon;
                let rdot = -(r_start - r_end) / self.horizon;
                (
                    rdot * (w * t).cos() - r * w * (w * t).sin(),
                    Some(rdot * (w * t).sin() + r * w * (w * t).cos()),
                )
            }
        }
    }

    fn needs_pair(&self) -> bool {
        matches!(self.kind, TrajectoryKind::ShrinkingCircle { .. })
    }
}

/// One row of a tracking run.
#[derive(Debug, Clone, Copy)]
pub struct TrackRecord {
    pub t: f64,
    /// First (or only) actuation input.
    pub input_a: f64,
    /// Second actuation input for pair modes.
    pub input_b: Option<f64>,
    pub x_tip: f64,
    pub y_tip: f64,
    pub x_target: f64,
    pub y_target: Option<f64>,
    /// |x - x_d| for x-only targets, planar distance otherwise.
    pub error: f64,
    /// Damping engaged at this step, or a zero rate was returned against a
    /// nonzero target rate.
    pub singular: bool,
}

/// Full log of a tracking run, with summary statistics.
#[derive(Debug, Clone)]
pub struct InverseLog {
    pub records: Vec<TrackRecord>,
    pub max_error: f64,
    pub rms_error: f64,
    pub singular_steps: usize,
}

impl InverseLog {
    /// Writes the log as CSV with 17-significant-digit numbers.
    /// Columns: t, input(s), x_tip, y_tip, x_target, y_target, err.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        let pair = self.records.first().is_some_and(|r| r.input_b.is_some());
        if pair {
            writeln!(out, "t,input1,input2,x_tip,y_tip,x_target,y_target,err")?;
        } else {
            writeln!(out, "t,input,x_tip,y_tip,x_target,y_target,err")?;
        }
        for r in &self.records {
            let yt = r.y_target.unwrap_or(f64::NAN);
            if let Some(b) = r.input_b {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    fmt(r.t),
                    fmt(r.input_a),
                    fmt(b),
                    fmt(r.x_tip),
                    fmt(r.y_tip),
                    fmt(r.x_target),
                    fmt(yt),
                    fmt(r.error)
                )?;
            } else {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt(r.t),
                    fmt(r.input_a),
                    fmt(r.x_tip),
                    fmt(r.y_tip),
                    fmt(r.x_target),
                    fmt(yt),
                    fmt(r.error)
                )?;
            }
        }
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Integrates the actuation so the tip follows the trajectory, logging every
/// step.
///
/// The realized tip is recomputed from the forward model at every record;
/// the returned log carries per-step errors plus max/RMS summaries.
pub fn track(case: &ForwardCase, traj: &TrajectorySpec, cfg: &InverseConfig) -> Result<InverseLog> {
    traj.validate()?;
    cfg.validate()?;
    let params = case.params();
    let kind = case.kind();

    let pair_case = kind == CaseKind::AxialExtensible;
    if pair_case != traj.initial.is_pair() {
        return Err(Error::Config(format!(
            "initial actuation mode '{}' does not fit case '{}'",
            traj.initial.mode_name(),
            kind.name()
        )));
    }
    if traj.needs_pair() && !pair_case {
        return Err(Error::Config(
            "a planar trajectory needs the extensible (two-input) case".into(),
        ));
    }

    let start_tip = tip_position(params, kind, traj.initial)?;
    let origin = match traj.origin {
        Some(o) => o,
        None => start_tip,
    };
    let (x_d0, y_d0) = traj.target(0.0, origin);
    let consistency = {
        let dy = y_d0.map_or(0.0, |y| start_tip.1 - y);
        ((start_tip.0 - x_d0).powi(2) + dy * dy).sqrt()
    };
    if consistency > cfg.consistency_tol {
        return Err(Error::Config(format!(
            "initial tip ({:.6}, {:.6}) is {consistency:.3e} m away from the trajectory start; \
             the initial actuation must be consistent with the target at t = 0",
            start_tip.0, start_tip.1
        )));
    }

    let steps = (traj.horizon / traj.dt + 1e-9).floor() as usize;
    let mut records = Vec::with_capacity(steps + 1);
    let mut act = traj.initial;
    let mut singular_steps = 0usize;

    let record = |t: f64, act: ActuationState, singular: bool| -> Result<TrackRecord> {
        let (x, y) = tip_position(params, kind, act)?;
        let (xt, yt) = traj.target(t, origin);
        let err = {
            let dy = yt.map_or(0.0, |v| y - v);
            ((x - xt).powi(2) + dy * dy).sqrt()
        };
        let (a, b) = match act {
            ActuationState::ForceDifferential(v) => (v, None),
            ActuationState::DisplacementDifferential(v) => (v, None),
            ActuationState::ForcePair { f1, f2 } => (f1, Some(f2)),
            ActuationState::DisplacementPair { dl1, dl2 } => (dl1, Some(dl2)),
        };
        Ok(TrackRecord {
            t,
            input_a: a,
            input_b: b,
            x_tip: x,
            y_tip: y,
            x_target: xt,
            y_target: yt,
            error: err,
            singular,
        })
    };

    records.push(record(0.0, act, false)?);

    for i in 0..steps {
        let t = i as f64 * traj.dt;
        let mut step_singular = false;
        let mut eval_rate = |t: f64, act: ActuationState| -> Result<(f64, f64)> {
            let (xdot, ydot) = traj.target_rate(t);
            if pair_case {
                let pr = inverse_rate_extensible(params, act, xdot, ydot.unwrap_or(0.0), cfg)?;
                step_singular |= pr.singular;
                Ok((pr.rates[0], pr.rates[1]))
            } else {
                let rr = match kind {
                    CaseKind::Constant => inverse_rate_constant(params, act, xdot, cfg)?,
                    CaseKind::ArbitraryRouting => inverse_rate_routing(params, act, xdot, cfg)?,
                    CaseKind::NonuniformRigidity => {
                        inverse_rate_nonuniform(params, act, xdot, cfg)?
                    }
                    CaseKind::AxialExtensible => unreachable!(),
                };
                step_singular |= rr.singular;
                if rr.rate == 0.0 && xdot != 0.0 {
                    step_singular = true;
                }
                Ok((rr.rate, 0.0))
            }
        };

        let next = match cfg.scheme {
            IntegrationScheme::ExplicitEuler => {
                let k1 = eval_rate(t, act)?;
                advance(act, k1, traj.dt)
            }
            IntegrationScheme::Rk4 => {
                let h = traj.dt;
                let k1 = eval_rate(t, act)?;
                let k2 = eval_rate(t + 0.5 * h, advance(act, k1, 0.5 * h))?;
                let k3 = eval_rate(t + 0.5 * h, advance(act, k2, 0.5 * h))?;
                let k4 = eval_rate(t + h, advance(act, k3, h))?;
                let k = (
                    (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) / 6.0,
                    (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) / 6.0,
                );
                advance(act, k, h)
            }
        };
        act = next;
        if step_singular {
            singular_steps += 1;
        }
        records.push(record((i + 1) as f64 * traj.dt, act, step_singular)?);
    }

    let max_error = records.iter().fold(0.0f64, |m, r| m.max(r.error));
    let rms_error =
        (records.iter().map(|r| r.error * r.error).sum::<f64>() / records.len() as f64).sqrt();
    Ok(InverseLog {
        records,
        max_error,
        rms_error,
        singular_steps,
    })
}

fn advance(act: ActuationState, rate: (f64, f64), dt: f64) -> ActuationState {
    match act {
        ActuationState::ForceDifferential(v) => ActuationState::ForceDifferential(v + rate.0 * dt),
        ActuationState::DisplacementDifferential(v) => {
            ActuationState::DisplacementDifferential(v + rate.0 * dt)
        }
        ActuationState::ForcePair { f1, f2 } => ActuationState::ForcePair {
            f1: f1 + rate.0 * dt,
            f2: f2 + rate.1 * dt,
        },
        ActuationState::DisplacementPair { dl1, dl2 } => ActuationState::DisplacementPair {
            dl1: dl1 + rate.0 * dt,
            dl2: dl2 + rate.1 * dt,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{forward_constant, ForwardCase};
    use crate::params::test_fixtures::*;
    use approx::assert_relative_eq;

    #[test]
    fn stationary_target_gives_zero_rate() {
        let p = desk_rod();
        let cfg = InverseConfig::default();
        let r = inverse_rate_constant(&p, ActuationState::DisplacementDifferential(0.1), 0.0, &cfg)
            .unwrap();
        assert_eq!(r.rate, 0.0);
        assert!(!r.singular);
    }

    #[test]
    fn straight_configuration_is_singular_and_damped() {
        let p = desk_rod();
        let cfg = InverseConfig::default();
        let r = inverse_rate_constant(
            &p,
            ActuationState::DisplacementDifferential(0.0),
            -0.01,
            &cfg,
        )
        .unwrap();
        assert!(r.singular);
        assert_eq!(r.denominator, 0.0);
        assert_eq!(r.rate, 0.0);
    }

    #[test]
    fn displacement_denominator_matches_quadrature_value() {
        let p = desk_rod();
        let cfg = InverseConfig::default();
        let r = inverse_rate_constant(
            &p,
            ActuationState::DisplacementDifferential(0.1),
            -0.01,
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(r.denominator, 2.334376976206071, max_relative = 1e-12);
        assert_relative_eq!(r.rate, 4.283798247638831e-3, max_relative = 1e-12);
    }

    #[test]
    fn denominator_matches_forward_finite_difference() {
        let p = desk_rod();
        let cfg = InverseConfig::default();
        let dl = 0.1;
        let r = inverse_rate_constant(&p, ActuationState::DisplacementDifferential(dl), 0.0, &cfg)
            .unwrap();
        let h = 1e-6;
        let xp = forward_constant(&p, ActuationState::DisplacementDifferential(dl + h), 401)
            .unwrap()
            .tip()
            .0;
        let xm = forward_constant(&p, ActuationState::DisplacementDifferential(dl - h), 401)
            .unwrap()
            .tip()
            .0;
        let fd = (xp - xm) / (2.0 * h);
        assert_relative_eq!(-r.denominator, fd, max_relative = 1e-7);
    }

    #[test]
    fn routing_with_constant_spacing_matches_constant_case() {
        let p = desk_rod();
        let cfg = InverseConfig::default();
        for act in [
            ActuationState::DisplacementDifferential(0.08),
            ActuationState::ForceDifferential(1.5),
        ] {
            let a = inverse_rate_constant(&p, act, -0.005, &cfg).unwrap();
            let b = inverse_rate_routing(&p, act, -0.005, &cfg).unwrap();
            assert_relative_eq!(a.rate, b.rate, max_relative = 1e-12);
        }
    }

    #[test]
    fn nonuniform_with_constant_rigidity_matches_constant_case() {
        let p = desk_rod();
        let cfg = InverseConfig::default();
        for act in [
            ActuationState::DisplacementDifferential(0.08),
            ActuationState::ForceDifferential(1.5),
        ] {
            let a = inverse_rate_constant(&p, act, -0.005, &cfg).unwrap();
            let b = inverse_rate_nonuniform(&p, act, -0.005, &cfg).unwrap();
            assert_relative_eq!(a.rate, b.rate, max_relative = 1e-12);
        }
    }

    #[test]
    fn extensible_jacobian_matches_finite_differences() {
        let p = desk_rod();
        let (dl1, dl2) = (0.02, -0.02);
        let j = extensible_jacobian_displacement(&p, dl1, dl2).unwrap();
        let h = 1e-7;
        let tip = |a: f64, b: f64| {
            tip_position(
                &p,
                CaseKind::AxialExtensible,
                ActuationState::DisplacementPair { dl1: a, dl2: b },
            )
            .unwrap()
        };
        let fd = [
            [
                (tip(dl1 + h, dl2).0 - tip(dl1 - h, dl2).0) / (2.0 * h),
                (tip(dl1, dl2 + h).0 - tip(dl1, dl2 - h).0) / (2.0 * h),
            ],
            [
                (tip(dl1 + h, dl2).1 - tip(dl1 - h, dl2).1) / (2.0 * h),
                (tip(dl1, dl2 + h).1 - tip(dl1, dl2 - h).1) / (2.0 * h),
            ],
        ];
        for r in 0..2 {
            for c in 0..2 {
                assert_relative_eq!(j[r][c], fd[r][c], max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn extensible_force_jacobian_matches_finite_differences() {
        let p = desk_rod();
        let (f1, f2) = (1.2, 0.4);
        let j = extensible_jacobian_force(&p, f1, f2).unwrap();
        let h = 1e-6;
        let tip = |a: f64, b: f64| {
            tip_position(
                &p,
                CaseKind::AxialExtensible,
                ActuationState::ForcePair { f1: a, f2: b },
            )
            .unwrap()
        };
        let fd = [
            [
                (tip(f1 + h, f2).0 - tip(f1 - h, f2).0) / (2.0 * h),
                (tip(f1, f2 + h).0 - tip(f1, f2 - h).0) / (2.0 * h),
            ],
            [
                (tip(f1 + h, f2).1 - tip(f1 - h, f2).1) / (2.0 * h),
                (tip(f1, f2 + h).1 - tip(f1, f2 - h).1) / (2.0 * h),
            ],
        ];
        for r in 0..2 {
            for c in 0..2 {
                assert_relative_eq!(j[r][c], fd[r][c], max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn quotient_form_equals_linear_solve() {
        let p = desk_rod();
        let cfg = InverseConfig {
            damping: 0.0,
            ..InverseConfig::default()
        };
        let (dl1, dl2) = (0.03, -0.015);
        let q = extensible_rates_quotient_displacement(&p, dl1, dl2, 0.004, -0.002).unwrap();
        let s = inverse_rate_extensible(
            &p,
            ActuationState::DisplacementPair { dl1, dl2 },
            0.004,
            -0.002,
            &cfg,
        )
        .unwrap();
        assert!(!s.singular);
        assert_relative_eq!(q[0], s.rates[0], max_relative = 1e-12);
        assert_relative_eq!(q[1], s.rates[1], max_relative = 1e-12);

        let (f1, f2) = (2.0, 0.7);
        let q = extensible_rates_quotient_force(&p, f1, f2, 0.004, -0.002).unwrap();
        let s = inverse_rate_extensible(
            &p,
            ActuationState::ForcePair { f1, f2 },
            0.004,
            -0.002,
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(q[0], s.rates[0], max_relative = 1e-12);
        assert_relative_eq!(q[1], s.rates[1], max_relative = 1e-12);
    }

    #[test]
    fn damping_never_amplifies_the_rate() {
        let p = desk_rod();
        // near-straight state so the denominator is tiny and damping engages
        let act = ActuationState::DisplacementDifferential(1e-11);
        let mut last = f64::INFINITY;
        for lambda in [1e-8, 1e-6, 1e-4, 1e-2] {
            let cfg = InverseConfig {
                damping: lambda,
                ..InverseConfig::default()
            };
            let r = inverse_rate_constant(&p, act, -0.01, &cfg).unwrap();
            assert!(r.singular);
            assert!(r.rate.abs() <= last);
            last = r.rate.abs();
        }
    }

    #[test]
    fn euler_step_moves_tip_by_xdot_dt_to_first_order() {
        let p = desk_rod();
        let cfg = InverseConfig {
            damping: 0.0,
            ..InverseConfig::default()
        };
        let act = ActuationState::DisplacementDifferential(0.1);
        let xdot = -0.01;
        let x0 = tip_position(&p, CaseKind::Constant, act).unwrap().0;
        let mut errs = Vec::new();
        for dt in [1e-3, 1e-4] {
            let r = inverse_rate_constant(&p, act, xdot, &cfg).unwrap();
            let next = advance(act, (r.rate, 0.0), dt);
            let x1 = tip_position(&p, CaseKind::Constant, next).unwrap().0;
            errs.push(((x1 - x0) - xdot * dt).abs());
        }
        // quadratic local error: shrinking dt by 10 shrinks the defect ~100x
        assert!(errs[0] < 1e-6);
        assert!(errs[1] < errs[0] / 50.0);
    }

    #[test]
    fn track_holds_a_stationary_target() {
        let p = desk_rod();
        let case = ForwardCase::new(CaseKind::Constant, p).unwrap();
        let traj = TrajectorySpec {
            kind: TrajectoryKind::Hold,
            horizon: 0.5,
            dt: 1e-3,
            initial: ActuationState::DisplacementDifferential(0.1),
            origin: None,
        };
        let log = track(&case, &traj, &InverseConfig::default()).unwrap();
        assert_eq!(log.records.len(), 501);
        assert!(log.max_error < 1e-12, "max err {}", log.max_error);
    }

    #[test]
    fn track_rejects_inconsistent_start() {
        let p = desk_rod();
        let case = ForwardCase::new(CaseKind::Constant, p).unwrap();
        let traj = TrajectorySpec {
            kind: TrajectoryKind::DampedSine {
                amplitude: 0.1,
                decay: 0.1,
                frequency_hz: 1.0,
            },
            horizon: 1.0,
            dt: 1e-3,
            initial: ActuationState::DisplacementDifferential(0.1),
            origin: Some((0.5, 0.0)),
        };
        let r = track(&case, &traj, &InverseConfig::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn log_serializes_to_csv() {
        let p = desk_rod();
        let case = ForwardCase::new(CaseKind::Constant, p).unwrap();
        let traj = TrajectorySpec {
            kind: TrajectoryKind::Hold,
            horizon: 0.01,
            dt: 1e-3,
            initial: ActuationState::DisplacementDifferential(0.1),
            origin: None,
        };
        let log = track(&case, &traj, &InverseConfig::default()).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,input,x_tip,y_tip,x_target,y_target,err"
        );
        assert_eq!(lines.count(), log.records.len());
        // numbers round-trip at full precision
        let first = text.lines().nth(1).unwrap();
        let cells: Vec<&str> = first.split(',').collect();
        assert_eq!(cells[1].parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn pair_log_uses_two_input_columns() {
        let p = desk_rod();
        let case = ForwardCase::new(CaseKind::AxialExtensible, p).unwrap();
        let traj = TrajectorySpec {
            kind: TrajectoryKind::Hold,
            horizon: 0.01,
            dt: 1e-3,
            initial: ActuationState::DisplacementPair {
                dl1: 0.02,
                dl2: -0.01,
            },
            origin: None,
        };
        let log = track(&case, &traj, &InverseConfig::default()).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,input1,input2,x_tip,y_tip,x_target,y_target,err"));
    }

    #[test]
    fn track_records_are_strictly_increasing_in_time() {
        let p = desk_rod();
        let case = ForwardCase::new(CaseKind::Constant, p).unwrap();
        let traj = TrajectorySpec {
            kind: TrajectoryKind::DampedSine {
                amplitude: 0.05,
                decay: 0.1,
                frequency_hz: 1.0,
            },
            horizon: 0.2,
            dt: 1e-3,
            initial: ActuationState::DisplacementDifferential(0.1),
            origin: None,
        };
        let log = track(&case, &traj, &InverseConfig::default()).unwrap();
        assert_eq!(log.records.len(), 201);
        for w in log.records.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }
}
