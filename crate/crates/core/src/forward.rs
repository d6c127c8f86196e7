//! Closed-form forward statics and kinematics.
//!
//! Four structural cases are covered, each a stationary point of the rod's
//! actuation-space potential energy:
//!
//! * constant spacing and rigidity — theta linear in s (constant curvature);
//! * arbitrary cable routing W(s) — theta proportional to the running
//!   integral of W;
//! * nonuniform rigidity I(s) — theta proportional to the compliance
//!   integral beta(s);
//! * axially extensible rod driven by an independent cable pair — constant
//!   strain u superposed on the linear bending solution.
//!
//! Force and displacement inputs are interchangeable through linear maps, so
//! every case doubles as a statics model and a kinematic model.

use crate::error::{Error, Result};
use crate::params::{ActuationState, RobotParams};
use crate::shape::{shape_from_theta, BackboneShape};

/// Structural case selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Constant,
    ArbitraryRouting,
    NonuniformRigidity,
    AxialExtensible,
}

impl CaseKind {
    pub fn name(&self) -> &'static str {
        match self {
            CaseKind::Constant => "constant",
            CaseKind::ArbitraryRouting => "routing",
            CaseKind::NonuniformRigidity => "nonuniform",
            CaseKind::AxialExtensible => "extensible",
        }
    }
}

/// A structural case bound to a validated parameter set.
#[derive(Debug, Clone)]
pub struct ForwardCase {
    kind: CaseKind,
    params: RobotParams,
}

impl ForwardCase {
    /// Checks that the parameter profiles satisfy the case's structural
    /// requirements before binding them.
    pub fn new(kind: CaseKind, params: RobotParams) -> Result<Self> {
        match kind {
            CaseKind::Constant | CaseKind::AxialExtensible => {
                params.constant_spacing()?;
                params.constant_rigidity()?;
            }
            CaseKind::ArbitraryRouting => {
                params.constant_rigidity()?;
            }
            CaseKind::NonuniformRigidity => {
                params.constant_spacing()?;
            }
        }
        Ok(Self { kind, params })
    }

    pub fn kind(&self) -> CaseKind {
        self.kind
    }

    pub fn params(&self) -> &RobotParams {
        &self.params
    }

    /// Dispatches to the case's forward model.
    pub fn forward(&self, act: ActuationState, n: usize) -> Result<BackboneShape> {
        match self.kind {
            CaseKind::Constant => forward_constant(&self.params, act, n),
            CaseKind::ArbitraryRouting => forward_routing(&self.params, act, n),
            CaseKind::NonuniformRigidity => forward_nonuniform(&self.params, act, n),
            CaseKind::AxialExtensible => forward_extensible(&self.params, act, n),
        }
    }
}

fn expect_single(act: ActuationState) -> Result<()> {
    if act.is_pair() {
        Err(Error::ActuationMode {
            expected: "force or displacement differential",
            got: act.mode_name(),
        })
    } else {
        Ok(())
    }
}

fn expect_pair(act: ActuationState) -> Result<()> {
    if act.is_pair() {
        Ok(())
    } else {
        Err(Error::ActuationMode {
            expected: "force or displacement pair",
            got: act.mode_name(),
        })
    }
}

/// Uniform rod: theta(s) = W dF s / (2 E I) = 2 dl s / (W L).
///
/// Curvature is constant along the rod, which is exactly the constant
/// curvature kinematics recovered as the energy minimum of this case.
pub fn forward_constant(
    params: &RobotParams,
    act: ActuationState,
    n: usize,
) -> Result<BackboneShape> {
    expect_single(act)?;
    let kappa = constant_case_curvature(params, act)?;
    shape_from_theta(params, &|s| kappa * s, Some(&|_| kappa), None, n)
}

/// Constant-case curvature for either input mode.
pub fn constant_case_curvature(params: &RobotParams, act: ActuationState) -> Result<f64> {
    let w = params.constant_spacing()?;
    let i = params.constant_rigidity()?;
    let ei = params.youngs_modulus * i;
    match act {
        ActuationState::ForceDifferential(df) => Ok(w * df / (2.0 * ei)),
        ActuationState::DisplacementDifferential(dl) => Ok(2.0 * dl / (w * params.length)),
        other => Err(Error::ActuationMode {
            expected: "force or displacement differential",
            got: other.mode_name(),
        }),
    }
}

/// dl = dF W^2 L / (4 E I); the constant-case force-to-displacement map.
pub fn force_to_displacement_constant(params: &RobotParams, delta_force: f64) -> Result<f64> {
    let w = params.constant_spacing()?;
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    Ok(delta_force * w * w * params.length / (4.0 * ei))
}

/// dF = 4 E I dl / (W^2 L); exact inverse of the map above.
pub fn displacement_to_force_constant(
    params: &RobotParams,
    delta_displacement: f64,
) -> Result<f64> {
    let w = params.constant_spacing()?;
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    Ok(4.0 * ei * delta_displacement / (w * w * params.length))
}

/// Arbitrary routing: theta(s) = (dF / 2EI) int_0^s W, with
/// dF = 4 E I dl / int_0^L W^2 for displacement input.
pub fn forward_routing(
    params: &RobotParams,
    act: ActuationState,
    n: usize,
) -> Result<BackboneShape> {
    expect_single(act)?;
    if params.spacing.is_constant() {
        // degenerate profile reproduces the constant case bit for bit
        return forward_constant(params, act, n);
    }
    let df = routing_force_input(params, act)?;
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    let l = params.length;
    let spacing = params.spacing.clone();
    let theta = move |s: f64| df / (2.0 * ei) * spacing.integral(s, l);
    let spacing_d = params.spacing.clone();
    let dtheta = move |s: f64| {
        let w = spacing_d.value(s, l);
        df * w / (2.0 * ei)
    };
    // spot-check positivity along the grid the shape will use
    for i in 0..n {
        let s = l * i as f64 / (n - 1) as f64;
        let w = params.spacing.value(s, l);
        if w <= 0.0 || w.is_nan() {
            return Err(Error::Profile(format!(
                "spacing non-positive at s = {s}: W = {w}"
            )));
        }
    }
    shape_from_theta(params, &theta, Some(&dtheta), None, n)
}

/// Effective force differential for the routing case.
pub fn routing_force_input(params: &RobotParams, act: ActuationState) -> Result<f64> {
    match act {
        ActuationState::ForceDifferential(df) => Ok(df),
        ActuationState::DisplacementDifferential(dl) => {
            Ok(routing_displacement_to_force(params, dl)?)
        }
        other => Err(Error::ActuationMode {
            expected: "force or displacement differential",
            got: other.mode_name(),
        }),
    }
}

/// dF = 4 E I dl / int_0^L W(s)^2 ds.
pub fn routing_displacement_to_force(params: &RobotParams, dl: f64) -> Result<f64> {
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    Ok(4.0 * ei * dl / params.spacing.integral_squared(params.length))
}

/// dl = dF int_0^L W(s)^2 ds / (4 E I).
pub fn routing_force_to_displacement(params: &RobotParams, df: f64) -> Result<f64> {
    let ei = params.youngs_modulus * params.constant_rigidity()?;
    Ok(df * params.spacing.integral_squared(params.length) / (4.0 * ei))
}

/// Nonuniform rigidity: theta(s) = (W dF / 2) beta(s), with
/// dF = 4 dl / (W^2 beta(L)) for displacement input.
pub fn forward_nonuniform(
    params: &RobotParams,
    act: ActuationState,
    n: usize,
) -> Result<BackboneShape> {
    expect_single(act)?;
    if params.rigidity.is_constant() {
        return forward_constant(params, act, n);
    }
    let w = params.constant_spacing()?;
    let df = nonuniform_force_input(params, act)?;
    let l = params.length;
    let p = params.clone();
    let theta = move |s: f64| w * df / 2.0 * p.beta(s).unwrap_or(f64::NAN);
    let p2 = params.clone();
    let dtheta = move |s: f64| w * df / (2.0 * p2.flexural_rigidity(s));
    for i in 0..n {
        let s = l * i as f64 / (n - 1) as f64;
        let ival = params.rigidity.value(s, l);
        if ival <= 0.0 || ival.is_nan() {
            return Err(Error::Profile(format!(
                "rigidity non-positive at s = {s}: I = {ival}"
            )));
        }
    }
    shape_from_theta(params, &theta, Some(&dtheta), None, n)
}

/// Effective force differential for the nonuniform-rigidity case.
pub fn nonuniform_force_input(params: &RobotParams, act: ActuationState) -> Result<f64> {
    match act {
        ActuationState::ForceDifferential(df) => Ok(df),
        ActuationState::DisplacementDifferential(dl) => {
            Ok(nonuniform_displacement_to_force(params, dl)?)
        }
        other => Err(Error::ActuationMode {
            expected: "force or displacement differential",
            got: other.mode_name(),
        }),
    }
}

/// dF = 4 dl / (W^2 beta(L)).
pub fn nonuniform_displacement_to_force(params: &RobotParams, dl: f64) -> Result<f64> {
    let w = params.constant_spacing()?;
    Ok(4.0 * dl / (w * w * params.beta(params.length)?))
}

/// dl = dF W^2 beta(L) / 4.
pub fn nonuniform_force_to_displacement(params: &RobotParams, df: f64) -> Result<f64> {
    let w = params.constant_spacing()?;
    Ok(df * w * w * params.beta(params.length)? / 4.0)
}

/// Bending/extension coupling coefficients of the extensible case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensibleCoefficients {
    /// B1 = W^2 L / (4 E I), m/N — bending compliance seen by the cables.
    pub b1: f64,
    /// B2 = L / (E A), m/N — axial compliance.
    pub b2: f64,
}

impl ExtensibleCoefficients {
    pub fn from_params(params: &RobotParams) -> Result<Self> {
        let w = params.constant_spacing()?;
        let ei = params.youngs_modulus * params.constant_rigidity()?;
        let b1 = w * w * params.length / (4.0 * ei);
        let b2 = params.length / params.axial_stiffness();
        if !(b1 > 0.0 && b2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "extensible coefficients must be positive (B1 = {b1}, B2 = {b2})"
            )));
        }
        Ok(Self { b1, b2 })
    }
}

/// Bending/stretch state of the extensible rod: constant strain plus a
/// linear tangent angle.
#[derive(Debug, Clone, Copy)]
pub struct ExtensibleState {
    /// Constant axial strain u.
    pub strain: f64,
    /// Curvature of the linear theta(s), 1/m.
    pub kappa: f64,
}

/// Resolves a pair input into (u, kappa):
/// u = -sum(F)/(E A) = -sum(dl)/(2 L), theta(s) = W dF s/(2EI) = (dl1-dl2) s/(W L).
pub fn extensible_state(params: &RobotParams, act: ActuationState) -> Result<ExtensibleState> {
    expect_pair(act)?;
    let w = params.constant_spacing()?;
    let l = params.length;
    match act {
        ActuationState::ForcePair { f1, f2 } => {
            let ei = params.youngs_modulus * params.constant_rigidity()?;
            Ok(ExtensibleState {
                strain: -(f1 + f2) / params.axial_stiffness(),
                kappa: w * (f1 - f2) / (2.0 * ei),
            })
        }
        ActuationState::DisplacementPair { dl1, dl2 } => Ok(ExtensibleState {
            strain: -(dl1 + dl2) / (2.0 * l),
            kappa: (dl1 - dl2) / (w * l),
        }),
        _ => unreachable!(),
    }
}

/// Extensible rod under an independent cable pair.
pub fn forward_extensible(
    params: &RobotParams,
    act: ActuationState,
    n: usize,
) -> Result<BackboneShape> {
    let st = extensible_state(params, act)?;
    if st.strain <= -1.0 {
        return Err(Error::PhysicalValidity(format!(
            "axial strain u = {} would compress the backbone to non-positive length",
            st.strain
        )));
    }
    let kappa = st.kappa;
    let u = st.strain;
    shape_from_theta(params, &|s| kappa * s, Some(&|_| kappa), Some(&|_| u), n)
}

/// Tip position (x(L), y(L)) without materializing the full shape.
///
/// Constant and extensible cases use the exact arc closed form; the routing
/// and nonuniform cases integrate the closed-form tangent angle with a
/// 64-point Gauss rule.
pub fn tip_position(
    params: &RobotParams,
    kind: CaseKind,
    act: ActuationState,
) -> Result<(f64, f64)> {
    match kind {
        CaseKind::Constant => {
            let kappa = constant_case_curvature(params, act)?;
            let th_l = kappa * params.length;
            Ok((
                params.length * crate::series::sinc(th_l),
                params.length * crate::series::versinc(th_l),
            ))
        }
        CaseKind::AxialExtensible => {
            let st = extensible_state(params, act)?;
            if st.strain <= -1.0 {
                return Err(Error::PhysicalValidity(format!(
                    "axial strain u = {} would compress the backbone to non-positive length",
                    st.strain
                )));
            }
            let th_l = st.kappa * params.length;
            let scale = (1.0 + st.strain) * params.length;
            Ok((
                scale * crate::series::sinc(th_l),
                scale * crate::series::versinc(th_l),
            ))
        }
        CaseKind::ArbitraryRouting => {
            let df = routing_force_input(params, act)?;
            let ei = params.youngs_modulus * params.constant_rigidity()?;
            let l = params.length;
            tip_by_quadrature(l, |s| df / (2.0 * ei) * params.spacing.integral(s, l))
        }
        CaseKind::NonuniformRigidity => {
            let w = params.constant_spacing()?;
            let df = nonuniform_force_input(params, act)?;
            let l = params.length;
            tip_by_quadrature(l, |s| w * df / 2.0 * params.beta(s).unwrap_or(f64::NAN))
        }
    }
}

fn tip_by_quadrature(length: f64, theta: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let (nodes, weights) = crate::quadrature::gauss_legendre_rule(64);
    let mid = 0.5 * length;
    let (mut x, mut y) = (0.0, 0.0);
    for (&xi, &wi) in nodes.iter().zip(&weights) {
        let s = mid + mid * xi;
        let t = theta(s);
        if !t.is_finite() {
            return Err(Error::NonFiniteIntegrand { abscissa: s });
        }
        x += wi * t.cos();
        y += wi * t.sin();
    }
    Ok((x * mid, y * mid))
}

/// Cable forces produced by a displacement pair:
/// [F1, F2] = (1/4) [[1/B2 + 1/B1, 1/B2 - 1/B1], [1/B2 - 1/B1, 1/B2 + 1/B1]] [dl1, dl2],
/// equivalently dF = (dl1 - dl2)/(2 B1) and sum(F) = (dl1 + dl2)/(2 B2).
pub fn forces_from_displacements(params: &RobotParams, dl1: f64, dl2: f64) -> Result<(f64, f64)> {
    let c = ExtensibleCoefficients::from_params(params)?;
    let df = (dl1 - dl2) / (2.0 * c.b1);
    let sf = (dl1 + dl2) / (2.0 * c.b2);
    Ok(((sf + df) / 2.0, (sf - df) / 2.0))
}

/// Inverse of [`forces_from_displacements`]:
/// dl1 = B1 dF + B2 sum(F), dl2 = B2 sum(F) - B1 dF.
pub fn displacements_from_forces(params: &RobotParams, f1: f64, f2: f64) -> Result<(f64, f64)> {
    let c = ExtensibleCoefficients::from_params(params)?;
    let df = f1 - f2;
    let sf = f1 + f2;
    Ok((c.b1 * df + c.b2 * sf, c.b2 * sf - c.b1 * df))
}
