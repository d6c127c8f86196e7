//! Robot geometry, material properties, spatial profiles, and actuation inputs.

use crate::error::{Error, Result};

use std::f64::consts::PI;

/// Lateral cable spacing W(s) along the backbone.
///
/// The polynomial variant is expressed in the normalized coordinate t = s/L,
/// so coefficients can be written down exactly as designed.
#[derive(Debug, Clone, PartialEq)]
pub enum SpacingProfile {
    Constant(f64),
    /// `W(s) = sum_k coefficients[k] * (s/L)^k`
    Polynomial(Vec<f64>),
}

impl SpacingProfile {
    /// W(s) in meters.
    pub fn value(&self, s: f64, length: f64) -> f64 {
        match self {
            SpacingProfile::Constant(w) => *w,
            SpacingProfile::Polynomial(c) => {
                let t = s / length;
                // Horner
                c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
            }
        }
    }

    /// Closed-form running integral `int_0^s W(xi) dxi`.
    pub fn integral(&self, s: f64, length: f64) -> f64 {
        match self {
            SpacingProfile::Constant(w) => w * s,
            SpacingProfile::Polynomial(c) => {
                let t = s / length;
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().rev() {
                    acc = acc * t + ck / (k as f64 + 1.0);
                }
                acc * t * length
            }
        }
    }

    /// Closed-form `int_0^L W(s)^2 ds` via coefficient convolution.
    pub fn integral_squared(&self, length: f64) -> f64 {
        match self {
            SpacingProfile::Constant(w) => w * w * length,
            SpacingProfile::Polynomial(c) => {
                let mut acc = 0.0;
                for (i, &ci) in c.iter().enumerate() {
                    for (j, &cj) in c.iter().enumerate() {
                        acc += ci * cj / ((i + j) as f64 + 1.0);
                    }
                }
                acc * length
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, SpacingProfile::Constant(_))
    }

    fn validate(&self, length: f64) -> Result<()> {
        match self {
            SpacingProfile::Constant(w) => {
                if !(w.is_finite() && *w > 0.0) {
                    return Err(Error::Profile(format!(
                        "constant spacing {w} must be positive"
                    )));
                }
            }
            SpacingProfile::Polynomial(c) => {
                if c.is_empty() {
                    return Err(Error::Profile("empty spacing polynomial".into()));
                }
                // strict positivity checked on a dense grid
                for i in 0..=2048 {
                    let s = length * i as f64 / 2048.0;
                    let w = self.value(s, length);
                    if !(w.is_finite() && w > 0.0) {
                        return Err(Error::Profile(format!(
                            "spacing profile non-positive at s = {s}: W = {w}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Flexural second moment of area I(s) along the backbone.
#[derive(Debug, Clone, PartialEq)]
pub enum RigidityProfile {
    Constant(f64),
    /// Circular section whose diameter varies linearly from `d0` at the base
    /// to `d1` at the tip: I(s) = (pi/64) (d0 + (d1 - d0) s/L)^4.
    TaperedCircular {
        d0: f64,
        d1: f64,
    },
}

impl RigidityProfile {
    /// I(s) in m^4.
    pub fn value(&self, s: f64, length: f64) -> f64 {
        match self {
            RigidityProfile::Constant(i) => *i,
            RigidityProfile::TaperedCircular { d0, d1 } => {
                let d = d0 + (d1 - d0) * s / length;
                PI / 64.0 * d.powi(4)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RigidityProfile::Constant(_))
    }

    fn validate(&self, _length: f64) -> Result<()> {
        match self {
            RigidityProfile::Constant(i) => {
                if !(i.is_finite() && *i > 0.0) {
                    return Err(Error::Profile(format!(
                        "constant rigidity {i} must be positive"
                    )));
                }
            }
            RigidityProfile::TaperedCircular { d0, d1 } => {
                if !(d0.is_finite() && *d0 > 0.0 && d1.is_finite() && *d1 > 0.0) {
                    return Err(Error::Profile(format!(
                        "tapered section diameters must be positive (d0 = {d0}, d1 = {d1})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Geometry and material description of one planar cable-driven rod.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotParams {
    /// Backbone arc length, m.
    pub length: f64,
    /// Young's modulus, Pa.
    pub youngs_modulus: f64,
    /// Cable spacing profile W(s), m.
    pub spacing: SpacingProfile,
    /// Second moment of area profile I(s), m^4.
    pub rigidity: RigidityProfile,
    /// Cross-section area, m^2 (constant; used by the extensible case).
    pub area: f64,
    /// Nominal section diameter, m, when the section is circular.
    pub diameter: Option<f64>,
}

impl RobotParams {
    /// Builds and validates a parameter set.
    pub fn new(
        length: f64,
        youngs_modulus: f64,
        spacing: SpacingProfile,
        rigidity: RigidityProfile,
        area: f64,
        diameter: Option<f64>,
    ) -> Result<Self> {
        let p = Self {
            length,
            youngs_modulus,
            spacing,
            rigidity,
            area,
            diameter,
        };
        p.validate()?;
        Ok(p)
    }

    /// Uniform rod with a circular section of diameter `d` and constant cable
    /// spacing `w`; I and A are derived from `d`.
    pub fn circular(length: f64, youngs_modulus: f64, d: f64, w: f64) -> Result<Self> {
        Self::new(
            length,
            youngs_modulus,
            SpacingProfile::Constant(w),
            RigidityProfile::Constant(PI / 64.0 * d.powi(4)),
            PI / 4.0 * d * d,
            Some(d),
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "length {} must be positive",
                self.length
            )));
        }
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Young's modulus {} must be positive",
                self.youngs_modulus
            )));
        }
        if !(self.area.is_finite() && self.area > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cross-section area {} must be positive",
                self.area
            )));
        }
        self.spacing.validate(self.length)?;
        self.rigidity.validate(self.length)?;
        if let Some(d) = self.diameter {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "diameter {d} must be positive"
                )));
            }
            let a_expected = PI / 4.0 * d * d;
            if rel_diff(self.area, a_expected) > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "area {} inconsistent with circular section of diameter {d} (expected {a_expected})",
                    self.area
                )));
            }
            if let RigidityProfile::Constant(i) = self.rigidity {
                let i_expected = PI / 64.0 * d.powi(4);
                if rel_diff(i, i_expected) > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "second moment {i} inconsistent with circular section of diameter {d} (expected {i_expected})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Flexural rigidity E*I(s), N m^2.
    pub fn flexural_rigidity(&self, s: f64) -> f64 {
        self.youngs_modulus * self.rigidity.value(s, self.length)
    }

    /// Axial stiffness E*A, N.
    pub fn axial_stiffness(&self) -> f64 {
        self.youngs_modulus * self.area
    }

    /// Constant spacing value; errors when the profile varies.
    pub fn constant_spacing(&self) -> Result<f64> {
        match self.spacing {
            SpacingProfile::Constant(w) => Ok(w),
            _ => Err(Error::Profile(
                "operation requires constant cable spacing".into(),
            )),
        }
    }

    /// Constant rigidity value; errors when the profile varies.
    pub fn constant_rigidity(&self) -> Result<f64> {
        match self.rigidity {
            RigidityProfile::Constant(i) => Ok(i),
            _ => Err(Error::Profile(
                "operation requires constant flexural rigidity".into(),
            )),
        }
    }

    /// Compliance integral `beta(s) = int_0^s 1/(E I(xi)) dxi`, 1/(N m).
    ///
    /// Both rigidity variants admit a closed-form antiderivative, which is
    /// what this evaluates; the test suite cross-checks against quadrature.
    pub fn beta(&self, s: f64) -> Result<f64> {
        if !(0.0..=self.length * (1.0 + 1e-12)).contains(&s) {
            return Err(Error::Domain(format!(
                "arc length {s} outside [0, {}]",
                self.length
            )));
        }
        let e = self.youngs_modulus;
        let l = self.length;
        match self.rigidity {
            RigidityProfile::Constant(i) => Ok(s / (e * i)),
            RigidityProfile::TaperedCircular { d0, d1 } => {
                let dd = d1 - d0;
                if dd.abs() < 1e-15 * d0.abs() {
                    return Ok(s / (e * PI / 64.0 * d0.powi(4)));
                }
                let w = d0 + dd * s / l;
                // int 64/(pi E w^4) ds  with  w = d0 + dd s/L
                Ok(64.0 * l / (3.0 * PI * e * dd) * (1.0 / d0.powi(3) - 1.0 / w.powi(3)))
            }
        }
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Cable-side actuation input.
///
/// Single-input forms drive the two symmetric cables antagonistically; pair
/// forms drive them independently and couple bending with axial extension.
/// Sums and differences follow the convention dF = f1 - f2, dl = dl1 - dl2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActuationState {
    /// Cable force differential dF = F1 - F2, N.
    ForceDifferential(f64),
    /// Single-cable displacement dl (= dl1 = -dl2), m.
    DisplacementDifferential(f64),
    /// Independent cable forces, N.
    ForcePair { f1: f64, f2: f64 },
    /// Independent cable displacements, m.
    DisplacementPair { dl1: f64, dl2: f64 },
}

impl ActuationState {
    pub fn mode_name(&self) -> &'static str {
        match self {
            ActuationState::ForceDifferential(_) => "force differential",
            ActuationState::DisplacementDifferential(_) => "displacement differential",
            ActuationState::ForcePair { .. } => "force pair",
            ActuationState::DisplacementPair { .. } => "displacement pair",
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(
            self,
            ActuationState::ForcePair { .. } | ActuationState::DisplacementPair { .. }
        )
    }

    /// F1 - F2 for force-based states.
    pub fn force_difference(&self) -> Option<f64> {
        match self {
            ActuationState::ForceDifferential(df) => Some(*df),
            ActuationState::ForcePair { f1, f2 } => Some(f1 - f2),
            _ => None,
        }
    }

    /// F1 + F2 for the force pair.
    pub fn force_sum(&self) -> Option<f64> {
        match self {
            ActuationState::ForcePair { f1, f2 } => Some(f1 + f2),
            _ => None,
        }
    }

    /// dl1 - dl2 for displacement-based states.
    pub fn displacement_difference(&self) -> Option<f64> {
        match self {
            ActuationState::DisplacementDifferential(dl) => Some(2.0 * dl),
            ActuationState::DisplacementPair { dl1, dl2 } => Some(dl1 - dl2),
            _ => None,
        }
    }

    /// dl1 + dl2 for the displacement pair.
    pub fn displacement_sum(&self) -> Option<f64> {
        match self {
            ActuationState::DisplacementPair { dl1, dl2 } => Some(dl1 + dl2),
            _ => None,
        }
    }
}
