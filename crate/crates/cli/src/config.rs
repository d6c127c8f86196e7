//! Experiment configuration: a strict TOML schema plus `key=value` overrides.

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use cablerod::discrete::GradientMode;
use cablerod::forward::CaseKind;
use cablerod::inverse::{IntegrationScheme, InverseConfig, TrajectoryKind, TrajectorySpec};
use cablerod::params::{ActuationState, RigidityProfile, RobotParams, SpacingProfile};

/// Top-level run configuration. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub robot: RobotConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actuation: Option<ActuationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    pub length: f64,
    pub youngs_modulus: f64,
    /// Circular-section diameter; supplies rigidity and area defaults.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    pub spacing: SpacingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<RigidityConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum SpacingConfig {
    Constant {
        value: f64,
    },
    /// Coefficients of W(s) as a polynomial in s/L.
    Polynomial {
        coefficients: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum RigidityConfig {
    Constant { value: f64 },
    Tapered { d0: f64, d1: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub variant: CaseVariant,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CaseVariant {
    Constant,
    Routing,
    Nonuniform,
    Extensible,
}

impl From<CaseVariant> for CaseKind {
    fn from(v: CaseVariant) -> Self {
        match v {
            CaseVariant::Constant => CaseKind::Constant,
            CaseVariant::Routing => CaseKind::ArbitraryRouting,
            CaseVariant::Nonuniform => CaseKind::NonuniformRigidity,
            CaseVariant::Extensible => CaseKind::AxialExtensible,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ActuationConfig {
    pub mode: ActuationMode,
    /// Single-input magnitude (N or m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Pair inputs [first, second].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ActuationMode {
    ForceDifferential,
    DisplacementDifferential,
    ForcePair,
    DisplacementPair,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub kind: TrajectoryVariant,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_end: Option<f64>,
    /// Explicit trajectory origin; defaults to the initial tip position.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryVariant {
    Hold,
    DampedSine,
    ShrinkingCircle,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Shape sample count (forward/loading shapes, oracle mesh).
    pub samples: usize,
    /// Time integration for tracking runs.
    pub scheme: SchemeVariant,
    /// Damped-least-squares factor.
    pub lambda: f64,
    /// Singularity threshold.
    pub epsilon: f64,
    /// Initial-consistency tolerance for tracking runs.
    pub consistency_tol: f64,
    /// Loading: distributed load components and tip force differential.
    pub q_x: f64,
    pub q_y: f64,
    pub delta_force: f64,
    /// Loading: solution method.
    pub method: LoadingMethod,
    pub shooting_tol: f64,
    pub galerkin_terms: usize,
    pub adomian_order: usize,
    /// Dump per-order series components (Adomian runs).
    pub dump_series: bool,
    /// Discrete model: section count, basis degree, gradient mode.
    pub sections: usize,
    pub degree: usize,
    pub gradient: GradientVariant,
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Sweep: force differentials and section counts.
    pub delta_forces: Vec<f64>,
    pub sections_list: Vec<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            samples: 201,
            scheme: SchemeVariant::Euler,
            lambda: 1e-6,
            epsilon: 1e-8,
            consistency_tol: 1e-6,
            q_x: 0.0,
            q_y: 0.0,
            delta_force: 0.0,
            method: LoadingMethod::Shooting,
            shooting_tol: 1e-12,
            galerkin_terms: 6,
            adomian_order: 4,
            dump_series: false,
            sections: 1,
            degree: 5,
            gradient: GradientVariant::CentralDifference,
            grad_tol: 1e-6,
            max_iter: 2000,
            delta_forces: vec![1.0, 2.0, 3.0],
            sections_list: vec![1, 2, 4, 8, 16],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SchemeVariant {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LoadingMethod {
    Shooting,
    Galerkin,
    Adomian,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GradientVariant {
    CentralDifference,
    Analytic,
}

impl From<GradientVariant> for GradientMode {
    fn from(v: GradientVariant) -> Self {
        match v {
            GradientVariant::CentralDifference => GradientMode::CentralDifference,
            GradientVariant::Analytic => GradientMode::Analytic,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl ExperimentConfig {
    /// Parses TOML text, applies dotted-path `key=value` overrides, and
    /// deserializes strictly.
    pub fn from_toml(text: &str, overrides: &[String]) -> anyhow::Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| anyhow!("config parse error: {e}"))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e| anyhow!("config error: {e}"))?;
        Ok(cfg)
    }

    pub fn robot_params(&self) -> anyhow::Result<RobotParams> {
        let r = &self.robot;
        let spacing = match &r.spacing {
            SpacingConfig::Constant { value } => SpacingProfile::Constant(*value),
            SpacingConfig::Polynomial { coefficients } => {
                SpacingProfile::Polynomial(coefficients.clone())
            }
        };
        let rigidity = match (&r.rigidity, r.diameter) {
            (Some(RigidityConfig::Constant { value }), _) => RigidityProfile::Constant(*value),
            (Some(RigidityConfig::Tapered { d0, d1 }), _) => {
                RigidityProfile::TaperedCircular { d0: *d0, d1: *d1 }
            }
            (None, Some(d)) => RigidityProfile::Constant(std::f64::consts::PI / 64.0 * d.powi(4)),
            (None, None) => bail!("config error: robot.rigidity or robot.diameter required"),
        };
        let area = match (r.area, r.diameter) {
            (Some(a), _) => a,
            (None, Some(d)) => std::f64::consts::PI / 4.0 * d * d,
            (None, None) => bail!("config error: robot.area or robot.diameter required"),
        };
        RobotParams::new(
            r.length,
            r.youngs_modulus,
            spacing,
            rigidity,
            area,
            r.diameter,
        )
        .context("invalid robot parameters")
    }

    pub fn case_kind(&self) -> anyhow::Result<CaseKind> {
        let case = self
            .case
            .as_ref()
            .ok_or_else(|| anyhow!("config error: [case] block required for this command"))?;
        Ok(case.variant.into())
    }

    pub fn actuation_state(&self) -> anyhow::Result<ActuationState> {
        let a = self
            .actuation
            .as_ref()
            .ok_or_else(|| anyhow!("config error: [actuation] block required for this command"))?;
        let single = |field: Option<f64>| {
            field.ok_or_else(|| anyhow!("config error: actuation.value required for this mode"))
        };
        let pair = |field: Option<[f64; 2]>| {
            field.ok_or_else(|| anyhow!("config error: actuation.values required for this mode"))
        };
        Ok(match a.mode {
            ActuationMode::ForceDifferential => ActuationState::ForceDifferential(single(a.value)?),
            ActuationMode::DisplacementDifferential => {
                ActuationState::DisplacementDifferential(single(a.value)?)
            }
            ActuationMode::ForcePair => {
                let [f1, f2] = pair(a.values)?;
                ActuationState::ForcePair { f1, f2 }
            }
            ActuationMode::DisplacementPair => {
                let [dl1, dl2] = pair(a.values)?;
                ActuationState::DisplacementPair { dl1, dl2 }
            }
        })
    }

    pub fn trajectory_spec(&self) -> anyhow::Result<TrajectorySpec> {
        let t = self
            .trajectory
            .as_ref()
            .ok_or_else(|| anyhow!("config error: [trajectory] block required for this command"))?;
        let kind = match t.kind {
            TrajectoryVariant::Hold => TrajectoryKind::Hold,
            TrajectoryVariant::DampedSine => TrajectoryKind::DampedSine {
                amplitude: t.amplitude.unwrap_or(0.1),
                decay: t.decay.unwrap_or(0.1),
                frequency_hz: t.frequency_hz.unwrap_or(1.0),
            },
            TrajectoryVariant::ShrinkingCircle => TrajectoryKind::ShrinkingCircle {
                r_start: t
                    .r_start
                    .ok_or_else(|| anyhow!("config error: trajectory.r_start required"))?,
                r_end: t
                    .r_end
                    .ok_or_else(|| anyhow!("config error: trajectory.r_end required"))?,
            },
        };
        let origin = match (t.x0, t.y0) {
            (Some(x), Some(y)) => Some((x, y)),
            (Some(x), None) => Some((x, 0.0)),
            (None, Some(_)) => bail!("config error: trajectory.y0 requires trajectory.x0"),
            (None, None) => None,
        };
        Ok(TrajectorySpec {
            kind,
            horizon: t.horizon,
            dt: t.dt,
            initial: self.actuation_state()?,
            origin,
        })
    }

    pub fn inverse_config(&self) -> InverseConfig {
        InverseConfig {
            scheme: match self.solver.scheme {
                SchemeVariant::Euler => IntegrationScheme::ExplicitEuler,
                SchemeVariant::Rk4 => IntegrationScheme::Rk4,
            },
            damping: self.solver.lambda,
            epsilon: self.solver.epsilon,
            consistency_tol: self.solver.consistency_tol,
        }
    }
}

fn apply_override(table: &mut toml::Table, entry: &str) -> anyhow::Result<()> {
    let (path, raw) = entry
        .split_once('=')
        .ok_or_else(|| anyhow!("config error: override '{entry}' is not of the form key=value"))?;
    let value: toml::Value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        bail!("config error: override key '{path}' has an empty segment");
    }
    let mut cursor = table;
    for k in &keys[..keys.len() - 1] {
        cursor = cursor
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| anyhow!("config error: override path '{path}' crosses a non-table"))?;
    }
    cursor.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[robot]
length = 0.3
youngs_modulus = 2e9
diameter = 0.004
[robot.spacing]
kind = "constant"
value = 0.11
[case]
variant = "constant"
[actuation]
mode = "force_differential"
value = 1.0
"#;

    #[test]
    fn parses_and_derives_section_properties() {
        let cfg = ExperimentConfig::from_toml(BASE, &[]).unwrap();
        let p = cfg.robot_params().unwrap();
        assert!((p.area - std::f64::consts::PI / 4.0 * 0.004 * 0.004).abs() < 1e-20);
        assert_eq!(cfg.case_kind().unwrap(), CaseKind::Constant);
        assert_eq!(
            cfg.actuation_state().unwrap(),
            ActuationState::ForceDifferential(1.0)
        );
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = format!("{BASE}\n[solver]\nbogus_knob = 3\n");
        let err = ExperimentConfig::from_toml(&text, &[]).unwrap_err();
        assert!(err.to_string().contains("bogus_knob"), "{err}");
    }

    #[test]
    fn overrides_replace_nested_values() {
        let cfg = ExperimentConfig::from_toml(
            BASE,
            &["actuation.value=2.5".into(), "solver.samples=51".into()],
        )
        .unwrap();
        assert_eq!(
            cfg.actuation_state().unwrap(),
            ActuationState::ForceDifferential(2.5)
        );
        assert_eq!(cfg.solver.samples, 51);
    }

    #[test]
    fn override_with_bad_shape_is_rejected() {
        let err = ExperimentConfig::from_toml(BASE, &["solver.samples".into()]).unwrap_err();
        assert!(err.to_string().contains("key=value"));
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ExperimentConfig::from_toml(BASE, &[]).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }
}
