//! Actuation-space statics and kinematics for planar cable-driven continuum
//! rods.
//!
//! The rod is modeled through its potential energy written directly in the
//! actuation coordinates (cable forces or displacements), which yields
//! closed-form forward models for four structural cases, semi-analytical
//! differential inverse kinematics, boundary-value solvers for distributed
//! loads, and an energy-minimization model for disk-discretized robots. A
//! direct numeric minimizer of the same functionals serves as the
//! independent cross-check for every analytic path.
//!
//! Modules:
//! - [`params`]: geometry, material, spatial profiles, actuation inputs;
//! - [`quadrature`]: fixed-rule integration shared by all solvers;
//! - [`shape`]: sampled backbone configurations;
//! - [`forward`]: closed-form forward models and force/displacement maps;
//! - [`inverse`]: differential inverse kinematics and trajectory tracking;
//! - [`loading`]: distributed-load BVP solvers (shooting, Galerkin, series);
//! - [`discrete`]: disk-discretized energy minimization;
//! - [`oracle`]: direct functional minimization used for cross-validation.
//!
//! ```
//! use cablerod::forward::forward_constant;
//! use cablerod::{ActuationState, RobotParams};
//!
//! // 0.3 m rod, 4 mm circular section, cables 0.11 m apart
//! let rod = RobotParams::circular(0.3, 2e9, 0.004, 0.11)?;
//! let shape = forward_constant(&rod, ActuationState::ForceDifferential(1.0), 201)?;
//! // one newton of force differential bends it to constant curvature
//! assert!((shape.kappa[0] - 2.1884).abs() < 1e-4);
//! # Ok::<(), cablerod::Error>(())
//! ```

pub mod discrete;
pub mod error;
pub mod forward;
pub mod inverse;
pub mod loading;
pub mod optim;
pub mod oracle;
pub mod params;
pub mod quadrature;
mod series;
pub mod shape;

pub use error::{Error, Result};
pub use forward::{CaseKind, ForwardCase};
pub use params::{ActuationState, RigidityProfile, RobotParams, SpacingProfile};
pub use shape::BackboneShape;
