//! Direct numeric minimization of the continuous potential functional.
//!
//! Instead of the closed-form solutions, this discretizes the tangent angle
//! on a nodal mesh (plus one constant strain unknown for the extensible
//! case) and minimizes the potential energy with the quasi-Newton machinery,
//! starting from the straight configuration. It shares no code path with the
//! analytic forward models, which makes it the independent cross-check for
//! them.

use crate::error::{Error, Result};
use crate::forward::{nonuniform_displacement_to_force, routing_displacement_to_force, CaseKind};
use crate::optim::{minimize, OptimConfig};
use crate::params::{ActuationState, RobotParams};
use crate::shape::{finite_difference_curvature, shape_from_samples, uniform_grid, BackboneShape};

/// Minimizes the case's potential functional on a `grid_size`-node mesh.
///
/// Displacement inputs are first converted to force inputs through the
/// case's linear map, since the work term of the functional is written in
/// terms of forces.
pub fn oracle_minimize(
    params: &RobotParams,
    kind: CaseKind,
    act: ActuationState,
    grid_size: usize,
) -> Result<BackboneShape> {
    if grid_size < 3 {
        return Err(Error::Contract("oracle mesh needs at least 3 nodes".into()));
    }
    let forces = to_force_input(params, kind, act)?;
    let grid = uniform_grid(params.length, grid_size);
    let h = params.length / (grid_size - 1) as f64;
    let nvar = grid_size - 1; // theta at node 0 is clamped to zero
    let extensible = kind == CaseKind::AxialExtensible;
    let dim = if extensible { nvar + 1 } else { nvar };

    // per-interval weights of the discretized functional
    let bend_w = bending_weights(params, kind, &grid);
    let work_w = work_weights(params, kind, forces, &grid)?;
    let ea_l = params.axial_stiffness() * params.length;
    let sum_f = forces.0 + forces.1;

    let objective = |x: &[f64]| -> f64 {
        let mut acc = 0.0;
        let mut prev = 0.0;
        for i in 0..nvar {
            let d = (x[i] - prev) / h;
            acc += 0.5 * bend_w[i] * d * d;
            acc -= work_w[i] * (x[i] - prev);
            prev = x[i];
        }
        if extensible {
            let u = x[nvar];
            acc += 0.5 * ea_l * u * u + sum_f * u * params.length;
        }
        acc
    };
    let gradient = |x: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; dim];
        let mut prev = 0.0;
        for i in 0..nvar {
            let d = (x[i] - prev) / h;
            let coef = bend_w[i] * d / h;
            g[i] += coef - work_w[i];
            if i > 0 {
                g[i - 1] -= coef - work_w[i];
            }
            prev = x[i];
        }
        if extensible {
            g[nvar] = ea_l * x[nvar] + sum_f * params.length;
        }
        g
    };

    let cfg = OptimConfig {
        grad_tol: 1e-11 * (1.0 + forces.0.abs() + forces.1.abs()),
        max_iter: 200 * dim,
    };
    let sol = minimize(&objective, &gradient, &vec![0.0; dim], &cfg)
        .map_err(|e| Error::NonConvergence(format!("oracle minimization failed: {e}")))?;
    if !sol.converged {
        return Err(Error::NonConvergence(format!(
            "oracle minimization stalled at gradient norm {:.3e}",
            sol.grad_norm
        )));
    }

    let mut theta = Vec::with_capacity(grid_size);
    theta.push(0.0);
    theta.extend_from_slice(&sol.x[..nvar]);
    let kappa = finite_difference_curvature(&grid, &theta);
    let u = if extensible {
        vec![sol.x[nvar]; grid_size]
    } else {
        vec![0.0; grid_size]
    };
    shape_from_samples(grid, theta, kappa, u)
}

/// Maps any input to (f1, f2) through the case's linear force-displacement
/// relation.
fn to_force_input(params: &RobotParams, kind: CaseKind, act: ActuationState) -> Result<(f64, f64)> {
    match (kind, act) {
        (CaseKind::AxialExtensible, ActuationState::ForcePair { f1, f2 }) => Ok((f1, f2)),
        (CaseKind::AxialExtensible, ActuationState::DisplacementPair { dl1, dl2 }) => {
            crate::forward::forces_from_displacements(params, dl1, dl2)
        }
        (CaseKind::AxialExtensible, other) => Err(Error::ActuationMode {
            expected: "force or displacement pair",
            got: other.mode_name(),
        }),
        (_, ActuationState::ForceDifferential(df)) => Ok((df, 0.0)),
        (CaseKind::Constant, ActuationState::DisplacementDifferential(dl)) => Ok((
            crate::forward::displacement_to_force_constant(params, dl)?,
            0.0,
        )),
        (CaseKind::ArbitraryRouting, ActuationState::DisplacementDifferential(dl)) => {
            Ok((routing_displacement_to_force(params, dl)?, 0.0))
        }
        (CaseKind::NonuniformRigidity, ActuationState::DisplacementDifferential(dl)) => {
            Ok((nonuniform_displacement_to_force(params, dl)?, 0.0))
        }
        (_, other) => Err(Error::ActuationMode {
            expected: "force or displacement differential",
            got: other.mode_name(),
        }),
    }
}

/// Per-interval bending stiffness: int of E I(s) over each interval.
fn bending_weights(params: &RobotParams, kind: CaseKind, grid: &[f64]) -> Vec<f64> {
    let n = grid.len() - 1;
    let mut w = Vec::with_capacity(n);
    match kind {
        CaseKind::NonuniformRigidity => {
            let (nodes, wts) = crate::quadrature::gauss_legendre_rule(8);
            for k in 0..n {
                let (a, b) = (grid[k], grid[k + 1]);
                let mid = 0.5 * (a + b);
                let half = 0.5 * (b - a);
                let mut acc = 0.0;
                for (&x, &wt) in nodes.iter().zip(&wts) {
                    acc += wt * params.flexural_rigidity(mid + half * x);
                }
                w.push(acc * half);
            }
        }
        _ => {
            let ei = params.youngs_modulus
                * params
                    .constant_rigidity()
                    .expect("non-tapered cases have constant rigidity");
            for k in 0..n {
                w.push(ei * (grid[k + 1] - grid[k]));
            }
        }
    }
    w
}

/// Per-interval work coefficients: the actuation work is
/// sum_i work_w[i] (theta_{i+1} - theta_i).
///
/// For constant spacing this telescopes to dF (W/2) theta(L); for a routed
/// cable it is the exact interval integral of W times dF/2.
fn work_weights(
    params: &RobotParams,
    kind: CaseKind,
    forces: (f64, f64),
    grid: &[f64],
) -> Result<Vec<f64>> {
    let n = grid.len() - 1;
    let df = forces.0 - forces.1;
    match kind {
        CaseKind::ArbitraryRouting => {
            let l = params.length;
            Ok((0..n)
                .map(|k| {
                    // exact interval mean of W, so the discrete minimizer
                    // interpolates the analytic solution at the nodes
                    0.5 * df
                        * (params.spacing.integral(grid[k + 1], l)
                            - params.spacing.integral(grid[k], l))
                        / (grid[k + 1] - grid[k])
                })
                .collect())
        }
        _ => {
            let w = params.constant_spacing()?;
            Ok(vec![0.5 * df * w; n])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{forward_constant, forward_extensible};
    use crate::params::test_fixtures::*;

    fn l2_theta_distance(a: &BackboneShape, b: &BackboneShape) -> f64 {
        assert_eq!(a.grid.len(), b.grid.len());
        let h = a.grid[1] - a.grid[0];
        let sum: f64 = a
            .theta
            .iter()
            .zip(&b.theta)
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum();
        (sum * h).sqrt()
    }

    #[test]
    fn zero_force_is_straight() {
        let p = desk_rod();
        let s = oracle_minimize(
            &p,
            CaseKind::Constant,
            ActuationState::ForceDifferential(0.0),
            51,
        )
        .unwrap();
        assert!(s.theta.iter().all(|&t| t.abs() < 1e-12));
    }

    #[test]
    fn constant_case_matches_the_analytic_line() {
        let p = desk_rod();
        let act = ActuationState::ForceDifferential(1.0);
        let oracle = oracle_minimize(&p, CaseKind::Constant, act, 201).unwrap();
        let analytic = forward_constant(&p, act, 201).unwrap();
        let dist = l2_theta_distance(&oracle, &analytic);
        assert!(dist < 1e-6 * p.length.sqrt(), "L2 distance {dist:.3e}");
    }

    #[test]
    fn extensible_case_recovers_the_strain() {
        let p = desk_rod();
        let act = ActuationState::ForcePair { f1: 10.0, f2: 10.0 };
        let oracle = oracle_minimize(&p, CaseKind::AxialExtensible, act, 201).unwrap();
        let expected_u = -7.957747154594767e-4;
        assert!(
            (oracle.u[0] - expected_u).abs() < 1e-8,
            "u = {} vs {expected_u}",
            oracle.u[0]
        );
        let analytic = forward_extensible(&p, act, 201).unwrap();
        let dist = l2_theta_distance(&oracle, &analytic);
        assert!(dist < 1e-6 * p.length.sqrt());
    }

    #[test]
    fn displacement_inputs_are_mapped_through_the_linear_maps() {
        let p = desk_rod();
        let dl = crate::forward::force_to_displacement_constant(&p, 1.0).unwrap();
        let a = oracle_minimize(
            &p,
            CaseKind::Constant,
            ActuationState::DisplacementDifferential(dl),
            101,
        )
        .unwrap();
        let b = oracle_minimize(
            &p,
            CaseKind::Constant,
            ActuationState::ForceDifferential(1.0),
            101,
        )
        .unwrap();
        let dist = l2_theta_distance(&a, &b);
        assert!(dist < 1e-10);
    }
}
