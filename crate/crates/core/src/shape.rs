//! Sampled backbone configurations and their planar reconstruction.

use crate::error::{Error, Result};
use crate::params::RobotParams;
use crate::quadrature::cumulative_integral;

/// A backbone configuration sampled along arc length.
///
/// `x` and `y` are reconstructed from the tangent angle and axial strain via
/// x(s) = int (1+u) cos(theta), y(s) = int (1+u) sin(theta), with the base
/// clamped at the origin (theta(0) = 0, x(0) = y(0) = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct BackboneShape {
    /// Monotonically increasing arc-length samples, s0 = 0 .. sN = L.
    pub grid: Vec<f64>,
    /// Tangent angle per sample, rad.
    pub theta: Vec<f64>,
    /// Curvature per sample, 1/m.
    pub kappa: Vec<f64>,
    /// Axial strain per sample (zero for inextensible cases).
    pub u: Vec<f64>,
    /// Planar coordinates per sample, m.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BackboneShape {
    /// Tip position (x(L), y(L)).
    pub fn tip(&self) -> (f64, f64) {
        (*self.x.last().unwrap(), *self.y.last().unwrap())
    }

    /// Tip tangent angle theta(L).
    pub fn tip_angle(&self) -> f64 {
        *self.theta.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Uniform sampling grid with `n` nodes on [0, L].
pub fn uniform_grid(length: f64, n: usize) -> Vec<f64> {
    let step = length / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { length } else { i as f64 * step })
        .collect()
}

/// Builds a [`BackboneShape`] from a tangent-angle function.
///
/// `dtheta` supplies the analytic curvature when the angle is known in closed
/// form; otherwise curvature falls back to second-order finite differences
/// (central at interior nodes, one-sided at the ends). `strain` is the axial
/// strain u(s); pass `None` for inextensible cases.
pub fn shape_from_theta(
    params: &RobotParams,
    theta: &dyn Fn(f64) -> f64,
    dtheta: Option<&dyn Fn(f64) -> f64>,
    strain: Option<&dyn Fn(f64) -> f64>,
    n: usize,
) -> Result<BackboneShape> {
    if n < 2 {
        return Err(Error::Contract(format!(
            "sample count {n} must be at least 2"
        )));
    }
    if theta(0.0).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "theta(0) = {} violates the clamped-base condition",
            theta(0.0)
        )));
    }
    let grid = uniform_grid(params.length, n);
    let th: Vec<f64> = grid.iter().map(|&s| theta(s)).collect();
    let u: Vec<f64> = match strain {
        Some(f) => grid.iter().map(|&s| f(s)).collect(),
        None => vec![0.0; n],
    };
    let kappa = match dtheta {
        Some(d) => grid.iter().map(|&s| d(s)).collect(),
        None => finite_difference_curvature(&grid, &th),
    };

    let ux = |s: f64| (1.0 + strain.map_or(0.0, |f| f(s))) * theta(s).cos();
    let uy = |s: f64| (1.0 + strain.map_or(0.0, |f| f(s))) * theta(s).sin();
    let x = cumulative_integral(ux, &grid)?;
    let y = cumulative_integral(uy, &grid)?;

    Ok(BackboneShape {
        grid,
        theta: th,
        kappa,
        u,
        x,
        y,
    })
}

/// Builds a [`BackboneShape`] from tabulated samples on a uniform grid,
/// integrating the coordinates with composite Simpson over the samples.
pub fn shape_from_samples(
    grid: Vec<f64>,
    theta: Vec<f64>,
    kappa: Vec<f64>,
    u: Vec<f64>,
) -> Result<BackboneShape> {
    let n = grid.len();
    if n < 2 || theta.len() != n || kappa.len() != n || u.len() != n {
        return Err(Error::Contract(
            "sample arrays must share a length of at least 2".into(),
        ));
    }
    if theta[0].abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "theta(0) = {} violates the clamped-base condition",
            theta[0]
        )));
    }
    let fx: Vec<f64> = theta
        .iter()
        .zip(&u)
        .map(|(&t, &ui)| (1.0 + ui) * t.cos())
        .collect();
    let fy: Vec<f64> = theta
        .iter()
        .zip(&u)
        .map(|(&t, &ui)| (1.0 + ui) * t.sin())
        .collect();
    let x = crate::quadrature::cumulative_from_samples(&grid, &fx);
    let y = crate::quadrature::cumulative_from_samples(&grid, &fy);
    Ok(BackboneShape {
        grid,
        theta,
        kappa,
        u,
        x,
        y,
    })
}

/// Second-order curvature estimate from sampled angles.
pub fn finite_difference_curvature(grid: &[f64], theta: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let h = grid[1] - grid[0];
    let mut k = vec![0.0; n];
    if n == 2 {
        let d = (theta[1] - theta[0]) / h;
        return vec![d, d];
    }
    k[0] = (-3.0 * theta[0] + 4.0 * theta[1] - theta[2]) / (2.0 * h);
    for i in 1..n - 1 {
        k[i] = (theta[i + 1] - theta[i - 1]) / (2.0 * h);
    }
    k[n - 1] = (3.0 * theta[n - 1] - 4.0 * theta[n - 2] + theta[n - 3]) / (2.0 * h);
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::test_fixtures::desk_rod;
    use approx::assert_relative_eq;

    #[test]
    fn straight_rod_tip() {
        let p = desk_rod();
        let s = shape_from_theta(&p, &|_| 0.0, Some(&|_| 0.0), None, 201).unwrap();
        let (x, y) = s.tip();
        assert_relative_eq!(x, 0.3, max_relative = 1e-14);
        assert_relative_eq!(y, 0.0);
        assert!(s.kappa.iter().all(|&k| k == 0.0));
    }

    #[test]
    fn constant_curvature_arc_matches_closed_form() {
        // kappa = W dF / (2 E I) at dF = 1 N for the desk rod
        let p = desk_rod();
        let kappa = 2.1883804675135607;
        let s = shape_from_theta(&p, &|s| kappa * s, Some(&|_| kappa), None, 201).unwrap();
        let (x, y) = s.tip();
        let th_l = kappa * p.length;
        assert_relative_eq!(x, th_l.sin() / kappa, epsilon = 1e-12);
        assert_relative_eq!(y, (1.0 - th_l.cos()) / kappa, epsilon = 1e-12);
        // frozen closed-form values
        assert_relative_eq!(x, 0.2789091473979433, epsilon = 1e-12);
        assert_relative_eq!(y, 0.0949904901099923, epsilon = 1e-12);
    }

    #[test]
    fn uniform_compression_shortens_the_rod() {
        let p = desk_rod();
        let u = -7.957747154594767e-4; // -sum(F)/(E A) at 20 N total
        let s = shape_from_theta(&p, &|_| 0.0, Some(&|_| 0.0), Some(&|_| u), 201).unwrap();
        let (x, y) = s.tip();
        assert_relative_eq!(x, 0.29976126758536215, epsilon = 1e-12);
        assert_relative_eq!(y, 0.0);
    }

    #[test]
    fn rejects_nonzero_base_angle() {
        let p = desk_rod();
        let r = shape_from_theta(&p, &|_| 0.1, None, None, 11);
        assert!(matches!(r, Err(crate::error::Error::Contract(_))));
    }

    #[test]
    fn finite_difference_curvature_matches_analytic() {
        let p = desk_rod();
        let s = shape_from_theta(&p, &|s| (3.0 * s).sin(), None, None, 401).unwrap();
        for (i, &si) in s.grid.iter().enumerate() {
            let exact = 3.0 * (3.0 * si).cos();
            assert!(
                (s.kappa[i] - exact).abs() < 5e-4,
                "node {i}: {} vs {exact}",
                s.kappa[i]
            );
        }
    }
}
