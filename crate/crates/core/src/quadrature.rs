//! Fixed-rule numerical quadrature.
//!
//! All integrands in this crate are smooth, so fixed composite rules give
//! reproducible, bit-identical results across runs. Composite Simpson with
//! 256 panels is the default; Gauss-Legendre is available where very high
//! order pays off.

use crate::error::{Error, Result};

/// Which fixed rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Composite Simpson rule; `nodes` counts panels (two samples each).
    CompositeSimpson,
    /// Single-panel Gauss-Legendre rule; `nodes` counts abscissae.
    GaussLegendre,
}

/// A quadrature rule selection with its resolution and target tolerance.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub scheme: QuadratureScheme,
    /// Panel count (Simpson) or node count (Gauss-Legendre). At least 16.
    pub nodes: usize,
    /// Absolute tolerance the rule is expected to meet on smooth integrands.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            scheme: QuadratureScheme::CompositeSimpson,
            nodes: 256,
            tolerance: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn gauss_legendre(nodes: usize) -> Self {
        Self {
            scheme: QuadratureScheme::GaussLegendre,
            nodes,
            tolerance: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::InvalidParameter(format!(
                "quadrature node count {} below minimum of 16",
                self.nodes
            )));
        }
        if self.tolerance <= 0.0 || self.tolerance.is_nan() {
            return Err(Error::InvalidParameter(
                "quadrature tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Integrates `f` over `[a, b]` with the configured fixed rule.
///
/// Fails if `a > b` or if any sample of `f` is non-finite (the offending
/// abscissa is reported).
///
/// ```
/// use cablerod::quadrature::{integrate, QuadratureConfig};
///
/// let v = integrate(f64::sin, 0.0, std::f64::consts::PI, &QuadratureConfig::default())?;
/// assert!((v - 2.0).abs() < 1e-9);
/// # Ok::<(), cablerod::Error>(())
/// ```
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if a > b {
        return Err(Error::Domain(format!(
            "integration bounds out of order: a = {a} > b = {b}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let eval = |s: f64| -> Result<f64> {
        let v = f(s);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { abscissa: s })
        }
    };
    match cfg.scheme {
        QuadratureScheme::CompositeSimpson => {
            let n = cfg.nodes;
            let h = (b - a) / n as f64;
            let mut acc = eval(a)? + eval(b)?;
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * eval(a + i as f64 * h)?;
            }
            // midpoints of each panel carry weight 4 only when n is even;
            // for odd n fall back to per-panel Simpson on halved panels.
            if n % 2 == 0 {
                Ok(acc * h / 3.0)
            } else {
                let mut total = 0.0;
                for i in 0..n {
                    let x0 = a + i as f64 * h;
                    let x1 = x0 + h;
                    let xm = 0.5 * (x0 + x1);
                    total += (eval(x0)? + 4.0 * eval(xm)? + eval(x1)?) * h / 6.0;
                }
                Ok(total)
            }
        }
        QuadratureScheme::GaussLegendre => {
            let (nodes, weights) = gauss_legendre_rule(cfg.nodes);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let mut acc = 0.0;
            for (&x, &w) in nodes.iter().zip(&weights) {
                acc += w * eval(mid + half * x)?;
            }
            Ok(acc * half)
        }
    }
}

/// Cumulative integral of `f` at each grid node, starting from zero at the
/// first node. Each sub-interval is handled with an 8-point Gauss rule, so
/// smooth integrands are resolved to machine precision on modest grids.
pub fn cumulative_integral<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Result<Vec<f64>> {
    let (nodes, weights) = gauss_legendre_rule(8);
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut panel = 0.0;
        for (&x, &wt) in nodes.iter().zip(&weights) {
            let s = mid + half * x;
            let v = f(s);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { abscissa: s });
            }
            panel += wt * v;
        }
        acc += panel * half;
        out.push(acc);
    }
    Ok(out)
}

/// Cumulative integral of tabulated samples on a uniform grid, using
/// composite Simpson between nodes (quadratic interpolation at odd indices).
pub fn cumulative_from_samples(grid: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(grid.len(), values.len());
    let n = grid.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let h = grid[1] - grid[0];
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    }
    for i in (1..n).step_by(2) {
        // integral over [i-1, i] of the quadratic through (i-1, i, i+1),
        // or through (i-2, i-1, i) at the right edge
        if i + 1 < n {
            out[i] =
                out[i - 1] + h / 12.0 * (5.0 * values[i - 1] + 8.0 * values[i] - values[i + 1]);
        } else {
            out[i] =
                out[i - 1] + h / 12.0 * (-values[i - 2] + 8.0 * values[i - 1] + 5.0 * values[i]);
        }
    }
    out
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
/// The sizes used in hot paths are computed once and cached.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE8: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    static CACHE32: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    static CACHE64: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    match n {
        8 => CACHE8.get_or_init(|| compute_gauss_legendre(8)).clone(),
        32 => CACHE32.get_or_init(|| compute_gauss_legendre(32)).clone(),
        64 => CACHE64.get_or_init(|| compute_gauss_legendre(64)).clone(),
        _ => compute_gauss_legendre(n),
    }
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
