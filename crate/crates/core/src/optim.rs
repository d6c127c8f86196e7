//! Quasi-Newton unconstrained minimization.
//!
//! Dense BFGS with a strong-Wolfe line search (interpolating backtracking
//! plus a zoom stage). Problem sizes here range from a handful of polynomial
//! coefficients to a few hundred nodal unknowns, so the dense
//! inverse-Hessian update is the right tool.

use crate::error::{Error, Result};

/// Stopping rule and iteration budget for [`minimize`].
#[derive(Debug, Clone, Copy)]
pub struct OptimConfig {
    /// Converged when the gradient inf-norm falls below this.
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-9,
            max_iter: 2000,
        }
    }
}

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Inf-norm of the gradient at `x`.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

const WOLFE_C1: f64 = 1e-4;
const WOLFE_C2: f64 = 0.9;

/// Minimizes `f` starting from `x0` using BFGS.
///
/// `grad` must return the gradient of `f`. Stops when the gradient inf-norm
/// drops below `cfg.grad_tol`, when the line search can no longer make
/// progress (returns the best point found, flagged by `converged`), or after
/// `cfg.max_iter` iterations.
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    cfg: &OptimConfig,
) -> Result<OptimResult> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = grad(&x);
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence(
            "objective or gradient non-finite at the initial iterate".into(),
        ));
    }

    // inverse Hessian approximation, row-major identity
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    let mut first_update = true;

    for iter in 0..cfg.max_iter {
        let gnorm = inf_norm(&g);
        if gnorm <= cfg.grad_tol {
            return Ok(OptimResult {
                x,
                value: fx,
                grad_norm: gnorm,
                iterations: iter,
                converged: true,
            });
        }

        // d = -H g
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += h[i * n + j] * g[j];
            }
            d[i] = -acc;
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            // H lost positive definiteness; restart from steepest descent
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            for i in 0..n {
                d[i] = -g[i];
            }
            slope = dot(&g, &d);
            first_update = true;
        }

        let searched = line_search(f, grad, &x, fx, &g, &d, slope);
        let (x_new, f_new, g_new) = match searched {
            Some(t) => t,
            None => {
                // objective differences have rounded to zero; near the
                // minimum the gradient is still meaningful, so fall back to
                // accepting quasi-Newton steps that shrink the gradient norm
                let xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + di).collect();
                let gt = grad(&xt);
                if inf_norm(&gt) < gnorm {
                    let ft = f(&xt);
                    (xt, ft, gt)
                } else {
                    return Ok(OptimResult {
                        x,
                        value: fx,
                        grad_norm: gnorm,
                        iterations: iter,
                        converged: gnorm <= cfg.grad_tol,
                    });
                }
            }
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-14 * norm2(&s) * norm2(&yv) {
            if first_update {
                // scale the seed matrix before the first update
                let yy = dot(&yv, &yv);
                if yy > 0.0 {
                    let scale = sy / yy;
                    for i in 0..n {
                        for j in 0..n {
                            h[i * n + j] = if i == j { scale } else { 0.0 };
                        }
                    }
                }
                first_update = false;
            }
            bfgs_update(&mut h, &s, &yv, sy, n);
        }

        x = x_new;
        fx = f_new;
        g = g_new;
    }

    let gnorm = inf_norm(&g);
    if gnorm <= cfg.grad_tol {
        Ok(OptimResult {
            x,
            value: fx,
            grad_norm: gnorm,
            iterations: cfg.max_iter,
            converged: true,
        })
    } else {
        Err(Error::NonConvergence(format!(
            "quasi-Newton iteration budget {} exhausted, gradient norm {gnorm:.3e} above tolerance {:.3e}",
            cfg.max_iter, cfg.grad_tol
        )))
    }
}

struct Trial {
    step: f64,
    x: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    slope: f64,
}

/// Strong-Wolfe line search: bracketing stage plus interpolating zoom.
///
/// Returns the accepted point with its value and gradient, or None when no
/// decrease is obtainable at machine resolution.
fn line_search(
    f: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    fx: f64,
    _g: &[f64],
    d: &[f64],
    slope0: f64,
) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let eval = |step: f64| -> Trial {
        let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + step * di).collect();
        let value = f(&xt);
        let gt = grad(&xt);
        let slope = gt.iter().zip(d).map(|(a, b)| a * b).sum();
        Trial {
            step,
            x: xt,
            value,
            grad: gt,
            slope,
        }
    };
    let armijo = |t: &Trial| t.value <= fx + WOLFE_C1 * t.step * slope0;
    let curvature = |t: &Trial| t.slope.abs() <= -WOLFE_C2 * slope0;

    let zoom = |mut lo: Trial, mut hi: Trial| -> Option<Trial> {
        for _ in 0..40 {
            // cubic-ish interpolation, safeguarded toward the midpoint
            let mid = {
                let denom = 2.0 * (hi.value - lo.value - lo.slope * (hi.step - lo.step));
                let quad = if denom.abs() > 0.0 {
                    lo.step - lo.slope * (hi.step - lo.step).powi(2) / denom
                } else {
                    0.5 * (lo.step + hi.step)
                };
                let (a, b) = if lo.step < hi.step {
                    (lo.step, hi.step)
                } else {
                    (hi.step, lo.step)
                };
                let margin = 0.1 * (b - a);
                if quad.is_finite() && quad > a + margin && quad < b - margin {
                    quad
                } else {
                    0.5 * (lo.step + hi.step)
                }
            };
            if (hi.step - lo.step).abs() * d.iter().fold(0.0f64, |m, v| m.max(v.abs()))
                < 1e-16 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            {
                return if lo.value < fx { Some(lo) } else { None };
            }
            let t = eval(mid);
            if !t.value.is_finite() || !armijo(&t) || t.value >= lo.value {
                hi = t;
            } else {
                if curvature(&t) {
                    return Some(t);
                }
                if t.slope * (hi.step - lo.step) >= 0.0 {
                    hi = lo;
                }
                lo = t;
            }
        }
        if lo.value < fx {
            Some(lo)
        } else {
            None
        }
    };

    let mut prev = Trial {
        step: 0.0,
        x: x.to_vec(),
        value: fx,
        grad: _g.to_vec(),
        slope: slope0,
    };
    let mut step = 1.0;
    for i in 0..20 {
        let t = eval(step);
        if !t.value.is_finite() {
            // shrink into the finite region
            step *= 0.25;
            continue;
        }
        if !armijo(&t) || (i > 0 && t.value >= prev.value) {
            return zoom(prev, t).map(|t| (t.x, t.value, t.grad));
        }
        if curvature(&t) {
            return Some((t.x, t.value, t.grad));
        }
        if t.slope >= 0.0 {
            return zoom(t, prev).map(|t| (t.x, t.value, t.grad));
        }
        prev = t;
        step *= 2.0;
        if step > 1e6 {
            break;
        }
    }
    if prev.step > 0.0 && prev.value < fx {
        Some((prev.x, prev.value, prev.grad))
    } else {
        None
    }
}

fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    // hy = H y
    let mut hy = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += h[i * n + j] * y[j];
        }
        hy[i] = acc;
    }
    let yhy = dot(y, &hy);
    let c = (1.0 + rho * yhy) * rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += c * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Central-difference gradient with a relative step of `rel_step` scaled by
/// each coordinate's magnitude.
pub fn central_difference_gradient(
    f: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    rel_step: f64,
) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = rel_step * x[i].abs().max(1.0);
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| 3.0 * x[0] * x[0] + 0.5 * x[1] * x[1] + x[0] * x[1];
        let g = |x: &[f64]| vec![6.0 * x[0] + x[1], x[1] + x[0]];
        let r = minimize(&f, &g, &[5.0, -7.0], &OptimConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.x[0].abs() < 1e-8 && r.x[1].abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let r = minimize(
            &f,
            &g,
            &[-1.2, 1.0],
            &OptimConfig {
                grad_tol: 1e-10,
                max_iter: 5000,
            },
        )
        .unwrap();
        assert!(r.converged, "grad norm {}", r.grad_norm);
        assert!((r.x[0] - 1.0).abs() < 1e-7 && (r.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn large_quadratic_converges_tightly() {
        // tridiagonal quadratic similar in spirit to a discretized functional
        let n = 120;
        let f = |x: &[f64]| {
            let mut v = x[0] * x[0];
            for i in 1..n {
                let d = x[i] - x[i - 1];
                v += d * d;
            }
            v - x[n - 1]
        };
        let g = |x: &[f64]| {
            let mut gr = vec![0.0; n];
            gr[0] = 2.0 * x[0];
            for i in 1..n {
                let d = 2.0 * (x[i] - x[i - 1]);
                gr[i] += d;
                gr[i - 1] -= d;
            }
            gr[n - 1] -= 1.0;
            gr
        };
        let r = minimize(
            &f,
            &g,
            &vec![0.0; n],
            &OptimConfig {
                grad_tol: 1e-11,
                max_iter: 10000,
            },
        )
        .unwrap();
        assert!(r.converged);
        assert!(r.grad_norm < 1e-11);
    }

    #[test]
    fn fd_gradient_matches_analytic() {
        let f = |x: &[f64]| x[0].sin() * x[1] + x[1] * x[1];
        let g = central_difference_gradient(&f, &[0.7, -0.3], 1e-7);
        assert!((g[0] - 0.7f64.cos() * -0.3).abs() < 1e-8);
        assert!((g[1] - (0.7f64.sin() - 0.6)).abs() < 1e-8);
    }

    #[test]
    fn exhausted_budget_is_an_error() {
        let f = |x: &[f64]| x[0].powi(4);
        let g = |x: &[f64]| vec![4.0 * x[0].powi(3)];
        let r = minimize(
            &f,
            &g,
            &[10.0],
            &OptimConfig {
                grad_tol: 1e-300,
                max_iter: 3,
            },
        );
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
