//! Energy minimization for disk-discretized robots.
//!
//! Cables run as straight chords between consecutive disks, so the cable
//! displacement seen at the actuator is the rod length minus the accumulated
//! chord lengths. The equilibrium shape minimizes
//!
//! ```text
//! Pi = int_0^L EI/2 theta'^2 ds - F1 dl1(theta) - F2 dl2(theta)
//! dl_sigma = L - sum_j C_j^sigma
//! ```
//!
//! over a polynomial tangent angle theta(s) = sum c_i s^i. The same
//! quasi-Newton machinery doubles as the numeric oracle for the analytic
//! forward models (see [`crate::oracle`]).

use crate::error::{Error, Result};
use crate::optim::{central_difference_gradient, minimize, OptimConfig};
use crate::params::RobotParams;
use crate::quadrature::gauss_legendre_rule;

use rayon::prelude::*;

type GradientFn<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

/// A rod divided into `sections` equal spans with rigid disks at the joints.
#[derive(Debug, Clone)]
pub struct DiscreteRobotSpec {
    params: RobotParams,
    sections: usize,
}

impl DiscreteRobotSpec {
    /// Requires constant spacing and rigidity; disks share one spacing W.
    pub fn new(params: RobotParams, sections: usize) -> Result<Self> {
        params.constant_spacing()?;
        params.constant_rigidity()?;
        if sections == 0 {
            return Err(Error::InvalidParameter(
                "section count must be at least 1".into(),
            ));
        }
        Ok(Self { params, sections })
    }

    pub fn params(&self) -> &RobotParams {
        &self.params
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    /// Disk position s_j = j L / n.
    pub fn disk_position(&self, j: usize) -> f64 {
        self.params.length * j as f64 / self.sections as f64
    }
}

/// Tangent angle as a polynomial with no constant term, theta(0) = 0 by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialShape {
    /// c_1 .. c_m of theta(s) = sum c_i s^i.
    pub coefficients: Vec<f64>,
}

impl PolynomialShape {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    /// Constant-curvature seed: c_1 = kappa, higher coefficients zero.
    pub fn constant_curvature(kappa: f64, degree: usize) -> Self {
        let mut c = vec![0.0; degree];
        if degree > 0 {
            c[0] = kappa;
        }
        Self { coefficients: c }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn theta(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = (acc + c) * s;
        }
        acc
    }

    pub fn dtheta(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &c) in self.coefficients.iter().enumerate().rev() {
            acc = acc * s + (i as f64 + 1.0) * c;
        }
        acc
    }
}

/// Straight-cable chord lengths per span, for the upper (+1) and lower (-1)
/// cables.
#[derive(Debug, Clone)]
pub struct ChordSet {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl ChordSet {
    /// dl1 = L - sum upper, dl2 = L - sum lower.
    pub fn cable_displacements(&self, length: f64) -> (f64, f64) {
        let s1: f64 = self.upper.iter().sum();
        let s2: f64 = self.lower.iter().sum();
        (length - s1, length - s2)
    }
}

/// Span integrals of cos/sin(theta) and the chord geometry for one shape.
struct ChordWork {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChordWork {
    fn new() -> Self {
        Self::with_rule(32)
    }

    fn with_rule(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre_rule(n);
        Self { nodes, weights }
    }

    /// (A, B, C) per span and cable sign.
    fn chords(&self, spec: &DiscreteRobotSpec, shape: &PolynomialShape) -> ChordSet {
        let n = spec.sections;
        let w_half = 0.5 * spec.params.constant_spacing().expect("validated");
        let mut upper = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        for j in 1..=n {
            let a = spec.disk_position(j - 1);
            let b = spec.disk_position(j);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let (mut ic, mut is) = (0.0, 0.0);
            for (&x, &wt) in self.nodes.iter().zip(&self.weights) {
                let t = shape.theta(mid + half * x);
                ic += wt * t.cos();
                is += wt * t.sin();
            }
            ic *= half;
            is *= half;
            let (tha, thb) = (shape.theta(a), shape.theta(b));
            for (sign, out) in [(1.0, &mut upper), (-1.0, &mut lower)] {
                let ax = ic - sign * w_half * (thb.sin() - tha.sin());
                let bx = is + sign * w_half * (thb.cos() - tha.cos());
                out.push(ax.hypot(bx));
            }
        }
        ChordSet { upper, lower }
    }
}

/// Chord lengths of both cables for the given shape.
pub fn cable_chords(spec: &DiscreteRobotSpec, shape: &PolynomialShape) -> ChordSet {
    ChordWork::new().chords(spec, shape)
}

/// Total potential energy of the discrete robot under cable forces
/// `f1`, `f2` (J).
pub fn discrete_energy(spec: &DiscreteRobotSpec, shape: &PolynomialShape, f1: f64, f2: f64) -> f64 {
    let work = ChordWork::new();
    energy_impl(spec, shape, f1, f2, &work)
}

fn energy_impl(
    spec: &DiscreteRobotSpec,
    shape: &PolynomialShape,
    f1: f64,
    f2: f64,
    work: &ChordWork,
) -> f64 {
    let l = spec.params.length;
    let ei = spec.params.youngs_modulus * spec.params.constant_rigidity().expect("validated");
    let mid = 0.5 * l;
    let mut bend = 0.0;
    for (&x, &wt) in work.nodes.iter().zip(&work.weights) {
        let d = shape.dtheta(mid + mid * x);
        bend += wt * d * d;
    }
    bend *= 0.5 * ei * mid;
    let chords = work.chords(spec, shape);
    let (dl1, dl2) = chords.cable_displacements(l);
    bend - f1 * dl1 - f2 * dl2
}

/// How [`solve_discrete`] obtains gradients of the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMode {
    /// Central differences with step 1e-7 scaled by coefficient magnitude.
    #[default]
    CentralDifference,
    /// Closed-form differentiation of the bending and chord terms.
    Analytic,
}

/// Options for the discrete energy minimization.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteOptConfig {
    pub gradient: GradientMode,
    /// Stationarity gate on the central-difference gradient inf-norm of the
    /// returned solution (natural coefficients).
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for DiscreteOptConfig {
    fn default() -> Self {
        Self {
            gradient: GradientMode::CentralDifference,
            grad_tol: 1e-6,
            max_iter: 2000,
        }
    }
}

/// A stationary point of the discrete energy.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub shape: PolynomialShape,
    /// Energy at the solution, J.
    pub energy: f64,
    /// Cable displacements at the solution, m.
    pub dl1: f64,
    pub dl2: f64,
    /// Per-span chord lengths.
    pub chords: ChordSet,
    /// Curvature statistics over 1001 samples of the analytic derivative.
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub kappa_avg: f64,
    /// Central-difference gradient inf-norm at the solution.
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Minimizes the discrete energy over a degree-`degree` polynomial shape.
///
/// The equality constraints tying dl1/dl2 to the chords are substituted into
/// the objective, leaving an unconstrained problem; the iteration starts
/// from the constant-curvature shape of the equivalent force differential.
pub fn solve_discrete(
    spec: &DiscreteRobotSpec,
    f1: f64,
    f2: f64,
    degree: usize,
    cfg: &DiscreteOptConfig,
) -> Result<DiscreteSolution> {
    if degree == 0 {
        return Err(Error::InvalidParameter(
            "polynomial degree must be at least 1".into(),
        ));
    }
    let l = spec.params.length;
    let w = spec.params.constant_spacing()?;
    let ei = spec.params.youngs_modulus * spec.params.constant_rigidity()?;
    let work = ChordWork::new();

    // optimize scaled coefficients chat_i = c_i L^i, i.e. theta as a
    // polynomial in s/L; this keeps the Hessian well conditioned across
    // degrees
    let to_natural = |scaled: &[f64]| -> Vec<f64> {
        scaled
            .iter()
            .enumerate()
            .map(|(i, &v)| v / l.powi(i as i32 + 1))
            .collect()
    };
    let objective = |scaled: &[f64]| -> f64 {
        let shape = PolynomialShape::new(to_natural(scaled));
        energy_impl(spec, &shape, f1, f2, &work)
    };

    let kappa_eq = w * (f1 - f2) / (2.0 * ei);
    let mut x0 = vec![0.0; degree];
    x0[0] = kappa_eq * l;
    let energy_start = objective(&x0);

    let grad: GradientFn<'_> = match cfg.gradient {
        GradientMode::CentralDifference => {
            Box::new(|x: &[f64]| central_difference_gradient(&objective, x, 1e-7))
        }
        GradientMode::Analytic => {
            let spec2 = spec.clone();
            Box::new(move |x: &[f64]| analytic_gradient_scaled(&spec2, x, f1, f2))
        }
    };

    let internal = OptimConfig {
        grad_tol: 1e-9 * (1.0 + f1.abs() + f2.abs()),
        max_iter: cfg.max_iter,
    };
    let result = match minimize(&objective, &grad, &x0, &internal) {
        Ok(r) => r,
        Err(Error::NonConvergence(msg)) => return Err(Error::NonConvergence(msg)),
        Err(e) => return Err(e),
    };

    let shape = PolynomialShape::new(to_natural(&result.x));
    let natural_obj =
        |c: &[f64]| -> f64 { energy_impl(spec, &PolynomialShape::new(c.to_vec()), f1, f2, &work) };
    let fd = central_difference_gradient(&natural_obj, &shape.coefficients, 1e-7);
    let grad_norm = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if grad_norm > cfg.grad_tol {
        return Err(Error::NonConvergence(format!(
            "discrete energy minimization stalled with gradient norm {grad_norm:.3e} \
             above tolerance {:.3e}",
            cfg.grad_tol
        )));
    }

    let energy = result.value;
    debug_assert!(energy <= energy_start + 1e-15);
    let chords = work.chords(spec, &shape);
    let (dl1, dl2) = chords.cable_displacements(l);
    if chords.upper.iter().chain(&chords.lower).any(|&c| c <= 0.0) {
        return Err(Error::PhysicalValidity(
            "a cable chord collapsed to non-positive length".into(),
        ));
    }

    let (mut kmin, mut kmax, mut ksum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    const KAPPA_SAMPLES: usize = 1001;
    for i in 0..KAPPA_SAMPLES {
        let s = l * i as f64 / (KAPPA_SAMPLES - 1) as f64;
        let k = shape.dtheta(s);
        kmin = kmin.min(k);
        kmax = kmax.max(k);
        ksum += k;
    }

    Ok(DiscreteSolution {
        shape,
        energy,
        dl1,
        dl2,
        chords,
        kappa_min: kmin,
        kappa_max: kmax,
        kappa_avg: ksum / KAPPA_SAMPLES as f64,
        grad_norm,
        iterations: result.iterations,
    })
}

/// Gradient of the energy with respect to the scaled coefficients.
fn analytic_gradient_scaled(
    spec: &DiscreteRobotSpec,
    scaled: &[f64],
    f1: f64,
    f2: f64,
) -> Vec<f64> {
    let l = spec.params.length;
    let ei = spec.params.youngs_modulus * spec.params.constant_rigidity().expect("validated");
    let w_half = 0.5 * spec.params.constant_spacing().expect("validated");
    let m = scaled.len();
    let (nodes, weights) = gauss_legendre_rule(32);

    let theta = |s: f64| -> f64 {
        let t = s / l;
        let mut acc = 0.0;
        for &c in scaled.iter().rev() {
            acc = (acc + c) * t;
        }
        acc
    };
    let dtheta = |s: f64| -> f64 {
        let t = s / l;
        let mut acc = 0.0;
        for (i, &c) in scaled.iter().enumerate().rev() {
            acc = acc * t + (i as f64 + 1.0) * c;
        }
        acc / l
    };
    // basis phi_i(s) = (s/L)^(i+1), derivative (i+1)(s/L)^i / L
    let phi = |i: usize, s: f64| (s / l).powi(i as i32 + 1);
    let dphi = |i: usize, s: f64| (i as f64 + 1.0) * (s / l).powi(i as i32) / l;

    let mut g = vec![0.0; m];
    // bending term
    let mid = 0.5 * l;
    for (&x, &wt) in nodes.iter().zip(&weights) {
        let s = mid + mid * x;
        let d = dtheta(s);
        for (i, gi) in g.iter_mut().enumerate() {
            *gi += wt * ei * d * dphi(i, s) * mid;
        }
    }
    // chord terms: dPi/dc += F_sigma * dC_j/dc
    let n = spec.sections;
    for j in 1..=n {
        let a = spec.disk_position(j - 1);
        let b = spec.disk_position(j);
        let smid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let (mut ic, mut is) = (0.0, 0.0);
        let mut dic = vec![0.0; m];
        let mut dis = vec![0.0; m];
        for (&x, &wt) in nodes.iter().zip(&weights) {
            let s = smid + half * x;
            let t = theta(s);
            let (sin_t, cos_t) = t.sin_cos();
            ic += wt * cos_t;
            is += wt * sin_t;
            for i in 0..m {
                let p = phi(i, s);
                dic[i] -= wt * sin_t * p;
                dis[i] += wt * cos_t * p;
            }
        }
        ic *= half;
        is *= half;
        for i in 0..m {
            dic[i] *= half;
            dis[i] *= half;
        }
        let (tha, thb) = (theta(a), theta(b));
        let (sa, ca) = tha.sin_cos();
        let (sb, cb) = thb.sin_cos();
        for (sign, force) in [(1.0, f1), (-1.0, f2)] {
            let ax = ic - sign * w_half * (sb - sa);
            let bx = is + sign * w_half * (cb - ca);
            let c = ax.hypot(bx);
            for i in 0..m {
                let da = dic[i] - sign * w_half * (cb * phi(i, b) - ca * phi(i, a));
                let db = dis[i] + sign * w_half * (-sb * phi(i, b) + sa * phi(i, a));
                g[i] += force * (ax * da + bx * db) / c;
            }
        }
    }
    g
}

/// One solved row of the discrete-to-continuous study.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub delta_force: f64,
    pub sections: usize,
    pub result: Result<DiscreteSolution>,
}

/// Solves every (delta_force, sections) combination; rows run in parallel
/// and are returned in input order. Per-row failures are carried in the row
/// rather than aborting the sweep.
pub fn convergence_sweep(
    params: &RobotParams,
    delta_forces: &[f64],
    sections: &[usize],
    degree: usize,
    cfg: &DiscreteOptConfig,
) -> Vec<SweepOutcome> {
    let combos: Vec<(f64, usize)> = delta_forces
        .iter()
        .flat_map(|&df| sections.iter().map(move |&n| (df, n)))
        .collect();
    combos
        .into_par_iter()
        .map(|(df, n)| {
            let result = DiscreteRobotSpec::new(params.clone(), n)
                .and_then(|spec| solve_discrete(&spec, df, 0.0, degree, cfg));
            SweepOutcome {
                delta_force: df,
                sections: n,
                result,
            }
        })
        .collect()
}
