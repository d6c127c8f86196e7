//! Command execution: dispatch to the solvers, write result tables, record a
//! run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cablerod::discrete::{convergence_sweep, solve_discrete, DiscreteOptConfig, DiscreteRobotSpec};
use cablerod::forward::ForwardCase;
use cablerod::inverse::{track, InverseLog};
use cablerod::loading::{solve_adomian, solve_galerkin, solve_shooting, GalerkinConfig, LoadedBvp};
use cablerod::oracle::oracle_minimize;
use cablerod::params::ActuationState;
use cablerod::shape::BackboneShape;

use crate::config::{ExperimentConfig, LoadingMethod};
use crate::table::Table;

/// What a run produced: configuration echo, version, timestamp, summary
/// metrics, and the emitted files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub timestamp: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputFile>,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    /// What the file holds: shape, track, sweep, chords, series, figure.
    pub role: String,
    pub path: String,
}

impl RunManifest {
    pub fn output_with_role(&self, role: &str) -> Option<&OutputFile> {
        self.outputs.iter().find(|o| o.role == role)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Executes `command` under `config`, writing all outputs below the
/// configured directory.
pub fn run(command: &str, config: &ExperimentConfig) -> anyhow::Result<RunOutcome> {
    let dir = PathBuf::from(&config.output.dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let format = config.output.format;

    let mut outputs = Vec::new();
    let mut metrics = BTreeMap::new();

    match command {
        "forward" => {
            let params = config.robot_params()?;
            let kind = config.case_kind()?;
            let case = ForwardCase::new(kind, params)?;
            let shape = case.forward(config.actuation_state()?, config.solver.samples)?;
            record_shape_metrics(&shape, &mut metrics);
            let path = shape_table(&shape).write_to(&dir, "shape", format)?;
            outputs.push(output("shape", path));
        }
        "oracle" => {
            let params = config.robot_params()?;
            let kind = config.case_kind()?;
            let shape = oracle_minimize(
                &params,
                kind,
                config.actuation_state()?,
                config.solver.samples,
            )?;
            record_shape_metrics(&shape, &mut metrics);
            let path = shape_table(&shape).write_to(&dir, "shape", format)?;
            outputs.push(output("shape", path));
        }
        "inverse" => {
            let params = config.robot_params()?;
            let kind = config.case_kind()?;
            let case = ForwardCase::new(kind, params)?;
            let traj = config.trajectory_spec()?;
            let log = track(&case, &traj, &config.inverse_config())?;
            metrics.insert("max_error".into(), log.max_error);
            metrics.insert("rms_error".into(), log.rms_error);
            metrics.insert("singular_steps".into(), log.singular_steps as f64);
            if let Some(last) = log.records.last() {
                metrics.insert("final_input".into(), last.input_a);
                if let Some(b) = last.input_b {
                    metrics.insert("final_input_2".into(), b);
                }
                metrics.insert("final_x".into(), last.x_tip);
                metrics.insert("final_y".into(), last.y_tip);
            }
            let path = track_table(&log).write_to(&dir, "track", format)?;
            outputs.push(output("track", path));
        }
        "loading" => {
            let params = config.robot_params()?;
            let s = &config.solver;
            let bvp = LoadedBvp::new(params, s.q_x, s.q_y, s.delta_force)?;
            let shape = match s.method {
                LoadingMethod::Shooting => solve_shooting(&bvp, s.shooting_tol)?,
                LoadingMethod::Galerkin => solve_galerkin(
                    &bvp,
                    &GalerkinConfig {
                        basis_count: s.galerkin_terms,
                        ..GalerkinConfig::default()
                    },
                )?,
                LoadingMethod::Adomian => {
                    let sol = solve_adomian(&bvp, s.adomian_order)?;
                    if s.dump_series {
                        let path = series_table(&sol.series).write_to(&dir, "series", format)?;
                        outputs.push(output("series", path));
                    }
                    sol.shape
                }
            };
            let residual = bvp.strong_form_residual(&shape);
            let linf = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            record_shape_metrics(&shape, &mut metrics);
            metrics.insert("residual_linf".into(), linf);
            let path = shape_table(&shape).write_to(&dir, "shape", format)?;
            outputs.push(output("shape", path));
        }
        "discrete" => {
            let params = config.robot_params()?;
            let s = &config.solver;
            let (f1, f2) = match config.actuation_state()? {
                ActuationState::ForcePair { f1, f2 } => (f1, f2),
                ActuationState::ForceDifferential(df) => (df, 0.0),
                other => bail!(
                    "config error: discrete runs take force inputs, got {}",
                    other.mode_name()
                ),
            };
            let spec = DiscreteRobotSpec::new(params.clone(), s.sections)?;
            let cfg = DiscreteOptConfig {
                gradient: s.gradient.into(),
                grad_tol: s.grad_tol,
                max_iter: s.max_iter,
            };
            let sol = solve_discrete(&spec, f1, f2, s.degree, &cfg)?;
            metrics.insert("energy".into(), sol.energy);
            metrics.insert("dl1".into(), sol.dl1);
            metrics.insert("dl2".into(), sol.dl2);
            metrics.insert("kappa_min".into(), sol.kappa_min);
            metrics.insert("kappa_max".into(), sol.kappa_max);
            metrics.insert("kappa_avg".into(), sol.kappa_avg);
            metrics.insert("grad_norm".into(), sol.grad_norm);
            metrics.insert("iterations".into(), sol.iterations as f64);
            // sampled shape of the polynomial solution
            let shape = cablerod::shape::shape_from_theta(
                &params,
                &|x| sol.shape.theta(x),
                Some(&|x| sol.shape.dtheta(x)),
                None,
                s.samples,
            )?;
            record_shape_metrics(&shape, &mut metrics);
            let path = shape_table(&shape).write_to(&dir, "shape", format)?;
            outputs.push(output("shape", path));
            let mut chords = Table::new(&["span", "upper", "lower"]);
            for (j, (u, l)) in sol.chords.upper.iter().zip(&sol.chords.lower).enumerate() {
                chords.push(vec![(j + 1) as f64, *u, *l]);
            }
            let path = chords.write_to(&dir, "chords", format)?;
            outputs.push(output("chords", path));
        }
        "sweep" => {
            let params = config.robot_params()?;
            let s = &config.solver;
            let cfg = DiscreteOptConfig {
                gradient: s.gradient.into(),
                grad_tol: s.grad_tol,
                max_iter: s.max_iter,
            };
            let rows =
                convergence_sweep(&params, &s.delta_forces, &s.sections_list, s.degree, &cfg);
            let mut table = Table::new(&[
                "dF",
                "n",
                "kappa_min",
                "kappa_max",
                "kappa_avg",
                "energy",
                "grad_norm",
                "iterations",
            ]);
            let mut failures = 0usize;
            for row in &rows {
                match &row.result {
                    Ok(sol) => table.push(vec![
                        row.delta_force,
                        row.sections as f64,
                        sol.kappa_min,
                        sol.kappa_max,
                        sol.kappa_avg,
                        sol.energy,
                        sol.grad_norm,
                        sol.iterations as f64,
                    ]),
                    Err(e) => {
                        failures += 1;
                        eprintln!(
                            "sweep row dF={} n={} failed: {e}",
                            row.delta_force, row.sections
                        );
                    }
                }
            }
            metrics.insert("rows".into(), table.rows.len() as f64);
            metrics.insert("failures".into(), failures as f64);
            let path = table.write_to(&dir, "sweep", format)?;
            outputs.push(output("sweep", path));
            if failures > 0 {
                bail!("solver failed on {failures} sweep row(s)");
            }
        }
        other => bail!("config error: unknown command '{other}'"),
    }

    for (k, v) in &metrics {
        if !v.is_finite() {
            bail!("internal error: metric '{k}' is not finite");
        }
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        command: command.to_string(),
        config: config.clone(),
        outputs,
        metrics,
    };
    let manifest_path = dir.join("manifest.json");
    manifest.write(&manifest_path)?;
    Ok(RunOutcome {
        manifest,
        manifest_path,
    })
}

fn output(role: &str, path: PathBuf) -> OutputFile {
    OutputFile {
        role: role.to_string(),
        path: path.to_string_lossy().into_owned(),
    }
}

fn record_shape_metrics(shape: &BackboneShape, metrics: &mut BTreeMap<String, f64>) {
    let (x, y) = shape.tip();
    metrics.insert("tip_x".into(), x);
    metrics.insert("tip_y".into(), y);
    metrics.insert("tip_angle".into(), shape.tip_angle());
    metrics.insert(
        "kappa_tip".into(),
        *shape.kappa.last().expect("shapes are non-empty"),
    );
}

fn shape_table(shape: &BackboneShape) -> Table {
    let mut t = Table::new(&["s", "theta", "kappa", "u", "x", "y"]);
    for i in 0..shape.len() {
        t.push(vec![
            shape.grid[i],
            shape.theta[i],
            shape.kappa[i],
            shape.u[i],
            shape.x[i],
            shape.y[i],
        ]);
    }
    t
}

fn track_table(log: &InverseLog) -> Table {
    let pair = log.records.first().is_some_and(|r| r.input_b.is_some());
    let mut t = if pair {
        Table::new(&[
            "t", "input1", "input2", "x_tip", "y_tip", "x_target", "y_target", "err",
        ])
    } else {
        Table::new(&[
            "t", "input", "x_tip", "y_tip", "x_target", "y_target", "err",
        ])
    };
    for r in &log.records {
        let yt = r.y_target.unwrap_or(f64::NAN);
        if pair {
            t.push(vec![
                r.t,
                r.input_a,
                r.input_b.unwrap_or(f64::NAN),
                r.x_tip,
                r.y_tip,
                r.x_target,
                yt,
                r.error,
            ]);
        } else {
            t.push(vec![
                r.t, r.input_a, r.x_tip, r.y_tip, r.x_target, yt, r.error,
            ]);
        }
    }
    t
}

fn series_table(series: &cablerod::loading::AdomianSeries) -> Table {
    let mut t = Table::new(&["order", "s", "theta_component"]);
    for (order, comp) in series.components.iter().enumerate() {
        for (i, &v) in comp.iter().enumerate() {
            t.push(vec![order as f64, series.grid[i], v]);
        }
    }
    t
}
