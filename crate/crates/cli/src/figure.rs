//! Plot-ready data extraction from a finished run.
//!
//! Emits tidy long-format CSV (one series column plus abscissa/ordinate
//! columns) so any external plotting tool can consume the results directly;
//! no rendering happens here.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use crate::runner::RunManifest;
use crate::table::{format_number, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    Shape,
    Tracking,
    Convergence,
}

impl FigureKind {
    pub fn parse(name: &str) -> anyhow::Result<Self> {
        match name {
            "shape" => Ok(Self::Shape),
            "tracking" => Ok(Self::Tracking),
            "convergence" => Ok(Self::Convergence),
            other => bail!("config error: unknown figure kind '{other}'"),
        }
    }

    /// Picks the figure kind implied by the run's outputs.
    pub fn infer(manifest: &RunManifest) -> anyhow::Result<Self> {
        if manifest.output_with_role("track").is_some() {
            Ok(Self::Tracking)
        } else if manifest.output_with_role("sweep").is_some() {
            Ok(Self::Convergence)
        } else if manifest.output_with_role("shape").is_some() {
            Ok(Self::Shape)
        } else {
            bail!("config error: manifest lists no figure-compatible outputs")
        }
    }
}

/// Writes the figure file next to the manifest's other outputs and returns
/// its path.
pub fn emit_figure_data(
    manifest: &RunManifest,
    kind: FigureKind,
    dir: &Path,
) -> anyhow::Result<PathBuf> {
    let mut lines: Vec<String> = Vec::new();
    match kind {
        FigureKind::Shape => {
            let src = manifest
                .output_with_role("shape")
                .context("config error: this run produced no shape output")?;
            let table = Table::read_from(Path::new(&src.path))?;
            let (si, xi, yi) = (col(&table, "s")?, col(&table, "x")?, col(&table, "y")?);
            lines.push("series,s,x,y".into());
            for row in &table.rows {
                lines.push(format!(
                    "backbone,{},{},{}",
                    format_number(row[si]),
                    format_number(row[xi]),
                    format_number(row[yi])
                ));
            }
        }
        FigureKind::Tracking => {
            let src = manifest
                .output_with_role("track")
                .context("config error: this run produced no tracking output")?;
            let table = Table::read_from(Path::new(&src.path))?;
            let ti = col(&table, "t")?;
            let pair = table.column_index("y_target").is_some()
                && table
                    .rows
                    .first()
                    .is_some_and(|r| !r[table.column_index("y_target").unwrap()].is_nan());
            lines.push("series,t,value".into());
            let xt = col(&table, "x_target")?;
            let xr = col(&table, "x_tip")?;
            for row in &table.rows {
                lines.push(format!(
                    "target,{},{}",
                    format_number(row[ti]),
                    format_number(row[xt])
                ));
            }
            for row in &table.rows {
                lines.push(format!(
                    "realized,{},{}",
                    format_number(row[ti]),
                    format_number(row[xr])
                ));
            }
            if pair {
                let yt = col(&table, "y_target")?;
                let yr = col(&table, "y_tip")?;
                for row in &table.rows {
                    lines.push(format!(
                        "target_y,{},{}",
                        format_number(row[ti]),
                        format_number(row[yt])
                    ));
                }
                for row in &table.rows {
                    lines.push(format!(
                        "realized_y,{},{}",
                        format_number(row[ti]),
                        format_number(row[yr])
                    ));
                }
            }
        }
        FigureKind::Convergence => {
            let src = manifest
                .output_with_role("sweep")
                .context("config error: this run produced no sweep output")?;
            let table = Table::read_from(Path::new(&src.path))?;
            let (fi, ni, ki) = (
                col(&table, "dF")?,
                col(&table, "n")?,
                col(&table, "kappa_avg")?,
            );
            lines.push("series,n,kappa_avg".into());
            for row in &table.rows {
                lines.push(format!(
                    "dF={},{},{}",
                    row[fi],
                    format_number(row[ni]),
                    format_number(row[ki])
                ));
            }
        }
    }
    let stem = match kind {
        FigureKind::Shape => "figure_shape",
        FigureKind::Tracking => "figure_tracking",
        FigureKind::Convergence => "figure_convergence",
    };
    let path = dir.join(format!("{stem}.csv"));
    std::fs::write(&path, lines.join("\n") + "\n")?;
    Ok(path)
}

fn col(table: &Table, name: &str) -> anyhow::Result<usize> {
    table
        .column_index(name)
        .with_context(|| format!("config error: column '{name}' missing from the source table"))
}
