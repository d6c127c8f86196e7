//! Column-oriented result tables with deterministic CSV/JSON writers.

use crate::config::OutputFormat;
use std::io::Write;
use std::path::{Path, PathBuf};

/// A rectangular numeric table. CSV numbers carry 17 significant digits so
/// repeated runs are byte-comparable.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let records: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| {
                        let jv = serde_json::Number::from_f64(*v)
                            .map(serde_json::Value::Number)
                            .unwrap_or(serde_json::Value::Null);
                        (c.clone(), jv)
                    })
                    .collect()
            })
            .collect();
        let text = serde_json::to_string_pretty(&records)?;
        writeln!(out, "{text}")
    }

    /// Writes the table under `dir` with the extension implied by `format`,
    /// returning the full path.
    pub fn write_to(
        &self,
        dir: &Path,
        stem: &str,
        format: OutputFormat,
    ) -> std::io::Result<PathBuf> {
        let path = dir.join(match format {
            OutputFormat::Csv => format!("{stem}.csv"),
            OutputFormat::Json => format!("{stem}.json"),
        });
        let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        match format {
            OutputFormat::Csv => self.write_csv(&mut file)?,
            OutputFormat::Json => self.write_json(&mut file)?,
        }
        Ok(path)
    }

    /// Reads a table back from a file previously produced by
    /// [`Table::write_to`], inferring the format from the extension.
    pub fn read_from(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            let records: Vec<serde_json::Map<String, serde_json::Value>> =
                serde_json::from_str(&text)?;
            let columns: Vec<String> = records
                .first()
                .map(|r| r.keys().cloned().collect())
                .unwrap_or_default();
            let rows = records
                .iter()
                .map(|r| {
                    columns
                        .iter()
                        .map(|c| r.get(c).and_then(|v| v.as_f64()).unwrap_or(f64::NAN))
                        .collect()
                })
                .collect();
            Ok(Self { columns, rows })
        } else {
            let mut lines = text.lines();
            let header = lines
                .next()
                .ok_or_else(|| anyhow::anyhow!("empty table file {}", path.display()))?;
            let columns: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
            let mut rows = Vec::new();
            for line in lines {
                if line.is_empty() {
                    continue;
                }
                rows.push(
                    line.split(',')
                        .map(|c| c.parse::<f64>().unwrap_or(f64::NAN))
                        .collect(),
                );
            }
            Ok(Self { columns, rows })
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// 17-significant-digit scientific notation; round-trips f64 exactly.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_to_full_precision() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![std::f64::consts::PI, 1.0 / 3.0]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let vals: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(vals[0], std::f64::consts::PI);
        assert_eq!(vals[1], 1.0 / 3.0);
    }
}
