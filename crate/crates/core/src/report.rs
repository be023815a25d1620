// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Machine-readable experiment reports: JSON for the full report, CSV for
//! the profile series.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Computed exactly up to floating point.
    Exact,
    /// A certified lower bound (power iteration, R-bound search).
    LowerBound,
    /// A Monte Carlo estimate; the standard error is attached.
    MonteCarlo,
    /// Fitted from samples (plateaus, constants over a grid).
    Fitted,
    /// Supplied by the configuration or known analytically.
    Input,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

impl Quantity {
    pub fn new(value: f64, provenance: Provenance) -> Self {
        Self {
            value,
            provenance,
            std_error: None,
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, Provenance::Exact)
    }

    pub fn lower(value: f64) -> Self {
        Self::new(value, Provenance::LowerBound)
    }

    pub fn fitted(value: f64) -> Self {
        Self::new(value, Provenance::Fitted)
    }

    pub fn input(value: f64) -> Self {
        Self::new(value, Provenance::Input)
    }

    pub fn monte_carlo(value: f64, std_error: f64) -> Self {
        Self {
            value,
            provenance: Provenance::MonteCarlo,
            std_error: Some(std_error),
        }
    }

    /// Exact, or a lower bound when `estimate` is set.
    pub fn norm(value: f64, estimate: bool) -> Self {
        if estimate {
            Self::lower(value)
        } else {
            Self::exact(value)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexQuantity {
    pub value: Complex64,
    pub provenance: Provenance,
}

/// Fixed vocabulary of verdict strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictLabel {
    CriterionHolds,
    FailsInLimit,
    Undetermined,
    UniformlyContinuous,
    HypothesisFailsInLimit,
    ChainHolds,
    ChainViolated,
    BoundHolds,
    BoundViolated,
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub verdict: VerdictLabel,
    pub threshold: f64,
    /// Where the threshold comes from.
    pub threshold_source: String,
}

/// A table of equally long columns, one row per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl Series {
    pub fn new(name: &str, columns: &[&str], provenance: Provenance) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// The resolved configuration.
    pub config: serde_json::Value,
    /// Tolerances and thresholds in force.
    pub tolerances: BTreeMap<String, f64>,
    pub constants: BTreeMap<String, Quantity>,
    #[serde(default)]
    pub complex_constants: BTreeMap<String, ComplexQuantity>,
    pub margins: BTreeMap<String, Quantity>,
    pub verdicts: Vec<Verdict>,
    pub series: Vec<Series>,
    /// Full result of the underlying computation.
    pub details: serde_json::Value,
    pub wall_time_s: f64,
}

impl RegularityReport {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
            tolerances: BTreeMap::new(),
            constants: BTreeMap::new(),
            complex_constants: BTreeMap::new(),
            margins: BTreeMap::new(),
            verdicts: Vec::new(),
            series: Vec::new(),
            details: serde_json::Value::Null,
            wall_time_s: 0.0,
        }
    }

    pub fn constant(&mut self, name: &str, q: Quantity) -> &mut Self {
        self.constants.insert(name.to_string(), q);
        self
    }

    pub fn complex_constant(&mut self, name: &str, value: Complex64, provenance: Provenance) -> &mut Self {
        self.complex_constants
            .insert(name.to_string(), ComplexQuantity { value, provenance });
        self
    }

    pub fn margin(&mut self, name: &str, q: Quantity) -> &mut Self {
        self.margins.insert(name.to_string(), q);
        self
    }

    pub fn tolerance(&mut self, name: &str, value: f64) -> &mut Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn verdict(&mut self, name: &str, verdict: VerdictLabel, threshold: f64, source: &str) -> &mut Self {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            verdict,
            threshold,
            threshold_source: source.to_string(),
        });
        self
    }

    pub fn details<T: Serialize>(&mut self, value: &T) -> Result<&mut Self> {
        self.details = to_value(value)?;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// The JSON with the wall-time field zeroed, for reproducibility checks.
    pub fn to_json_untimed(&self) -> Result<String> {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        r.to_json()
    }

    /// Every series in long form: the first column names the series, the
    /// remaining columns are the union of all series columns in order of
    /// first appearance. Missing cells are empty.
    pub fn to_csv(&self) -> String {
        let mut cols: Vec<&str> = Vec::new();
        for s in &self.series {
            for c in &s.columns {
                if !cols.contains(&c.as_str()) {
                    cols.push(c);
                }
            }
        }
        let mut out = String::from("series");
        for c in &cols {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for s in &self.series {
            for row in &s.rows {
                out.push_str(&s.name);
                for c in &cols {
                    out.push(',');
                    if let Some(i) = s.columns.iter().position(|x| x == c) {
                        out.push_str(&format!("{}", row[i]));
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Parses CSV written by [`RegularityReport::to_csv`] back into series.
/// Provenance is not stored in the CSV and comes back as `Fitted`.
pub fn parse_csv(text: &str) -> Result<Vec<Series>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?
        .split(',')
        .collect();
    if header.first() != Some(&"series") {
        return Err(Error::InvalidInput("CSV header must start with 'series'".into()));
    }
    let mut out: Vec<Series> = Vec::new();
    for (ln, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(Error::InvalidInput(format!("CSV row {} has {} cells", ln + 1, cells.len())));
        }
        let mut cols = Vec::new();
        let mut row = Vec::new();
        for (h, c) in header.iter().zip(&cells).skip(1) {
            if !c.is_empty() {
                cols.push(h.to_string());
                row.push(
                    c.parse::<f64>()
                        .map_err(|e| Error::InvalidInput(format!("CSV row {}: {e}", ln + 1)))?,
                );
            }
        }
        match out.last_mut() {
            Some(s) if s.name == cells[0] && s.columns == cols => s.rows.push(row),
            _ => out.push(Series {
                name: cells[0].to_string(),
                columns: cols,
                rows: vec![row],
                provenance: Provenance::Fitted,
            }),
        }
    }
    Ok(out)
}

pub fn to_value<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename. Missing parent directories are created.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
