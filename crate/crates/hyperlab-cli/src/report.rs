//! Report rendering: a fixed-header CSV row table and a versioned JSON
//! summary. Both are rendered from deterministic inputs only, so identical
//! experiments produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{CliError, Result};

/// Every column any suite can emit, in file order. Suites fill the columns
/// their rows use and leave the rest empty, so one header serves all suites
/// (including the mixed rows of `verify_all`).
pub const COLUMNS: &[&str] = &[
    "suite",
    "family",
    "n",
    "d",
    "s",
    "k",
    "r",
    "q_or_delta",
    "t",
    "tau",
    "epsilon",
    "sigma",
    "p_hat",
    "ci_low",
    "ci_high",
    "bound",
    "found_value",
    "lambda_max_sum",
    "lambda_max_mixed",
    "delta_value",
    "implied_constant",
    "verdict",
    "seed",
    "trials",
    "index",
    "position",
    "value",
];

/// Shortest exact decimal form; the same bits always print the same text.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// One CSV row: a sparse map from column name to rendered cell.
#[derive(Clone, Debug, Default)]
pub struct Row {
    cells: BTreeMap<&'static str, String>,
}

impl Row {
    pub fn new(suite: &str, family: &str) -> Self {
        Row::default().set("suite", suite).set("family", family)
    }

    /// Set a cell; the column must be one of [`COLUMNS`].
    pub fn set(mut self, column: &'static str, value: impl Display) -> Self {
        assert!(COLUMNS.contains(&column), "unknown CSV column {column}");
        self.cells.insert(column, value.to_string());
        self
    }

    pub fn set_f(self, column: &'static str, value: f64) -> Self {
        self.set(column, fmt_f64(value))
    }

    fn cell(&self, column: &str) -> &str {
        self.cells.get(column).map(String::as_str).unwrap_or("")
    }
}

/// Accumulated CSV report.
#[derive(Default)]
pub struct CsvTable {
    rows: Vec<Row>,
}

impl CsvTable {
    pub fn new() -> Self {
        CsvTable::default()
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<&str> = COLUMNS.iter().map(|c| row.cell(c)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// One named check. `asserted` verdicts decide the exit code; reported
/// verdicts only record measurements the theory leaves unpinned.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub asserted: bool,
    pub detail: String,
}

impl Verdict {
    pub fn asserted(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed,
            asserted: true,
            detail: detail.into(),
        }
    }

    pub fn reported(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed: true,
            asserted: false,
            detail: detail.into(),
        }
    }

    /// CSV cell for rows tied to this verdict.
    pub fn cell(&self) -> &'static str {
        match (self.asserted, self.passed) {
            (true, true) => "pass",
            (true, false) => "fail",
            (false, _) => "report",
        }
    }
}

/// JSON summary written next to the CSV.
#[derive(Serialize)]
pub struct Summary {
    pub schema: u32,
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub seed: u64,
    pub versions: BTreeMap<&'static str, &'static str>,
    /// Seeds of every internal stream, keyed by what they drive.
    pub seeds: BTreeMap<String, u64>,
    pub implied_constants: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub csv_rows: usize,
    /// True iff every asserted verdict passed; mirrors the exit code.
    pub passed: bool,
}

impl Summary {
    pub fn new(
        suite: &str,
        family: Option<String>,
        seed: u64,
        verdicts: Vec<Verdict>,
        implied_constants: BTreeMap<String, f64>,
        mut seeds: BTreeMap<String, u64>,
        csv_rows: usize,
    ) -> Self {
        seeds.entry("experiment".into()).or_insert(seed);
        let passed = verdicts.iter().filter(|v| v.asserted).all(|v| v.passed);
        let mut versions = BTreeMap::new();
        versions.insert("hyperlab-core", hyperlab_core::VERSION);
        versions.insert("hyperlab-cli", env!("CARGO_PKG_VERSION"));
        Summary {
            schema: 1,
            suite: suite.into(),
            family,
            seed,
            versions,
            seeds,
            implied_constants,
            verdicts,
            csv_rows,
            passed,
        }
    }
}

/// Write `<prefix>.csv` and `<prefix>.json`, creating parent directories.
pub fn write_reports(
    prefix: &Path,
    table: &CsvTable,
    summary: &Summary,
) -> Result<(PathBuf, PathBuf)> {
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::Usage(format!(
                    "cannot create output directory {}: {e}",
                    parent.display()
                ))
            })?;
        }
    }
    let csv_path = prefix.with_extension("csv");
    let json_path = prefix.with_extension("json");
    let json = serde_json::to_string_pretty(summary).expect("summary serializes");
    std::fs::write(&csv_path, table.render())
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", csv_path.display())))?;
    std::fs::write(&json_path, json + "\n")
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", json_path.display())))?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_emits_header_and_sparse_cells() {
        let mut table = CsvTable::new();
        table.push(
            Row::new("eig", "product_3")
                .set("index", 0)
                .set_f("value", 3.0),
        );
        let text = table.render();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        let row = lines.next().unwrap();
        assert!(row.starts_with("eig,product_3,"));
        assert_eq!(row.split(',').count(), COLUMNS.len());
        assert!(row.ends_with(",0,,3"));
    }

    #[test]
    fn float_cells_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 12345.678901234567] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn summary_passes_iff_all_asserted_pass() {
        let verdicts = vec![
            Verdict::asserted("a", true, ""),
            Verdict::reported("b", "measured only"),
        ];
        let s = Summary::new(
            "eig",
            None,
            1,
            verdicts,
            BTreeMap::new(),
            BTreeMap::new(),
            0,
        );
        assert!(s.passed);
        let verdicts = vec![
            Verdict::asserted("a", false, "violated"),
            Verdict::reported("b", ""),
        ];
        let s = Summary::new(
            "eig",
            None,
            1,
            verdicts,
            BTreeMap::new(),
            BTreeMap::new(),
            0,
        );
        assert!(!s.passed);
    }
}
