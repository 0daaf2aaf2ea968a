//! Batch driver for the hyperbolic-polynomial experiment suites.
//!
//! A JSON experiment description selects a suite, a polynomial family, a
//! vector source, and a seed; the driver runs the suite inside a fixed-size
//! thread pool and writes two reports: a CSV row table (plot- and
//! diff-friendly) and a JSON summary with verdicts, implied constants,
//! seeds, and versions. Identical description + seed produces byte-identical
//! CSV regardless of thread count.

pub mod report;
pub mod spec;
pub mod suites;

use std::fmt;
use std::path::{Path, PathBuf};

use report::{CsvTable, Summary};
use spec::ExperimentSpec;

/// Failures split by exit code: invalid usage or descriptions exit 2,
/// numerical breakdowns and violated assertions exit 1.
#[derive(Debug)]
pub enum CliError {
    /// Invalid invocation, description file, or parameter combination.
    Usage(String),
    /// An experiment ran but broke down numerically.
    Failure(String),
}

impl CliError {
    /// Process exit code for this failure class.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hyperlab_core::Error> for CliError {
    fn from(e: hyperlab_core::Error) -> Self {
        use hyperlab_core::Error as E;
        match e {
            E::DimensionMismatch { .. }
            | E::InvalidArgument(_)
            | E::BudgetExceeded(_)
            | E::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Resolve the worker count: explicit flag first, then the
/// `HYPERLAB_THREADS` environment variable, then the rayon default.
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("HYPERLAB_THREADS") {
            Ok(text) => Some(text.trim().parse::<usize>().map_err(|_| {
                CliError::Usage(format!(
                    "HYPERLAB_THREADS must be a positive integer, got {text:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Usage("thread count must be ≥ 1".into()));
    }
    Ok(n)
}

/// Run `body` inside a dedicated rayon pool with `threads` workers (library
/// default sizing when `None`). All experiment parallelism nests under this
/// pool; per-trial seeding keeps every result independent of the pool size.
pub fn with_pool<T: Send>(
    threads: Option<usize>,
    body: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
    pool.install(body)
}

/// Everything one invocation produced: the reports plus where they went.
pub struct RunOutput {
    pub summary: Summary,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

/// Run one experiment description and write `<prefix>.csv` / `<prefix>.json`.
pub fn run_experiment(spec: &ExperimentSpec, prefix: &Path) -> Result<RunOutput> {
    spec.validate()?;
    let outcome = suites::run_suite(spec)?;
    finish(
        spec.suite.name(),
        Some(spec.family.label()),
        spec.seed,
        outcome,
        prefix,
    )
}

/// Run the fixed verification battery and write its reports.
pub fn run_verify_all(seed: u64, prefix: &Path) -> Result<RunOutput> {
    let outcome = suites::verify_all(seed)?;
    finish("verify_all", None, seed, outcome, prefix)
}

fn finish(
    suite: &str,
    family: Option<String>,
    seed: u64,
    outcome: suites::SuiteRun,
    prefix: &Path,
) -> Result<RunOutput> {
    let mut table = CsvTable::new();
    for row in outcome.rows {
        table.push(row);
    }
    let summary = Summary::new(
        suite,
        family,
        seed,
        outcome.verdicts,
        outcome.constants,
        outcome.seeds,
        table.len(),
    );
    let (csv_path, json_path) = report::write_reports(prefix, &table, &summary)?;
    Ok(RunOutput {
        summary,
        csv_path,
        json_path,
    })
}
