//! Command-line entry point: `run` executes one JSON-described experiment,
//! `verify-all` executes the fixed battery, `eig` prints one spectrum.
//!
//! Exit codes: 0 when every asserted verdict passed, 1 when an asserted
//! verdict failed or a numerical/hypothesis error stopped the run, 2 for
//! usage errors (bad flags, malformed descriptions, budget violations).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperlab_cli::report::fmt_f64;
use hyperlab_cli::spec::{ExperimentSpec, FamilySpec};
use hyperlab_cli::{
    resolve_threads, run_experiment, run_verify_all, with_pool, CliError, Result, RunOutput,
};
use hyperlab_core::spectra::eigenvalues;
use hyperlab_core::PointVec;

#[derive(Parser)]
#[command(
    name = "hyperlab",
    version,
    about = "Batch experiments on hyperbolic-polynomial eigenvalue calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON file; writes <prefix>.csv and <prefix>.json.
    Run {
        /// Path to the experiment description (JSON).
        spec: PathBuf,
        /// Worker threads (overrides HYPERLAB_THREADS; default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Report path prefix (default: the description's `output`, else the spec filename).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the fixed verification battery across every suite.
    VerifyAll {
        /// Master seed; every internal stream is derived from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (overrides HYPERLAB_THREADS; default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Report path prefix.
        #[arg(long, default_value = "verify_all")]
        out: PathBuf,
    },
    /// Print the eigenvalues of one point under a named family, largest first.
    Eig {
        /// Family: product | determinant_symmetric | lorentz | elementary_symmetric.
        #[arg(long)]
        family: String,
        /// Coordinate count (product, lorentz, elementary_symmetric).
        #[arg(long)]
        m: Option<usize>,
        /// Matrix side (determinant_symmetric); the point packs a symmetric matrix.
        #[arg(long)]
        d: Option<usize>,
        /// Elementary-symmetric degree.
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated coordinates of the point.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        x: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { spec, threads, out } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", spec.display())))?;
            let parsed = ExperimentSpec::from_json(&text)?;
            let prefix = out
                .or_else(|| parsed.output.clone().map(PathBuf::from))
                .unwrap_or_else(|| spec.with_extension(""));
            let threads = resolve_threads(threads)?;
            let output = with_pool(threads, || run_experiment(&parsed, &prefix))?;
            Ok(finish(&output))
        }
        Command::VerifyAll { seed, threads, out } => {
            let threads = resolve_threads(threads)?;
            let output = with_pool(threads, || run_verify_all(seed, &out))?;
            Ok(finish(&output))
        }
        Command::Eig { family, m, d, k, x } => {
            let form = family_from_args(&family, m, d, k)?.build()?;
            let point = PointVec::new(x)?;
            let spectrum = eigenvalues(&form, &point)?;
            let line: Vec<String> = spectrum.values().iter().copied().map(fmt_f64).collect();
            println!("{}", line.join(", "));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn family_from_args(
    family: &str,
    m: Option<usize>,
    d: Option<usize>,
    k: Option<usize>,
) -> Result<FamilySpec> {
    let need = |value: Option<usize>, flag: &str| {
        value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for family `{family}`")))
    };
    match family {
        "product" => Ok(FamilySpec::Product { m: need(m, "m")? }),
        "determinant_symmetric" => Ok(FamilySpec::DeterminantSymmetric { d: need(d, "d")? }),
        "lorentz" => Ok(FamilySpec::Lorentz { m: need(m, "m")? }),
        "elementary_symmetric" => Ok(FamilySpec::ElementarySymmetric {
            m: need(m, "m")?,
            k: need(k, "k")?,
        }),
        other => Err(CliError::Usage(format!(
            "unknown family `{other}`; expected product, determinant_symmetric, lorentz, or elementary_symmetric"
        ))),
    }
}

/// Print verdict lines and the final result; the exit code reflects only
/// asserted verdicts.
fn finish(output: &RunOutput) -> ExitCode {
    for v in &output.summary.verdicts {
        println!("[{:<6}] {:<55} {}", v.cell(), v.name, v.detail);
    }
    println!(
        "wrote {} and {}",
        output.csv_path.display(),
        output.json_path.display()
    );
    println!(
        "RESULT: {}",
        if output.summary.passed {
            "PASS"
        } else {
            "FAIL"
        }
    );
    if output.summary.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
