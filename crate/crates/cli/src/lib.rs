//! The `curvlab` command-line front end: file formats, reports and the
//! seeded verification suites.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::CurvatureKind;
use crate::error::{CliError, Result};
use crate::report::{Operation, ReportFile, Timing};
use crate::verify::Suite;

#[derive(Parser, Debug)]
#[command(name = "curvlab", version, about = "Exact curvature invariants and local equivalence tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a curvature tensor of a field.
    Curvature {
        #[arg(long, value_enum)]
        kind: CurvatureKind,
        /// Comma-separated rational coordinates; omit to get the polynomial field.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        file: PathBuf,
    },
    /// Decide whether two fields agree at first order at a point.
    Equivalence {
        #[arg(long)]
        point: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
        a: PathBuf,
        b: PathBuf,
    },
    /// Apply a gauge transformation or diffeomorphism to a field.
    Transform {
        #[arg(long)]
        by: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        file: PathBuf,
    },
    /// Run a seeded property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn stamp(report: &mut ReportFile, start: Option<Instant>) {
    if let Some(s) = start {
        report.timing = Some(Timing { elapsed_ms: s.elapsed().as_secs_f64() * 1e3 });
    }
}

/// Executes one parsed command; `Ok(false)` means a verify suite failed.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<bool> {
    let limits = commands::limits_from_env()?;
    match cli.command {
        Command::Curvature { kind, point, out, timing, file } => {
            let start = timing.then(Instant::now);
            let mut report = commands::curvature(kind, point.as_deref(), &read(&file)?, &limits)?;
            stamp(&mut report, start);
            emit(&report.to_json(), out.as_deref(), stdout)?;
            Ok(true)
        }
        Command::Equivalence { point, out, timing, a, b } => {
            let start = timing.then(Instant::now);
            let mut report = commands::equivalence(&point, &read(&a)?, &read(&b)?, &limits)?;
            stamp(&mut report, start);
            emit(&report.to_json(), out.as_deref(), stdout)?;
            Ok(true)
        }
        Command::Transform { by, out, file } => {
            let spec = commands::transform(&read(&by)?, &read(&file)?, &limits)?;
            emit(&spec.to_json(), out.as_deref(), stdout)?;
            Ok(true)
        }
        Command::Verify { suite, seed, count, out, timing } => {
            let start = timing.then(Instant::now);
            let outcome = verify::run_suite(suite, seed, count);
            let passed = outcome.passed();
            let mut report = ReportFile::new(Operation {
                command: "verify".into(),
                suite: Some(suite.as_str().into()),
                seed: Some(seed),
                count: Some(count),
                ..Operation::default()
            });
            report.properties = outcome.properties;
            report.failure = outcome.failure;
            report.notes = outcome.notes;
            stamp(&mut report, start);
            emit(&report.to_json(), out.as_deref(), stdout)?;
            Ok(passed)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli, stdout) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("curvlab: verification failed");
            1
        }
        Err(e) => {
            eprintln!("curvlab: {e}");
            e.exit_code()
        }
    }
}
