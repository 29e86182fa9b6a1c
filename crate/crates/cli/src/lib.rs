//! Command-line front end: flag and config parsing, command adapters, and
//! CSV/JSON writers. The binary in `main.rs` only calls [`run`].

// `!(x < y)` is used on purpose so NaN bounds are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{execute, Outcome};
pub use config::{resolve, BranchSel, Cli, Command, Format, RunConfig};
pub use output::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_NONEXISTENCE: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

impl From<homoclinic::Error> for CliError {
    fn from(e: homoclinic::Error) -> Self {
        use homoclinic::Error as E;
        let code = match &e {
            E::InvalidParams(_) | E::InvalidInput(_) => EXIT_CONFIG,
            E::DegenerateParameters { .. } | E::ContinuumOfEquilibria | E::DegenerateAngle => EXIT_DEGENERATE,
            E::Nonexistence { .. } | E::NoSaddle | E::PositiveSignSaddle => EXIT_NONEXISTENCE,
            _ => EXIT_SOLVER,
        };
        CliError::new(code, e.to_string())
    }
}

/// Output path for a tagged table: `out.csv` becomes `out_lower.csv`.
pub fn tagged_path(path: &Path, tag: Option<&str>) -> PathBuf {
    let Some(tag) = tag else { return path.to_path_buf() };
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    path.with_file_name(name)
}

fn write_table(t: &Table, format: Format, w: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Csv => t.write_csv(w),
        Format::Json => t.write_json(w),
    }
}

/// Writes every table to its destination (stdout when no output path is set).
pub fn emit(cfg: &RunConfig, outcome: &Outcome) -> Result<Vec<PathBuf>, CliError> {
    let io_err = |p: &Path, e: io::Error| CliError::new(EXIT_SOLVER, format!("cannot write {}: {e}", p.display()));
    let mut written = Vec::new();
    for t in &outcome.tables {
        match &cfg.output {
            Some(base) => {
                let path = tagged_path(base, t.tag.as_deref());
                let f = File::create(&path).map_err(|e| io_err(&path, e))?;
                let mut w = BufWriter::new(f);
                write_table(t, cfg.format, &mut w).and_then(|_| w.flush()).map_err(|e| io_err(&path, e))?;
                written.push(path);
            }
            None => {
                let mut w = io::stdout().lock();
                write_table(t, cfg.format, &mut w).map_err(|e| io_err(Path::new("<stdout>"), e))?;
            }
        }
    }
    Ok(written)
}

/// Parses `args` (including the program name), runs, writes output, and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve(&cli).and_then(|cfg| {
        let outcome = execute(&cfg)?;
        for n in &outcome.notes {
            eprintln!("{n}");
        }
        for p in emit(&cfg, &outcome)? {
            eprintln!("wrote {}", p.display());
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_paths() {
        assert_eq!(tagged_path(Path::new("d/out.csv"), Some("lower")), PathBuf::from("d/out_lower.csv"));
        assert_eq!(tagged_path(Path::new("out"), Some("upper")), PathBuf::from("out_upper"));
        assert_eq!(tagged_path(Path::new("out.json"), None), PathBuf::from("out.json"));
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(homoclinic::Error::ContinuumOfEquilibria).code, EXIT_DEGENERATE);
        assert_eq!(CliError::from(homoclinic::Error::NoSaddle).code, EXIT_NONEXISTENCE);
        assert_eq!(CliError::from(homoclinic::Error::StepLimit { steps: 1 }).code, EXIT_SOLVER);
    }
}
