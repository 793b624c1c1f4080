use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use qco_core::{Error, Result};

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
}

/// Files and summary lines produced by one subcommand.
#[derive(Debug, Default)]
pub struct Report {
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }
}

/// Writes a CSV with a header row; floats use the shortest round-trip form.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
    report: &mut Report,
) -> Result<()> {
    let path = dir.join(name);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)
        .map_err(|e| io_error(&path, e))?;
    w.write_record(header).map_err(|e| io_error(&path, e))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row.iter().map(|v| format!("{v:?}")))
            .map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    report.outputs.push(name.to_string());
    Ok(())
}

pub fn write_text(dir: &Path, name: &str, text: &str, report: &mut Report) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    report.outputs.push(name.to_string());
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

#[derive(Serialize)]
struct Run<'a> {
    command: &'a str,
    version: &'a str,
    wall_time_s: f64,
    status: &'a str,
    outputs: &'a [String],
    notes: &'a [String],
}

#[derive(Serialize)]
struct Manifest<'a> {
    run: Run<'a>,
    config: &'a RunConfig,
}

/// `manifest.toml`: the command, code version, wall time and the full
/// effective configuration.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    config: &RunConfig,
    wall_time_s: f64,
    result: std::result::Result<&Report, &Error>,
) -> Result<PathBuf> {
    let (status, outputs, notes): (String, &[String], Vec<String>) = match result {
        Ok(r) => ("ok".into(), &r.outputs, r.notes.clone()),
        Err(e) => (format!("error: {}", e.category().as_str()), &[], vec![e.to_string()]),
    };
    let manifest = Manifest {
        run: Run {
            command,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s,
            status: &status,
            outputs,
            notes: &notes,
        },
        config,
    };
    let text = toml::to_string(&manifest)
        .map_err(|e| Error::InvalidInput(format!("manifest serialisation failed: {e}")))?;
    let path = dir.join("manifest.toml");
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}
