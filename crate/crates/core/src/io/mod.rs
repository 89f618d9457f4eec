//! Configuration, orchestration and on-disk artifacts.
//!
//! Every file is written to a temporary sibling and renamed into place, so
//! an interrupted run never leaves a partial file at its final path. Floats
//! are printed with 17 significant digits.

mod cli;
mod config;
mod orchestrate;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use cli::{run_cli, Cli, Subcommand, EXIT_CODES, OUTPUT_ENV};
pub use config::{
    load_config, parse_config, BodyKind, BodySection, DensityKind, DensitySection, HadamardSection, OutputSection,
    RunConfig,
};
pub use orchestrate::{exit_code, orchestrate, RunStatus, RunSummary};

use crate::error::Result;
use crate::flow::{format_float, read_csv, write_csv, Diagnostics};
use crate::lab::{monotonicity_audit, phi_invariance_audit, IdentityReport};
use crate::sphere::{boundary_embedding, SupportField};

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Boundary points as CSV with columns `x1,x2[,x3]`; for n = 3 the meridian
/// curve `φ = 0` of the axisymmetric body.
pub fn boundary_curve_csv(body: &SupportField) -> Result<String> {
    let dim = body.dim();
    let points = boundary_embedding(body)?;
    let mut out = (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.as_slice()[..dim].iter().map(|v| format_float(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Time series plus one boundary curve per labelled snapshot.
pub fn emit_plotdata(
    dir: &Path,
    trajectory: &[Diagnostics],
    snapshots: &[(String, SupportField)],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let series = dir.join("timeseries.csv");
    write_atomic(&series, write_csv(trajectory).as_bytes())?;
    written.push(series);
    for (label, body) in snapshots {
        let path = dir.join("curves").join(format!("{label}.csv"));
        write_atomic(&path, boundary_curve_csv(body)?.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Monotonicity and `Φ` audits replayed from a time-series CSV file.
pub fn audit_time_series(path: &Path) -> Result<[IdentityReport; 2]> {
    let rows = read_csv(&std::fs::read_to_string(path)?)?;
    Ok([monotonicity_audit(&rows), phi_invariance_audit(&rows)])
}
