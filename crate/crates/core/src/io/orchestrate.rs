use std::path::{Path, PathBuf};

use serde::Serialize;

use super::cli::Subcommand;
use super::config::RunConfig;
use super::{boundary_curve_csv, emit_plotdata, write_atomic, write_json};
use crate::error::{Error, Result};
use crate::flow::{run, stationarity_residual, write_csv, Diagnostics, FlowState};
use crate::functionals::{evaluate_body, FunctionalReport};
use crate::lab::{hadamard_sweep, identity_battery, monotonicity_audit, phi_invariance_audit, IdentityReport};
use crate::sphere::{FieldSnapshot, SupportField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// The flow stopped at `max_steps` above the residual tolerance.
    NotConverged,
    /// At least one identity or audit failed.
    VerificationFailed,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub status: RunStatus,
    pub files: Vec<PathBuf>,
    /// Human-readable progress lines.
    pub lines: Vec<String>,
}

impl RunSummary {
    fn new() -> Self {
        RunSummary { status: RunStatus::Ok, files: Vec::new(), lines: Vec::new() }
    }

    fn write_json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        write_json(&path, value)?;
        self.files.push(path);
        Ok(())
    }

    fn write_text(&mut self, path: PathBuf, text: &str) -> Result<()> {
        write_atomic(&path, text.as_bytes())?;
        self.files.push(path);
        Ok(())
    }
}

/// Exit status for an error, as documented in `--help`.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Parameter(_) | Error::UnsupportedDimension(_) => 2,
        Error::NonPositive { .. }
        | Error::ConvexityLoss { .. }
        | Error::GridTooSmall { .. }
        | Error::LengthMismatch { .. }
        | Error::GridMismatch => 3,
        Error::Capability { .. } => 4,
        Error::IllConditioned { .. } | Error::SolveFailed(_) | Error::Sign(_) | Error::OutsideDomain(_) => 5,
        Error::Stiffness(_) => 6,
        Error::Io(_) | Error::Json(_) | Error::Snapshot(_) => 7,
    }
}

#[derive(Serialize)]
struct StaticReport {
    dim: usize,
    k: usize,
    nodes: usize,
    backend: &'static str,
    report: FunctionalReport,
    tau: f64,
    residual: f64,
    boundary_residual: f64,
    hessian_residual: f64,
}

#[derive(Serialize)]
struct FinalState<'a> {
    t: f64,
    steps: usize,
    converged: bool,
    tau: f64,
    eta: f64,
    residual: f64,
    alerts: &'a [String],
    field: FieldSnapshot,
}

fn static_row(
    report: &FunctionalReport,
    body: &SupportField,
    min_lambda: f64,
    max_lambda: f64,
    residual: f64,
) -> Diagnostics {
    Diagnostics {
        t: 0.0,
        phi: report.phi,
        t_tilde: report.t_boundary,
        eta: report.eta,
        pohozaev_relerr: report.pohozaev_relerr,
        min_h: body.min(),
        max_h: body.max(),
        min_lambda,
        max_lambda,
        residual,
    }
}

/// Run one subcommand, writing its artifacts under `out`.
pub fn orchestrate(cfg: &RunConfig, subcommand: Subcommand, out: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let grid = cfg.sphere_grid()?;
    let body = cfg.initial_body(&grid)?;
    let f = cfg.density_field(&grid)?;
    let k = cfg.order;
    let mut summary = RunSummary::new();
    match subcommand {
        Subcommand::SolveInterior | Subcommand::Functionals => {
            let eval = evaluate_body(&body, &f, k, &cfg.mfs)?;
            let residual = stationarity_residual(&eval, &f);
            let row =
                static_row(&eval.report, &body, eval.curvature.min_radius(), eval.curvature.max_radius(), residual);
            summary.write_text(out.join("report.csv"), &write_csv(&[row]))?;
            summary.write_json(
                out.join("functionals.json"),
                &StaticReport {
                    dim: body.dim(),
                    k,
                    nodes: body.len(),
                    backend: eval.solution.backend().tag(),
                    report: eval.report,
                    tau: eval.report.tau(),
                    residual,
                    boundary_residual: eval.solution.boundary_residual(),
                    hessian_residual: eval.solution.residual_report(),
                },
            )?;
            if subcommand == Subcommand::SolveInterior {
                summary.write_json(out.join("solution.json"), &eval.solution.snapshot())?;
                summary.write_json(out.join("body.json"), &body.snapshot())?;
                summary.write_text(out.join("boundary.csv"), &boundary_curve_csv(&body)?)?;
            }
            summary.lines.push(format!(
                "T_tilde = {:.12e}  T_k = {:.12e}  eta = {:.12e}  pohozaev_relerr = {:.3e}",
                eval.report.t_boundary, eval.report.t_volume, eval.report.eta, eval.report.pohozaev_relerr
            ));
        }
        Subcommand::Flow => {
            let stride = cfg.output.snapshot_stride;
            let mut snapshots: Vec<(String, SupportField)> = Vec::new();
            let snap_dir = out.join("snapshots");
            let mut record = |state: &FlowState| -> Result<()> {
                if stride > 0 && state.step % stride == 0 {
                    let label = format!("step_{:06}", state.step);
                    write_json(&snap_dir.join(format!("{label}.json")), &state.body.snapshot())?;
                    snapshots.push((label, state.body.clone()));
                }
                Ok(())
            };
            let outcome = run(body, &f, k, &cfg.mfs, &cfg.flow, &mut record)?;
            for (label, _) in &snapshots {
                summary.files.push(snap_dir.join(format!("{label}.json")));
            }
            snapshots.push(("final".into(), outcome.state.body.clone()));
            summary.files.extend(emit_plotdata(out, &outcome.trajectory, &snapshots)?);
            let state = &outcome.state;
            summary.write_json(
                out.join("final.json"),
                &FinalState {
                    t: state.t,
                    steps: state.step,
                    converged: outcome.converged,
                    tau: state.tau(),
                    eta: state.report().eta,
                    residual: state.residual,
                    alerts: &outcome.alerts,
                    field: state.body.snapshot(),
                },
            )?;
            summary.lines.push(format!(
                "{} after {} steps at t = {:.6e}: residual = {:.3e}, tau = {:.12e}",
                if outcome.converged { "converged" } else { "stopped" },
                state.step,
                state.t,
                state.residual,
                state.tau()
            ));
            summary.lines.extend(outcome.alerts.iter().map(|a| format!("alert: {a}")));
            if !outcome.converged {
                summary.status = RunStatus::NotConverged;
            }
        }
        Subcommand::CheckHadamard => {
            let direction = cfg.hadamard_direction(&grid)?;
            let sweep = hadamard_sweep(&body, &direction, &cfg.hadamard.eps, k, &cfg.mfs)?;
            summary.lines.extend(sweep.reports.iter().map(IdentityReport::summary));
            summary.lines.push(format!("observed orders: {:?}", sweep.observed_order));
            if sweep.reports.iter().any(|r| !r.pass) {
                summary.status = RunStatus::VerificationFailed;
            }
            summary.write_json(out.join("hadamard.json"), &sweep)?;
        }
        Subcommand::Verify => {
            let mut reports = identity_battery(&cfg.mfs)?;
            let outcome = run(body, &f, k, &cfg.mfs, &cfg.flow, |_| Ok(()))?;
            reports.push(monotonicity_audit(&outcome.trajectory).with_param("source", "configured flow"));
            reports.push(phi_invariance_audit(&outcome.trajectory).with_param("source", "configured flow"));
            summary.lines.extend(reports.iter().map(IdentityReport::summary));
            if reports.iter().any(|r| !r.pass) {
                summary.status = RunStatus::VerificationFailed;
            }
            summary.write_json(out.join("verify.json"), &reports)?;
            summary.write_text(out.join("verify_timeseries.csv"), &write_csv(&outcome.trajectory))?;
        }
    }
    Ok(summary)
}
