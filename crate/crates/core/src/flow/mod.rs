//! Normalized flow `∂h/∂t = (h/f)|Du|^{k+1}σ_{n−k} − η(t)h`.
//!
//! `η` is chosen so that `Φ = ∫ h f dx` is constant; stationary points are
//! solutions of `f = τ|Du|^{k+1}σ_{n−k}` with `τ = 1/η`.

mod density;
mod diagnostics;

use serde::{Deserialize, Serialize};

pub use density::{DensityField, DensitySnapshot};
pub use diagnostics::{
    csv_header, format_float, read_csv, write_csv, BoundMonitor, Diagnostics, BOUND_FACTOR, CSV_HEADER,
};

use crate::error::{Error, Result};
use crate::functionals::{evaluate_body, BodyEvaluation};
use crate::interior::MfsConfig;
use crate::sphere::{certify_convex, SupportField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Euler,
    #[default]
    Rk2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// First trial step; `None` means `10⁻³ × min_i h_i/|rhs_i|` at `t = 0`.
    pub dt_init: Option<f64>,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Largest admissible `max_i |dt·rhs_i/h_i|`.
    pub safety: f64,
    /// Fraction of the explicit stability limit of the linearized flow a step may use.
    pub stability: f64,
    pub residual_tol: f64,
    pub max_steps: usize,
    pub integrator: Integrator,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dt_init: None,
            dt_min: 1e-10,
            dt_max: 1e-3,
            safety: 1e-2,
            stability: 0.75,
            residual_tol: 1e-6,
            max_steps: 100_000,
            integrator: Integrator::Rk2,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("dt_min", self.dt_min)?;
        positive("dt_max", self.dt_max)?;
        positive("safety", self.safety)?;
        positive("stability", self.stability)?;
        positive("residual_tol", self.residual_tol)?;
        if self.dt_min > self.dt_max {
            return Err(Error::Parameter(format!("dt_min {} exceeds dt_max {}", self.dt_min, self.dt_max)));
        }
        if let Some(dt) = self.dt_init {
            positive("dt_init", dt)?;
            if dt < self.dt_min || dt > self.dt_max {
                return Err(Error::Parameter(format!(
                    "dt_init {dt} outside [dt_min, dt_max] = [{}, {}]",
                    self.dt_min, self.dt_max
                )));
            }
        }
        if self.stability > 1.0 {
            return Err(Error::Parameter(format!("stability must not exceed 1, got {}", self.stability)));
        }
        Ok(())
    }
}

/// Right-hand side at one body together with the solve it came from.
#[derive(Debug, Clone)]
pub struct FlowRhs {
    pub values: Vec<f64>,
    pub evaluation: BodyEvaluation,
}

impl FlowRhs {
    pub fn residual(&self, f: &DensityField) -> f64 {
        stationarity_residual(&self.evaluation, f)
    }

    /// `∫ f·rhs dx`; zero up to round-off.
    pub fn phi_rate(&self, f: &DensityField) -> f64 {
        let grid = self.evaluation.density.grid();
        let integrand: Vec<f64> = self.values.iter().zip(f.values()).map(|(r, f)| r * f).collect();
        grid.integrate(&integrand)
    }

    /// Largest stable explicit step for the linearized flow.
    fn stability_limit(&self, body: &SupportField, f: &DensityField) -> f64 {
        let k = self.evaluation.curvature.k() as i32;
        let bound = body.grid().second_derivative_bound();
        let grad = self.evaluation.solution.boundary_gradient();
        let stiffest = (0..body.len())
            .map(|i| {
                let d = self.evaluation.curvature.cofactor(i).iter().copied().fold(0.0, f64::max);
                body.values()[i] / f.values()[i] * grad[i].powi(k + 1) * d * bound
            })
            .fold(0.0, f64::max);
        // both explicit schemes are stable on [−2, 0]
        if stiffest > 0.0 {
            2.0 / stiffest
        } else {
            f64::INFINITY
        }
    }
}

/// `max_i |density_i/η − f_i| / f_i`.
pub fn stationarity_residual(evaluation: &BodyEvaluation, f: &DensityField) -> f64 {
    let eta = evaluation.report.eta;
    evaluation.density.values().iter().zip(f.values()).map(|(d, f)| (d / eta - f).abs() / f).fold(0.0, f64::max)
}

pub fn flow_rhs(h: &SupportField, f: &DensityField, k: usize, mfs: &MfsConfig) -> Result<FlowRhs> {
    h.same_grid(f.grid())?;
    let evaluation = evaluate_body(h, f, k, mfs)?;
    let eta = evaluation.report.eta;
    let values = h
        .values()
        .iter()
        .zip(f.values())
        .zip(evaluation.density.values())
        .map(|((h, f), d)| h / f * d - eta * h)
        .collect();
    Ok(FlowRhs { values, evaluation })
}

/// Accepted state of the flow with its cached right-hand side.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub step: usize,
    pub body: SupportField,
    pub rhs: FlowRhs,
    pub residual: f64,
    /// Step size proposed for the next step.
    pub dt_next: f64,
}

impl FlowState {
    pub fn new(body: SupportField, f: &DensityField, k: usize, mfs: &MfsConfig, cfg: &FlowConfig) -> Result<Self> {
        cfg.validate()?;
        certify_convex(&body)?;
        let rhs = flow_rhs(&body, f, k, mfs)?;
        let residual = rhs.residual(f);
        let rate = max_relative_rate(&body, &rhs.values);
        let dt_next =
            cfg.dt_init.unwrap_or(if rate > 0.0 { 1e-3 / rate } else { cfg.dt_max }).clamp(cfg.dt_min, cfg.dt_max);
        Ok(FlowState { t: 0.0, step: 0, body, rhs, residual, dt_next })
    }

    pub fn report(&self) -> &crate::functionals::FunctionalReport {
        &self.rhs.evaluation.report
    }

    pub fn k(&self) -> usize {
        self.rhs.evaluation.curvature.k()
    }

    pub fn tau(&self) -> f64 {
        self.report().tau()
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let r = self.report();
        let curv = &self.rhs.evaluation.curvature;
        Diagnostics {
            t: self.t,
            phi: r.phi,
            t_tilde: r.t_boundary,
            eta: r.eta,
            pohozaev_relerr: r.pohozaev_relerr,
            min_h: self.body.min(),
            max_h: self.body.max(),
            min_lambda: curv.min_radius(),
            max_lambda: curv.max_radius(),
            residual: self.residual,
        }
    }
}

fn max_relative_rate(h: &SupportField, rhs: &[f64]) -> f64 {
    h.values().iter().zip(rhs).map(|(h, r)| (r / h).abs()).fold(0.0, f64::max)
}

/// Context attached to a stiffness failure.
#[derive(Debug, Clone)]
pub struct FlowFailure {
    pub reason: String,
    pub t: f64,
    pub step: usize,
    pub dt: f64,
    pub last: Diagnostics,
}

impl std::fmt::Display for FlowFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} at t = {:e} (step {}, dt = {:e}, residual {:e}, min radius {:e})",
            self.reason, self.t, self.step, self.dt, self.last.residual, self.last.min_lambda
        )
    }
}

fn retryable(err: &Error) -> bool {
    matches!(err, Error::ConvexityLoss { .. } | Error::NonPositive { .. })
}

fn advance(h: &SupportField, rates: &[&[f64]], weights: &[f64], dt: f64) -> Result<SupportField> {
    let values = (0..h.len())
        .map(|i| h.values()[i] + dt * rates.iter().zip(weights).map(|(r, w)| w * r[i]).sum::<f64>())
        .collect();
    let next = SupportField::new(h.grid().clone(), values)?;
    certify_convex(&next)?;
    Ok(next)
}

fn attempt(
    state: &FlowState,
    f: &DensityField,
    k: usize,
    mfs: &MfsConfig,
    integrator: Integrator,
    dt: f64,
) -> Result<(SupportField, FlowRhs)> {
    let h = &state.body;
    let first = advance(h, &[&state.rhs.values], &[1.0], dt)?;
    let next = match integrator {
        Integrator::Euler => first,
        Integrator::Rk2 => {
            let mid = flow_rhs(&first, f, k, mfs)?;
            advance(h, &[&state.rhs.values, &mid.values], &[0.5, 0.5], dt)?
        }
    };
    let rhs = flow_rhs(&next, f, k, mfs)?;
    Ok((next, rhs))
}

/// One accepted step. The trial step is halved on loss of positivity or
/// convexity until it drops below `dt_min`.
pub fn step(state: &FlowState, f: &DensityField, mfs: &MfsConfig, cfg: &FlowConfig) -> Result<FlowState> {
    let k = state.k();
    let rate = max_relative_rate(&state.body, &state.rhs.values);
    let mut dt = state.dt_next.min(cfg.dt_max).min(cfg.stability * state.rhs.stability_limit(&state.body, f));
    if rate > 0.0 {
        dt = dt.min(cfg.safety / rate);
    }
    loop {
        if dt < cfg.dt_min {
            return Err(Error::Stiffness(Box::new(FlowFailure {
                reason: format!("step size fell below dt_min = {:e}", cfg.dt_min),
                t: state.t,
                step: state.step,
                dt,
                last: state.diagnostics(),
            })));
        }
        match attempt(state, f, k, mfs, cfg.integrator, dt) {
            Ok((body, rhs)) => {
                let residual = rhs.residual(f);
                return Ok(FlowState {
                    t: state.t + dt,
                    step: state.step + 1,
                    body,
                    rhs,
                    residual,
                    dt_next: (2.0 * dt).min(cfg.dt_max),
                });
            }
            Err(e) if retryable(&e) => dt *= 0.5,
            Err(e) => return Err(e),
        }
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub state: FlowState,
    pub trajectory: Vec<Diagnostics>,
    pub converged: bool,
    pub alerts: Vec<String>,
}

impl FlowOutcome {
    pub fn tau(&self) -> f64 {
        self.state.tau()
    }
}

/// Integrate until the stationarity residual drops to `residual_tol` or
/// `max_steps` is reached. `observer` sees every accepted state, including
/// the initial one.
pub fn run(
    h0: SupportField,
    f: &DensityField,
    k: usize,
    mfs: &MfsConfig,
    cfg: &FlowConfig,
    mut observer: impl FnMut(&FlowState) -> Result<()>,
) -> Result<FlowOutcome> {
    let mut state = FlowState::new(h0, f, k, mfs, cfg)?;
    let first = state.diagnostics();
    let monitor = BoundMonitor::new(&first);
    let mut trajectory = vec![first];
    let mut alerts = Vec::new();
    observer(&state)?;
    while state.residual > cfg.residual_tol && state.step < cfg.max_steps {
        state = step(&state, f, mfs, cfg)?;
        let row = state.diagnostics();
        alerts.extend(monitor.alerts(&row));
        trajectory.push(row);
        observer(&state)?;
    }
    let converged = state.residual <= cfg.residual_tol;
    Ok(FlowOutcome { state, trajectory, converged, alerts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    #[test]
    fn balls_are_stationary() {
        let mfs = MfsConfig::default();
        let grid = SphereGrid::circle(128).unwrap();
        let f = DensityField::constant(grid.clone(), 1.0).unwrap();
        let rhs = flow_rhs(&SupportField::ball(grid, 1.3).unwrap(), &f, 1, &mfs).unwrap();
        assert!(rhs.values.iter().all(|r| r.abs() < 1e-12));

        let grid = SphereGrid::axisymmetric(32).unwrap();
        let f = DensityField::constant(grid.clone(), 2.0).unwrap();
        let rhs = flow_rhs(&SupportField::ball(grid, 0.8).unwrap(), &f, 2, &mfs).unwrap();
        assert!(rhs.values.iter().all(|r| r.abs() < 1e-14));
    }

    #[test]
    fn phi_rate_vanishes() {
        let grid = SphereGrid::circle(64).unwrap();
        let f = DensityField::fourier(grid.clone(), 1.0, &[0.1, 0.05], &[0.02]).unwrap();
        let h = SupportField::ellipse(grid, 1.4, 1.0).unwrap();
        let rhs = flow_rhs(&h, &f, 1, &MfsConfig::default()).unwrap();
        assert!(rhs.phi_rate(&f).abs() < 1e-10);
    }

    #[test]
    fn stationary_ball_step_is_identity() {
        let grid = SphereGrid::circle(128).unwrap();
        let f = DensityField::constant(grid.clone(), 1.0).unwrap();
        let h = SupportField::ball(grid, 1.0).unwrap();
        let cfg = FlowConfig { dt_init: Some(1e-3), ..FlowConfig::default() };
        let mfs = MfsConfig::default();
        let s0 = FlowState::new(h.clone(), &f, 1, &mfs, &cfg).unwrap();
        let s1 = step(&s0, &f, &mfs, &cfg).unwrap();
        let dt = s1.t - s0.t;
        for (a, b) in h.values().iter().zip(s1.body.values()) {
            assert!((a - b).abs() <= 1e-12 * dt.max(1.0));
        }
    }

    #[test]
    fn ellipse_step_increases_t_tilde() {
        let grid = SphereGrid::circle(64).unwrap();
        let f = DensityField::constant(grid.clone(), 1.0).unwrap();
        let h = SupportField::ellipse(grid, 1.2, 1.0).unwrap();
        let cfg = FlowConfig::default();
        let mfs = MfsConfig::default();
        let s0 = FlowState::new(h, &f, 1, &mfs, &cfg).unwrap();
        let s1 = step(&s0, &f, &mfs, &cfg).unwrap();
        assert!(s1.report().t_boundary >= s0.report().t_boundary);
        assert!((s1.report().phi - s0.report().phi).abs() < 1e-12 * s0.report().phi);
    }

    #[test]
    fn fixed_point_terminates_immediately() {
        let grid = SphereGrid::circle(64).unwrap();
        let f = DensityField::constant(grid.clone(), 1.0).unwrap();
        let h = SupportField::ball(grid, 1.0).unwrap();
        let out = run(h, &f, 1, &MfsConfig::default(), &FlowConfig::default(), |_| Ok(())).unwrap();
        assert!(out.converged);
        assert!(out.state.step <= 2);
    }

    #[test]
    fn tiny_dt_min_violation_is_stiffness() {
        let cfg = FlowConfig { dt_min: 1e-2, dt_max: 1e-3, ..FlowConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = FlowConfig { dt_init: Some(-1.0), ..FlowConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn underflow_reports_stiffness() {
        let grid = SphereGrid::circle(64).unwrap();
        let f = DensityField::constant(grid.clone(), 1.0).unwrap();
        let h = SupportField::ellipse(grid, 1.5, 1.0).unwrap();
        let cfg = FlowConfig { dt_min: 1e-4, dt_max: 1e-3, safety: 1e-9, ..FlowConfig::default() };
        let mfs = MfsConfig::default();
        let s0 = FlowState::new(h, &f, 1, &mfs, &cfg).unwrap();
        match step(&s0, &f, &mfs, &cfg) {
            Err(Error::Stiffness(failure)) => assert_eq!(failure.step, 0),
            other => panic!("expected stiffness, got {other:?}"),
        }
    }
}
