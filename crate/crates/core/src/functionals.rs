//! Torsional rigidity in volume and boundary form, the torsional measure,
//! `Φ` and the normalization `η`.

use std::sync::{Arc, OnceLock};

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::DensityField;
use crate::interior::{interior_solve, InteriorSolution, MfsConfig};
use crate::sphere::{curvature_data, CurvatureData, SphereGrid, SupportField};

const RADIAL_POINTS: usize = 16;

/// Gauss–Legendre rule mapped to `[0, 1]`.
fn radial_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::new(RADIAL_POINTS).expect("rule of degree >= 2");
        rule.as_node_weight_pairs().iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
    })
}

/// Density `|Du|^{k+1} σ_{n−k}` of the torsional measure against `dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDensity {
    grid: Arc<SphereGrid>,
    k: usize,
    values: Vec<f64>,
}

impl MeasureDensity {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.grid.integrate(&self.values)
    }
}

/// Scalar functionals of one solved body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    /// `T_k = (−∫u)^k`.
    pub t_volume: f64,
    /// `T̃_k` from the boundary integral.
    pub t_boundary: f64,
    pub phi: f64,
    pub eta: f64,
    pub pohozaev_relerr: f64,
}

impl FunctionalReport {
    /// `τ = 1/η`.
    pub fn tau(&self) -> f64 {
        1.0 / self.eta
    }

    /// `T̃_k^k`, comparable with [`Self::t_volume`].
    pub fn t_boundary_power(&self, k: usize) -> f64 {
        self.t_boundary.powi(k as i32)
    }
}

/// `−∫_Ω u dy` over the cones `{s·X : X ∈ ∂Ω, 0 ≤ s ≤ 1}`, whose volume
/// element is `s^{n−1} h σ_{n−1} ds dx`.
fn negative_integral(sol: &InteriorSolution, body: &SupportField) -> Result<f64> {
    let dim = body.dim();
    let area = curvature_data(body, 1)?;
    let rule = radial_rule();
    let mut cone = vec![0.0; body.len()];
    for (i, (p, (h, s_area))) in sol.boundary_points().iter().zip(body.values().iter().zip(area.sigma())).enumerate() {
        let radial: f64 = rule.iter().map(|(s, w)| w * s.powi(dim as i32 - 1) * sol.value(&(p * *s))).sum();
        cone[i] = -radial * h * s_area;
    }
    Ok(body.grid().integrate(&cone))
}

fn check_solution(sol: &InteriorSolution, body: &SupportField, k: usize) -> Result<()> {
    if sol.k() != k {
        return Err(Error::Parameter(format!("solution has k = {}, requested k = {k}", sol.k())));
    }
    if sol.body().grid() != body.grid() || sol.body().values() != body.values() {
        return Err(Error::Parameter("solution was computed for a different body".into()));
    }
    Ok(())
}

/// `T_k(Ω) = (−∫_Ω u)^k`.
pub fn torsional_rigidity_volume(sol: &InteriorSolution, body: &SupportField, k: usize) -> Result<f64> {
    check_solution(sol, body, k)?;
    let integral = negative_integral(sol, body)?;
    if !(integral > 0.0) {
        return Err(Error::Sign(format!("−∫u = {integral:e} is not positive")));
    }
    Ok(integral.powi(k as i32))
}

fn check_inputs(body: &SupportField, grad: &[f64], curv: &CurvatureData) -> Result<()> {
    body.grid().check_len(grad.len())?;
    if curv.len() != body.len() || curv.dim() != body.dim() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `T̃_k = (1/(k(n+2))) ∫ h |Du|^{k+1} σ_{n−k} dx`.
pub fn torsional_rigidity_boundary(body: &SupportField, grad: &[f64], curv: &CurvatureData, k: usize) -> Result<f64> {
    if curv.k() != k {
        return Err(Error::Parameter(format!("curvature data has k = {}, requested k = {k}", curv.k())));
    }
    let density = torsional_measure_density(body, grad, curv)?;
    let integrand: Vec<f64> = body.values().iter().zip(density.values()).map(|(h, d)| h * d).collect();
    Ok(body.grid().integrate(&integrand) / (k * (body.dim() + 2)) as f64)
}

pub fn torsional_measure_density(body: &SupportField, grad: &[f64], curv: &CurvatureData) -> Result<MeasureDensity> {
    check_inputs(body, grad, curv)?;
    let k = curv.k();
    let values = grad.iter().zip(curv.sigma()).map(|(g, s)| g.powi(k as i32 + 1) * s).collect();
    Ok(MeasureDensity { grid: body.grid().clone(), k, values })
}

/// `Φ = ∫ h f dx`.
pub fn phi_functional(body: &SupportField, f: &DensityField) -> Result<f64> {
    body.same_grid(f.grid())?;
    let integrand: Vec<f64> = body.values().iter().zip(f.values()).map(|(h, f)| h * f).collect();
    Ok(body.grid().integrate(&integrand))
}

/// `η = ∫ h·density dx / ∫ h f dx`.
pub fn eta_normalization(body: &SupportField, f: &DensityField, density: &MeasureDensity) -> Result<f64> {
    body.same_grid(density.grid())?;
    let phi = phi_functional(body, f)?;
    if !(phi > 0.0) {
        return Err(Error::Parameter(format!("Φ = {phi:e} is not positive")));
    }
    let integrand: Vec<f64> = body.values().iter().zip(density.values()).map(|(h, d)| h * d).collect();
    Ok(body.grid().integrate(&integrand) / phi)
}

/// `|T_k^{1/k} − T̃_k| / T̃_k`.
pub fn pohozaev_consistency(report: &FunctionalReport, k: usize) -> f64 {
    (report.t_volume.powf(1.0 / k as f64) - report.t_boundary).abs() / report.t_boundary
}

/// Everything the flow needs from one interior solve.
#[derive(Debug, Clone)]
pub struct BodyEvaluation {
    pub solution: InteriorSolution,
    pub curvature: CurvatureData,
    pub density: MeasureDensity,
    pub report: FunctionalReport,
}

pub fn evaluate_body(body: &SupportField, f: &DensityField, k: usize, mfs: &MfsConfig) -> Result<BodyEvaluation> {
    let solution = interior_solve(body, k, mfs)?;
    evaluate_solution(solution, f)
}

pub fn evaluate_solution(solution: InteriorSolution, f: &DensityField) -> Result<BodyEvaluation> {
    let body = solution.body().clone();
    let k = solution.k();
    let curvature = curvature_data(&body, k)?;
    let grad = solution.boundary_gradient();
    let density = torsional_measure_density(&body, grad, &curvature)?;
    let t_boundary = torsional_rigidity_boundary(&body, grad, &curvature, k)?;
    let t_volume = torsional_rigidity_volume(&solution, &body, k)?;
    let phi = phi_functional(&body, f)?;
    let eta = eta_normalization(&body, f, &density)?;
    let mut report = FunctionalReport { t_volume, t_boundary, phi, eta, pohozaev_relerr: 0.0 };
    report.pohozaev_relerr = pohozaev_consistency(&report, k);
    Ok(BodyEvaluation { solution, curvature, density, report })
}
