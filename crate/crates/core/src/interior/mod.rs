//! Interior Dirichlet problem `S_k(D²u) = 1` in `Ω`, `u = 0` on `∂Ω`.
//!
//! Sign convention: `u ≤ 0` in `Ω` (u is convex), so the torsional rigidity
//! `(−∫u)^k` is positive and the boundary gradient `|Du| = Du·x` points along
//! the outer normal.
//!
//! Two backends share one representation, a quadratic plus a harmonic
//! expansion in fundamental solutions:
//!
//! * `mfs-poisson` (k = 1, any convex body): method of fundamental solutions
//!   for the harmonic correction, charges outside `Ω`.
//! * `ball-closed-form` (any k, balls): `u = c_{n,k}(|y|² − R²)`.

mod ball;
mod mfs;

use serde::{Deserialize, Serialize};

pub use ball::{ball_coefficient, ball_solution};
pub use mfs::{solve_poisson_mfs, MfsConfig};

use crate::error::{Error, Result};
use crate::sphere::{boundary_embedding, SupportField};
use crate::{Mat3, Vec3};

/// Relative deviation of `h` from its mean below which a body counts as a ball.
pub const BALL_TOLERANCE: f64 = 1e-8;

/// Relative slack on the comparison bounds for the boundary gradient.
pub const GRADIENT_BOUND_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    MfsPoisson,
    BallClosedForm,
}

impl Backend {
    pub fn tag(self) -> &'static str {
        match self {
            Backend::MfsPoisson => "mfs-poisson",
            Backend::BallClosedForm => "ball-closed-form",
        }
    }
}

/// `u(y) = q·|y − y₀|² + c₀ + Σ_j a_j G(y − p_j)` with `G = ln r` (n = 2) or
/// `G = −1/(4πr)` (n = 3).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Expansion {
    dim: usize,
    centroid: Vec3,
    quadratic: f64,
    constant: f64,
    charges: Vec<Vec3>,
    coefficients: Vec<f64>,
}

impl Expansion {
    fn value(&self, y: &Vec3) -> f64 {
        let mut u = self.quadratic * (y - self.centroid).norm_squared() + self.constant;
        for (p, a) in self.charges.iter().zip(&self.coefficients) {
            u += a * fundamental(self.dim, &(y - p));
        }
        u
    }

    fn gradient(&self, y: &Vec3) -> Vec3 {
        let mut g = (y - self.centroid) * (2.0 * self.quadratic);
        for (p, a) in self.charges.iter().zip(&self.coefficients) {
            g += fundamental_gradient(self.dim, &(y - p)) * *a;
        }
        g
    }

    fn hessian(&self, y: &Vec3) -> Mat3 {
        let mut hess = identity(self.dim) * (2.0 * self.quadratic);
        for (p, a) in self.charges.iter().zip(&self.coefficients) {
            hess += fundamental_hessian(self.dim, &(y - p)) * *a;
        }
        hess
    }
}

pub(crate) fn identity(dim: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    for i in 0..dim {
        m[(i, i)] = 1.0;
    }
    m
}

pub(crate) fn fundamental(dim: usize, d: &Vec3) -> f64 {
    let r = d.norm();
    if dim == 2 {
        r.ln()
    } else {
        -1.0 / (4.0 * std::f64::consts::PI * r)
    }
}

fn fundamental_gradient(dim: usize, d: &Vec3) -> Vec3 {
    let r2 = d.norm_squared();
    if dim == 2 {
        d / r2
    } else {
        d / (4.0 * std::f64::consts::PI * r2 * r2.sqrt())
    }
}

fn fundamental_hessian(dim: usize, d: &Vec3) -> Mat3 {
    let r2 = d.norm_squared();
    let outer = d * d.transpose();
    if dim == 2 {
        (identity(2) - outer * (2.0 / r2)) / r2
    } else {
        let r = r2.sqrt();
        (Mat3::identity() - outer * (3.0 / r2)) / (4.0 * std::f64::consts::PI * r2 * r)
    }
}

/// `S_k` of the leading `dim × dim` block: the sum of its principal k-minors.
pub fn hessian_sigma(m: &Mat3, dim: usize, k: usize) -> f64 {
    match (dim, k) {
        (_, 0) => 1.0,
        (_, 1) => (0..dim).map(|i| m[(i, i)]).sum(),
        (2, 2) => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        (3, 2) => {
            let minor = |a: usize, b: usize| m[(a, a)] * m[(b, b)] - m[(a, b)] * m[(b, a)];
            minor(0, 1) + minor(0, 2) + minor(1, 2)
        }
        (3, 3) => m.determinant(),
        _ => 0.0,
    }
}

/// Solution of the interior problem on one body, evaluable anywhere.
#[derive(Debug, Clone)]
pub struct InteriorSolution {
    k: usize,
    backend: Backend,
    expansion: Expansion,
    body: SupportField,
    boundary_points: Vec<Vec3>,
    boundary_gradient: Vec<f64>,
    boundary_residual: f64,
    residual_report: f64,
}

impl InteriorSolution {
    fn assemble(k: usize, backend: Backend, expansion: Expansion, body: SupportField) -> Result<Self> {
        let boundary_points = boundary_embedding(&body)?;
        let mut solution = InteriorSolution {
            k,
            backend,
            expansion,
            body,
            boundary_points,
            boundary_gradient: Vec::new(),
            boundary_residual: 0.0,
            residual_report: 0.0,
        };
        solution.boundary_gradient = solution.trace_gradient()?;
        solution.boundary_residual =
            solution.boundary_points.iter().map(|p| solution.value(p).abs()).fold(0.0, f64::max);
        solution.residual_report = solution.hessian_residual(&solution.sample_cloud())?;
        Ok(solution)
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn dim(&self) -> usize {
        self.expansion.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn body(&self) -> &SupportField {
        &self.body
    }

    pub fn centroid(&self) -> Vec3 {
        self.expansion.centroid
    }

    pub fn value(&self, y: &Vec3) -> f64 {
        self.expansion.value(y)
    }

    pub fn gradient(&self, y: &Vec3) -> Vec3 {
        self.expansion.gradient(y)
    }

    pub fn hessian(&self, y: &Vec3) -> Mat3 {
        self.expansion.hessian(y)
    }

    /// Boundary points `X_i` the trace is sampled at.
    pub fn boundary_points(&self) -> &[Vec3] {
        &self.boundary_points
    }

    /// `|Du|` at `X_i`, one value per grid node.
    pub fn boundary_gradient(&self) -> &[f64] {
        &self.boundary_gradient
    }

    /// `max_i |u(X_i)|`.
    pub fn boundary_residual(&self) -> f64 {
        self.boundary_residual
    }

    /// `max |S_k(D²u) − 1|` over the internal sample cloud.
    pub fn residual_report(&self) -> f64 {
        self.residual_report
    }

    /// Largest relative gap between `Du·x_i` and `|Du(X_i)|`; zero when the
    /// gradient is normal to the boundary.
    pub fn gradient_alignment(&self) -> f64 {
        self.boundary_points
            .iter()
            .zip(&self.boundary_gradient)
            .map(|(p, g)| (self.gradient(p).norm() - g).abs() / g)
            .fold(0.0, f64::max)
    }

    fn trace_gradient(&self) -> Result<Vec<f64>> {
        let mut trace = Vec::with_capacity(self.boundary_points.len());
        for (i, (p, x)) in self.boundary_points.iter().zip(self.body.grid().directions()).enumerate() {
            let g = self.gradient(p).dot(x);
            if !(g > 0.0) {
                return Err(Error::SolveFailed(format!("non-positive boundary gradient {g:e} at node {i}")));
            }
            trace.push(g);
        }
        Ok(trace)
    }

    /// Whether `y` lies strictly inside the discretized body `{y·x_i < h_i}`.
    pub fn contains(&self, y: &Vec3) -> bool {
        // axisymmetric bodies: rotate y onto the meridian φ = 0
        let y = if self.dim() == 3 { Vec3::new(y.x.hypot(y.y), 0.0, y.z) } else { *y };
        self.body.grid().directions().iter().zip(self.body.values()).all(|(x, h)| y.dot(x) < h * (1.0 - 1e-12))
    }

    /// `max |S_k(D²u) − 1|` over strictly interior sample points.
    pub fn hessian_residual(&self, points: &[Vec3]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in points {
            if !self.contains(p) {
                return Err(Error::OutsideDomain([p.x, p.y, p.z]));
            }
            let s = hessian_sigma(&self.hessian(p), self.dim(), self.k);
            worst = worst.max((s - 1.0).abs());
        }
        Ok(worst)
    }

    /// Points `y₀ + s(X_i − y₀)` for a few shrink factors and every fourth node.
    pub fn sample_cloud(&self) -> Vec<Vec3> {
        let center = self.expansion.centroid;
        let mut cloud = vec![center];
        for s in [0.25, 0.5, 0.75, 0.9] {
            cloud.extend(self.boundary_points.iter().step_by(4).map(|p| center + (p - center) * s));
        }
        cloud
    }

    pub fn snapshot(&self) -> SolutionSnapshot {
        let e = &self.expansion;
        let cut = |v: &Vec3| v.as_slice()[..e.dim].to_vec();
        SolutionSnapshot {
            backend: self.backend,
            dim: e.dim,
            k: self.k,
            centroid: cut(&e.centroid),
            quadratic: e.quadratic,
            constant: e.constant,
            charges: e.charges.iter().map(cut).collect(),
            coefficients: e.coefficients.clone(),
            boundary_gradient: self.boundary_gradient.clone(),
        }
    }

    /// Re-attach a stored solution to its body without re-solving.
    pub fn from_snapshot(snapshot: &SolutionSnapshot, body: SupportField) -> Result<Self> {
        let dim = snapshot.dim;
        if dim != body.dim() {
            return Err(Error::Snapshot(format!("solution is for n = {dim}, body has n = {}", body.dim())));
        }
        if snapshot.charges.len() != snapshot.coefficients.len() {
            return Err(Error::Snapshot("charges and coefficients differ in length".into()));
        }
        let point = |v: &[f64]| -> Result<Vec3> {
            if v.len() != dim {
                return Err(Error::Snapshot(format!("expected {dim} coordinates, found {}", v.len())));
            }
            let mut p = Vec3::zeros();
            p.as_mut_slice()[..dim].copy_from_slice(v);
            Ok(p)
        };
        let expansion = Expansion {
            dim,
            centroid: point(&snapshot.centroid)?,
            quadratic: snapshot.quadratic,
            constant: snapshot.constant,
            charges: snapshot.charges.iter().map(|c| point(c)).collect::<Result<_>>()?,
            coefficients: snapshot.coefficients.clone(),
        };
        Self::assemble(snapshot.k, snapshot.backend, expansion, body)
    }
}

/// JSON form of a solution: enough to re-evaluate `u` without re-solving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionSnapshot {
    pub backend: Backend,
    pub dim: usize,
    pub k: usize,
    pub centroid: Vec<f64>,
    pub quadratic: f64,
    pub constant: f64,
    pub charges: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub boundary_gradient: Vec<f64>,
}

/// `|Du|_i = Du(X_i)·x_i` for a solution computed on `body`.
pub fn boundary_gradient(solution: &InteriorSolution, body: &SupportField) -> Result<Vec<f64>> {
    if solution.body.values() != body.values() || solution.body.grid() != body.grid() {
        return Err(Error::Parameter("solution was computed for a different body".into()));
    }
    solution.trace_gradient()
}

fn is_ball(body: &SupportField) -> bool {
    let mean = body.mean();
    body.values().iter().all(|v| (v - mean).abs() <= BALL_TOLERANCE * mean)
}

/// Backend dispatch: MFS for `k = 1`, the closed form for balls when `k ≥ 2`.
pub fn interior_solve(body: &SupportField, k: usize, config: &MfsConfig) -> Result<InteriorSolution> {
    let dim = body.dim();
    if k < 1 || k > dim - 1 {
        return Err(Error::Parameter(format!("k = {k} outside 1..={} for n = {dim}", dim - 1)));
    }
    if k == 1 {
        return solve_poisson_mfs(body, config);
    }
    if is_ball(body) {
        return ball_solution(body.grid().clone(), k, body.mean());
    }
    Err(Error::Capability {
        dim,
        k,
        hint: "only balls are supported for k >= 2; a fully nonlinear solver plugs in behind interior_solve".into(),
    })
}
