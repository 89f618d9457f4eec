//! Numerical checks of the variational formula for `T̃_k`, the boundary
//! Hessian identities, and trajectory audits.
//!
//! Every report records the exact formula variant it evaluated; mismatches
//! are reported as failures and never rescaled.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{DensityField, Diagnostics};
use crate::functionals::{evaluate_solution, torsional_measure_density, torsional_rigidity_boundary};
use crate::interior::{ball_solution, interior_solve, InteriorSolution, MfsConfig};
use crate::sphere::{curvature_data, minkowski_combination, SphereGrid, SupportField};
use crate::Vec3;

/// Largest relative drop of `T̃_k` tolerated between accepted steps.
pub const MONOTONICITY_SLACK: f64 = 1e-9;
/// Largest relative drift of `Φ` tolerated over a trajectory.
pub const PHI_DRIFT_TOLERANCE: f64 = 1e-5;
/// Tolerance of the central-difference variational check.
pub const HADAMARD_TOLERANCE: f64 = 1e-3;
/// Tolerance of the boundary Hessian identities on `k = 1` bodies.
pub const IDENTITY_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    /// Formula actually evaluated, sign convention included.
    pub variant: String,
    pub params: BTreeMap<String, String>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub relerr: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    fn new(identity: &str, variant: &str, lhs: Vec<f64>, rhs: Vec<f64>, relerr: f64, tolerance: f64) -> Self {
        IdentityReport {
            identity: identity.into(),
            variant: variant.into(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            pass: relerr.is_finite() && relerr <= tolerance,
            relerr,
            tolerance,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{} {} [{}] relerr={:.3e} tol={:.0e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.identity,
            params.join(" "),
            self.relerr,
            self.tolerance
        )
    }
}

fn sup_relative(lhs: &[f64], rhs: &[f64], scale: f64) -> f64 {
    let gap = lhs.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if gap == 0.0 {
        0.0
    } else {
        gap / scale
    }
}

fn sup_abs(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `T̃_k` of a body from a fresh interior solve.
pub fn t_tilde(body: &SupportField, k: usize, mfs: &MfsConfig) -> Result<f64> {
    let sol = interior_solve(body, k, mfs)?;
    let curv = curvature_data(body, k)?;
    torsional_rigidity_boundary(body, sol.boundary_gradient(), &curv, k)
}

/// Central difference of `T̃_k` along `h + εθ` against `(1/k)∫ θ dμ_k`.
pub fn hadamard_fd_check(
    body: &SupportField,
    direction: &SupportField,
    eps: f64,
    k: usize,
    mfs: &MfsConfig,
) -> Result<IdentityReport> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    let plus = minkowski_combination(body, direction, eps)?;
    let minus = minkowski_combination(body, direction, -eps)?;
    let lhs = (t_tilde(&plus, k, mfs)? - t_tilde(&minus, k, mfs)?) / (2.0 * eps);

    let sol = interior_solve(body, k, mfs)?;
    let curv = curvature_data(body, k)?;
    let density = torsional_measure_density(body, sol.boundary_gradient(), &curv)?;
    let integrand: Vec<f64> = direction.values().iter().zip(density.values()).map(|(t, d)| t * d).collect();
    let rhs = body.grid().integrate(&integrand) / k as f64;

    let relerr = (lhs - rhs).abs() / rhs.abs();
    Ok(IdentityReport::new(
        "hadamard",
        "[T(h+eps*theta) - T(h-eps*theta)]/(2 eps) = (1/k) int theta |Du|^(k+1) sigma_(n-k) dx",
        vec![lhs],
        vec![rhs],
        relerr,
        HADAMARD_TOLERANCE,
    )
    .with_param("n", body.dim())
    .with_param("k", k)
    .with_param("nodes", body.len())
    .with_param("eps", eps))
}

/// Hadamard check over a sweep of `ε` with the observed order between
/// consecutive sweep points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSweep {
    pub eps: Vec<f64>,
    pub relerr: Vec<f64>,
    pub observed_order: Vec<f64>,
    pub reports: Vec<IdentityReport>,
}

pub fn hadamard_sweep(
    body: &SupportField,
    direction: &SupportField,
    eps: &[f64],
    k: usize,
    mfs: &MfsConfig,
) -> Result<EpsilonSweep> {
    let reports = eps.iter().map(|e| hadamard_fd_check(body, direction, *e, k, mfs)).collect::<Result<Vec<_>>>()?;
    let relerr: Vec<f64> = reports.iter().map(|r| r.relerr).collect();
    let observed_order =
        eps.windows(2).zip(relerr.windows(2)).map(|(e, r)| (r[0] / r[1]).ln() / (e[0] / e[1]).ln()).collect();
    Ok(EpsilonSweep { eps: eps.to_vec(), relerr, observed_order, reports })
}

/// Boundary identities relating `D²u` on `∂Ω` to the curvature data.
///
/// * (i) `(D²ũ e_a)·e_b = −|Du| d_ab / σ_{n−k}` with `ũ = −u`,
/// * (ii) `(D²ũ e_a)·x = −(1/σ_{n−k}) d_ab ∂_b|Du|`, the tangential derivative
///   of the trace taken on the grid,
/// * (iii) `(D²u x)·x = (n−k)|Du| / σ_{n−k}` verbatim in the convex convention.
///
/// Tangent frames are the principal directions: `e` on the circle,
/// `(e_θ, e_φ)` on the axisymmetric sphere (evaluated on the meridian φ = 0).
pub fn boundary_hessian_identities(sol: &InteriorSolution, k: usize) -> Result<[IdentityReport; 3]> {
    if sol.k() != k {
        return Err(Error::Parameter(format!("solution has k = {}, requested k = {k}", sol.k())));
    }
    let body = sol.body();
    let grid = body.grid();
    let dim = body.dim();
    let curv = curvature_data(body, k)?;
    let trace = sol.boundary_gradient();
    let (trace_derivative, _) = grid.derivatives(trace)?;

    let mut lhs = [Vec::new(), Vec::new(), Vec::new()];
    let mut rhs = [Vec::new(), Vec::new(), Vec::new()];
    let mut off_diagonal: f64 = 0.0;
    for (i, p) in sol.boundary_points().iter().enumerate() {
        let hess = sol.hessian(p);
        let x = grid.directions()[i];
        let frame: Vec<Vec3> = match dim {
            2 => vec![grid.tangents()[i]],
            _ => vec![grid.tangents()[i], grid.azimuthal_tangent()],
        };
        let sigma = curv.sigma()[i];
        let d = curv.cofactor(i);
        for (a, e) in frame.iter().enumerate() {
            lhs[0].push(-(hess * e).dot(e));
            rhs[0].push(-trace[i] * d[a] / sigma);
            for e2 in frame.iter().skip(a + 1) {
                off_diagonal = off_diagonal.max((hess * e).dot(e2).abs());
            }
        }
        // only e_θ carries a non-zero tangential derivative of the trace
        lhs[1].push(-(hess * frame[0]).dot(&x));
        rhs[1].push(-d[0] * trace_derivative[i] / sigma);
        if dim == 3 {
            lhs[1].push(-(hess * frame[1]).dot(&x));
            rhs[1].push(0.0);
        }
        lhs[2].push((hess * x).dot(&x));
        rhs[2].push((dim - k) as f64 * trace[i] / sigma);
    }

    let scale_i = sup_abs(&rhs[0]);
    let relerr_i = sup_relative(&lhs[0], &rhs[0], scale_i).max(off_diagonal / scale_i);
    let relerr_ii = sup_relative(&lhs[1], &rhs[1], scale_i);
    let relerr_iii = sup_relative(&lhs[2], &rhs[2], sup_abs(&rhs[2]));
    let tag = |r: IdentityReport| {
        r.with_param("n", dim)
            .with_param("k", k)
            .with_param("nodes", body.len())
            .with_param("backend", sol.backend().tag())
    };
    let [l0, l1, l2] = lhs;
    let [r0, r1, r2] = rhs;
    Ok([
        tag(IdentityReport::new(
            "boundary-hessian-tangential",
            "(D2(-u) e_a).e_b = -|Du| d_ab / sigma_(n-k), principal frame, off-diagonal entries against 0",
            l0,
            r0,
            relerr_i,
            IDENTITY_TOLERANCE,
        )),
        tag(IdentityReport::new(
            "boundary-hessian-mixed",
            "(D2(-u) e_a).x = -(1/sigma_(n-k)) d_ab d|Du|/d(theta_b), grid derivative of the trace; scaled by max |Du| d/sigma",
            l1,
            r1,
            relerr_ii,
            IDENTITY_TOLERANCE,
        )),
        tag(IdentityReport::new(
            "boundary-hessian-normal",
            "(D2u x).x = (n-k)|Du| / sigma_(n-k), u <= 0 convention, verbatim",
            l2,
            r2,
            relerr_iii,
            IDENTITY_TOLERANCE,
        )),
    ])
}

/// Smallest relative increment of `T̃_k` between consecutive rows.
pub fn monotonicity_audit(trajectory: &[Diagnostics]) -> IdentityReport {
    let mut worst = 0.0f64;
    let mut worst_step = 0;
    for (j, w) in trajectory.windows(2).enumerate() {
        let change = (w[1].t_tilde - w[0].t_tilde) / w[0].t_tilde;
        if change < worst {
            worst = change;
            worst_step = j + 1;
        }
    }
    let drop = (-worst).max(0.0);
    IdentityReport::new(
        "t-tilde-monotonicity",
        "max over steps of max(0, -(T_(j+1) - T_j)/T_j)",
        trajectory.iter().map(|r| r.t_tilde).collect(),
        Vec::new(),
        drop,
        MONOTONICITY_SLACK,
    )
    .with_param("rows", trajectory.len())
    .with_param("worst_step", worst_step)
}

/// Largest relative deviation of `Φ` from its initial value.
pub fn phi_invariance_audit(trajectory: &[Diagnostics]) -> IdentityReport {
    let phi0 = trajectory.first().map(|r| r.phi).unwrap_or(f64::NAN);
    let drift = trajectory.iter().map(|r| ((r.phi - phi0) / phi0).abs()).fold(0.0, f64::max);
    IdentityReport::new(
        "phi-invariance",
        "max_t |Phi(t) - Phi(0)| / Phi(0)",
        trajectory.iter().map(|r| r.phi).collect(),
        vec![phi0],
        drift,
        PHI_DRIFT_TOLERANCE,
    )
    .with_param("rows", trajectory.len())
}

/// Both forms of `T̃_k` on balls against `c·R^{n+2}`.
pub fn ball_oracle(dim: usize, k: usize, radius: f64, nodes: usize) -> Result<[IdentityReport; 2]> {
    let grid = if dim == 2 { SphereGrid::circle(nodes)? } else { SphereGrid::axisymmetric(nodes)? };
    let f = DensityField::constant(grid.clone(), 1.0)?;
    let eval = evaluate_solution(ball_solution(grid, k, radius)?, &f)?;
    let exact = match (dim, k) {
        (2, 1) => PI / 8.0,
        (3, 1) => 4.0 * PI / 45.0,
        (3, 2) => 4.0 * PI / (15.0 * 3f64.sqrt()),
        _ => return Err(Error::Parameter(format!("no closed form for (n, k) = ({dim}, {k})"))),
    } * radius.powi(dim as i32 + 2);
    let volume = eval.report.t_volume.powf(1.0 / k as f64);
    let boundary = eval.report.t_boundary;
    let make = |name: &str, variant: &str, value: f64| {
        IdentityReport::new(name, variant, vec![value], vec![exact], (value - exact).abs() / exact, 1e-6)
            .with_param("n", dim)
            .with_param("k", k)
            .with_param("R", radius)
    };
    Ok([
        make("ball-t-volume", "(-int u dy) against closed form", volume),
        make("ball-t-boundary", "(1/(k(n+2))) int h |Du|^(k+1) sigma_(n-k) dx against closed form", boundary),
    ])
}

/// Identity battery on the reference bodies.
pub fn identity_battery(mfs: &MfsConfig) -> Result<Vec<IdentityReport>> {
    let mut reports = Vec::new();
    for (dim, k) in [(2, 1), (3, 1), (3, 2)] {
        for radius in [0.5, 1.0, 2.0] {
            reports.extend(ball_oracle(dim, k, radius, 64)?);
        }
    }

    let circle = SphereGrid::circle(256)?;
    let ellipse = SupportField::ellipse(circle.clone(), 2.0, 1.0)?;
    let f = DensityField::constant(circle.clone(), 1.0)?;
    let eval = evaluate_solution(interior_solve(&ellipse, 1, mfs)?, &f)?;
    reports.push(
        IdentityReport::new(
            "pohozaev",
            "|(-int u)^(k)^(1/k) - T_boundary| / T_boundary",
            vec![eval.report.t_volume],
            vec![eval.report.t_boundary],
            eval.report.pohozaev_relerr,
            1e-4,
        )
        .with_param("body", "ellipse a=2 b=1")
        .with_param("nodes", 256),
    );
    let u0 = eval.solution.value(&Vec3::zeros());
    reports.push(
        IdentityReport::new(
            "ellipse-center-value",
            "|u(0) + a^2 b^2/(2(a^2+b^2))|, absolute",
            vec![u0],
            vec![-0.4],
            (u0 + 0.4).abs(),
            1e-6,
        )
        .with_param("nodes", 256),
    );

    let unit = SupportField::ball(circle.clone(), 1.0)?;
    reports.push(hadamard_fd_check(&unit, &unit, 1e-4, 1, mfs)?.with_param("body", "unit disk"));
    let ellipse15 = SupportField::ellipse(circle.clone(), 1.5, 1.0)?;
    let shifted_disk = SupportField::fourier(circle.clone(), 1.0, &[0.2], &[])?;
    reports.push(hadamard_fd_check(&ellipse15, &shifted_disk, 1e-4, 1, mfs)?.with_param("body", "ellipse a=1.5 b=1"));
    let sphere = SphereGrid::axisymmetric(64)?;
    let unit_ball = SupportField::ball(sphere.clone(), 1.0)?;
    reports.push(hadamard_fd_check(&unit_ball, &unit_ball, 1e-4, 2, mfs)?.with_param("body", "unit ball"));

    let hessian_cases: Vec<(&str, InteriorSolution, usize)> = vec![
        ("ellipse a=2 b=1", interior_solve(&ellipse, 1, mfs)?, 1),
        ("unit disk, closed form", ball_solution(circle, 1, 1.0)?, 1),
        ("unit ball, mfs", interior_solve(&unit_ball, 1, mfs)?, 1),
        ("unit ball, closed form", ball_solution(sphere.clone(), 1, 1.0)?, 1),
        ("unit ball, closed form", ball_solution(sphere, 2, 1.0)?, 2),
    ];
    for (name, sol, k) in hessian_cases {
        for r in boundary_hessian_identities(&sol, k)? {
            reports.push(r.with_param("body", name));
        }
    }
    Ok(reports)
}
