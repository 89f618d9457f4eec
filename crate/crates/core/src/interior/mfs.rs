use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ball_coefficient, fundamental, Backend, Expansion, InteriorSolution, GRADIENT_BOUND_SLACK};
use crate::error::{Error, Result};
use crate::sphere::{boundary_embedding, curvature_data, SupportField};
use crate::Vec3;

/// Method-of-fundamental-solutions parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfsConfig {
    /// Charges sit at `y₀ + dilation·(X_j − y₀)`.
    pub charge_dilation: f64,
    /// Number of charges (rings of charges for n = 3); `None` means
    /// `nodes / oversampling`.
    pub n_charges: Option<usize>,
    /// Tikhonov parameter relative to the largest squared singular value.
    pub regularization: f64,
    /// Collocation points per charge.
    pub oversampling: usize,
    /// Point charges per ring in the axisymmetric case.
    pub azimuthal_copies: usize,
    /// Largest admissible effective condition number of the regularized system.
    pub max_condition: f64,
}

impl Default for MfsConfig {
    fn default() -> Self {
        MfsConfig {
            charge_dilation: 1.8,
            n_charges: None,
            regularization: 1e-12,
            oversampling: 2,
            azimuthal_copies: 64,
            max_condition: 1e12,
        }
    }
}

impl MfsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.charge_dilation > 1.0) {
            return Err(Error::Parameter(format!("charge_dilation must exceed 1, got {}", self.charge_dilation)));
        }
        if self.oversampling < 1 {
            return Err(Error::Parameter("oversampling must be at least 1".into()));
        }
        if !(self.regularization >= 0.0) {
            return Err(Error::Parameter(format!("regularization must be non-negative, got {}", self.regularization)));
        }
        if self.azimuthal_copies < 8 {
            return Err(Error::Parameter("azimuthal_copies must be at least 8".into()));
        }
        if self.n_charges == Some(0) {
            return Err(Error::Parameter("n_charges must be positive".into()));
        }
        Ok(())
    }

    fn charge_count(&self, collocation: usize) -> Result<usize> {
        let count = self.n_charges.unwrap_or(collocation / self.oversampling);
        if count == 0 || count > collocation {
            return Err(Error::Parameter(format!(
                "{count} charges for {collocation} collocation points; need 1 ≤ charges ≤ collocation"
            )));
        }
        Ok(count)
    }
}

/// Solve `Δu = 1`, `u|∂Ω = 0` as `u = |y − y₀|²/(2n) + w` with `w` harmonic,
/// expanded in fundamental solutions centred outside `Ω`, plus a constant.
pub fn solve_poisson_mfs(body: &SupportField, config: &MfsConfig) -> Result<InteriorSolution> {
    config.validate()?;
    let dim = body.dim();
    let curvature = curvature_data(body, 1)?;
    let points = boundary_embedding(body)?;
    let nodes = points.len();

    let mut centroid = points.iter().sum::<Vec3>() / nodes as f64;
    if dim == 3 {
        centroid.x = 0.0;
        centroid.y = 0.0;
    }

    let count = config.charge_count(nodes)?;
    let generators: Vec<Vec3> = (0..count)
        .map(|j| {
            let node = (j * nodes) / count;
            centroid + (points[node] - centroid) * config.charge_dilation
        })
        .collect();
    // each basis function is one generator, or one ring of generators about the axis
    let basis: Vec<Vec<Vec3>> = match dim {
        2 => generators.iter().map(|g| vec![*g]).collect(),
        _ => generators.iter().map(|g| ring(g, config.azimuthal_copies)).collect(),
    };

    let quadratic = 1.0 / (2.0 * dim as f64);
    let columns = basis.len() + 1;
    let mut matrix = DMatrix::<f64>::zeros(nodes, columns);
    let mut rhs = DVector::<f64>::zeros(nodes);
    for (i, p) in points.iter().enumerate() {
        for (j, charges) in basis.iter().enumerate() {
            matrix[(i, j)] = charges.iter().map(|q| fundamental(dim, &(p - q))).sum();
        }
        matrix[(i, columns - 1)] = 1.0;
        rhs[i] = -quadratic * (p - centroid).norm_squared();
    }

    let svd = matrix.svd(true, true);
    let singular = &svd.singular_values;
    let s_max = singular.iter().copied().fold(0.0, f64::max);
    let s_min = singular.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda = config.regularization * s_max * s_max;
    let condition = ((s_max * s_max + lambda) / (s_min * s_min + lambda)).sqrt();
    if !condition.is_finite() || condition > config.max_condition {
        return Err(Error::IllConditioned { condition });
    }
    let (u, v_t) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::SolveFailed("SVD did not return singular vectors".into())),
    };
    let projected = u.transpose() * &rhs;
    let filtered = DVector::from_iterator(
        singular.len(),
        singular.iter().zip(projected.iter()).map(|(s, b)| s * b / (s * s + lambda)),
    );
    let solution = v_t.transpose() * filtered;

    let mut charges = Vec::new();
    let mut coefficients = Vec::new();
    for (ring, a) in basis.iter().zip(solution.iter()) {
        for q in ring {
            charges.push(*q);
            coefficients.push(*a);
        }
    }
    let expansion = Expansion { dim, centroid, quadratic, constant: solution[columns - 1], charges, coefficients };
    let solved = InteriorSolution::assemble(1, Backend::MfsPoisson, expansion, body.clone())?;

    // interior/exterior tangent balls of radii min/max curvature radius bound the trace
    let two_c = 2.0 * ball_coefficient(dim, 1);
    let lower = two_c * curvature.min_radius() * (1.0 - GRADIENT_BOUND_SLACK);
    let upper = two_c * curvature.max_radius() * (1.0 + GRADIENT_BOUND_SLACK);
    if let Some((i, g)) = solved.boundary_gradient().iter().enumerate().find(|(_, g)| **g < lower || **g > upper) {
        return Err(Error::SolveFailed(format!(
            "boundary gradient {g:e} at node {i} outside comparison bounds [{lower:e}, {upper:e}]"
        )));
    }
    Ok(solved)
}

fn ring(generator: &Vec3, copies: usize) -> Vec<Vec3> {
    let radius = generator.x.hypot(generator.y);
    (0..copies)
        .map(|m| {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / copies as f64;
            Vec3::new(radius * phi.cos(), radius * phi.sin(), generator.z)
        })
        .collect()
}
