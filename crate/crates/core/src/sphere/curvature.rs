use super::field::SupportField;
use crate::error::{Error, Result};
use crate::Vec3;

/// Relative threshold on the smallest curvature radius for a field to count
/// as convex on the grid.
pub const CONVEXITY_THRESHOLD: f64 = 1e-8;

/// Angular derivatives of a support function.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDerivatives {
    /// `h′` (circle) or `h_θ` (axisymmetric sphere).
    pub first: Vec<f64>,
    /// `h″` or `h_θθ`.
    pub second: Vec<f64>,
}

pub fn support_derivatives(h: &SupportField) -> Result<SupportDerivatives> {
    let (first, second) = h.grid().derivatives(h.values())?;
    Ok(SupportDerivatives { first, second })
}

/// Principal curvature radii, area-measure densities and the cofactor of
/// `W = ∇²h + h·I` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    dim: usize,
    k: usize,
    eigenvalues: Vec<[f64; 2]>,
    sigma: Vec<f64>,
    cofactor: Vec<[f64; 2]>,
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Order `n − k` of the symmetric function stored in [`Self::sigma`].
    pub fn order(&self) -> usize {
        self.dim - self.k
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Curvature radii at node `i` (one value for n = 2; `(λ_θ, λ_φ)` for n = 3).
    pub fn radii(&self, i: usize) -> &[f64] {
        &self.eigenvalues[i][..self.dim - 1]
    }

    /// `σ_{n−k}(W)` per node.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `σ_m(W)` per node for any `0 ≤ m ≤ n − 1`.
    pub fn sigma_of_order(&self, m: usize) -> Vec<f64> {
        (0..self.len()).map(|i| elementary_symmetric(self.radii(i), m)).collect()
    }

    /// Diagonal of `d_ij = ∂σ_{n−k}/∂ω_ij` in the principal frame
    /// (`e` on the circle; `(e_θ, e_φ)` on the axisymmetric sphere).
    pub fn cofactor(&self, i: usize) -> &[f64] {
        &self.cofactor[i][..self.dim - 1]
    }

    pub fn min_radius(&self) -> f64 {
        (0..self.len()).flat_map(|i| self.radii(i).to_vec()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_radius(&self) -> f64 {
        (0..self.len()).flat_map(|i| self.radii(i).to_vec()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ_ij d_ij ω_ij` at node `i`; equals `(n − k)·σ_{n−k}`.
    pub fn cofactor_trace(&self, i: usize) -> f64 {
        self.cofactor(i).iter().zip(self.radii(i)).map(|(d, w)| d * w).sum()
    }
}

/// `σ_m(λ)`, the m-th elementary symmetric polynomial (`σ_0 = 1`).
pub fn elementary_symmetric(values: &[f64], m: usize) -> f64 {
    if m > values.len() {
        return 0.0;
    }
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for &v in values {
        for j in (1..=m).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e[m]
}

fn principal_radii(h: &SupportField) -> Result<Vec<[f64; 2]>> {
    let d = support_derivatives(h)?;
    let grid = h.grid();
    let values = h.values();
    let last = h.len() - 1;
    Ok((0..h.len())
        .map(|i| {
            let lambda1 = d.second[i] + values[i];
            if grid.dim() == 2 {
                return [lambda1, 0.0];
            }
            // the nodes next to the poles take the L'Hôpital limit
            let lambda2 = if i == 0 || i == last {
                lambda1
            } else {
                let theta = grid.angles()[i];
                d.first[i] * theta.cos() / theta.sin() + values[i]
            };
            [lambda1, lambda2]
        })
        .collect())
}

/// Smallest eigenvalue of `W` over all nodes; positive means convex on the grid.
pub fn convexity_margin(h: &SupportField) -> Result<f64> {
    let radii = principal_radii(h)?;
    let count = h.dim() - 1;
    Ok(radii.iter().flat_map(|r| r[..count].to_vec()).fold(f64::INFINITY, f64::min))
}

/// Whether the margin clears the relative certification threshold.
pub fn is_certified_convex(h: &SupportField) -> Result<bool> {
    Ok(convexity_margin(h)? > CONVEXITY_THRESHOLD * h.max())
}

pub(crate) fn certify_convex(h: &SupportField) -> Result<()> {
    let radii = principal_radii(h)?;
    check_radii(h, &radii)
}

fn check_radii(h: &SupportField, radii: &[[f64; 2]]) -> Result<()> {
    let count = h.dim() - 1;
    let threshold = CONVEXITY_THRESHOLD * h.max();
    let (node, margin) = radii
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r[..count].iter().copied().fold(f64::INFINITY, f64::min)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    if !(margin > threshold) {
        return Err(Error::ConvexityLoss { node, margin });
    }
    Ok(())
}

pub fn curvature_data(h: &SupportField, k: usize) -> Result<CurvatureData> {
    let dim = h.dim();
    if k < 1 || k > dim - 1 {
        return Err(Error::Parameter(format!("k = {k} outside 1..={} for n = {dim}", dim - 1)));
    }
    let radii = principal_radii(h)?;
    check_radii(h, &radii)?;
    let order = dim - k;
    let count = dim - 1;
    let mut sigma = Vec::with_capacity(radii.len());
    let mut cofactor = Vec::with_capacity(radii.len());
    for r in &radii {
        let lambdas = &r[..count];
        sigma.push(elementary_symmetric(lambdas, order));
        let mut d = [0.0; 2];
        for p in 0..count {
            let others: Vec<f64> = lambdas.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, v)| *v).collect();
            d[p] = elementary_symmetric(&others, order - 1);
        }
        cofactor.push(d);
    }
    Ok(CurvatureData { dim, k, eigenvalues: radii, sigma, cofactor })
}

/// `ρ = √(h² + |∇h|²)`: distance from the origin of the boundary point with
/// outer normal `x_i`.
pub fn radial_from_support(h: &SupportField) -> Result<Vec<f64>> {
    let d = support_derivatives(h)?;
    Ok(h.values().iter().zip(&d.first).map(|(v, g)| (v * v + g * g).sqrt()).collect())
}

/// Boundary points `X_i = ∇h(x_i) + h(x_i)·x_i`.
pub fn boundary_embedding(h: &SupportField) -> Result<Vec<Vec3>> {
    let d = support_derivatives(h)?;
    let grid = h.grid();
    Ok(h.values()
        .iter()
        .zip(&d.first)
        .zip(grid.directions().iter().zip(grid.tangents()))
        .map(|((v, g), (x, e))| x * *v + e * *g)
        .collect())
}

/// Support function of `Ω + tΩ′`.
pub fn minkowski_combination(h: &SupportField, g: &SupportField, t: f64) -> Result<SupportField> {
    h.same_grid(g.grid())?;
    let values = h.values().iter().zip(g.values()).map(|(a, b)| a + t * b).collect();
    let sum = SupportField::new(h.grid().clone(), values)?;
    certify_convex(&sum)?;
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{DerivativeScheme, SphereGrid};
    use std::f64::consts::PI;

    fn ellipse(n: usize) -> SupportField {
        SupportField::ellipse(SphereGrid::circle(n).unwrap(), 2.0, 1.0).unwrap()
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        for grid in [SphereGrid::circle(16).unwrap(), SphereGrid::axisymmetric(16).unwrap()] {
            let d = support_derivatives(&SupportField::ball(grid, 3.0).unwrap()).unwrap();
            assert!(d.first.iter().chain(&d.second).all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn cosine_second_derivative() {
        // h = 2 + cos θ keeps positivity; the constant has zero derivative
        let fd = SupportField::from_fn(SphereGrid::circle(256).unwrap(), |t| 2.0 + t.cos()).unwrap();
        let spectral =
            SupportField::from_fn(SphereGrid::with_scheme(2, 256, DerivativeScheme::Spectral).unwrap(), |t| {
                2.0 + t.cos()
            })
            .unwrap();
        for (field, tol) in [(fd, 1e-6), (spectral, 1e-12)] {
            let d = support_derivatives(&field).unwrap();
            for (t, v) in field.grid().angles().iter().zip(&d.second) {
                assert!((v + t.cos()).abs() < tol);
            }
        }
    }

    #[test]
    fn ellipse_second_derivative_at_vertex() {
        let d = support_derivatives(&ellipse(256)).unwrap();
        assert!((d.second[0] + 1.5).abs() < 1e-4, "{}", d.second[0]);
    }

    #[test]
    fn ball_sigmas() {
        let data = curvature_data(&SupportField::ball(SphereGrid::circle(32).unwrap(), 1.7).unwrap(), 1).unwrap();
        assert!(data.sigma().iter().all(|s| (s - 1.7).abs() < 1e-12));
        let grid = SphereGrid::axisymmetric(32).unwrap();
        let ball = SupportField::ball(grid, 1.7).unwrap();
        let k1 = curvature_data(&ball, 1).unwrap();
        let k2 = curvature_data(&ball, 2).unwrap();
        assert!(k1.sigma().iter().all(|s| (s - 1.7 * 1.7).abs() < 1e-12));
        assert!(k2.sigma().iter().all(|s| (s - 3.4).abs() < 1e-12));
    }

    #[test]
    fn ellipse_sigma_and_margin() {
        let h = ellipse(256);
        let data = curvature_data(&h, 1).unwrap();
        assert!((data.sigma()[0] - 0.5).abs() < 1e-4);
        assert!((convexity_margin(&h).unwrap() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn wrong_mode_perturbation_loses_convexity() {
        let h = SupportField::from_fn(SphereGrid::circle(256).unwrap(), |t| 1.0 + 0.5 * (2.0 * t).cos()).unwrap();
        assert!((convexity_margin(&h).unwrap() + 0.5).abs() < 1e-4);
        match curvature_data(&h, 1) {
            Err(Error::ConvexityLoss { margin, .. }) => assert!(margin < -0.49),
            other => panic!("expected convexity loss, got {other:?}"),
        }
    }

    #[test]
    fn elementary_symmetric_small_cases() {
        assert_eq!(elementary_symmetric(&[2.0, 3.0], 0), 1.0);
        assert_eq!(elementary_symmetric(&[2.0, 3.0], 1), 5.0);
        assert_eq!(elementary_symmetric(&[2.0, 3.0], 2), 6.0);
        assert_eq!(elementary_symmetric(&[2.0, 3.0, 4.0], 2), 26.0);
        assert_eq!(elementary_symmetric(&[2.0], 2), 0.0);
    }

    #[test]
    fn cofactor_trace_identity() {
        let grid = SphereGrid::axisymmetric(64).unwrap();
        let h = SupportField::ellipse(grid, 1.3, 1.0).unwrap();
        for k in 1..=2 {
            let data = curvature_data(&h, k).unwrap();
            for i in 0..data.len() {
                let expected = (3 - k) as f64 * data.sigma()[i];
                assert!((data.cofactor_trace(i) - expected).abs() <= 1e-10 * expected.abs());
            }
        }
        let data = curvature_data(&ellipse(64), 1).unwrap();
        for i in 0..data.len() {
            assert!((data.cofactor_trace(i) - data.sigma()[i]).abs() <= 1e-10 * data.sigma()[i]);
        }
    }

    #[test]
    fn radial_function_of_ellipse() {
        let rho = radial_from_support(&ellipse(256)).unwrap();
        let max = rho.iter().copied().fold(0.0, f64::max);
        let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((max - 2.0).abs() < 1e-4 && (min - 1.0).abs() < 1e-4);
    }

    #[test]
    fn embedding_of_ellipse_and_reprojection() {
        let h = ellipse(256);
        let points = boundary_embedding(&h).unwrap();
        assert!((points[0] - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-10);
        for ((p, x), v) in points.iter().zip(h.grid().directions()).zip(h.values()) {
            assert!((p.dot(x) - v).abs() < 1e-12);
            // the embedded point lies on the ellipse
            assert!((p.x * p.x / 4.0 + p.y * p.y - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn minkowski_sum_of_balls_and_ellipse_shift() {
        let grid = SphereGrid::circle(64).unwrap();
        let a = SupportField::ball(grid.clone(), 0.7).unwrap();
        let b = SupportField::ball(grid.clone(), 1.1).unwrap();
        let sum = minkowski_combination(&a, &b, 1.0).unwrap();
        assert!(sum.values().iter().all(|v| (v - 1.8).abs() < 1e-15));
        assert_eq!(minkowski_combination(&a, &b, 0.0).unwrap(), a);

        let e = ellipse(256);
        let unit = SupportField::ball(e.grid().clone(), 1.0).unwrap();
        let shifted = minkowski_combination(&e, &unit, 0.1).unwrap();
        let sigma = curvature_data(&shifted, 1).unwrap().sigma()[0];
        assert!((sigma - 0.6).abs() < 1e-4);

        let other = SupportField::ball(SphereGrid::circle(32).unwrap(), 1.0).unwrap();
        assert!(matches!(minkowski_combination(&a, &other, 1.0), Err(Error::GridMismatch)));
    }

    #[test]
    fn minkowski_combination_reports_convexity_loss() {
        let grid = SphereGrid::circle(64).unwrap();
        let h = SupportField::ball(grid.clone(), 1.0).unwrap();
        let g = SupportField::from_fn(grid, |t| 1.0 + 0.5 * (2.0 * t).cos()).unwrap();
        assert!(minkowski_combination(&h, &g, 0.1).is_ok());
        assert!(matches!(minkowski_combination(&h, &g, 10.0), Err(Error::ConvexityLoss { .. })));
    }

    #[test]
    fn spheroid_radii_match_closed_form() {
        // spheroid with equatorial a and polar b: at the equator the meridian
        // radius is b²/a and the parallel radius is a
        let grid = SphereGrid::axisymmetric(128).unwrap();
        let h = SupportField::ellipse(grid.clone(), 1.5, 1.0).unwrap();
        let data = curvature_data(&h, 1).unwrap();
        let eq = grid.angles().iter().position(|t| (t - PI / 2.0).abs() < PI / 128.0).unwrap();
        let theta = grid.angles()[eq];
        let hv = h.values()[eq];
        let meridian = (1.5f64 * 1.0).powi(2) / hv.powi(3);
        assert!((data.radii(eq)[0] - meridian).abs() < 1e-3, "{} vs {meridian} at {theta}", data.radii(eq)[0]);
        assert!((data.radii(eq)[1] - 2.25 / hv).abs() < 1e-3);
    }
}
