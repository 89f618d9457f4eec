use std::sync::Arc;

use super::{Backend, Expansion, InteriorSolution};
use crate::error::{Error, Result};
use crate::sphere::{SphereGrid, SupportField};
use crate::Vec3;

/// `c_{n,k}` with `S_k(2c·I_n) = 1`, i.e. `2c = binom(n, k)^{−1/k}`.
pub fn ball_coefficient(dim: usize, k: usize) -> f64 {
    let binom = (1..=k).fold(1.0, |acc, j| acc * (dim + 1 - j) as f64 / j as f64);
    0.5 * binom.powf(-1.0 / k as f64)
}

/// Closed-form solution `u = c_{n,k}(|y|² − R²)` on the origin-centred ball.
pub fn ball_solution(grid: Arc<SphereGrid>, k: usize, radius: f64) -> Result<InteriorSolution> {
    let dim = grid.dim();
    if k < 1 || k > dim - 1 {
        return Err(Error::Parameter(format!("k = {k} outside 1..={} for n = {dim}", dim - 1)));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Parameter(format!("ball radius must be positive, got {radius}")));
    }
    let c = ball_coefficient(dim, k);
    let expansion = Expansion {
        dim,
        centroid: Vec3::zeros(),
        quadratic: c,
        constant: -c * radius * radius,
        charges: Vec::new(),
        coefficients: Vec::new(),
    };
    let body = SupportField::ball(grid, radius)?;
    InteriorSolution::assemble(k, Backend::BallClosedForm, expansion, body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        assert!((ball_coefficient(2, 1) - 0.25).abs() < 1e-15);
        assert!((ball_coefficient(3, 1) - 1.0 / 6.0).abs() < 1e-15);
        assert!((2.0 * ball_coefficient(3, 2) - 3f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_values() {
        let cases = [(2, 1, 0.5), (3, 1, 1.0 / 3.0), (3, 2, 1.0 / 3f64.sqrt())];
        for (dim, k, grad) in cases {
            let grid = SphereGrid::with_scheme(dim, 16, Default::default()).unwrap();
            let sol = ball_solution(grid, k, 1.0).unwrap();
            assert!(sol.boundary_gradient().iter().all(|g| (g - grad).abs() < 1e-14));
            assert!(sol.residual_report() < 1e-14);
            assert!(sol.boundary_residual() < 1e-15);
            assert!(sol.value(&Vec3::zeros()) < 0.0);
        }
        let sol = ball_solution(SphereGrid::circle(16).unwrap(), 1, 1.0).unwrap();
        assert!((sol.value(&Vec3::zeros()) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let grid = SphereGrid::circle(16).unwrap();
        assert!(ball_solution(grid.clone(), 2, 1.0).is_err());
        assert!(ball_solution(grid, 1, -1.0).is_err());
    }
}
