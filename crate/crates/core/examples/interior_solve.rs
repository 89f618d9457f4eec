//! Solve the torsion problem on an ellipse with fundamental solutions and
//! compare with the closed-form quadratic solution.
//!
//! cargo run --example interior_solve

use torsion_flow::interior::{ball_solution, interior_solve, MfsConfig};
use torsion_flow::sphere::{SphereGrid, SupportField};
use torsion_flow::Vec3;

fn main() -> torsion_flow::Result<()> {
    let (a, b) = (2.0, 1.0);
    let grid = SphereGrid::circle(256)?;
    let body = SupportField::ellipse(grid.clone(), a, b)?;
    let sol = interior_solve(&body, 1, &MfsConfig::default())?;
    let exact =
        |y: &Vec3| (y[0] * y[0] / (a * a) + y[1] * y[1] / (b * b) - 1.0) * a * a * b * b / (2.0 * (a * a + b * b));

    println!("backend: {}", sol.backend().tag());
    println!("u(0) = {:.12} (exact {:.12})", sol.value(&Vec3::zeros()), exact(&Vec3::zeros()));
    let worst = sol.sample_cloud().iter().map(|y| (sol.value(y) - exact(y)).abs()).fold(0.0, f64::max);
    println!("max |u - exact| over the interior cloud: {worst:.3e}");
    println!("boundary residual max |u(X_i)|:          {:.3e}", sol.boundary_residual());
    println!("hessian residual max |S_1(D2u) - 1|:      {:.3e}", sol.residual_report());
    println!("|Du| at (2,0): {:.10} (exact 0.4)", sol.boundary_gradient()[0]);

    let sphere = SphereGrid::axisymmetric(48)?;
    for k in [1, 2] {
        let ball = ball_solution(sphere.clone(), k, 1.0)?;
        println!(
            "unit ball n=3 k={k}: u(0) = {:.10}, |Du| on the boundary = {:.10}",
            ball.value(&Vec3::zeros()),
            ball.boundary_gradient()[0]
        );
    }
    Ok(())
}
