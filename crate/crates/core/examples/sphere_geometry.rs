//! Curvature data of an ellipse and of an axisymmetric body, plus the
//! support/radial/embedding conversions.
//!
//! cargo run --example sphere_geometry

use torsion_flow::sphere::{
    boundary_embedding, convexity_margin, curvature_data, minkowski_combination, radial_from_support, SphereGrid,
    SupportField,
};

fn main() -> torsion_flow::Result<()> {
    let grid = SphereGrid::circle(128)?;
    let ellipse = SupportField::ellipse(grid.clone(), 2.0, 1.0)?;
    let curv = curvature_data(&ellipse, 1)?;
    println!("ellipse a=2 b=1 on {} nodes", ellipse.len());
    println!("  radius of curvature at theta=0:    {:.8} (exact 0.5)", curv.radii(0)[0]);
    println!("  radius of curvature at theta=pi/2: {:.8} (exact 4)", curv.radii(32)[0]);
    println!("  convexity margin:                  {:.8}", convexity_margin(&ellipse)?);

    let rho = radial_from_support(&ellipse)?;
    let (lo, hi) = rho.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
    println!("  radial function range:             [{lo:.8}, {hi:.8}]");
    let x = boundary_embedding(&ellipse)?;
    println!("  boundary point at theta=0:         ({:.8}, {:.8})", x[0][0], x[0][1]);

    let disk = SupportField::ball(grid, 1.0)?;
    let sum = minkowski_combination(&ellipse, &disk, 0.1)?;
    println!("  ellipse + 0.1 disk, radius at 0:   {:.8}", curvature_data(&sum, 1)?.radii(0)[0]);

    let sphere = SphereGrid::axisymmetric(64)?;
    let spheroid = SupportField::from_fn(sphere, |t| (1.0 + 0.5 * t.cos().powi(2)).sqrt())?;
    let curv = curvature_data(&spheroid, 1)?;
    println!("prolate spheroid on {} meridian nodes", spheroid.len());
    println!("  sigma_2 range: [{:.6}, {:.6}]", fold_min(curv.sigma()), fold_max(curv.sigma()));
    println!("  sigma_1 range: [{:.6}, {:.6}]", fold_min(&curv.sigma_of_order(1)), fold_max(&curv.sigma_of_order(1)));
    println!("  total area (integral of sigma_2): {:.8}", spheroid.grid().integrate(curv.sigma()));
    Ok(())
}

fn fold_min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn fold_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
