//! Torsional rigidity by its volume and boundary forms, the torsional
//! measure and the normalization constant of the flow.
//!
//! cargo run --example functionals

use torsion_flow::flow::DensityField;
use torsion_flow::functionals::evaluate_body;
use torsion_flow::interior::MfsConfig;
use torsion_flow::sphere::{SphereGrid, SupportField};

fn main() -> torsion_flow::Result<()> {
    let mfs = MfsConfig::default();
    let grid = SphereGrid::circle(256)?;
    let f = DensityField::fourier(grid.clone(), 1.0, &[0.0, 0.2], &[])?;
    println!("{:>8} {:>18} {:>18} {:>12} {:>14}", "scale", "T volume", "T boundary", "pohozaev", "eta*Phi");
    for scale in [0.5, 1.0, 2.0] {
        let body = SupportField::ellipse(grid.clone(), 2.0, 1.0)?.scaled(scale)?;
        let eval = evaluate_body(&body, &f, 1, &mfs)?;
        let r = eval.report;
        println!(
            "{scale:>8} {:>18.10e} {:>18.10e} {:>12.3e} {:>14.10}",
            r.t_volume,
            r.t_boundary,
            r.pohozaev_relerr,
            r.eta * r.phi
        );
    }
    println!("T scales with degree n + 2 = 4; eta * Phi equals k(n+2) T = 4 T");

    let sphere = SphereGrid::axisymmetric(64)?;
    let f = DensityField::constant(sphere.clone(), 1.0)?;
    for k in [1, 2] {
        let body = SupportField::ball(sphere.clone(), 1.0)?;
        let eval = evaluate_body(&body, &f, k, &mfs)?;
        println!(
            "unit ball n=3 k={k}: T_tilde = {:.10}, measure mass = {:.10}, tau = {:.10}",
            eval.report.t_boundary,
            eval.density.total(),
            eval.report.tau()
        );
    }
    Ok(())
}
