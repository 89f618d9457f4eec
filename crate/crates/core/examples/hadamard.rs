//! Central-difference check of the first variation of the torsional
//! rigidity along a Minkowski perturbation.
//!
//! cargo run --release --example hadamard

use torsion_flow::interior::MfsConfig;
use torsion_flow::lab::hadamard_sweep;
use torsion_flow::sphere::{SphereGrid, SupportField};

fn main() -> torsion_flow::Result<()> {
    let grid = SphereGrid::circle(256)?;
    let body = SupportField::ellipse(grid.clone(), 1.5, 1.0)?;
    // support function of the unit disk centred at (0.2, 0)
    let direction = SupportField::fourier(grid, 1.0, &[0.2], &[])?;
    let sweep = hadamard_sweep(&body, &direction, &[1e-2, 1e-3, 1e-4], 1, &MfsConfig::default())?;
    for r in &sweep.reports {
        println!("{}  lhs = {:.12} rhs = {:.12}", r.summary(), r.lhs[0], r.rhs[0]);
    }
    println!("observed orders: {:.3?}", sweep.observed_order);
    Ok(())
}
