//! Full identity battery: ball closed forms, Pohozaev consistency, the
//! variational formula and the boundary Hessian identities.
//!
//! cargo run --release --example identities

use torsion_flow::interior::MfsConfig;
use torsion_flow::lab::identity_battery;

fn main() -> torsion_flow::Result<()> {
    let reports = identity_battery(&MfsConfig::default())?;
    for r in &reports {
        println!("{}", r.summary());
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} of {} checks pass", reports.len() - failed, reports.len());
    Ok(())
}
