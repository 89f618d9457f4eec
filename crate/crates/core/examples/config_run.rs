//! Drive a run from a TOML configuration, as the command-line tool does.
//!
//! cargo run --release --example config_run

use torsion_flow::io::{orchestrate, parse_config, Subcommand};

const CONFIG: &str = r#"
dimension = 2
order = 1
grid = 64

[body]
kind = "ellipse"
a = 1.3
b = 1.0

[density]
kind = "fourier"
mean = 1.0
cos = [0.0, 0.05]

[flow]
residual_tol = 1e-6

[output]
snapshot_stride = 2000
"#;

fn main() -> torsion_flow::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let out = std::env::temp_dir().join("torsion-flow-config-run");
    for sub in [Subcommand::Functionals, Subcommand::Flow] {
        let summary = orchestrate(&cfg, sub, &out)?;
        println!("{sub:?}: {:?}", summary.status);
        for line in &summary.lines {
            println!("  {line}");
        }
        for path in &summary.files {
            println!("  wrote {}", path.display());
        }
    }
    Ok(())
}
