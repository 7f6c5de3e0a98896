//! Loading a TOML config and running the CLI in-process.
//!
//!     cargo run --example custom_config

use friendly_wigner::cli;
use friendly_wigner::experiment::{build_protocol, evolve_exact, joint_distribution, ProtocolConfig};

const CONFIG: &str = r#"
[initial]
heads = "sqrt:1/2"
tails = "sqrt:1/2"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ProtocolConfig::from_toml_str(CONFIG)?;
    let table = joint_distribution(&evolve_exact(&build_protocol(config)?))?;
    for (wbar, w, p) in table.cells() {
        println!("P({wbar}, {w}) = {p:.6}");
    }

    let bad = ProtocolConfig::from_toml_str("[initial]\nheads = 0.9\ntails = 0.3\n");
    println!("\n{}", bad.unwrap_err());

    let path = std::env::temp_dir().join("friendly-wigner-example.toml");
    std::fs::write(&path, CONFIG)?;
    let out = cli::run([
        "friendly-wigner",
        "report",
        "--format",
        "csv",
        "--config",
        path.to_str().unwrap(),
    ]);
    println!("\nexit {}\n{}", out.code, out.stdout);
    Ok(())
}
