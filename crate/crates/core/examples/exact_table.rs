//! Exact joint distribution of W̄'s and W's outcomes.
//!
//!     cargo run --example exact_table

use friendly_wigner::experiment::{evolve_exact, joint_distribution, Protocol, WBarOutcome, WOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let protocol = Protocol::standard();
    for stage in protocol.stages() {
        println!("{:<3} {:<36} {}", stage.time, stage.step.description(), stage.state);
    }

    let tree = evolve_exact(&protocol);
    let table = joint_distribution(&tree)?;
    println!();
    for (wbar, w, p) in table.cells() {
        println!("P({wbar}, {w}) = {p:.12}");
    }
    println!("P(okbar)      = {:.12}", table.marginal_wbar(WBarOutcome::OkBar));
    for given in [WBarOutcome::OkBar, WBarOutcome::FailsBar] {
        let c = table.conditional(WOutcome::Ok, given).unwrap_or(f64::NAN);
        println!("P(ok | {given:<8}) = {c:.12}");
    }
    Ok(())
}
