//! The whole comparison in one report.
//!
//!     cargo run --example consistency_report

use friendly_wigner::experiment::Protocol;
use friendly_wigner::reasoning::consistency_report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = consistency_report(&Protocol::standard())?;

    let factors: Vec<_> = r.chain.factors.iter().map(|f| format!("{:.4}", f.value)).collect();
    println!("chain {} = {:.12}", factors.join(" * "), r.chain.product);
    println!("W's statement:  {}", r.a_i);
    println!("lifted:         {}", r.a_ii);
    println!("quantum P(ok | okbar) = {}", r.quantum_conditional);
    if let Some(x) = r.printed_reading {
        println!("literal reading of the printed sum = {x:.10}");
    }
    println!(
        "{} consistent, {} contradiction, {} broken premise",
        r.count("ConsistentPrediction"),
        r.count("ContradictionWithQM"),
        r.count("BrokenPremise")
    );
    println!("consistent: {}", r.consistent);
    Ok(())
}
