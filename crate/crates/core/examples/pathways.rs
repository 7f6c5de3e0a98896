//! Verdicts for the nine ways W can chain the agents' conclusions at t3.
//!
//!     cargo run --example pathways

use friendly_wigner::experiment::Protocol;
use friendly_wigner::reasoning::{enumerate_pathways, evaluate_pathway, VerdictKind};

fn main() {
    let p = Protocol::standard();
    for pathway in enumerate_pathways() {
        let v = evaluate_pathway(&p, pathway);
        let detail = match &v.kind {
            VerdictKind::ConsistentPrediction { probability } => format!("P(ok) = {probability}"),
            VerdictKind::ContradictionWithQM { claimed, quantum } => format!("claims {claimed}, QM says {quantum}"),
            VerdictKind::BrokenPremise { rule, hop, description } => format!("{rule} at {hop}: {description}"),
        };
        println!("{:<22} {:<22} {detail}", pathway.to_string(), v.kind.name());
    }

    let original = evaluate_pathway(&p, "WBAR:t3,F:t2,FBAR:t1".parse().unwrap());
    println!("\ntranscript of the original pathway:");
    for line in &original.transcript {
        println!("  {line}");
    }
}
