//! What each agent assigns to the labs, and F's view of L̄ at t3.
//!
//!     cargo run --example perspectives

use friendly_wigner::experiment::{Protocol, SpinZ, TimePoint, WBarOutcome};
use friendly_wigner::perspectives::{
    assign_state, non_equal_time_check, open_lab_message, Agent, Conditioning, Herald,
};
use friendly_wigner::statevec::Subsystem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Protocol::standard();

    let cond = Conditioning::new([Herald::Z(SpinZ::Plus)])?;
    let f = assign_state(&p, Agent::F, TimePoint::T3, &cond)?;
    println!("F at t3 given {cond}:");
    for lab in &f.labs {
        let scope: Vec<_> = lab.scope.iter().map(|s| s.name()).collect();
        println!("  {} ({})", scope.join(","), lab.body.kind());
    }
    let lbar = f.lab(Subsystem::LBar).and_then(|b| b.as_mixed()).expect("mixed");
    let m = lbar.in_basis(p.wbar_basis().vectors())?;
    println!(
        "  Lbar in (okbar, failsbar): [[{:.3}, {:.3}], [{:.3}, {:.3}]]",
        m[0][0].re, m[0][1].re, m[1][0].re, m[1][1].re
    );

    for herald in [WBarOutcome::OkBar, WBarOutcome::FailsBar] {
        let msg = open_lab_message(&p, herald)?;
        println!(
            "opening Lbar after {herald}: effective {:.10}, Born {:.10}",
            msg.effective_probability, msg.born_probability
        );
    }

    let check = non_equal_time_check(&p)?;
    println!(
        "P(z=-1/2 | okbar) = {}, premise from t1 gives {:?}, contradiction: {}",
        check.z_heralded[0], check.excluded_given_premise, check.contradiction
    );
    Ok(())
}
