//! Sampled rounds compared with the exact table.
//!
//!     cargo run --release --example monte_carlo -- 1000000 42

use friendly_wigner::experiment::{evolve_exact, joint_distribution, monte_carlo, Protocol};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rounds: u64 = args.next().map_or(Ok(200_000), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(42), |s| s.parse())?;

    let protocol = Protocol::standard();
    let exact = joint_distribution(&evolve_exact(&protocol))?;
    let serial = monte_carlo(&protocol, rounds, seed, 1)?;
    let parallel = monte_carlo(&protocol, rounds, seed, 4)?;
    assert_eq!(serial, parallel);

    for (wbar, w, cell) in serial.cells() {
        let e = exact.get(wbar, w);
        println!(
            "{wbar:<8} {w:<5} freq {:.6}  exact {e:.6}  {:.2} sigma",
            cell.frequency,
            cell.sigmas_from(e, rounds)
        );
    }
    Ok(())
}
