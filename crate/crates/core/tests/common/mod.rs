#![allow(dead_code)]

use friendly_wigner::cli::{run, Outcome};
use friendly_wigner::experiment::ProtocolConfig;

pub fn run_cli(args: &[&str]) -> Outcome {
    run(std::iter::once("friendly-wigner").chain(args.iter().copied()))
}

pub fn run_cli_owned(args: &[String]) -> Outcome {
    run(std::iter::once("friendly-wigner".to_owned()).chain(args.iter().cloned()))
}

pub fn third() -> f64 {
    1.0 / 3.0
}

/// Joint `P(w̄, w)` from a dense 2×2 amplitude array over (L̄, L), written
/// out by hand from the config. Indexed `[okbar, failsbar][ok, fails]`.
pub fn dense_joint(cfg: &ProtocolConfig) -> [[f64; 2]; 2] {
    let unit = |v: [f64; 2]| {
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        [v[0] / n, v[1] / n]
    };
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    let coin = [cfg.a_heads, cfg.a_tails];
    // F's record: level 0 (minus) for the basis' first vector, 1 for the second
    let (fd, fu) = (unit(cfg.f_basis.first), unit(cfg.f_basis.second));
    let mut psi = [[0.0; 2]; 2];
    for (r, amp) in coin.iter().enumerate() {
        let s = unit(cfg.spin_prep[r]);
        psi[r][0] = amp * dot(fd, s);
        psi[r][1] = amp * dot(fu, s);
    }
    let wbar = [unit(cfg.wbar_basis.first), unit(cfg.wbar_basis.second)];
    let w = [unit(cfg.w_basis.first), unit(cfg.w_basis.second)];
    let mut out = [[0.0; 2]; 2];
    for (i, a) in wbar.iter().enumerate() {
        for (j, b) in w.iter().enumerate() {
            let mut amp = 0.0;
            for lb in 0..2 {
                for l in 0..2 {
                    amp += a[lb] * b[l] * psi[lb][l];
                }
            }
            out[i][j] = amp * amp;
        }
    }
    out
}
