mod common;

use common::dense_joint;
use friendly_wigner::cli::sig;
use friendly_wigner::experiment::{
    build_protocol, evolve_exact, joint_distribution, monte_carlo, Coin, Protocol, ProtocolConfig, SpinZ, TimePoint,
    WOutcome,
};
use friendly_wigner::perspectives::{f_lbar_after_wbar, Agent, Conditioning, Herald, PerspectiveError};
use friendly_wigner::reasoning::{
    apply_improved_C, check_single_outcome, evaluate_pathway, lift, InferenceRule, Pathway, Proposition,
    ReasoningError, Statement,
};
use proptest::prelude::*;

const TAU: f64 = std::f64::consts::TAU;

fn angles() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(0.0..TAU)
}

fn config(a: [f64; 6]) -> ProtocolConfig {
    ProtocolConfig::from_angles(a[0], a[1], a[2], a[3], a[4], a[5])
}

fn time() -> impl Strategy<Value = TimePoint> {
    prop::sample::select(TimePoint::REASONING.to_vec())
}

fn agent() -> impl Strategy<Value = Agent> {
    prop::sample::select(Agent::ALL.to_vec())
}

fn coin() -> impl Strategy<Value = Coin> {
    prop::sample::select(vec![Coin::Heads, Coin::Tails])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joint_sums_to_one_and_matches_dense_oracle(a in angles()) {
        let cfg = config(a);
        let oracle = dense_joint(&cfg);
        let tree = evolve_exact(&build_protocol(cfg).unwrap());
        prop_assert!(tree.max_branch_defect() <= 1e-12);
        let t = joint_distribution(&tree).unwrap();
        prop_assert!((t.total() - 1.0).abs() <= 1e-12);
        for (wb, w, p) in t.cells() {
            prop_assert!((p - oracle[wb.index()][w.index()]).abs() <= 1e-12);
        }
    }

    #[test]
    fn every_pathway_gets_a_verdict(a in angles(), wbar in time(), f in time(), fbar in time()) {
        let p = build_protocol(config(a)).unwrap();
        let v = evaluate_pathway(&p, Pathway::new(wbar, f, fbar));
        prop_assert_eq!(v.pathway, Pathway::new(wbar, f, fbar));
    }

    #[test]
    fn equal_time_pathway_matches_quantum_conditional(a in angles()) {
        use friendly_wigner::reasoning::VerdictKind;
        let p = build_protocol(config(a)).unwrap();
        let t = joint_distribution(&evolve_exact(&p)).unwrap();
        let v = evaluate_pathway(&p, Pathway::equal_time());
        if let Some(q) = t.conditional(WOutcome::Ok, friendly_wigner::experiment::WBarOutcome::OkBar) {
            match v.kind {
                VerdictKind::ConsistentPrediction { probability } => prop_assert!((probability - q).abs() <= 1e-12),
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }

    #[test]
    fn improved_lift_rejects_unequal_times(outer in agent(), inner in agent(), to in time(), ti in time(), c in coin()) {
        let event = Proposition::new(Herald::R(c), TimePoint::T1);
        let s = Statement::nested(outer, to, Statement::certain(inner, ti, event));
        let improved = apply_improved_C(&s);
        if to == ti {
            let lifted = improved.unwrap();
            prop_assert_eq!(lifted.subject, outer);
            prop_assert_eq!(lifted.value(), Some(1.0));
        } else {
            let is_violation = matches!(improved, Err(ReasoningError::EqualTimeViolation { .. }));
            prop_assert!(is_violation);
        }
        prop_assert!(lift(&s, InferenceRule::Original).is_ok());
    }

    #[test]
    fn single_outcome_rule(a in agent(), t in time(), held in time(), c1 in coin(), c2 in coin()) {
        let s1 = Statement::certain(a, t, Proposition::new(Herald::R(c1), held));
        let s2 = Statement::certain(a, t, Proposition::new(Herald::R(c2), held));
        let r = check_single_outcome(&[s1, s2]);
        prop_assert_eq!(r.is_ok(), c1 == c2);
    }

    #[test]
    fn conflicting_heralds_are_rejected(c1 in coin(), c2 in coin()) {
        let r = Conditioning::new([Herald::R(c1), Herald::R(c2)]);
        prop_assert_eq!(r.is_ok(), c1 == c2);
        if c1 != c2 {
            let is_conflict = matches!(r, Err(PerspectiveError::ConflictingHeralds(..)));
            prop_assert!(is_conflict);
        }
    }

    /// F's t3 description of L̄ is W̄'s measurement applied to F's
    /// conditional state, whatever basis W̄ uses.
    #[test]
    fn f_view_of_lbar_is_dephased_in_wbar_basis(wbar in 0.0..TAU) {
        let cfg = ProtocolConfig {
            wbar_basis: ProtocolConfig::from_angles(0.0, 0.0, 0.0, 0.0, wbar, 0.0).wbar_basis,
            ..ProtocolConfig::default()
        };
        let p = build_protocol(cfg).unwrap();
        let rho = f_lbar_after_wbar(&p, SpinZ::Plus).unwrap();
        // F reading z=+1/2 puts L̄ in |tbar⟩
        let b = [p.config().wbar_basis.first, p.config().wbar_basis.second];
        let m = rho.in_basis(p.wbar_basis().vectors()).unwrap();
        for i in 0..2 {
            prop_assert!((m[i][i].re - b[i][1] * b[i][1]).abs() <= 1e-12);
            prop_assert!(m[i][1 - i].norm() <= 1e-12);
        }
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_schedule_independent(seed in any::<u64>(), rounds in 1u64..40_000) {
        let p = Protocol::standard();
        let a = monte_carlo(&p, rounds, seed, 1).unwrap();
        let b = monte_carlo(&p, rounds, seed, 3).unwrap();
        prop_assert_eq!(&a, &b);
        let total: u64 = a.cells().map(|c| c.2.count).sum();
        prop_assert_eq!(total, rounds);
    }

    #[test]
    fn pathway_notation_round_trips(wbar in time(), f in time(), fbar in time()) {
        let p = Pathway::new(wbar, f, fbar);
        prop_assert_eq!(p.to_string().parse::<Pathway>().unwrap(), p);
    }

    #[test]
    fn twelve_digit_rendering_is_close(x in -1e6f64..1e6) {
        let back: f64 = sig(x, 12).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}

/// Sampled frequencies follow the exact table: the binomial z-score of each
/// cell stays small across seeds.
#[test]
fn sampling_law() {
    let p = build_protocol(config([0.3, 1.2, 2.0, 0.7, 1.9, 2.6])).unwrap();
    let exact = joint_distribution(&evolve_exact(&p)).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let t = monte_carlo(&p, 50_000, seed, 2).unwrap();
        worst = worst.max(t.max_sigmas(&exact));
    }
    assert!(worst < 5.0, "{worst}");
}
