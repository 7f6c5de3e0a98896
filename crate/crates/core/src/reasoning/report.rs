use super::pathways::{enumerate_pathways, evaluate_pathway, Pathway, Verdict, VerdictKind};
use super::{apply_improved_C, Proposition, ReasoningError, Statement};
use crate::experiment::{
    evolve_exact, joint_distribution, Coin, ExperimentError, OutcomeTable, Protocol, SpinZ, Step, TimePoint,
    WBarOutcome, WOutcome,
};
use crate::perspectives::{
    non_equal_time_check, w_equal_time_prediction, Agent, EqualTimePrediction, Herald, InconsistencyReport,
    PerspectiveError,
};
use crate::statevec::{born_probability, collapse, StateError, TOLERANCE};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainFactor {
    pub label: &'static str,
    pub value: f64,
}

/// `P(tails) · P(z=+½ | tails) · P(okbar | z=+½) · P(ok | okbar)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainProduct {
    pub factors: Vec<ChainFactor>,
    pub product: f64,
}

/// Conditional chain read off the branch tree's stage states. Stops at the
/// first vanishing factor.
pub fn conditional_chain_probability(protocol: &Protocol) -> Result<ChainProduct, StateError> {
    let tree = evolve_exact(protocol);
    let state_of = |step| {
        tree.stage(step)
            .and_then(|n| n.state.clone())
            .expect("unbranched stages carry states")
    };
    let mut factors = Vec::new();
    let push = |label, value: f64, factors: &mut Vec<ChainFactor>| {
        factors.push(ChainFactor { label, value });
        value > TOLERANCE
    };

    let init = state_of(Step::Initialize);
    let tails = protocol.coin_projector(Coin::Tails);
    let p = born_probability(&init, &tails)?;
    if push("P(r=tails)", p, &mut factors) {
        let row2 = state_of(Step::FBarMeasuresR);
        let (given_tails, _) = collapse(&row2, &tails)?;
        let up = protocol.f_basis().projector(SpinZ::Plus.basis_label())?;
        let p = born_probability(&given_tails, up)?;
        if push("P(z=+1/2 | r=tails)", p, &mut factors) {
            let row4 = state_of(Step::FMeasuresS);
            let (given_plus, _) = collapse(&row4, &protocol.z_projector(SpinZ::Plus))?;
            let p = born_probability(&given_plus, protocol.wbar_projector(WBarOutcome::OkBar))?;
            if push("P(okbar | z=+1/2)", p, &mut factors) {
                let node = tree.wbar_branch(WBarOutcome::OkBar).and_then(|n| n.state.clone());
                let p = match node {
                    Some(s) => born_probability(&s, protocol.w_projector(WOutcome::Ok))?,
                    None => 0.0,
                };
                push("P(ok | okbar)", p, &mut factors);
            }
        }
    }
    let product = if factors.len() == 4 {
        factors.iter().map(|f| f.value).product()
    } else {
        0.0
    };
    Ok(ChainProduct { factors, product })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Perspective(#[from] PerspectiveError),
    #[error(transparent)]
    Reasoning(#[from] ReasoningError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Everything needed to compare W's deductions with the quantum
/// calculation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub joint: OutcomeTable,
    pub chain: ChainProduct,
    pub verdicts: Vec<Verdict>,
    pub non_equal_time: InconsistencyReport,
    pub equal_time: EqualTimePrediction,
    /// W's nested statement through W̄, F and F̄ at t3.
    pub a_i: Statement,
    /// Its lift under the improved rule.
    pub a_ii: Statement,
    /// Quantum `P(ok | okbar)`.
    pub quantum_conditional: f64,
    /// The two-branch average as printed, with an extra factor ½ on the
    /// second branch.
    pub printed_reading: Option<f64>,
    pub consistent: bool,
}

impl ConsistencyReport {
    pub fn equal_time_verdict(&self) -> &Verdict {
        self.verdicts
            .iter()
            .find(|v| v.pathway == Pathway::equal_time())
            .expect("equal-time pathway is enumerated")
    }

    pub fn count(&self, name: &str) -> usize {
        self.verdicts.iter().filter(|v| v.kind.name() == name).count()
    }
}

fn a_i_statement(e: &EqualTimePrediction) -> Statement {
    let ok = Proposition::new(Herald::W(WOutcome::Ok), TimePoint::T3);
    let inner = match &e.chain {
        Some(chain) => Statement::nested(
            Agent::WBar,
            TimePoint::T3,
            Statement::mixture(
                Agent::F,
                TimePoint::T3,
                chain
                    .branches
                    .iter()
                    .map(|(_, w, m)| {
                        (
                            *w,
                            Statement::probability(Agent::FBar, TimePoint::T3, ok, m.effective_probability),
                        )
                    })
                    .collect(),
            ),
        ),
        None => Statement::probability(Agent::WBar, TimePoint::T3, ok, e.wbar_born),
    };
    Statement::nested(Agent::W, TimePoint::T3, inner)
}

pub fn consistency_report(protocol: &Protocol) -> Result<ConsistencyReport, ReportError> {
    let joint = joint_distribution(&evolve_exact(protocol))?;
    let chain = conditional_chain_probability(protocol)?;
    let verdicts: Vec<_> = enumerate_pathways()
        .into_iter()
        .map(|p| evaluate_pathway(protocol, p))
        .collect();
    let non_equal_time = non_equal_time_check(protocol)?;
    let equal_time = w_equal_time_prediction(protocol)?;
    let a_i = a_i_statement(&equal_time);
    let a_ii = apply_improved_C(&a_i)?;
    let quantum_conditional = joint.conditional(WOutcome::Ok, WBarOutcome::OkBar).unwrap_or(f64::NAN);
    let printed_reading = equal_time.chain.as_ref().and_then(|c| c.printed_reading());
    let consistent = verdicts.iter().any(|v| {
        v.pathway == Pathway::equal_time()
            && matches!(v.kind, VerdictKind::ConsistentPrediction { probability }
                if (probability - quantum_conditional).abs() <= TOLERANCE)
    });
    Ok(ConsistencyReport {
        joint,
        chain,
        verdicts,
        non_equal_time,
        equal_time,
        a_i,
        a_ii,
        quantum_conditional,
        printed_reading,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{build_protocol, ProtocolConfig};

    #[test]
    fn chain_is_one_twelfth() {
        let p = Protocol::standard();
        let c = conditional_chain_probability(&p).unwrap();
        let want = [2.0 / 3.0, 0.5, 0.5, 0.5];
        for (f, w) in c.factors.iter().zip(want) {
            assert!((f.value - w).abs() < 1e-12, "{}", f.label);
        }
        assert!((c.product - 1.0 / 12.0).abs() < 1e-12);
        let t = joint_distribution(&evolve_exact(&p)).unwrap();
        assert!((c.product - t.get(WBarOutcome::OkBar, WOutcome::Ok)).abs() < 1e-12);
    }

    #[test]
    fn chain_vanishes_without_tails() {
        let cfg = ProtocolConfig {
            a_heads: 1.0,
            a_tails: 0.0,
            ..ProtocolConfig::default()
        };
        let c = conditional_chain_probability(&build_protocol(cfg).unwrap()).unwrap();
        assert_eq!(c.product, 0.0);
        assert_eq!(c.factors.len(), 1);
    }

    #[test]
    fn default_report() {
        let r = consistency_report(&Protocol::standard()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.verdicts.len(), 9);
        assert_eq!(r.count("ContradictionWithQM"), 1);
        assert!((r.a_ii.value().unwrap() - 0.5).abs() < 1e-12);
        assert!((r.equal_time.joint - r.chain.product).abs() < 1e-12);
        assert!((r.printed_reading.unwrap() - 0.4633883476).abs() < 1e-9);
        assert!(r.non_equal_time.contradiction);
        assert!(r.equal_time_verdict().improved_admits);
    }
}
