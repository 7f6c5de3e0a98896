//! Nested statements, the rules that lift them, and the deduction pathways
//! W can take at t3.

mod pathways;
mod report;

pub use pathways::{
    enumerate_pathways, evaluate_pathway, evaluate_pathway_with, Pathway, PathwayParseError, Verdict, VerdictKind,
};
pub use report::{
    conditional_chain_probability, consistency_report, ChainFactor, ChainProduct, ConsistencyReport, ReportError,
};

use crate::experiment::TimePoint;
use crate::perspectives::{Agent, Herald};
use crate::statevec::TOLERANCE;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Deepest nesting W → W̄ → F → F̄.
pub const MAX_DEPTH: usize = 4;

/// An outcome together with the time at which it is claimed to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Proposition {
    pub outcome: Herald,
    pub holds_at: TimePoint,
}

impl Proposition {
    pub fn new(outcome: Herald, holds_at: TimePoint) -> Self {
        Self { outcome, holds_at }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.outcome, self.holds_at)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Claim {
    Certain(Proposition),
    Probability {
        event: Proposition,
        value: f64,
    },
    /// Another agent's statement; its `asserted_at` is that agent's
    /// reasoning time.
    Nested(Box<Statement>),
    /// Weighted alternatives the subject cannot decide between.
    Mixture(Vec<(f64, Statement)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub subject: Agent,
    pub asserted_at: TimePoint,
    pub claim: Claim,
}

impl Statement {
    pub fn certain(subject: Agent, asserted_at: TimePoint, event: Proposition) -> Self {
        Self {
            subject,
            asserted_at,
            claim: Claim::Certain(event),
        }
    }

    pub fn probability(subject: Agent, asserted_at: TimePoint, event: Proposition, value: f64) -> Self {
        Self {
            subject,
            asserted_at,
            claim: Claim::Probability { event, value },
        }
    }

    pub fn nested(subject: Agent, asserted_at: TimePoint, inner: Statement) -> Self {
        Self {
            subject,
            asserted_at,
            claim: Claim::Nested(Box::new(inner)),
        }
    }

    pub fn mixture(subject: Agent, asserted_at: TimePoint, branches: Vec<(f64, Statement)>) -> Self {
        Self {
            subject,
            asserted_at,
            claim: Claim::Mixture(branches),
        }
    }

    /// Number of agents in the chain, this one included.
    pub fn depth(&self) -> usize {
        1 + match &self.claim {
            Claim::Nested(s) => s.depth(),
            Claim::Mixture(bs) => bs.iter().map(|(_, s)| s.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<(), ReasoningError> {
        if self.depth() > MAX_DEPTH {
            return Err(ReasoningError::TooDeep(self.depth()));
        }
        check_single_outcome(std::slice::from_ref(self))
    }

    /// Probability the statement finally assigns to `event`'s outcome, if it
    /// is unconditional.
    pub fn value(&self) -> Option<f64> {
        match &self.claim {
            Claim::Certain(_) => Some(1.0),
            Claim::Probability { value, .. } => Some(*value),
            _ => None,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} is certain that ", self.subject, self.asserted_at)?;
        match &self.claim {
            Claim::Certain(p) => write!(f, "{p}"),
            Claim::Probability { event, value } => write!(f, "P({event}) = {value:.6}"),
            Claim::Nested(s) => write!(f, "{s}"),
            Claim::Mixture(bs) => {
                f.write_str("[")?;
                for (i, (w, s)) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "with weight {w:.6}, {s}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReasoningError {
    #[error("{outer} reasons at {outer_time} through {inner} at {inner_time}: not an equal-time deduction")]
    EqualTimeViolation {
        outer: Agent,
        outer_time: TimePoint,
        inner: Agent,
        inner_time: TimePoint,
    },
    #[error("nesting depth {0} exceeds {MAX_DEPTH}")]
    TooDeep(usize),
    #[error("{agent} at {time} is certain of both {first} and {second}")]
    SingleOutcome {
        agent: Agent,
        time: TimePoint,
        first: Herald,
        second: Herald,
    },
    #[error("mixture branches do not make claims about one common event")]
    IncoherentMixture,
    #[error("mixture weights sum to {0}, not 1")]
    MixtureWeights(f64),
}

/// How a nested certainty is transferred to the outer agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InferenceRule {
    /// Transfer regardless of when the inner agent reasoned.
    Original,
    /// Transfer only when the inner agent reasons at the outer agent's
    /// deduction time.
    Improved,
}

impl InferenceRule {
    pub fn name(self) -> &'static str {
        match self {
            InferenceRule::Original => "original",
            InferenceRule::Improved => "improved",
        }
    }
}

/// Lifts the content of a nested statement to its outer subject, following
/// `rule`. Unconditional statements come back unchanged.
pub fn lift(outer: &Statement, rule: InferenceRule) -> Result<Statement, ReasoningError> {
    let claim = match &outer.claim {
        Claim::Certain(_) | Claim::Probability { .. } => return Ok(outer.clone()),
        Claim::Nested(inner) => {
            check_times(outer, inner, rule)?;
            lift(inner, rule)?.claim
        }
        Claim::Mixture(branches) => {
            let total: f64 = branches.iter().map(|b| b.0).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(ReasoningError::MixtureWeights(total));
            }
            let mut event: Option<Proposition> = None;
            let mut value = 0.0;
            for (w, s) in branches {
                check_times(outer, s, rule)?;
                let lifted = lift(s, rule)?;
                let (e, v) = match lifted.claim {
                    Claim::Certain(e) => (e, 1.0),
                    Claim::Probability { event, value } => (event, value),
                    _ => return Err(ReasoningError::IncoherentMixture),
                };
                if event.is_some_and(|x| x != e) {
                    return Err(ReasoningError::IncoherentMixture);
                }
                event = Some(e);
                value += w * v;
            }
            let event = event.ok_or(ReasoningError::IncoherentMixture)?;
            if (value - 1.0).abs() <= TOLERANCE {
                Claim::Certain(event)
            } else {
                Claim::Probability { event, value }
            }
        }
    };
    Ok(Statement {
        subject: outer.subject,
        asserted_at: outer.asserted_at,
        claim,
    })
}

fn check_times(outer: &Statement, inner: &Statement, rule: InferenceRule) -> Result<(), ReasoningError> {
    if rule == InferenceRule::Improved && inner.asserted_at != outer.asserted_at {
        return Err(ReasoningError::EqualTimeViolation {
            outer: outer.subject,
            outer_time: outer.asserted_at,
            inner: inner.subject,
            inner_time: inner.asserted_at,
        });
    }
    Ok(())
}

/// Improved Assumption (C): lift only through equal-time nesting.
#[allow(non_snake_case)]
pub fn apply_improved_C(outer: &Statement) -> Result<Statement, ReasoningError> {
    lift(outer, InferenceRule::Improved)
}

/// Assumption (Q) in its probability-one form: certainty is licensed only by
/// a Born probability of 1.
pub fn certainty_from_born(subject: Agent, at: TimePoint, event: Proposition, p: f64) -> Option<Statement> {
    (p >= 1.0 - TOLERANCE).then(|| Statement::certain(subject, at, event))
}

/// Assumption (S): no agent is certain, at one time, of two different values
/// of the same variable at the same time. Nested statements are checked for
/// their own subjects; mixture branches are alternatives and are checked
/// separately.
pub fn check_single_outcome(statements: &[Statement]) -> Result<(), ReasoningError> {
    type Key = (Agent, TimePoint, &'static str, TimePoint);
    fn walk(s: &Statement, seen: &mut BTreeMap<Key, Herald>) -> Result<(), ReasoningError> {
        match &s.claim {
            Claim::Certain(p) => {
                let key = (s.subject, s.asserted_at, p.outcome.key(), p.holds_at);
                match seen.get(&key) {
                    Some(prev) if *prev != p.outcome => {
                        return Err(ReasoningError::SingleOutcome {
                            agent: s.subject,
                            time: s.asserted_at,
                            first: *prev,
                            second: p.outcome,
                        })
                    }
                    _ => {
                        seen.insert(key, p.outcome);
                    }
                }
            }
            Claim::Nested(inner) => walk(inner, seen)?,
            Claim::Mixture(bs) => {
                for (_, b) in bs {
                    walk(b, &mut seen.clone())?;
                }
            }
            Claim::Probability { .. } => {}
        }
        Ok(())
    }
    let mut seen = BTreeMap::new();
    for s in statements {
        walk(s, &mut seen)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Coin, WOutcome};
    use TimePoint::*;

    fn ok_at_t3() -> Proposition {
        Proposition::new(Herald::W(WOutcome::Ok), T3)
    }

    fn a_i(inner_time: TimePoint) -> Statement {
        let fbar = |v| Statement::probability(Agent::FBar, inner_time, ok_at_t3(), v);
        let f = Statement::mixture(
            Agent::F,
            T3,
            vec![(0.5, fbar(0.8535533905932737)), (0.5, fbar(0.14644660940672624))],
        );
        Statement::nested(Agent::W, T3, Statement::nested(Agent::WBar, T3, f))
    }

    #[test]
    fn improved_lift_of_a_i() {
        let a = a_i(T3);
        assert_eq!(a.depth(), 4);
        a.validate().unwrap();
        let lifted = apply_improved_C(&a).unwrap();
        assert_eq!(lifted.subject, Agent::W);
        assert!((lifted.value().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unequal_time_is_rejected() {
        let inner = Statement::certain(Agent::F, T2, Proposition::new(Herald::R(Coin::Tails), T1));
        let outer = Statement::nested(Agent::WBar, T3, inner);
        assert!(matches!(
            apply_improved_C(&outer),
            Err(ReasoningError::EqualTimeViolation {
                inner_time: T2,
                outer_time: T3,
                ..
            })
        ));
        assert!(lift(&outer, InferenceRule::Original).is_ok());
        assert!(matches!(
            apply_improved_C(&a_i(T2)),
            Err(ReasoningError::EqualTimeViolation { .. })
        ));
    }

    #[test]
    fn lift_is_idempotent_on_plain_claims() {
        let s = Statement::probability(Agent::W, T3, ok_at_t3(), 0.25);
        assert_eq!(apply_improved_C(&s).unwrap(), s);
        let once = apply_improved_C(&a_i(T3)).unwrap();
        assert_eq!(apply_improved_C(&once).unwrap(), once);
    }

    #[test]
    fn single_outcome_checker() {
        let e = |c| Proposition::new(Herald::R(c), T1);
        let a = Statement::certain(Agent::F, T2, e(Coin::Tails));
        let b = Statement::certain(Agent::F, T2, e(Coin::Heads));
        assert!(check_single_outcome(&[a.clone(), a.clone()]).is_ok());
        assert!(matches!(
            check_single_outcome(&[a.clone(), b.clone()]),
            Err(ReasoningError::SingleOutcome { .. })
        ));
        // different assertion times are different beliefs
        let c = Statement::certain(Agent::F, T3, e(Coin::Heads));
        assert!(check_single_outcome(&[a.clone(), c]).is_ok());
        // alternatives inside a mixture are not held together
        let m = Statement::mixture(Agent::W, T3, vec![(0.5, a), (0.5, b)]);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn depth_limit() {
        let mut s = Statement::certain(Agent::FBar, T3, ok_at_t3());
        for _ in 0..4 {
            s = Statement::nested(Agent::W, T3, s);
        }
        assert_eq!(s.validate(), Err(ReasoningError::TooDeep(5)));
    }

    #[test]
    fn certainty_needs_probability_one() {
        assert!(certainty_from_born(Agent::F, T2, ok_at_t3(), 1.0 - 1e-13).is_some());
        assert!(certainty_from_born(Agent::F, T2, ok_at_t3(), 0.99).is_none());
    }
}
