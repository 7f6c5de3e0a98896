//! State assignments made by the four agents.
//!
//! Each agent describes the labs from where she stands and with what she has
//! been told. The situations covered form a closed catalog (see
//! [`assign_state`]); anything else is reported as not modeled rather than
//! guessed.

mod checks;
mod records;

pub use checks::{
    certain_z, non_equal_time_check, non_equal_time_check_given, open_lab, w_equal_time_prediction,
    w_equal_time_prediction_given, EqualTimePrediction, InconsistencyReport, LabOpening, MessageChain,
};
pub use records::{
    open_lab_message, record_overlap, MessageDistribution, MessageEntry, RecordBranch, RecordSuperposition,
};

use crate::experiment::{Coin, Protocol, SpinZ, TimePoint, WBarOutcome, WOutcome};
use crate::statevec::{born_probability, collapse, DensityMatrix, Ket, Projector, StateError, Subsystem, TOLERANCE};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    FBar,
    F,
    WBar,
    W,
}

impl Agent {
    pub const ALL: [Agent; 4] = [Agent::FBar, Agent::F, Agent::WBar, Agent::W];

    pub fn name(self) -> &'static str {
        match self {
            Agent::FBar => "Fbar",
            Agent::F => "F",
            Agent::WBar => "Wbar",
            Agent::W => "W",
        }
    }

    /// Name with the overbar, as used in prose.
    pub fn symbol(self) -> &'static str {
        match self {
            Agent::FBar => "F̄",
            Agent::F => "F",
            Agent::WBar => "W̄",
            Agent::W => "W",
        }
    }

    /// The lab this agent measures, if any.
    pub fn measured_lab(self) -> Option<Subsystem> {
        match self {
            Agent::WBar => Some(Subsystem::LBar),
            Agent::W => Some(Subsystem::L),
            _ => None,
        }
    }

    /// The lab the agent sits in.
    pub fn own_lab(self) -> Option<Subsystem> {
        match self {
            Agent::FBar => Some(Subsystem::LBar),
            Agent::F => Some(Subsystem::L),
            _ => None,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Agent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fbar" | "f̄" => Ok(Agent::FBar),
            "f" => Ok(Agent::F),
            "wbar" | "w̄" => Ok(Agent::WBar),
            "w" => Ok(Agent::W),
            _ => Err(format!("unknown agent `{s}` (expected Fbar, F, Wbar or W)")),
        }
    }
}

/// An outcome an agent has read or been told.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Herald {
    R(Coin),
    Z(SpinZ),
    WBar(WBarOutcome),
    W(WOutcome),
}

impl Herald {
    pub fn key(self) -> &'static str {
        match self {
            Herald::R(_) => "r",
            Herald::Z(_) => "z",
            Herald::WBar(_) => "wbar",
            Herald::W(_) => "w",
        }
    }

    pub fn value(self) -> &'static str {
        match self {
            Herald::R(c) => c.label(),
            Herald::Z(z) => z.label(),
            Herald::WBar(o) => o.label(),
            Herald::W(o) => o.label(),
        }
    }
}

impl fmt::Display for Herald {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.key(), self.value())
    }
}

impl FromStr for Herald {
    type Err = String;

    /// Parses `key=value`, e.g. `r=tails`, `z=+1/2`, `wbar=okbar`, `w=ok`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| format!("condition `{s}` is not of the form key=value"))?;
        let v = v.trim().to_ascii_lowercase();
        let bad = || format!("unknown value `{v}` for `{}`", k.trim());
        match k.trim().to_ascii_lowercase().as_str() {
            "r" | "coin" => Coin::from_label(&v).map(Herald::R).ok_or_else(bad),
            "z" => match v.as_str() {
                "minus" | "down" | "-1/2" | "-" => Ok(Herald::Z(SpinZ::Minus)),
                "plus" | "up" | "+1/2" | "1/2" | "+" => Ok(Herald::Z(SpinZ::Plus)),
                _ => Err(bad()),
            },
            "wbar" => WBarOutcome::from_label(&v).map(Herald::WBar).ok_or_else(bad),
            "w" => WOutcome::from_label(&v).map(Herald::W).ok_or_else(bad),
            other => Err(format!("unknown condition key `{other}` (expected r, z, wbar or w)")),
        }
    }
}

/// Set of heralded outcomes, at most one per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conditioning(BTreeSet<Herald>);

impl Conditioning {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(heralds: impl IntoIterator<Item = Herald>) -> Result<Self, PerspectiveError> {
        let mut set = BTreeSet::new();
        for h in heralds {
            if set.iter().any(|o: &Herald| o.key() == h.key() && *o != h) {
                return Err(PerspectiveError::ConflictingHeralds(h.key()));
            }
            set.insert(h);
        }
        Ok(Self(set))
    }

    pub fn heralds(&self) -> impl Iterator<Item = Herald> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coin(&self) -> Option<Coin> {
        self.heralds().find_map(|h| match h {
            Herald::R(c) => Some(c),
            _ => None,
        })
    }

    pub fn z(&self) -> Option<SpinZ> {
        self.heralds().find_map(|h| match h {
            Herald::Z(z) => Some(z),
            _ => None,
        })
    }

    pub fn wbar(&self) -> Option<WBarOutcome> {
        self.heralds().find_map(|h| match h {
            Herald::WBar(o) => Some(o),
            _ => None,
        })
    }

    pub fn w(&self) -> Option<WOutcome> {
        self.heralds().find_map(|h| match h {
            Herald::W(o) => Some(o),
            _ => None,
        })
    }
}

impl fmt::Display for Conditioning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerspectiveError {
    #[error("no state assignment is modeled for {agent} at {time} given {conditioning}")]
    NotModeled {
        agent: Agent,
        time: TimePoint,
        conditioning: Conditioning,
    },
    #[error("heralded outcome {0} has probability zero")]
    ImpossibleHerald(String),
    #[error("conflicting values for `{0}`")]
    ConflictingHeralds(&'static str),
    #[error(transparent)]
    State(#[from] StateError),
}

/// What an agent writes down for one lab (or for both jointly).
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Pure(Ket),
    Mixed(DensityMatrix),
    Records(RecordSuperposition),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Pure(_) => "pure",
            Body::Mixed(_) => "mixed",
            Body::Records(_) => "record-superposition",
        }
    }

    /// Born probability of `proj` under this assignment.
    pub fn probability(&self, proj: &Projector) -> Result<f64, StateError> {
        match self {
            Body::Pure(k) => born_probability(k, proj),
            Body::Mixed(rho) => rho.expectation(proj),
            Body::Records(rs) => born_probability(&rs.state()?, proj),
        }
    }

    pub fn as_pure(&self) -> Option<&Ket> {
        match self {
            Body::Pure(k) => Some(k),
            _ => None,
        }
    }

    pub fn as_mixed(&self) -> Option<&DensityMatrix> {
        match self {
            Body::Mixed(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_records(&self) -> Option<&RecordSuperposition> {
        match self {
            Body::Records(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabAssignment {
    pub scope: Vec<Subsystem>,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerspectiveState {
    pub agent: Agent,
    pub time: TimePoint,
    pub conditioning: Conditioning,
    pub labs: Vec<LabAssignment>,
}

impl PerspectiveState {
    /// Assignment to a single lab (or microsystem).
    pub fn lab(&self, sub: Subsystem) -> Option<&Body> {
        self.labs.iter().find(|a| a.scope == [sub]).map(|a| &a.body)
    }

    /// Assignment whose scope covers more than one subsystem.
    pub fn joint(&self) -> Option<&LabAssignment> {
        self.labs.iter().find(|a| a.scope.len() > 1)
    }
}

fn collapse_herald(state: &Ket, proj: &Projector, what: impl fmt::Display) -> Result<Ket, PerspectiveError> {
    match collapse(state, proj) {
        Ok((k, _)) => Ok(k),
        Err(StateError::ImpossibleBranch { .. }) => Err(PerspectiveError::ImpossibleHerald(what.to_string())),
        Err(e) => Err(e.into()),
    }
}

/// L̄ as F describes it once she has read `z`: the row-4 state conditioned on
/// her record.
pub fn f_conditional_lbar(protocol: &Protocol, z: SpinZ) -> Result<Ket, PerspectiveError> {
    let post = collapse_herald(protocol.pre_measurement_state(), &protocol.z_projector(z), Herald::Z(z))?;
    Ok(post.factor(Subsystem::LBar)?)
}

/// F's t3 description of L̄ (knowing z, and that W̄ has measured, but not
/// his result): W̄'s measurement applied without selection.
pub fn f_lbar_after_wbar(protocol: &Protocol, z: SpinZ) -> Result<DensityMatrix, PerspectiveError> {
    let chi = f_conditional_lbar(protocol, z)?;
    let mut branches = Vec::new();
    for o in WBarOutcome::ALL {
        let v = protocol.wbar_vector(o);
        let p = v.fidelity(&chi)?;
        if p > TOLERANCE {
            branches.push((p, v.clone()));
        }
    }
    let total: f64 = branches.iter().map(|b| b.0).sum();
    for b in &mut branches {
        b.0 /= total;
    }
    Ok(crate::statevec::mix(&branches)?)
}

/// W̄'s and W's heralded description of both labs.
fn outside_view(protocol: &Protocol, cond: &Conditioning) -> Result<Vec<LabAssignment>, PerspectiveError> {
    let mut state = protocol.pre_measurement_state().clone();
    if let Some(o) = cond.wbar() {
        state = collapse_herald(&state, protocol.wbar_projector(o), Herald::WBar(o))?;
    }
    if let Some(o) = cond.w() {
        state = collapse_herald(&state, protocol.w_projector(o), Herald::W(o))?;
    }
    let mut labs = Vec::new();
    match (state.factor(Subsystem::LBar), state.factor(Subsystem::L)) {
        (Ok(lbar), Ok(l)) if cond.wbar().is_some() => {
            labs.push(LabAssignment {
                scope: vec![Subsystem::LBar],
                body: Body::Pure(lbar),
            });
            labs.push(LabAssignment {
                scope: vec![Subsystem::L],
                body: Body::Pure(l),
            });
        }
        _ => {}
    }
    labs.push(LabAssignment {
        scope: state.space().to_vec(),
        body: Body::Pure(state),
    });
    Ok(labs)
}

/// An agent's state assignment in one of the cataloged situations:
///
/// | agent | time | conditioning | labs |
/// |---|---|---|---|
/// | F̄ | t1 | r | L̄ = record of r, S = prepared spin |
/// | F̄ | t2 | r | L̄ = record of r, L = F's record of the prepared spin |
/// | F̄ | t3 | w̄ | L̄ = w̄ vector, L = record superposition |
/// | F | t2 | z | L = record of z, L̄ = conditional state |
/// | F | t3 | z | L = record of z, L̄ = mixture over W̄'s outcomes |
/// | W̄ | t3 | w̄ | both labs after W̄'s collapse |
/// | W | t3 | ∅, w̄ or w̄ and w | both labs, heralded |
///
/// At t3 F̄'s conditioning is the branch F attributes to L̄, which is the
/// same variable W̄ reads out.
pub fn assign_state(
    protocol: &Protocol,
    agent: Agent,
    time: TimePoint,
    conditioning: &Conditioning,
) -> Result<PerspectiveState, PerspectiveError> {
    let not_modeled = || PerspectiveError::NotModeled {
        agent,
        time,
        conditioning: conditioning.clone(),
    };
    let only = |h: Option<Herald>| conditioning.len() == 1 && h.is_some();
    let lab = |sub: Subsystem, body: Body| LabAssignment { scope: vec![sub], body };

    let labs = match (agent, time) {
        (Agent::FBar, TimePoint::T1 | TimePoint::T2) if only(conditioning.coin().map(Herald::R)) => {
            let r = conditioning.coin().expect("checked");
            let p = born_probability(protocol.initial_state(), &protocol.coin_projector(r))?;
            if p <= TOLERANCE {
                return Err(PerspectiveError::ImpossibleHerald(Herald::R(r).to_string()));
            }
            let spin = protocol.prepared_spin(r);
            let second = if time == TimePoint::T1 {
                lab(Subsystem::S, Body::Pure(spin.clone()))
            } else {
                lab(Subsystem::L, Body::Pure(protocol.record_spin(spin)?))
            };
            vec![lab(Subsystem::LBar, Body::Pure(protocol.coin_record(r))), second]
        }
        (Agent::FBar, TimePoint::T3) if only(conditioning.wbar().map(Herald::WBar)) => {
            let o = conditioning.wbar().expect("checked");
            vec![
                lab(Subsystem::LBar, Body::Pure(protocol.wbar_vector(o).clone())),
                lab(Subsystem::L, Body::Records(RecordSuperposition::new(protocol, o)?)),
            ]
        }
        (Agent::F, TimePoint::T2 | TimePoint::T3) if only(conditioning.z().map(Herald::Z)) => {
            let z = conditioning.z().expect("checked");
            let lbar = if time == TimePoint::T2 {
                Body::Pure(f_conditional_lbar(protocol, z)?)
            } else {
                Body::Mixed(f_lbar_after_wbar(protocol, z)?)
            };
            vec![
                lab(Subsystem::L, Body::Pure(protocol.z_record(z))),
                lab(Subsystem::LBar, lbar),
            ]
        }
        (Agent::WBar, TimePoint::T3) if only(conditioning.wbar().map(Herald::WBar)) => {
            outside_view(protocol, conditioning)?
        }
        (Agent::W, TimePoint::T3)
            if conditioning.coin().is_none()
                && conditioning.z().is_none()
                && (conditioning.w().is_none() || conditioning.wbar().is_some()) =>
        {
            outside_view(protocol, conditioning)?
        }
        _ => return Err(not_modeled()),
    };
    Ok(PerspectiveState {
        agent,
        time,
        conditioning: conditioning.clone(),
        labs,
    })
}
