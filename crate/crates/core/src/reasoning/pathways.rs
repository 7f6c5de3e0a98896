use super::{lift, InferenceRule, Proposition, ReasoningError, Statement};
use crate::experiment::{evolve_exact, joint_distribution, Coin, Protocol, Step, TimePoint, WBarOutcome, WOutcome};
use crate::perspectives::{
    assign_state, certain_z, open_lab_message, Agent, Body, Conditioning, Herald, PerspectiveError, PerspectiveState,
};
use crate::statevec::{born_probability, Projector, Subsystem, TOLERANCE};
use std::fmt;
use std::str::FromStr;

/// The times at which W, deducing at t3, consults W̄, F and F̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pathway {
    pub wbar: TimePoint,
    pub f: TimePoint,
    pub fbar: TimePoint,
}

impl Pathway {
    pub const W_TIME: TimePoint = TimePoint::T3;

    pub fn new(wbar: TimePoint, f: TimePoint, fbar: TimePoint) -> Self {
        Self { wbar, f, fbar }
    }

    pub fn equal_time() -> Self {
        Self::new(TimePoint::T3, TimePoint::T3, TimePoint::T3)
    }

    /// The route of the original contradiction.
    pub fn original() -> Self {
        Self::new(TimePoint::T3, TimePoint::T2, TimePoint::T1)
    }

    pub fn is_equal_time(&self) -> bool {
        self.wbar == Self::W_TIME && self.f == Self::W_TIME && self.fbar == Self::W_TIME
    }

    /// Whether the published analysis works this route out; every other
    /// verdict comes from the premise checks alone.
    pub fn evaluated_in_source(&self) -> bool {
        *self == Self::equal_time() || *self == Self::original()
    }

    /// Written innermost first: `F̄(t1)F(t2)W̄(t3)W(t3)`.
    pub fn notation(&self) -> String {
        format!("F̄({})F({})W̄({})W({})", self.fbar, self.f, self.wbar, Self::W_TIME)
    }

    fn hops(&self) -> [(Agent, TimePoint); 4] {
        [
            (Agent::W, Self::W_TIME),
            (Agent::WBar, self.wbar),
            (Agent::F, self.f),
            (Agent::FBar, self.fbar),
        ]
    }
}

impl fmt::Display for Pathway {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WBAR:{},F:{},FBAR:{}", self.wbar, self.f, self.fbar)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathwayParseError(pub String);

impl fmt::Display for PathwayParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for PathwayParseError {}

impl FromStr for Pathway {
    type Err = PathwayParseError;

    /// Parses `WBAR:tX,F:tY,FBAR:tZ` (keys in any order, case-insensitive).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: String| PathwayParseError(m);
        let (mut wbar, mut f, mut fbar) = (None, None, None);
        for part in s.split(',') {
            let (k, v) = part
                .split_once(':')
                .ok_or_else(|| err(format!("`{part}` is not of the form AGENT:tN")))?;
            let t: TimePoint = v.parse().map_err(err)?;
            let slot = match k.trim().to_ascii_uppercase().as_str() {
                "WBAR" => &mut wbar,
                "F" => &mut f,
                "FBAR" => &mut fbar,
                other => return Err(err(format!("unknown agent `{other}` (expected WBAR, F, FBAR)"))),
            };
            if slot.replace(t).is_some() {
                return Err(err(format!("agent `{}` given twice", k.trim())));
            }
        }
        match (wbar, f, fbar) {
            (Some(wbar), Some(f), Some(fbar)) => Ok(Pathway { wbar, f, fbar }),
            _ => Err(err("a pathway names WBAR, F and FBAR".into())),
        }
    }
}

/// W̄ is consulted at t3, where his result exists; F and F̄ range over
/// t1..t3. Ordered by (F, F̄).
pub fn enumerate_pathways() -> Vec<Pathway> {
    let mut out = Vec::with_capacity(9);
    for f in TimePoint::REASONING {
        for fbar in TimePoint::REASONING {
            out.push(Pathway::new(TimePoint::T3, f, fbar));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerdictKind {
    ConsistentPrediction {
        probability: f64,
    },
    ContradictionWithQM {
        claimed: f64,
        quantum: f64,
    },
    /// `rule` names the premise check that failed and `hop` the link of the
    /// chain where it failed.
    BrokenPremise {
        rule: &'static str,
        hop: String,
        description: String,
    },
}

impl VerdictKind {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictKind::ConsistentPrediction { .. } => "ConsistentPrediction",
            VerdictKind::ContradictionWithQM { .. } => "ContradictionWithQM",
            VerdictKind::BrokenPremise { .. } => "BrokenPremise",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pathway: Pathway,
    pub kind: VerdictKind,
    /// Rule used to lift the nested statement.
    pub rule: InferenceRule,
    /// Whether the improved rule accepts the nested statement.
    pub improved_admits: bool,
    /// W's nested statement, when the chain could be formed.
    pub statement: Option<Statement>,
    pub transcript: Vec<String>,
}

impl Verdict {
    /// True for verdicts fixed by the premise checks rather than by the
    /// published analysis.
    pub fn artifact_semantics(&self) -> bool {
        !self.pathway.evaluated_in_source()
    }
}

/// Evaluates with the original transfer rule, which is what reproduces the
/// contradiction; [`Verdict::improved_admits`] carries the improved rule's
/// answer.
pub fn evaluate_pathway(protocol: &Protocol, pathway: Pathway) -> Verdict {
    evaluate_pathway_with(protocol, pathway, InferenceRule::Original)
}

struct Broken(VerdictKind);

fn broken(rule: &'static str, hop: String, description: String) -> Broken {
    Broken(VerdictKind::BrokenPremise { rule, hop, description })
}

fn hop_name(outer: (Agent, TimePoint), inner: (Agent, TimePoint)) -> String {
    format!("{}({}) -> {}({})", outer.0.symbol(), outer.1, inner.0.symbol(), inner.1)
}

fn record_time(protocol: &Protocol, agent: Agent) -> Option<TimePoint> {
    let step = match agent {
        Agent::FBar => Step::FBarMeasuresR,
        Agent::F => Step::FMeasuresS,
        Agent::WBar => Step::WBarMeasuresLBar,
        Agent::W => return None,
    };
    Some(protocol.time_of(step))
}

/// R3 compatibility of two assignments of the same lab at the same time.
fn compatible(inner: &Body, outer: &Body) -> Result<bool, PerspectiveError> {
    let tol = 1.0 - TOLERANCE;
    Ok(match (inner, outer) {
        (Body::Records(_), _) | (_, Body::Records(_)) => true,
        (Body::Pure(a), Body::Pure(b)) => a.fidelity(b)? >= tol,
        (Body::Pure(a), Body::Mixed(rho)) => rho.expectation(&Projector::onto(a.clone())?)? >= tol,
        (Body::Mixed(rho), Body::Pure(b)) => rho.expectation(&Projector::onto(b.clone())?)? > TOLERANCE,
        (Body::Mixed(a), Body::Mixed(b)) => a.approx_eq(b, TOLERANCE),
    })
}

fn check_shared_labs(
    hop: String,
    inner: &PerspectiveState,
    outer: &PerspectiveState,
    log: &mut Vec<String>,
) -> Result<(), Broken> {
    for lab in [Subsystem::LBar, Subsystem::L] {
        if let (Some(a), Some(b)) = (inner.lab(lab), outer.lab(lab)) {
            if !compatible(a, b).map_err(|e| broken("R3", hop.clone(), e.to_string()))? {
                return Err(broken(
                    "R3",
                    hop,
                    format!(
                        "{} and {} assign incompatible states to lab {} at {}",
                        inner.agent.symbol(),
                        outer.agent.symbol(),
                        lab,
                        inner.time
                    ),
                ));
            }
            log.push(format!(
                "{}: {} and {} agree on lab {} at {}",
                hop,
                inner.agent.symbol(),
                outer.agent.symbol(),
                lab,
                inner.time
            ));
        }
    }
    Ok(())
}

fn quantum_conditional(protocol: &Protocol) -> Option<f64> {
    let table = joint_distribution(&evolve_exact(protocol)).ok()?;
    table.conditional(WOutcome::Ok, WBarOutcome::OkBar)
}

fn ok_at_t3() -> Proposition {
    Proposition::new(Herald::W(WOutcome::Ok), TimePoint::T3)
}

/// Evaluates one pathway for the herald w̄ = ok̄.
///
/// Premise checks, in order (the semantics for routes the published
/// analysis does not work out are defined here and flagged on the verdict):
/// - R1: a consulted agent must already hold her measurement record.
/// - R2: an agent may not be consulted through a conclusion drawn later than
///   the consulting one.
/// - R4: a conclusion from an earlier time may not be carried forward if the
///   inner agent's own lab was measured by someone else in between.
/// - R3: at equal times, definite assignments of a shared lab must agree.
///
/// Certainty is licensed only by Born probability 1.
pub fn evaluate_pathway_with(protocol: &Protocol, pathway: Pathway, rule: InferenceRule) -> Verdict {
    let mut log = Vec::new();
    let result = evaluate_inner(protocol, pathway, rule, &mut log);
    let (kind, statement) = match result {
        Ok((k, s)) => (k, Some(s)),
        Err(Broken(k)) => (k, None),
    };
    let improved_admits = statement
        .as_ref()
        .is_some_and(|s| lift(s, InferenceRule::Improved).is_ok());
    Verdict {
        pathway,
        kind,
        rule,
        improved_admits,
        statement,
        transcript: log,
    }
}

fn evaluate_inner(
    protocol: &Protocol,
    p: Pathway,
    rule: InferenceRule,
    log: &mut Vec<String>,
) -> Result<(VerdictKind, Statement), Broken> {
    let hops = p.hops();
    let from_persp = |hop: String| move |e: PerspectiveError| broken("catalog", hop.clone(), e.to_string());

    for &(agent, at) in &hops[1..] {
        let rec = record_time(protocol, agent).expect("friends and W̄ measure");
        if at < rec {
            return Err(broken(
                "R1",
                format!("{}({})", agent.symbol(), at),
                format!("{} has no measurement record at {}", agent.symbol(), at),
            ));
        }
    }
    log.push("R1: every consulted agent holds a record".into());

    for w in hops.windows(2) {
        let (outer, inner) = (w[0], w[1]);
        if inner.1 > outer.1 {
            return Err(broken(
                "R2",
                hop_name(outer, inner),
                format!(
                    "{} at {} cannot use a conclusion {} reaches only at {}",
                    outer.0.symbol(),
                    outer.1,
                    inner.0.symbol(),
                    inner.1
                ),
            ));
        }
    }
    log.push("R2: no conclusion is used before it is drawn".into());

    let wbar_measures = protocol.time_of(Step::WBarMeasuresLBar);
    for w in hops.windows(2) {
        let (outer, inner) = (w[0], w[1]);
        if inner.1 < outer.1
            && inner.0.own_lab() == Some(Subsystem::LBar)
            && inner.1 < wbar_measures
            && wbar_measures <= outer.1
        {
            return Err(broken(
                "R4",
                hop_name(outer, inner),
                format!(
                    "{}'s lab Lbar is measured by W̄ at {}, between {} and {}",
                    inner.0.symbol(),
                    wbar_measures,
                    inner.1,
                    outer.1
                ),
            ));
        }
    }
    log.push("R4: no consulted lab is measured between conclusion and use".into());

    let quantum = quantum_conditional(protocol)
        .ok_or_else(|| broken("herald", "W(t3)".into(), "W̄'s result okbar has probability zero".into()))?;

    // W̄
    let hop = hop_name(hops[0], hops[1]);
    let c = Conditioning::new([Herald::WBar(WBarOutcome::OkBar)]).expect("single herald");
    let wbar = assign_state(protocol, Agent::WBar, p.wbar, &c).map_err(from_persp(hop.clone()))?;
    let l = wbar
        .lab(Subsystem::L)
        .and_then(Body::as_pure)
        .expect("W̄ assigns L a pure state")
        .clone();
    log.push(format!("{hop}: W̄ assigns lab L the state {l}"));
    let Some(z) = certain_z(&l, protocol).map_err(|e| broken("Q", hop.clone(), e.to_string()))? else {
        if p.is_equal_time() {
            let value = born_probability(&l, protocol.w_projector(WOutcome::Ok)).expect("normalized");
            log.push(format!(
                "{hop}: no value of z is certain, W̄'s own Born prediction is {value:.12}"
            ));
            let st = Statement::nested(
                Agent::W,
                Pathway::W_TIME,
                Statement::probability(Agent::WBar, p.wbar, ok_at_t3(), value),
            );
            return finish(st, rule, quantum, log);
        }
        return Err(broken(
            "Q",
            hop,
            "W̄'s state of L makes no value of z certain, so F cannot be consulted".into(),
        ));
    };
    log.push(format!("{hop}: by (Q) W̄ is certain that F recorded z={}", z.label()));

    // F
    let hop = hop_name(hops[1], hops[2]);
    let c = Conditioning::new([Herald::Z(z)]).expect("single herald");
    let f = assign_state(protocol, Agent::F, p.f, &c).map_err(from_persp(hop.clone()))?;
    if p.f == p.wbar {
        check_shared_labs(hop.clone(), &f, &wbar, log)?;
    }
    let f_lbar = f.lab(Subsystem::LBar).expect("F assigns Lbar");

    // F̄
    let hop = hop_name(hops[2], hops[3]);
    let fbar_statement = if p.fbar == TimePoint::T3 {
        let rho = f_lbar.as_mixed().expect("F's t3 assignment of Lbar is a mixture");
        let mut branches = Vec::new();
        for o in WBarOutcome::ALL {
            let weight = rho
                .expectation(protocol.wbar_projector(o))
                .map_err(|e| broken("catalog", hop.clone(), e.to_string()))?;
            if weight <= TOLERANCE {
                continue;
            }
            let c = Conditioning::new([Herald::WBar(o)]).expect("single herald");
            let fbar = assign_state(protocol, Agent::FBar, p.fbar, &c).map_err(from_persp(hop.clone()))?;
            let branch_view = PerspectiveState {
                labs: vec![crate::perspectives::LabAssignment {
                    scope: vec![Subsystem::LBar],
                    body: Body::Pure(protocol.wbar_vector(o).clone()),
                }],
                ..f.clone()
            };
            check_shared_labs(hop.clone(), &fbar, &branch_view, log)?;
            let m = open_lab_message(protocol, o).map_err(from_persp(hop.clone()))?;
            log.push(format!(
                "{hop}: with weight {weight:.12} F puts Lbar in {o}; F̄'s messages average to {:.12}",
                m.effective_probability
            ));
            branches.push((
                weight,
                Statement::probability(Agent::FBar, p.fbar, ok_at_t3(), m.effective_probability),
            ));
        }
        Statement::mixture(Agent::F, p.f, branches)
    } else {
        let chi = f_lbar.as_pure().ok_or_else(|| {
            broken(
                "Q",
                hop.clone(),
                format!("F's state of Lbar at {} is not a definite record", p.f),
            )
        })?;
        let r = Coin::ALL
            .into_iter()
            .find(|&r| {
                chi.fidelity(&protocol.coin_record(r))
                    .is_ok_and(|x| x >= 1.0 - TOLERANCE)
            })
            .ok_or_else(|| {
                broken(
                    "Q",
                    hop.clone(),
                    format!("F's state of Lbar at {} is not a definite record", p.f),
                )
            })?;
        log.push(format!("{hop}: by (Q) F is certain that F̄ read r={}", r.label()));
        let c = Conditioning::new([Herald::R(r)]).expect("single herald");
        let fbar = assign_state(protocol, Agent::FBar, p.fbar, &c).map_err(from_persp(hop.clone()))?;
        if p.fbar == p.f {
            check_shared_labs(hop.clone(), &fbar, &f, log)?;
        }
        let record = protocol
            .record_spin(protocol.prepared_spin(r))
            .map_err(|e| broken("catalog", hop.clone(), e.to_string()))?;
        let claim = born_probability(&record, protocol.w_projector(WOutcome::Ok)).expect("normalized");
        log.push(format!("{hop}: F̄ predicts P(w=ok) = {claim:.12}"));
        let fails = Proposition::new(Herald::W(WOutcome::Fails), TimePoint::T3);
        super::certainty_from_born(Agent::FBar, p.fbar, fails, 1.0 - claim)
            .unwrap_or_else(|| Statement::probability(Agent::FBar, p.fbar, ok_at_t3(), claim))
    };
    let st = Statement::nested(
        Agent::W,
        Pathway::W_TIME,
        Statement::nested(Agent::WBar, p.wbar, Statement::nested(Agent::F, p.f, fbar_statement)),
    );
    finish(st, rule, quantum, log)
}

fn finish(
    st: Statement,
    rule: InferenceRule,
    quantum: f64,
    log: &mut Vec<String>,
) -> Result<(VerdictKind, Statement), Broken> {
    let lifted = match lift(&st, rule) {
        Ok(s) => s,
        Err(
            e @ ReasoningError::EqualTimeViolation {
                outer,
                outer_time,
                inner,
                inner_time,
            },
        ) => {
            return Err(broken(
                "C",
                hop_name((outer, outer_time), (inner, inner_time)),
                e.to_string(),
            ))
        }
        Err(e) => return Err(broken("C", "W(t3)".into(), e.to_string())),
    };
    let claimed = match lifted.claim {
        super::Claim::Certain(p) | super::Claim::Probability { event: p, .. } => {
            let v = lifted.value().expect("lifted claim is unconditional");
            if p.outcome == Herald::W(WOutcome::Ok) {
                v
            } else {
                1.0 - v
            }
        }
        _ => unreachable!("lift returns unconditional claims"),
    };
    log.push(format!(
        "W lifts with the {} rule: P(w=ok) = {claimed:.12}",
        rule.name()
    ));
    log.push(format!("quantum conditional P(w=ok | okbar) = {quantum:.12}"));
    let kind = if (claimed - quantum).abs() <= TOLERANCE {
        VerdictKind::ConsistentPrediction { probability: claimed }
    } else {
        VerdictKind::ContradictionWithQM { claimed, quantum }
    };
    Ok((kind, st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use TimePoint::*;

    fn rule_of(v: &Verdict) -> Option<&'static str> {
        match &v.kind {
            VerdictKind::BrokenPremise { rule, .. } => Some(rule),
            _ => None,
        }
    }

    #[test]
    fn nine_pathways_in_order() {
        let ps = enumerate_pathways();
        assert_eq!(ps.len(), 9);
        assert_eq!(ps[0], Pathway::new(T3, T1, T1));
        assert_eq!(ps[8], Pathway::equal_time());
        assert!(ps.contains(&Pathway::original()));
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn default_verdicts() {
        let p = Protocol::standard();
        let v = evaluate_pathway(&p, Pathway::equal_time());
        assert!(
            matches!(v.kind, VerdictKind::ConsistentPrediction { probability } if (probability - 0.5).abs() < 1e-12)
        );
        assert!(v.improved_admits);

        let v = evaluate_pathway(&p, Pathway::original());
        match v.kind {
            VerdictKind::ContradictionWithQM { claimed, quantum } => {
                assert!(claimed.abs() < 1e-12);
                assert!((quantum - 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(!v.improved_admits);

        let v = evaluate_pathway(&p, Pathway::new(T1, T1, T1));
        match &v.kind {
            VerdictKind::BrokenPremise { description, .. } => {
                assert_eq!(description, "W̄ has no measurement record at t1")
            }
            other => panic!("{other:?}"),
        }

        let expect = [
            ((T1, T1), Some("R1")),
            ((T1, T2), Some("R1")),
            ((T1, T3), Some("R1")),
            ((T2, T1), None),
            ((T2, T2), Some("R3")),
            ((T2, T3), Some("R2")),
            ((T3, T1), Some("R4")),
            ((T3, T2), Some("R4")),
            ((T3, T3), None),
        ];
        for ((f, fbar), want) in expect {
            let v = evaluate_pathway(&p, Pathway::new(T3, f, fbar));
            assert_eq!(rule_of(&v), want, "{}", v.pathway);
        }
        let contradictions = enumerate_pathways()
            .into_iter()
            .filter(|&x| matches!(evaluate_pathway(&p, x).kind, VerdictKind::ContradictionWithQM { .. }))
            .count();
        assert_eq!(contradictions, 1);
    }

    #[test]
    fn improved_rule_breaks_the_original_route() {
        let p = Protocol::standard();
        let v = evaluate_pathway_with(&p, Pathway::original(), InferenceRule::Improved);
        assert_eq!(rule_of(&v), Some("C"));
        let v = evaluate_pathway_with(&p, Pathway::equal_time(), InferenceRule::Improved);
        assert!(matches!(v.kind, VerdictKind::ConsistentPrediction { .. }));
    }

    #[test]
    fn parse_and_display() {
        let p: Pathway = "WBAR:t3,F:t2,FBAR:t1".parse().unwrap();
        assert_eq!(p, Pathway::original());
        assert_eq!(p.to_string(), "WBAR:t3,F:t2,FBAR:t1");
        assert_eq!(p.notation(), "F̄(t1)F(t2)W̄(t3)W(t3)");
        assert_eq!(
            "fbar:t3, f:t3 ,wbar:t3".parse::<Pathway>().unwrap(),
            Pathway::equal_time()
        );
        for bad in [
            "",
            "WBAR:t3,F:t2",
            "WBAR:t3,F:t2,FBAR:t9",
            "X:t1,F:t1,FBAR:t1",
            "F:t1,F:t1,FBAR:t1",
        ] {
            assert!(bad.parse::<Pathway>().is_err(), "{bad}");
        }
    }
}
