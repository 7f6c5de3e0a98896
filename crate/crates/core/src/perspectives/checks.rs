use super::records::{open_lab_message, MessageDistribution};
use super::{assign_state, f_conditional_lbar, Agent, Conditioning, Herald, PerspectiveError};
use crate::experiment::{Coin, Protocol, SpinZ, TimePoint, WBarOutcome, WOutcome};
use crate::statevec::{born_probability, collapse, Ket, Projector, StateError, Subsystem, TOLERANCE};

/// F's mixture over W̄'s outcomes, each weighted into F̄'s announced
/// message.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageChain {
    /// The spin value F is certain of.
    pub z: SpinZ,
    /// `(outcome, weight in F's mixture, F̄'s messages in that branch)`.
    pub branches: Vec<(WBarOutcome, f64, MessageDistribution)>,
    pub value: f64,
}

impl MessageChain {
    /// The same sum with the second term carrying one more factor ½, as the
    /// closing formula is printed. Only meaningful with two branches.
    pub fn printed_reading(&self) -> Option<f64> {
        match self.branches.as_slice() {
            [(_, w0, m0), (_, w1, m1)] => Some(w0 * m0.effective_probability + w1 * 0.5 * m1.effective_probability),
            _ => None,
        }
    }
}

/// W's prediction at t3 for w = ok after hearing `herald`, deduced through
/// the other agents at the same time.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualTimePrediction {
    pub herald: WBarOutcome,
    /// W's Born probability for the herald itself.
    pub herald_probability: f64,
    /// Probability of w = ok from W̄'s t3 assignment of lab L.
    pub wbar_born: f64,
    /// Present when W̄'s assignment makes F certain of z, so the deduction
    /// can continue through F's mixture and F̄'s messages.
    pub chain: Option<MessageChain>,
    pub prediction: f64,
    /// `herald_probability × prediction`.
    pub joint: f64,
}

impl EqualTimePrediction {
    pub fn chain_agrees_with_born(&self, tol: f64) -> Option<bool> {
        self.chain.as_ref().map(|c| (c.value - self.wbar_born).abs() <= tol)
    }
}

/// The value of z that `l` (a state of lab L) makes certain, if any.
pub fn certain_z(l: &Ket, protocol: &Protocol) -> Result<Option<SpinZ>, StateError> {
    for z in SpinZ::ALL {
        if born_probability(l, &protocol.z_projector(z))? >= 1.0 - TOLERANCE {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// Equal-time deduction for the herald w̄ = ok̄.
pub fn w_equal_time_prediction(protocol: &Protocol) -> Result<EqualTimePrediction, PerspectiveError> {
    w_equal_time_prediction_given(protocol, WBarOutcome::OkBar)
}

pub fn w_equal_time_prediction_given(
    protocol: &Protocol,
    herald: WBarOutcome,
) -> Result<EqualTimePrediction, PerspectiveError> {
    let herald_probability = born_probability(protocol.pre_measurement_state(), protocol.wbar_projector(herald))?;
    let c = Conditioning::new([Herald::WBar(herald)])?;
    let wbar = assign_state(protocol, Agent::WBar, TimePoint::T3, &c)?;
    let l = wbar
        .lab(Subsystem::L)
        .and_then(|b| b.as_pure())
        .expect("W̄ holds a pure state of L");
    let ok = protocol.w_projector(WOutcome::Ok);
    let wbar_born = born_probability(l, ok)?;

    let chain = match certain_z(l, protocol)? {
        None => None,
        Some(z) => {
            let chi = f_conditional_lbar(protocol, z)?;
            let mut branches = Vec::new();
            let mut value = 0.0;
            for o in WBarOutcome::ALL {
                let weight = protocol.wbar_vector(o).fidelity(&chi)?;
                if weight <= TOLERANCE {
                    continue;
                }
                let m = open_lab_message(protocol, o)?;
                value += weight * m.effective_probability;
                branches.push((o, weight, m));
            }
            Some(MessageChain { z, branches, value })
        }
    };
    let prediction = chain.as_ref().map_or(wbar_born, |c| c.value);
    Ok(EqualTimePrediction {
        herald,
        herald_probability,
        wbar_born,
        chain,
        prediction,
        joint: herald_probability * prediction,
    })
}

/// Deduction that runs backwards in time from W̄'s result, checked against
/// the premise it arrives at.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistencyReport {
    pub herald: WBarOutcome,
    /// `P(z)` in the globally heralded state, indexed by [`SpinZ::index`].
    pub z_heralded: [f64; 2],
    /// The value of z the heralded state rules out, if any.
    pub excluded_z: Option<SpinZ>,
    /// L̄ at t1 as inferred from F's record, when it is a definite record.
    pub inferred_coin: Option<Coin>,
    /// `P(excluded z)` recomputed from the inferred t1 premise.
    pub excluded_given_premise: Option<f64>,
    pub contradiction: bool,
}

impl InconsistencyReport {
    pub fn excluded_heralded(&self) -> Option<f64> {
        self.excluded_z.map(|z| self.z_heralded[z.index()])
    }
}

/// Default herald ok̄.
pub fn non_equal_time_check(protocol: &Protocol) -> Result<InconsistencyReport, PerspectiveError> {
    non_equal_time_check_given(protocol, WBarOutcome::OkBar)
}

pub fn non_equal_time_check_given(
    protocol: &Protocol,
    herald: WBarOutcome,
) -> Result<InconsistencyReport, PerspectiveError> {
    let post = match collapse(protocol.pre_measurement_state(), protocol.wbar_projector(herald)) {
        Ok((k, _)) => k,
        Err(StateError::ImpossibleBranch { .. }) => {
            return Err(PerspectiveError::ImpossibleHerald(Herald::WBar(herald).to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let mut z_heralded = [0.0; 2];
    for z in SpinZ::ALL {
        z_heralded[z.index()] = born_probability(&post, &protocol.z_projector(z))?;
    }
    let excluded_z = SpinZ::ALL.into_iter().find(|z| z_heralded[z.index()] <= TOLERANCE);
    let mut inferred_coin = None;
    let mut excluded_given_premise = None;
    if let Some(ex) = excluded_z {
        let kept = SpinZ::from_index(1 - ex.index());
        let chi = f_conditional_lbar(protocol, kept)?;
        inferred_coin = Coin::ALL.into_iter().find(|&r| {
            chi.fidelity(&protocol.coin_record(r))
                .is_ok_and(|f| f >= 1.0 - TOLERANCE)
        });
        if let Some(r) = inferred_coin {
            let proj = protocol.f_basis().projector(ex.basis_label())?;
            excluded_given_premise = Some(born_probability(protocol.prepared_spin(r), proj)?);
        }
    }
    let contradiction = match (excluded_z, excluded_given_premise) {
        (Some(z), Some(b)) => (b - z_heralded[z.index()]).abs() > TOLERANCE,
        _ => false,
    };
    Ok(InconsistencyReport {
        herald,
        z_heralded,
        excluded_z,
        inferred_coin,
        excluded_given_premise,
        contradiction,
    })
}

/// One outcome of opening lab L̄ with the record projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LabOpening {
    pub coin: Coin,
    pub probability: f64,
    pub post: Option<Ket>,
}

/// Opens lab L̄: the only projectors available are those onto F̄'s records
/// |h̄⟩ and |t̄⟩, so whatever is found afterwards is a definite record.
pub fn open_lab(state: &Ket) -> Result<Vec<LabOpening>, StateError> {
    Coin::ALL
        .into_iter()
        .map(|coin| {
            let proj = Projector::onto(Ket::basis(Subsystem::LBar, coin.index()))?;
            let probability = born_probability(state, &proj)?;
            let post = if probability > TOLERANCE {
                Some(collapse(state, &proj)?.0)
            } else {
                None
            };
            Ok(LabOpening {
                coin,
                probability,
                post,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{build_protocol, evolve_exact, joint_distribution, ProtocolConfig};

    #[test]
    fn default_equal_time() {
        let p = Protocol::standard();
        let e = w_equal_time_prediction(&p).unwrap();
        assert!((e.prediction - 0.5).abs() < 1e-12);
        assert!((e.joint - 1.0 / 12.0).abs() < 1e-12);
        assert!((e.herald_probability - 1.0 / 6.0).abs() < 1e-12);
        let chain = e.chain.as_ref().unwrap();
        assert_eq!(chain.z, SpinZ::Plus);
        for (_, w, _) in &chain.branches {
            assert!((w - 0.5).abs() < 1e-12);
        }
        assert_eq!(e.chain_agrees_with_born(1e-12), Some(true));
        let t = joint_distribution(&evolve_exact(&p)).unwrap();
        let q = t.conditional(WOutcome::Ok, WBarOutcome::OkBar).unwrap();
        assert!((e.prediction - q).abs() < 1e-12);
        let printed = chain.printed_reading().unwrap();
        assert!((printed - 0.4633883476).abs() < 1e-9);
    }

    #[test]
    fn default_non_equal_time() {
        let r = non_equal_time_check(&Protocol::standard()).unwrap();
        assert_eq!(r.excluded_z, Some(SpinZ::Minus));
        assert!(r.excluded_heralded().unwrap().abs() < 1e-12);
        assert_eq!(r.inferred_coin, Some(Coin::Tails));
        assert!((r.excluded_given_premise.unwrap() - 0.5).abs() < 1e-12);
        assert!(r.contradiction);
    }

    #[test]
    fn generic_config_has_no_certain_chain() {
        let cfg = ProtocolConfig::from_angles(0.7, 0.4, 1.9, 0.3, 2.2, 1.1);
        let p = build_protocol(cfg).unwrap();
        let e = w_equal_time_prediction(&p).unwrap();
        assert!(e.chain.is_none());
        let t = joint_distribution(&evolve_exact(&p)).unwrap();
        let q = t.conditional(WOutcome::Ok, WBarOutcome::OkBar).unwrap();
        assert!((e.prediction - q).abs() < 1e-12);
        let r = non_equal_time_check(&p).unwrap();
        assert!(r.excluded_z.is_none() && !r.contradiction);
    }

    /// A config where W̄'s herald still leaves L in a z eigenstate but the
    /// message chain no longer reproduces the quantum conditional.
    #[test]
    fn chain_is_specific_to_standard_parameters() {
        // prep(tails) tilted; W̄'s basis chosen so the okbar branch kills z = −½
        let a = [(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()];
        let tails = [0.8f64, 0.6]; // (up, down)
                                   // record components along −½ (= down): heads → 1, tails → 0.6
        let b = (-a[0] * 1.0).atan2(a[1] * tails[1]);
        let mut cfg = ProtocolConfig::default();
        cfg.spin_prep[1] = tails;
        cfg.wbar_basis.first = [b.cos(), b.sin()];
        cfg.wbar_basis.second = [-b.sin(), b.cos()];
        let p = build_protocol(cfg).unwrap();
        let e = w_equal_time_prediction(&p).unwrap();
        assert!(e.chain.is_some());
        assert_eq!(e.chain_agrees_with_born(1e-9), Some(false));
        let t = joint_distribution(&evolve_exact(&p)).unwrap();
        let q = t.conditional(WOutcome::Ok, WBarOutcome::OkBar).unwrap();
        assert!((e.wbar_born - q).abs() < 1e-12);
    }

    #[test]
    fn opening_lab_gives_definite_records() {
        let p = Protocol::standard();
        let outcomes = open_lab(p.wbar_vector(WBarOutcome::OkBar)).unwrap();
        for o in &outcomes {
            assert!((o.probability - 0.5).abs() < 1e-12);
            let post = o.post.as_ref().unwrap();
            assert_eq!(post.nonzero_count(), 1);
            assert!(post.same_ray(&p.coin_record(o.coin), 1e-12));
        }
        assert!(open_lab(&Ket::basis(Subsystem::L, 0)).is_err());
    }
}
