use super::config::{BasisPair, ProtocolConfig};
use super::outcome::{Coin, SpinZ, WBarOutcome, WOutcome};
use super::time::TimePoint;
use super::ExperimentError;
use crate::statevec::{Basis, Complex64, Ket, Projector, StateError, Subsystem};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The operations of one round, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Step {
    Initialize,
    FBarMeasuresR,
    FBarSendsSpin,
    FMeasuresS,
    WBarMeasuresLBar,
    WMeasuresL,
}

impl Step {
    pub const ALL: [Step; 6] = [
        Step::Initialize,
        Step::FBarMeasuresR,
        Step::FBarSendsSpin,
        Step::FMeasuresS,
        Step::WBarMeasuresLBar,
        Step::WMeasuresL,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Step::Initialize => "initialization of quantum system R",
            Step::FBarMeasuresR => "Fbar measures R, sets the spin S",
            Step::FBarSendsSpin => "Fbar sends spin S to F",
            Step::FMeasuresS => "F measures S",
            Step::WBarMeasuresLBar => "Wbar measures lab Lbar",
            Step::WMeasuresL => "W measures lab L",
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(
            self,
            Step::FBarMeasuresR | Step::FMeasuresS | Step::WBarMeasuresLBar | Step::WMeasuresL
        )
    }

    /// Interval the step belongs to under `config`'s schedule.
    pub fn time(self, config: &ProtocolConfig) -> TimePoint {
        let t = &config.time_labels;
        match self {
            Step::Initialize => TimePoint::T0,
            Step::FBarMeasuresR | Step::FBarSendsSpin => t.fbar_measures,
            Step::FMeasuresS => t.f_measures,
            Step::WBarMeasuresLBar => t.wbar_measures,
            Step::WMeasuresL => t.w_measures,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

/// Global state after one of the unbranched steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub step: Step,
    pub time: TimePoint,
    pub state: Ket,
}

/// Executable schedule built from a validated [`ProtocolConfig`].
///
/// From outside the labs, F̄'s and F's measurements are unitary: the
/// outcome is copied into the lab record (R → L̄, S → L) and no branch is
/// selected. Only W̄ and W select outcomes.
#[derive(Debug, Clone)]
pub struct Protocol {
    config: ProtocolConfig,
    initial: Ket,
    prepared: [Ket; 2],
    coin_basis: Basis,
    f_basis: Basis,
    wbar_basis: Basis,
    w_basis: Basis,
    stages: Vec<Stage>,
}

fn unit(sub: Subsystem, v: [f64; 2]) -> Result<Ket, StateError> {
    let c = [Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)];
    Ket::from_amplitudes_unnormalized(sub, &c)?.normalized()
}

/// Orthonormal basis from config vectors that are orthonormal to 1e-9;
/// Gram-Schmidt brings them to machine precision.
fn basis(sub: Subsystem, pair: &BasisPair, names: [&str; 2]) -> Result<Basis, StateError> {
    let a = unit(sub, pair.first)?;
    let b = unit(sub, pair.second)?;
    let b = b.sub(&a.scale(a.inner(&b)?))?.normalized()?;
    Basis::new(sub, vec![(names[0].to_owned(), a), (names[1].to_owned(), b)])
}

/// Validates `config` and assembles the round schedule with its unbranched
/// stage states.
pub fn build_protocol(config: ProtocolConfig) -> Result<Protocol, ExperimentError> {
    config.validate()?;
    let initial = unit(Subsystem::R, [config.a_heads, config.a_tails])?;
    let prepared = [
        unit(Subsystem::S, config.spin_prep[0])?,
        unit(Subsystem::S, config.spin_prep[1])?,
    ];
    let f_basis = basis(Subsystem::S, &config.f_basis, ["down", "up"])?;
    let wbar_basis = basis(Subsystem::LBar, &config.wbar_basis, ["okbar", "failsbar"])?;
    let w_basis = basis(Subsystem::L, &config.w_basis, ["ok", "fails"])?;

    let mut controlled: Option<Ket> = None;
    for coin in Coin::ALL {
        let amp = initial.amplitude(&[coin.index()]);
        let term = Ket::basis(Subsystem::R, coin.index())
            .tensor(&prepared[coin.index()])?
            .scale(amp);
        controlled = Some(match controlled {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let row2 = controlled.expect("two coin outcomes").normalized()?;
    let row3 = row2.relabel(Subsystem::R, Subsystem::LBar)?;
    let row4 = row3.map_subsystem(Subsystem::S, Subsystem::L, &f_basis.rows())?;
    if !row4.is_normalized() {
        return Err(StateError::Unnormalized {
            norm_sqr: row4.norm_sqr(),
        }
        .into());
    }

    let stage = |step: Step, state: Ket| Stage {
        step,
        time: step.time(&config),
        state,
    };
    let stages = vec![
        stage(Step::Initialize, initial.clone()),
        stage(Step::FBarMeasuresR, row2),
        stage(Step::FBarSendsSpin, row3),
        stage(Step::FMeasuresS, row4),
    ];
    Ok(Protocol {
        coin_basis: Basis::computational(Subsystem::R),
        config,
        initial,
        prepared,
        f_basis,
        wbar_basis,
        w_basis,
        stages,
    })
}

impl Protocol {
    /// The standard protocol.
    pub fn standard() -> Self {
        build_protocol(ProtocolConfig::default()).expect("default config is valid")
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn initial_state(&self) -> &Ket {
        &self.initial
    }

    /// Spin state F̄ sends for `coin`.
    pub fn prepared_spin(&self, coin: Coin) -> &Ket {
        &self.prepared[coin.index()]
    }

    pub fn coin_basis(&self) -> &Basis {
        &self.coin_basis
    }

    pub fn f_basis(&self) -> &Basis {
        &self.f_basis
    }

    pub fn wbar_basis(&self) -> &Basis {
        &self.wbar_basis
    }

    pub fn w_basis(&self) -> &Basis {
        &self.w_basis
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, step: Step) -> Option<&Stage> {
        self.stages.iter().find(|s| s.step == step)
    }

    /// Joint state of L̄ ⊗ L after F's measurement, before W̄ acts.
    pub fn pre_measurement_state(&self) -> &Ket {
        &self.stages[3].state
    }

    pub fn time_of(&self, step: Step) -> TimePoint {
        step.time(&self.config)
    }

    /// Lab L as it is after F measures the spin state `spin`, viewed from
    /// outside: the spin re-expressed in F's basis and stored as the record.
    pub fn record_spin(&self, spin: &Ket) -> Result<Ket, StateError> {
        spin.map_subsystem(Subsystem::S, Subsystem::L, &self.f_basis.rows())
    }

    /// L̄ record for F̄'s outcome.
    pub fn coin_record(&self, coin: Coin) -> Ket {
        Ket::basis(Subsystem::LBar, coin.index())
    }

    pub fn z_record(&self, z: SpinZ) -> Ket {
        Ket::basis(Subsystem::L, z.index())
    }

    pub fn coin_projector(&self, coin: Coin) -> Projector {
        Projector::onto(Ket::basis(Subsystem::R, coin.index())).expect("basis vector")
    }

    pub fn lab_coin_projector(&self, coin: Coin) -> Projector {
        Projector::onto(self.coin_record(coin)).expect("basis vector")
    }

    pub fn z_projector(&self, z: SpinZ) -> Projector {
        Projector::onto(self.z_record(z)).expect("basis vector")
    }

    pub fn wbar_vector(&self, o: WBarOutcome) -> &Ket {
        self.wbar_basis.vector(o.label()).expect("basis has both outcomes")
    }

    pub fn w_vector(&self, o: WOutcome) -> &Ket {
        self.w_basis.vector(o.label()).expect("basis has both outcomes")
    }

    pub fn wbar_projector(&self, o: WBarOutcome) -> &Projector {
        self.wbar_basis.projector(o.label()).expect("basis has both outcomes")
    }

    pub fn w_projector(&self, o: WOutcome) -> &Projector {
        self.w_basis.projector(o.label()).expect("basis has both outcomes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ConfigError;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn default_stage_states() {
        let p = Protocol::standard();
        let s3 = (1.0f64 / 3.0).sqrt();
        let h = 0.5f64.sqrt();
        let right = Ket::from_real(Subsystem::S, &[h, h]).unwrap();
        let row2 = Ket::basis(Subsystem::R, 0)
            .tensor(&Ket::basis_named(Subsystem::S, "down").unwrap())
            .unwrap()
            .scale(c(s3))
            .add(
                &Ket::basis(Subsystem::R, 1)
                    .tensor(&right)
                    .unwrap()
                    .scale(c((2.0f64 / 3.0).sqrt())),
            )
            .unwrap();
        assert!(p.stage(Step::FBarMeasuresR).unwrap().state.same_ray(&row2, 1e-12));

        let row4 = p.pre_measurement_state();
        assert_eq!(row4.space(), &[Subsystem::LBar, Subsystem::L]);
        for labels in [["hbar", "minus"], ["tbar", "minus"], ["tbar", "plus"]] {
            assert!((row4.amplitude_of(&labels).unwrap() - c(s3)).norm() < 1e-12);
        }
        assert_eq!(row4.nonzero_count(), 3);
    }

    #[test]
    fn relabeling_is_an_isometry() {
        let p = Protocol::standard();
        let row2 = &p.stage(Step::FBarMeasuresR).unwrap().state;
        let other = Ket::basis(Subsystem::R, 1)
            .tensor(&Ket::basis(Subsystem::S, 0))
            .unwrap();
        let before = row2.inner(&other).unwrap();
        let after = row2
            .relabel(Subsystem::R, Subsystem::LBar)
            .unwrap()
            .inner(&other.relabel(Subsystem::R, Subsystem::LBar).unwrap())
            .unwrap();
        assert!((before - after).norm() < 1e-15);
        // S → L record through F's basis
        let row3 = &p.stage(Step::FBarSendsSpin).unwrap().state;
        let a = p.record_spin(row3).unwrap();
        let b = p
            .record_spin(&other.relabel(Subsystem::R, Subsystem::LBar).unwrap())
            .unwrap();
        let direct = row3
            .inner(&other.relabel(Subsystem::R, Subsystem::LBar).unwrap())
            .unwrap();
        assert!((a.inner(&b).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_config_with_field() {
        let mut cfg = ProtocolConfig::default();
        cfg.wbar_basis.second = cfg.wbar_basis.first;
        match build_protocol(cfg) {
            Err(ExperimentError::Config(ConfigError::Validation { field, .. })) => {
                assert_eq!(field, "bases.wbar")
            }
            other => panic!("unexpected {other:?}"),
        }
        let cfg = ProtocolConfig {
            a_heads: 0.9,
            ..ProtocolConfig::default()
        };
        assert!(matches!(
            build_protocol(cfg),
            Err(ExperimentError::Config(ConfigError::Validation { .. }))
        ));
    }

    #[test]
    fn step_schedule() {
        let p = Protocol::standard();
        assert_eq!(p.time_of(Step::FBarMeasuresR), TimePoint::T1);
        assert_eq!(p.time_of(Step::FMeasuresS), TimePoint::T2);
        assert_eq!(p.time_of(Step::WBarMeasuresLBar), TimePoint::T3);
        assert_eq!(Step::ALL.iter().filter(|s| s.is_measurement()).count(), 4);
    }
}
