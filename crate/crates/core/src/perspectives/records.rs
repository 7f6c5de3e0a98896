use super::PerspectiveError;
use crate::experiment::{Coin, Protocol, WBarOutcome, WOutcome};
use crate::statevec::{born_probability, Complex64, Ket, StateError, TOLERANCE};

/// One term of F̄'s record superposition: what lab L would hold had she
/// sent the spin for `coin`, and the probability of w = ok she would then
/// announce.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordBranch {
    pub coin: Coin,
    /// Component of the heralded L̄ vector on the record of `coin`.
    pub amplitude: f64,
    pub record: Ket,
    pub claim: f64,
}

/// Lab L as F̄ describes it while her own lab is in a W̄ basis state: a
/// superposition of possibly non-orthogonal records inside the two
/// dimensional space of L.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSuperposition {
    pub herald: WBarOutcome,
    pub branches: Vec<RecordBranch>,
    gram: Vec<Vec<Complex64>>,
}

impl RecordSuperposition {
    pub fn new(protocol: &Protocol, herald: WBarOutcome) -> Result<Self, PerspectiveError> {
        let v = protocol.wbar_vector(herald);
        let ok = protocol.w_projector(WOutcome::Ok);
        let mut branches = Vec::new();
        for coin in Coin::ALL {
            let amplitude = v.amplitude(&[coin.index()]).re;
            if amplitude.abs() <= TOLERANCE {
                continue;
            }
            let record = protocol.record_spin(protocol.prepared_spin(coin))?;
            let claim = born_probability(&record, ok)?;
            branches.push(RecordBranch {
                coin,
                amplitude,
                record,
                claim,
            });
        }
        let rs = Self {
            herald,
            gram: gram(&branches)?,
            branches,
        };
        if rs.norm_sqr_from_gram() <= TOLERANCE {
            return Err(StateError::ZeroVector.into());
        }
        Ok(rs)
    }

    /// `⟨v_i|v_j⟩` over the branch records.
    pub fn gram(&self) -> &[Vec<Complex64>] {
        &self.gram
    }

    /// `‖Σ c_i v_i‖²` evaluated through the Gram matrix.
    pub fn norm_sqr_from_gram(&self) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, a) in self.branches.iter().enumerate() {
            for (j, b) in self.branches.iter().enumerate() {
                s += a.amplitude * b.amplitude * self.gram[i][j];
            }
        }
        s.re
    }

    /// Unnormalized sum `Σ c_i v_i`.
    pub fn raw(&self) -> Result<Ket, StateError> {
        let mut acc: Option<Ket> = None;
        for b in &self.branches {
            let t = b.record.scale(Complex64::new(b.amplitude, 0.0));
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        acc.ok_or(StateError::ZeroVector)
    }

    /// The normalized state of L.
    pub fn state(&self) -> Result<Ket, StateError> {
        self.raw()?.normalized()
    }

    /// Prefactor `N` in `N Σ √n c_i v_i`, n being the number of branches.
    /// It would be `1/√n` for orthogonal records.
    pub fn normalization(&self) -> f64 {
        let n = self.branches.len() as f64;
        1.0 / (n * self.norm_sqr_from_gram()).sqrt()
    }

    /// `c_i² / ‖Σ c_j v_j‖²` per branch. With overlapping records these need
    /// not sum to 1 and may individually exceed it.
    pub fn quasi_weights(&self) -> Vec<f64> {
        let n2 = self.norm_sqr_from_gram();
        self.branches.iter().map(|b| b.amplitude * b.amplitude / n2).collect()
    }
}

fn gram(branches: &[RecordBranch]) -> Result<Vec<Vec<Complex64>>, StateError> {
    branches
        .iter()
        .map(|a| branches.iter().map(|b| a.record.inner(&b.record)).collect())
        .collect()
}

/// Gram matrix of the branch records.
pub fn record_overlap(rs: &RecordSuperposition) -> Vec<Vec<Complex64>> {
    rs.gram.clone()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageEntry {
    pub coin: Coin,
    pub quasi_weight: f64,
    pub claim: f64,
}

/// What W̄ would hear if he opened L̄ and asked F̄ for her prediction of
/// w = ok.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageDistribution {
    pub herald: WBarOutcome,
    pub entries: Vec<MessageEntry>,
    /// `Σ quasi_weight × claim`.
    pub effective_probability: f64,
    /// `|⟨ok|ψ⟩|²` on the record superposition itself.
    pub born_probability: f64,
}

impl MessageDistribution {
    pub fn agrees_with_born(&self, tol: f64) -> bool {
        (self.effective_probability - self.born_probability).abs() <= tol
    }
}

pub fn open_lab_message(protocol: &Protocol, herald: WBarOutcome) -> Result<MessageDistribution, PerspectiveError> {
    let rs = RecordSuperposition::new(protocol, herald)?;
    let entries: Vec<_> = rs
        .branches
        .iter()
        .zip(rs.quasi_weights())
        .map(|(b, q)| MessageEntry {
            coin: b.coin,
            quasi_weight: q,
            claim: b.claim,
        })
        .collect();
    let effective_probability = entries.iter().map(|e| e.quasi_weight * e.claim).sum();
    let born = born_probability(&rs.state()?, protocol.w_projector(WOutcome::Ok))?;
    Ok(MessageDistribution {
        herald,
        entries,
        effective_probability,
        born_probability: born,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::Subsystem;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn okbar_message() {
        let m = open_lab_message(&Protocol::standard(), WBarOutcome::OkBar).unwrap();
        let q = 1.0 / (2.0 - S2);
        assert_eq!(m.entries.len(), 2);
        assert!((m.entries[0].quasi_weight - q).abs() < 1e-12);
        assert!((m.entries[1].quasi_weight - q).abs() < 1e-12);
        assert!((m.entries[0].claim - 0.5).abs() < 1e-12);
        assert!(m.entries[1].claim.abs() < 1e-12);
        assert!((m.effective_probability - 0.8535533906).abs() < 1e-9);
        assert!(m.agrees_with_born(1e-12));
    }

    #[test]
    fn failsbar_message() {
        let m = open_lab_message(&Protocol::standard(), WBarOutcome::FailsBar).unwrap();
        assert!((m.effective_probability - 1.0 / (4.0 + 2.0 * S2)).abs() < 1e-12);
        assert!((m.effective_probability - 0.1464466094).abs() < 1e-9);
        assert!(m.agrees_with_born(1e-12));
    }

    #[test]
    fn gram_off_diagonal() {
        let p = Protocol::standard();
        for (o, n) in [(WBarOutcome::OkBar, 2.0 - S2), (WBarOutcome::FailsBar, 2.0 + S2)] {
            let rs = RecordSuperposition::new(&p, o).unwrap();
            let g = record_overlap(&rs);
            assert!((g[0][1].re - 1.0 / S2).abs() < 1e-12);
            assert!((g[0][0].re - 1.0).abs() < 1e-12);
            assert!((rs.normalization() - 1.0 / n.sqrt()).abs() < 1e-12);
            // Gram route against direct vector arithmetic
            assert!((rs.norm_sqr_from_gram() - rs.raw().unwrap().norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_records_give_identity_gram() {
        let cfg = crate::experiment::ProtocolConfig {
            spin_prep: [[0.0, 1.0], [1.0, 0.0]],
            ..Default::default()
        };
        let p = crate::experiment::build_protocol(cfg).unwrap();
        let rs = RecordSuperposition::new(&p, WBarOutcome::OkBar).unwrap();
        let g = record_overlap(&rs);
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((x - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        assert!((rs.normalization() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(rs.state().unwrap().space() == [Subsystem::L]);
    }
}
