use super::ket::{dense_index, levels_from_index};
use super::{BasisLabel, Complex64, Ket, Result, StateError, Subsystem, TOLERANCE};
use rand::Rng;
use std::collections::BTreeMap;

/// Orthogonal projector `Σ_k |t_k⟩⟨t_k|` acting on `scope`, identity
/// elsewhere. Targets are orthonormal kets over the scope, in scope order.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    scope: Vec<Subsystem>,
    targets: Vec<Ket>,
}

impl Projector {
    /// Rank-one projector `|target⟩⟨target|`.
    pub fn onto(target: Ket) -> Result<Self> {
        if !target.is_normalized() {
            return Err(StateError::Unnormalized {
                norm_sqr: target.norm_sqr(),
            });
        }
        Ok(Self {
            scope: target.space().to_vec(),
            targets: vec![target],
        })
    }

    /// Projector onto the span of orthonormal `targets`.
    pub fn span(targets: Vec<Ket>) -> Result<Self> {
        let scope = targets
            .first()
            .map(|t| t.space().to_vec())
            .ok_or(StateError::NotOrthonormal)?;
        for (i, a) in targets.iter().enumerate() {
            for b in &targets[i..] {
                let expect = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                if (a.inner(b)? - Complex64::new(expect, 0.0)).norm() > TOLERANCE {
                    return Err(StateError::NotOrthonormal);
                }
            }
        }
        Ok(Self { scope, targets })
    }

    pub fn identity(scope: &[Subsystem]) -> Self {
        let dim: usize = scope.iter().map(|s| s.dim()).product();
        let targets = (0..dim)
            .map(|i| {
                Ket::from_entries(
                    scope.to_vec(),
                    [(levels_from_index(scope, i), Complex64::new(1.0, 0.0))],
                )
                .expect("basis vector is normalized")
            })
            .collect();
        Self {
            scope: scope.to_vec(),
            targets,
        }
    }

    /// `P ⊗ Q` on the union of the two scopes.
    pub fn tensor(&self, other: &Projector) -> Result<Self> {
        let mut targets = Vec::with_capacity(self.targets.len() * other.targets.len());
        for a in &self.targets {
            for b in &other.targets {
                targets.push(a.tensor(b)?);
            }
        }
        let mut scope = self.scope.clone();
        scope.extend_from_slice(&other.scope);
        Ok(Self { scope, targets })
    }

    pub fn scope(&self) -> &[Subsystem] {
        &self.scope
    }

    pub fn rank(&self) -> usize {
        self.targets.len()
    }

    /// `P|ψ⟩`, flagged unnormalized. `state` may be unnormalized.
    pub fn apply(&self, state: &Ket) -> Result<Ket> {
        let positions = self.positions_in(state.space())?;
        let mut out: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for t in &self.targets {
            // ⟨t|_scope ψ, keyed by the levels outside the scope
            let mut partial: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
            for (key, a) in state.amplitudes() {
                let inside: Vec<usize> = positions.iter().map(|&p| key[p]).collect();
                let ta = t.amplitude(&inside);
                if ta.norm() == 0.0 {
                    continue;
                }
                *partial.entry(key.to_vec()).or_default() += ta.conj() * a;
            }
            // collapse keys to their outside part
            let mut reduced: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
            for (key, a) in partial {
                let mut outside = key;
                for &p in &positions {
                    outside[p] = usize::MAX;
                }
                *reduced.entry(outside).or_default() += a;
            }
            for (outside, c) in reduced {
                for (inside, ta) in t.amplitudes() {
                    let mut key = outside.clone();
                    for (&p, &lvl) in positions.iter().zip(inside) {
                        key[p] = lvl;
                    }
                    *out.entry(key).or_default() += ta * c;
                }
            }
        }
        Ok(Ket::from_entries_unnormalized(state.space().to_vec(), out))
    }

    /// `‖P|ψ⟩‖²` without a normalization requirement. This is the audited
    /// path for quasi-weight arithmetic on unnormalized decompositions.
    pub fn weight(&self, state: &Ket) -> Result<f64> {
        Ok(self.apply(state)?.norm_sqr())
    }

    /// Dense matrix of the projector over `space`, first subsystem most
    /// significant.
    #[allow(clippy::needless_range_loop)]
    pub fn to_dense(&self, space: &[Subsystem]) -> Result<Vec<Vec<Complex64>>> {
        let dim: usize = space.iter().map(|s| s.dim()).product();
        let mut m = vec![vec![Complex64::default(); dim]; dim];
        for col in 0..dim {
            let e = Ket::from_entries(
                space.to_vec(),
                [(levels_from_index(space, col), Complex64::new(1.0, 0.0))],
            )?;
            for (key, a) in self.apply(&e)?.amplitudes() {
                m[dense_index(space, key)][col] = a;
            }
        }
        Ok(m)
    }

    fn positions_in(&self, space: &[Subsystem]) -> Result<Vec<usize>> {
        self.scope
            .iter()
            .map(|s| space.iter().position(|x| x == s))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| StateError::ScopeNotInSpace {
                scope: self.scope.clone(),
                space: space.to_vec(),
            })
    }
}

/// A complete projective measurement on one subsystem with named outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    subsystem: Subsystem,
    outcomes: Vec<(String, Ket)>,
    projectors: Vec<Projector>,
}

impl Basis {
    /// Builds a basis from named vectors; they must be orthonormal and
    /// resolve the identity on `subsystem`.
    pub fn new(subsystem: Subsystem, outcomes: Vec<(String, Ket)>) -> Result<Self> {
        for (_, v) in &outcomes {
            if v.space() != [subsystem] {
                return Err(StateError::SpaceMismatch {
                    left: vec![subsystem],
                    right: v.space().to_vec(),
                });
            }
        }
        let projectors = outcomes
            .iter()
            .map(|(_, v)| Projector::onto(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        let basis = Self {
            subsystem,
            outcomes,
            projectors,
        };
        basis.check_complete()?;
        Ok(basis)
    }

    /// The subsystem's own label basis.
    pub fn computational(subsystem: Subsystem) -> Self {
        let outcomes = subsystem
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| ((*l).to_owned(), Ket::basis(subsystem, i)))
            .collect();
        Self::new(subsystem, outcomes).expect("computational basis is complete")
    }

    fn check_complete(&self) -> Result<()> {
        let space = [self.subsystem];
        let dim = self.subsystem.dim();
        let mut sum = vec![vec![Complex64::default(); dim]; dim];
        for p in &self.projectors {
            for (row, prow) in sum.iter_mut().zip(p.to_dense(&space)?) {
                for (x, y) in row.iter_mut().zip(prow) {
                    *x += y;
                }
            }
        }
        for (i, row) in sum.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (x - Complex64::new(expect, 0.0)).norm() > TOLERANCE {
                    return Err(StateError::IncompleteBasis(self.subsystem));
                }
            }
        }
        Ok(())
    }

    pub fn subsystem(&self) -> Subsystem {
        self.subsystem
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(n, _)| n.as_str())
    }

    pub fn vector(&self, name: &str) -> Result<&Ket> {
        self.outcomes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| StateError::UnknownOutcome(name.to_owned()))
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Ket> {
        self.outcomes.iter().map(|(_, v)| v)
    }

    pub fn projector(&self, name: &str) -> Result<&Projector> {
        let idx = self
            .outcomes
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| StateError::UnknownOutcome(name.to_owned()))?;
        Ok(&self.projectors[idx])
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&str, &Projector)> {
        self.outcomes
            .iter()
            .zip(&self.projectors)
            .map(|((n, _), p)| (n.as_str(), p))
    }

    /// Change-of-basis rows `⟨b_j|i⟩`, suitable for [`Ket::map_subsystem`].
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.outcomes
            .iter()
            .map(|(_, v)| (0..self.subsystem.dim()).map(|i| v.amplitude(&[i]).conj()).collect())
            .collect()
    }
}

/// Born probability `‖P|ψ⟩‖²` of a normalized state.
pub fn born_probability(state: &Ket, proj: &Projector) -> Result<f64> {
    if !state.is_normalized() {
        return Err(StateError::Unnormalized {
            norm_sqr: state.norm_sqr(),
        });
    }
    proj.weight(state)
}

/// Post-measurement state and Born weight for outcome `proj`.
///
/// A zero-probability outcome is reported as [`StateError::ImpossibleBranch`].
pub fn collapse(state: &Ket, proj: &Projector) -> Result<(Ket, f64)> {
    let p = born_probability(state, proj)?;
    if p <= TOLERANCE {
        return Err(StateError::ImpossibleBranch { probability: p });
    }
    let projected = proj.apply(state)?;
    Ok((projected.normalized()?, p))
}

/// Draws one outcome of `basis` with Born probabilities and returns it with
/// the collapsed state. Consumes exactly one `f64` from `rng`.
pub fn sample_measurement<R: Rng + ?Sized>(state: &Ket, basis: &Basis, rng: &mut R) -> Result<(BasisLabel, Ket)> {
    let u: f64 = rng.random();
    let mut probs = Vec::with_capacity(basis.len());
    for (_, p) in basis.outcomes() {
        probs.push(born_probability(state, p)?);
    }
    let mut chosen = None;
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum && p > TOLERANCE {
            chosen = Some(i);
            break;
        }
    }
    // rounding can leave u just above the final cumulative sum
    let idx = chosen
        .or_else(|| probs.iter().rposition(|&p| p > TOLERANCE))
        .ok_or(StateError::ImpossibleBranch { probability: 0.0 })?;
    let (name, proj) = basis.outcomes().nth(idx).expect("index in range");
    let (post, _) = collapse(state, proj)?;
    Ok((BasisLabel::new(basis.subsystem(), name), post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn s3() -> f64 {
        (1.0f64 / 3.0).sqrt()
    }

    fn row4() -> Ket {
        Ket::from_labels(
            vec![Subsystem::LBar, Subsystem::L],
            &[
                (&["hbar", "minus"], r(s3())),
                (&["tbar", "minus"], r(s3())),
                (&["tbar", "plus"], r(s3())),
            ],
        )
        .unwrap()
    }

    fn okbar() -> Ket {
        let h = 0.5f64.sqrt();
        Ket::from_real(Subsystem::LBar, &[h, -h]).unwrap()
    }

    fn failsbar() -> Ket {
        let h = 0.5f64.sqrt();
        Ket::from_real(Subsystem::LBar, &[h, h]).unwrap()
    }

    fn ok() -> Ket {
        let h = 0.5f64.sqrt();
        Ket::from_real(Subsystem::L, &[h, -h]).unwrap()
    }

    #[test]
    fn born_joint_okbar_ok_is_one_twelfth() {
        let p = Projector::onto(okbar())
            .unwrap()
            .tensor(&Projector::onto(ok()).unwrap())
            .unwrap();
        let prob = born_probability(&row4(), &p).unwrap();
        assert!((prob - 1.0 / 12.0).abs() < 1e-12, "{prob}");
    }

    #[test]
    fn identity_projector_gives_one() {
        let id = Projector::identity(&[Subsystem::LBar, Subsystem::L]);
        assert!((born_probability(&row4(), &id).unwrap() - 1.0).abs() < 1e-12);
        let id_l = Projector::identity(&[Subsystem::L]);
        assert!((born_probability(&row4(), &id_l).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_minus_projector_two_thirds() {
        // oracle: sum of squared amplitudes of the |minus⟩ branches
        let oracle: f64 = row4()
            .amplitudes()
            .filter(|(k, _)| k[1] == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let p = Projector::onto(Ket::basis_named(Subsystem::L, "minus").unwrap()).unwrap();
        let prob = born_probability(&row4(), &p).unwrap();
        assert!((prob - oracle).abs() < 1e-12);
        assert!((prob - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn born_rejects_unnormalized() {
        let v = Ket::from_amplitudes_unnormalized(Subsystem::L, &[r(1.0), r(1.0)]).unwrap();
        let p = Projector::onto(ok()).unwrap();
        assert!(matches!(born_probability(&v, &p), Err(StateError::Unnormalized { .. })));
        assert!((p.weight(&v).unwrap() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn collapse_okbar_gives_okbar_plus() {
        let (post, p) = collapse(&row4(), &Projector::onto(okbar()).unwrap()).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-12);
        let expected = okbar().tensor(&Ket::basis(Subsystem::L, 1)).unwrap();
        assert!(post.same_ray(&expected, 1e-12));
    }

    #[test]
    fn collapse_failsbar_matches_table() {
        let (post, p) = collapse(&row4(), &Projector::onto(failsbar()).unwrap()).unwrap();
        assert!((p - 5.0 / 6.0).abs() < 1e-12);
        let fb = failsbar();
        let expected = fb
            .tensor(&Ket::from_real(Subsystem::L, &[(0.8f64).sqrt(), (0.2f64).sqrt()]).unwrap())
            .unwrap();
        assert!(post.same_ray(&expected, 1e-12));
    }

    #[test]
    fn collapse_is_idempotent_and_rejects_impossible() {
        let proj = Projector::onto(okbar()).unwrap();
        let (post, _) = collapse(&row4(), &proj).unwrap();
        let (again, p) = collapse(&post, &proj).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(again.same_ray(&post, 1e-12));
        let hbar_plus = Projector::onto(
            Ket::basis(Subsystem::LBar, 0)
                .tensor(&Ket::basis(Subsystem::L, 1))
                .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            collapse(&row4(), &hbar_plus),
            Err(StateError::ImpossibleBranch { .. })
        ));
    }

    #[test]
    fn incomplete_basis_rejected() {
        let h = 0.5f64.sqrt();
        let err = Basis::new(
            Subsystem::L,
            vec![
                ("ok".into(), ok()),
                ("other".into(), Ket::from_real(Subsystem::L, &[h, -h]).unwrap()),
            ],
        )
        .unwrap_err();
        assert_eq!(err, StateError::IncompleteBasis(Subsystem::L));
    }

    #[test]
    fn sampling_is_deterministic_and_eigenstates_are_certain() {
        let init = Ket::from_real(Subsystem::R, &[s3(), (2.0f64 / 3.0).sqrt()]).unwrap();
        let basis = Basis::computational(Subsystem::R);
        let a = sample_measurement(&init, &basis, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_measurement(&init, &basis, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a.0, b.0);

        let tails = Ket::basis(Subsystem::R, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (lbl, _) = sample_measurement(&tails, &basis, &mut rng).unwrap();
            assert_eq!(lbl.name, "tails");
        }
    }

    #[test]
    fn map_with_basis_rows_preserves_inner_products() {
        let basis = Basis::new(
            Subsystem::L,
            vec![
                ("ok".into(), ok()),
                (
                    "fails".into(),
                    Ket::from_real(Subsystem::L, &[0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap(),
                ),
            ],
        )
        .unwrap();
        let a = row4();
        let b = okbar().tensor(&Ket::basis(Subsystem::L, 0)).unwrap();
        let ma = a.map_subsystem(Subsystem::L, Subsystem::L, &basis.rows()).unwrap();
        let mb = b.map_subsystem(Subsystem::L, Subsystem::L, &basis.rows()).unwrap();
        assert!((a.inner(&b).unwrap() - ma.inner(&mb).unwrap()).norm() < 1e-12);
    }
}
