use super::{Complex64, Result, StateError, Subsystem, TOLERANCE};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse pure state over an ordered list of subsystems.
///
/// Keys hold one level index per subsystem, in `space` order. Amplitudes
/// below `1e-15` are dropped. A ket is either normalized (checked at
/// construction) or explicitly flagged as unnormalized; only the latter may
/// carry an arbitrary norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    space: Vec<Subsystem>,
    amps: BTreeMap<Vec<usize>, Complex64>,
    normalized: bool,
}

const PRUNE: f64 = 1e-15;

impl Ket {
    /// Computational basis vector `|level⟩` of one subsystem.
    pub fn basis(subsystem: Subsystem, level: usize) -> Self {
        assert!(level < subsystem.dim(), "level out of range");
        let mut amps = BTreeMap::new();
        amps.insert(vec![level], Complex64::new(1.0, 0.0));
        Self {
            space: vec![subsystem],
            amps,
            normalized: true,
        }
    }

    pub fn basis_named(subsystem: Subsystem, name: &str) -> Result<Self> {
        let level = subsystem.level_of(name).ok_or_else(|| StateError::UnknownLabel {
            subsystem,
            name: name.to_owned(),
        })?;
        Ok(Self::basis(subsystem, level))
    }

    /// Normalized single-subsystem state from its amplitudes.
    pub fn from_amplitudes(subsystem: Subsystem, amplitudes: &[Complex64]) -> Result<Self> {
        let ket = Self::from_amplitudes_unnormalized(subsystem, amplitudes)?;
        ket.into_checked()
    }

    pub fn from_real(subsystem: Subsystem, amplitudes: &[f64]) -> Result<Self> {
        let c: Vec<_> = amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        Self::from_amplitudes(subsystem, &c)
    }

    /// Single-subsystem vector with arbitrary norm, flagged unnormalized.
    pub fn from_amplitudes_unnormalized(subsystem: Subsystem, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != subsystem.dim() {
            return Err(StateError::WrongDimension {
                expected: subsystem.dim(),
                got: amplitudes.len(),
            });
        }
        let entries = amplitudes.iter().enumerate().map(|(i, &a)| (vec![i], a));
        Ok(Self::from_entries_unnormalized(vec![subsystem], entries))
    }

    /// Multi-subsystem state from `(level tuple, amplitude)` entries.
    pub fn from_entries(
        space: Vec<Subsystem>,
        entries: impl IntoIterator<Item = (Vec<usize>, Complex64)>,
    ) -> Result<Self> {
        check_distinct(&space)?;
        Self::from_entries_unnormalized(space, entries).into_checked()
    }

    pub fn from_entries_unnormalized(
        space: Vec<Subsystem>,
        entries: impl IntoIterator<Item = (Vec<usize>, Complex64)>,
    ) -> Self {
        let mut amps = BTreeMap::new();
        for (key, a) in entries {
            assert_eq!(key.len(), space.len(), "key arity must match space");
            for (lvl, sub) in key.iter().zip(&space) {
                assert!(*lvl < sub.dim(), "level out of range for {sub}");
            }
            *amps.entry(key).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        amps.retain(|_, a: &mut Complex64| a.norm() > PRUNE);
        Self {
            space,
            amps,
            normalized: false,
        }
    }

    /// Builds from labelled entries such as `(["tbar", "plus"], amp)`.
    pub fn from_labels(space: Vec<Subsystem>, entries: &[(&[&str], Complex64)]) -> Result<Self> {
        let mut keyed = Vec::with_capacity(entries.len());
        for (labels, amp) in entries {
            keyed.push((levels_for(&space, labels)?, *amp));
        }
        Self::from_entries(space, keyed)
    }

    fn into_checked(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > TOLERANCE {
            return Err(StateError::Unnormalized { norm_sqr: n });
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn space(&self) -> &[Subsystem] {
        &self.space
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Nonzero amplitudes in key order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (&[usize], Complex64)> {
        self.amps.iter().map(|(k, a)| (k.as_slice(), *a))
    }

    pub fn nonzero_count(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, levels: &[usize]) -> Complex64 {
        self.amps.get(levels).copied().unwrap_or_default()
    }

    pub fn amplitude_of(&self, labels: &[&str]) -> Result<Complex64> {
        Ok(self.amplitude(&levels_for(&self.space, labels)?))
    }

    pub fn dimension(&self) -> usize {
        self.space.iter().map(|s| s.dim()).product()
    }

    pub fn norm_sqr(&self) -> f64 {
        // an empty f64 sum is -0.0
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>() + 0.0
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= PRUNE {
            return Err(StateError::ZeroVector);
        }
        let mut out = self.scale(Complex64::new(1.0 / n, 0.0));
        out.normalized = true;
        Ok(out)
    }

    /// Multiplies by a scalar. The result is flagged unnormalized unless the
    /// scalar is a phase and the input was normalized.
    pub fn scale(&self, c: Complex64) -> Self {
        let amps = self
            .amps
            .iter()
            .map(|(k, a)| (k.clone(), a * c))
            .filter(|(_, a)| a.norm() > PRUNE)
            .collect();
        Self {
            space: self.space.clone(),
            amps,
            normalized: self.normalized && (c.norm() - 1.0).abs() <= TOLERANCE,
        }
    }

    /// Vector sum; the result is always flagged unnormalized.
    pub fn add(&self, other: &Ket) -> Result<Self> {
        self.require_same_space(other)?;
        let mut amps = self.amps.clone();
        for (k, a) in &other.amps {
            *amps.entry(k.clone()).or_default() += a;
        }
        amps.retain(|_, a| a.norm() > PRUNE);
        Ok(Self {
            space: self.space.clone(),
            amps,
            normalized: false,
        })
    }

    pub fn sub(&self, other: &Ket) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Tensor product over the union space `self.space ++ other.space`.
    pub fn tensor(&self, other: &Ket) -> Result<Self> {
        if let Some(s) = self.space.iter().find(|s| other.space.contains(s)) {
            return Err(StateError::OverlappingSpaces(*s));
        }
        let mut space = self.space.clone();
        space.extend_from_slice(&other.space);
        let mut amps = BTreeMap::new();
        for (ka, a) in &self.amps {
            for (kb, b) in &other.amps {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                let v = a * b;
                if v.norm() > PRUNE {
                    amps.insert(key, v);
                }
            }
        }
        Ok(Self {
            space,
            amps,
            normalized: self.normalized && other.normalized,
        })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        self.require_same_space(other)?;
        Ok(self
            .amps
            .iter()
            .filter_map(|(k, a)| other.amps.get(k).map(|b| a.conj() * b))
            .sum())
    }

    /// `|⟨self|other⟩|²` for normalized inputs.
    pub fn fidelity(&self, other: &Ket) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Equality up to a global phase, within `tol` on the fidelity and norms.
    pub fn same_ray(&self, other: &Ket, tol: f64) -> bool {
        let Ok(ip) = self.inner(other) else {
            return false;
        };
        let (na, nb) = (self.norm_sqr(), other.norm_sqr());
        (ip.norm_sqr() - na * nb).abs() <= tol && (na - nb).abs() <= tol
    }

    /// Renames one subsystem, e.g. the measured microsystem `R` becoming the
    /// record held in lab `LBar`. Both must be two dimensional, so the map is
    /// an isometry.
    pub fn relabel(&self, from: Subsystem, to: Subsystem) -> Result<Self> {
        let pos = self.position(from)?;
        if from != to && self.space.contains(&to) {
            return Err(StateError::OverlappingSpaces(to));
        }
        let mut out = self.clone();
        out.space[pos] = to;
        Ok(out)
    }

    /// Applies a linear map taking subsystem `from` to subsystem `to`:
    /// `|i⟩_from ↦ Σ_j matrix[j][i] |j⟩_to`. With `matrix[j][i] = ⟨b_j|i⟩`
    /// for an orthonormal basis `{b_j}` this re-expresses the state in that
    /// basis and records outcome `j` as level `j` of `to`.
    pub fn map_subsystem(&self, from: Subsystem, to: Subsystem, matrix: &[Vec<Complex64>]) -> Result<Self> {
        let pos = self.position(from)?;
        if from != to && self.space.contains(&to) {
            return Err(StateError::OverlappingSpaces(to));
        }
        let mut space = self.space.clone();
        space[pos] = to;
        let mut amps: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for (k, a) in &self.amps {
            let i = k[pos];
            for (j, row) in matrix.iter().enumerate().take(to.dim()) {
                let m = row[i];
                if m.norm() <= PRUNE {
                    continue;
                }
                let mut key = k.clone();
                key[pos] = j;
                *amps.entry(key).or_default() += m * a;
            }
        }
        amps.retain(|_, a| a.norm() > PRUNE);
        let out = Self {
            space,
            amps,
            normalized: false,
        };
        if self.normalized && (out.norm_sqr() - 1.0).abs() <= TOLERANCE {
            Ok(Self {
                normalized: true,
                ..out
            })
        } else {
            Ok(out)
        }
    }

    /// Extracts the state of `subsystem` from a product state
    /// `|a⟩_subsystem ⊗ |rest⟩`; fails if the state is entangled across that
    /// cut. The factor is returned normalized, with an arbitrary phase.
    pub fn factor(&self, subsystem: Subsystem) -> Result<Ket> {
        let pos = self.position(subsystem)?;
        if self.space.len() == 1 {
            return self.normalized();
        }
        let (pivot, _) = self
            .amps
            .iter()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .ok_or(StateError::ZeroVector)?;
        let column: Vec<Complex64> = (0..subsystem.dim())
            .map(|lvl| {
                let mut key = pivot.clone();
                key[pos] = lvl;
                self.amplitude(&key)
            })
            .collect();
        let factor = Ket::from_amplitudes_unnormalized(subsystem, &column)?.normalized()?;
        let rest = self.partial_inner(&factor, pos);
        let rebuilt = factor.tensor(&rest)?.reorder(&self.space)?;
        let residual = self.sub(&rebuilt)?.norm_sqr();
        if residual > TOLERANCE {
            return Err(StateError::NotProduct(subsystem));
        }
        Ok(factor)
    }

    /// `(⟨f| ⊗ I) self`, where `f` lives on the subsystem at `pos`.
    fn partial_inner(&self, f: &Ket, pos: usize) -> Ket {
        let mut space = self.space.clone();
        space.remove(pos);
        let mut amps: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for (k, a) in &self.amps {
            let mut rest = k.clone();
            let lvl = rest.remove(pos);
            *amps.entry(rest).or_default() += f.amplitude(&[lvl]).conj() * a;
        }
        amps.retain(|_, a| a.norm() > PRUNE);
        Ket {
            space,
            amps,
            normalized: false,
        }
    }

    /// Same state with subsystems permuted into `order`.
    pub fn reorder(&self, order: &[Subsystem]) -> Result<Self> {
        if order.len() != self.space.len() || order.iter().any(|s| !self.space.contains(s)) {
            return Err(StateError::SpaceMismatch {
                left: self.space.clone(),
                right: order.to_vec(),
            });
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|s| self.space.iter().position(|x| x == s).unwrap())
            .collect();
        let amps = self
            .amps
            .iter()
            .map(|(k, a)| (perm.iter().map(|&p| k[p]).collect(), *a))
            .collect();
        Ok(Self {
            space: order.to_vec(),
            amps,
            normalized: self.normalized,
        })
    }

    /// Dense amplitude vector, with the first subsystem most significant.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); self.dimension()];
        for (k, a) in &self.amps {
            v[dense_index(&self.space, k)] = *a;
        }
        v
    }

    pub(crate) fn position(&self, s: Subsystem) -> Result<usize> {
        self.space
            .iter()
            .position(|x| *x == s)
            .ok_or(StateError::MissingSubsystem(s))
    }

    pub(crate) fn require_same_space(&self, other: &Ket) -> Result<()> {
        if self.space != other.space {
            return Err(StateError::SpaceMismatch {
                left: self.space.clone(),
                right: other.space.clone(),
            });
        }
        Ok(())
    }
}

pub(crate) fn dense_index(space: &[Subsystem], key: &[usize]) -> usize {
    space.iter().zip(key).fold(0, |acc, (s, &lvl)| acc * s.dim() + lvl)
}

pub(crate) fn levels_from_index(space: &[Subsystem], mut index: usize) -> Vec<usize> {
    let mut key = vec![0; space.len()];
    for (slot, s) in key.iter_mut().zip(space).rev() {
        *slot = index % s.dim();
        index /= s.dim();
    }
    key
}

fn check_distinct(space: &[Subsystem]) -> Result<()> {
    for (i, s) in space.iter().enumerate() {
        if space[..i].contains(s) {
            return Err(StateError::OverlappingSpaces(*s));
        }
    }
    Ok(())
}

fn levels_for(space: &[Subsystem], labels: &[&str]) -> Result<Vec<usize>> {
    if labels.len() != space.len() {
        return Err(StateError::WrongDimension {
            expected: space.len(),
            got: labels.len(),
        });
    }
    space
        .iter()
        .zip(labels)
        .map(|(s, l)| {
            s.level_of(l).ok_or_else(|| StateError::UnknownLabel {
                subsystem: *s,
                name: (*l).to_owned(),
            })
        })
        .collect()
}

fn fmt_amp(a: Complex64) -> String {
    if a.im.abs() < 1e-12 {
        format!("{:.6}", a.re)
    } else if a.re.abs() < 1e-12 {
        format!("{:.6}i", a.im)
    } else {
        format!("({:.6}{:+.6}i)", a.re, a.im)
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amps.is_empty() {
            return f.write_str("0");
        }
        let subs: Vec<_> = self.space.iter().map(|s| s.name()).collect();
        for (i, (k, a)) in self.amps.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let labels: Vec<_> = k.iter().zip(&self.space).map(|(&l, s)| s.labels()[l]).collect();
            write!(f, "{}|{}⟩", fmt_amp(*a), labels.join(","))?;
        }
        write!(f, " [{}]", subs.join("⊗"))
    }
}
