use super::ket::{dense_index, levels_from_index};
use super::{Complex64, Ket, Projector, Result, StateError, Subsystem, MIXTURE_TOLERANCE, TOLERANCE};
use nalgebra::DMatrix;
use std::fmt;

/// Dense density operator over a composite space.
///
/// Construction goes through [`mix`] or [`DensityMatrix::pure`], both of which
/// check hermiticity, unit trace and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: Vec<Subsystem>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn pure(state: &Ket) -> Result<Self> {
        mix(&[(1.0, state.clone())])
    }

    fn from_matrix(space: Vec<Subsystem>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self { space, matrix };
        if !rho.is_hermitian(TOLERANCE) {
            return Err(StateError::InvalidMixture { sum: rho.trace() });
        }
        if (rho.trace() - 1.0).abs() > TOLERANCE {
            return Err(StateError::InvalidMixture { sum: rho.trace() });
        }
        if rho.eigenvalues().iter().any(|&e| e < -TOLERANCE) {
            return Err(StateError::InvalidMixture { sum: rho.trace() });
        }
        Ok(rho)
    }

    pub fn space(&self) -> &[Subsystem] {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Matrix element `⟨row|ρ|col⟩` addressed by level tuples.
    pub fn entry(&self, row: &[usize], col: &[usize]) -> Complex64 {
        self.matrix[(dense_index(&self.space, row), dense_index(&self.space, col))]
    }

    /// `tr(ρP)`.
    pub fn expectation(&self, proj: &Projector) -> Result<f64> {
        let p = proj.to_dense(&self.space)?;
        let n = self.dim();
        let mut acc = Complex64::default();
        for (i, prow) in p.iter().enumerate() {
            for (j, pij) in prow.iter().enumerate() {
                acc += pij * self.matrix[(j, i)];
            }
        }
        debug_assert_eq!(p.len(), n);
        Ok(acc.re)
    }

    /// Matrix `⟨b_i|ρ|b_j⟩` in the orthonormal vectors `basis`, which must
    /// live on this matrix's full space.
    pub fn in_basis<'a>(&self, basis: impl IntoIterator<Item = &'a Ket>) -> Result<Vec<Vec<Complex64>>> {
        let vecs: Vec<Vec<Complex64>> = basis
            .into_iter()
            .map(|b| {
                if b.space() != self.space.as_slice() {
                    Err(StateError::SpaceMismatch {
                        left: self.space.clone(),
                        right: b.space().to_vec(),
                    })
                } else {
                    Ok(b.to_dense())
                }
            })
            .collect::<Result<_>>()?;
        Ok(vecs
            .iter()
            .map(|bi| {
                vecs.iter()
                    .map(|bj| {
                        let mut acc = Complex64::default();
                        for (r, a) in bi.iter().enumerate() {
                            for (c, b) in bj.iter().enumerate() {
                                acc += a.conj() * self.matrix[(r, c)] * b;
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect())
    }

    /// Entrywise comparison.
    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.space == other.space
            && self
                .matrix
                .iter()
                .zip(other.matrix.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// `Σ pᵢ |ψᵢ⟩⟨ψᵢ|` over normalized kets sharing one space.
pub fn mix(branches: &[(f64, Ket)]) -> Result<DensityMatrix> {
    let first = branches.first().ok_or(StateError::InvalidMixture { sum: 0.0 })?;
    let space = first.1.space().to_vec();
    let sum: f64 = branches.iter().map(|(p, _)| *p).sum();
    if branches.iter().any(|(p, _)| *p < 0.0) || (sum - 1.0).abs() > MIXTURE_TOLERANCE {
        return Err(StateError::InvalidMixture { sum });
    }
    let n: usize = space.iter().map(|s| s.dim()).product();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (p, psi) in branches {
        first.1.require_same_space(psi)?;
        if !psi.is_normalized() {
            return Err(StateError::Unnormalized {
                norm_sqr: psi.norm_sqr(),
            });
        }
        let v = psi.to_dense();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += v[i] * v[j].conj() * *p;
            }
        }
    }
    DensityMatrix::from_matrix(space, m)
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let label = |i: usize| {
            levels_from_index(&self.space, i)
                .iter()
                .zip(&self.space)
                .map(|(&l, s)| s.labels()[l])
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut first = true;
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix[(i, j)];
                if v.norm() < 1e-12 {
                    continue;
                }
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                if v.im.abs() < 1e-12 {
                    write!(f, "{:.6}", v.re)?;
                } else {
                    write!(f, "({:.6}{:+.6}i)", v.re, v.im)?;
                }
                write!(f, "|{}⟩⟨{}|", label(i), label(j))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
