//! Exact linear algebra over small, labelled composite Hilbert spaces.
//!
//! Every subsystem in the protocol is two dimensional. States are stored
//! sparsely, keyed by one level index per subsystem, and rendered through the
//! subsystem's label table so that printed kets read like `|tbar,plus⟩`.
//!
//! The module is deliberately small: tensor products, inner products,
//! projectors, Born probabilities, collapse, sampling and mixtures. There is
//! no unitary time evolution beyond the discrete basis changes the protocol
//! needs.

mod density;
mod ket;
mod projector;

pub use density::{mix, DensityMatrix};
pub use ket::Ket;
pub use num_complex::Complex64;
pub use projector::{born_probability, collapse, sample_measurement, Basis, Projector};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Absolute tolerance for exactness assertions (normalization, idempotence,
/// hermiticity, completeness).
pub const TOLERANCE: f64 = 1e-12;

/// Tolerance on the probability sum accepted by [`mix`].
pub const MIXTURE_TOLERANCE: f64 = 1e-9;

/// The four subsystems that appear in the protocol.
///
/// `R` and `S` are the microsystems; `LBar` and `L` are the labs after the
/// friends have recorded their outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    R,
    S,
    LBar,
    L,
}

impl Subsystem {
    pub const ALL: [Subsystem; 4] = [Subsystem::R, Subsystem::S, Subsystem::LBar, Subsystem::L];

    pub fn dim(self) -> usize {
        2
    }

    /// Names of the computational basis states, indexed by level.
    pub fn labels(self) -> [&'static str; 2] {
        match self {
            Subsystem::R => ["heads", "tails"],
            Subsystem::S => ["up", "down"],
            Subsystem::LBar => ["hbar", "tbar"],
            Subsystem::L => ["minus", "plus"],
        }
    }

    pub fn level_of(self, name: &str) -> Option<usize> {
        self.labels().iter().position(|l| *l == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Subsystem::R => "R",
            Subsystem::S => "S",
            Subsystem::LBar => "Lbar",
            Subsystem::L => "L",
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A measurement outcome: a named element of a basis on one subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub subsystem: Subsystem,
    pub name: String,
}

impl BasisLabel {
    pub fn new(subsystem: Subsystem, name: impl Into<String>) -> Self {
        Self {
            subsystem,
            name: name.into(),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.subsystem, self.name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("subsystem sets overlap on {0}")]
    OverlappingSpaces(Subsystem),
    #[error("spaces differ: {left:?} vs {right:?}")]
    SpaceMismatch {
        left: Vec<Subsystem>,
        right: Vec<Subsystem>,
    },
    #[error("state is not normalized (norm² = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },
    #[error("zero-norm vector cannot be normalized")]
    ZeroVector,
    #[error("impossible branch: Born probability {probability} is zero")]
    ImpossibleBranch { probability: f64 },
    #[error("unknown label `{name}` for subsystem {subsystem}")]
    UnknownLabel { subsystem: Subsystem, name: String },
    #[error("expected {expected} amplitudes, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("projector scope {scope:?} is not contained in state space {space:?}")]
    ScopeNotInSpace {
        scope: Vec<Subsystem>,
        space: Vec<Subsystem>,
    },
    #[error("projector targets are not orthonormal")]
    NotOrthonormal,
    #[error("basis on {0} does not resolve the identity")]
    IncompleteBasis(Subsystem),
    #[error("basis has no outcome named `{0}`")]
    UnknownOutcome(String),
    #[error("mixture probabilities must be non-negative and sum to 1 (sum = {sum})")]
    InvalidMixture { sum: f64 },
    #[error("state is entangled across {0}; no factor exists")]
    NotProduct(Subsystem),
    #[error("{0} is not part of the state space")]
    MissingSubsystem(Subsystem),
}

pub type Result<T, E = StateError> = std::result::Result<T, E>;
