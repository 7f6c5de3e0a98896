//! The protocol itself: configuration, schedule, the exact branch tree seen
//! from outside both labs, and seeded Monte Carlo rounds.

pub mod config;
pub mod monte_carlo;
pub mod outcome;
pub mod protocol;
pub mod time;
pub mod tree;

pub use config::{parse_amplitude, BasisPair, ConfigError, ProtocolConfig, TimeLabels};
pub use monte_carlo::{monte_carlo, run_round, CellEstimate, FrequencyTable, RoundRecord, RoundSampler};
pub use outcome::{Coin, SpinZ, WBarOutcome, WOutcome};
pub use protocol::{build_protocol, Protocol, Stage, Step};
pub use time::TimePoint;
pub use tree::{evolve_exact, evolve_through, joint_distribution, BranchNode, BranchTree, OutcomeTable};

use crate::statevec::StateError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("branch tree does not resolve both W̄'s and W's measurements")]
    IncompleteTree,
    #[error("rounds must be at least 1")]
    ZeroRounds,
    #[error("workers must be at least 1")]
    ZeroWorkers,
}
