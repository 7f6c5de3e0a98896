use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Coarse time intervals of one round.
///
/// `T1` ends with F̄'s measurement, `T2` with F's; W̄'s measurement and
/// announcement open `T3`, and W's measurement closes it. Each variant also
/// names an instant inside its interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TimePoint {
    #[serde(rename = "t0")]
    T0,
    #[serde(rename = "t1")]
    T1,
    #[serde(rename = "t2")]
    T2,
    #[serde(rename = "t3")]
    T3,
}

impl TimePoint {
    pub const ALL: [TimePoint; 4] = [TimePoint::T0, TimePoint::T1, TimePoint::T2, TimePoint::T3];
    /// The times at which an agent can be consulted in a deduction.
    pub const REASONING: [TimePoint; 3] = [TimePoint::T1, TimePoint::T2, TimePoint::T3];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Round-clock labels `n:xy` that fall in this interval.
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            TimePoint::T0 => &[],
            TimePoint::T1 => &["n:00", "n:01"],
            TimePoint::T2 => &["n:10", "n:11"],
            TimePoint::T3 => &["n:20", "n:21", "n:30", "n:31"],
        }
    }

    pub fn from_alias(alias: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.aliases().contains(&alias))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TimePoint::T0 => "t0",
            TimePoint::T1 => "t1",
            TimePoint::T2 => "t2",
            TimePoint::T3 => "t3",
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimePoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t0" => Ok(TimePoint::T0),
            "t1" => Ok(TimePoint::T1),
            "t2" => Ok(TimePoint::T2),
            "t3" => Ok(TimePoint::T3),
            other => Self::from_alias(other).ok_or_else(|| format!("unknown time point `{s}`")),
        }
    }
}
