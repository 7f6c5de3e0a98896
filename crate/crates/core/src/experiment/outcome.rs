use serde::{Deserialize, Serialize};
use std::fmt;

/// F̄'s reading of R.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coin {
    Heads,
    Tails,
}

/// F's reading of S, recorded as the spin value z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinZ {
    /// z = −½ (S found down)
    Minus,
    /// z = +½ (S found up)
    Plus,
}

/// W̄'s result on lab L̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WBarOutcome {
    OkBar,
    FailsBar,
}

/// W's result on lab L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WOutcome {
    Ok,
    Fails,
}

macro_rules! two_valued {
    ($t:ident, $a:ident => $sa:literal, $b:ident => $sb:literal) => {
        impl $t {
            pub const ALL: [$t; 2] = [$t::$a, $t::$b];

            /// Position in the measurement basis (and level in the record space).
            pub fn index(self) -> usize {
                self as usize
            }

            pub fn from_index(i: usize) -> Self {
                Self::ALL[i]
            }

            pub fn label(self) -> &'static str {
                match self {
                    $t::$a => $sa,
                    $t::$b => $sb,
                }
            }

            pub fn from_label(s: &str) -> Option<Self> {
                Self::ALL.into_iter().find(|o| o.label() == s)
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    };
}

two_valued!(Coin, Heads => "heads", Tails => "tails");
two_valued!(SpinZ, Minus => "minus", Plus => "plus");
two_valued!(WBarOutcome, OkBar => "okbar", FailsBar => "failsbar");
two_valued!(WOutcome, Ok => "ok", Fails => "fails");

impl SpinZ {
    /// Outcome name in F's measurement basis.
    pub fn basis_label(self) -> &'static str {
        match self {
            SpinZ::Minus => "down",
            SpinZ::Plus => "up",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SpinZ::Minus => "-1/2",
            SpinZ::Plus => "+1/2",
        }
    }
}
