use std::fmt;

use serde::{Serialize, Serializer};

/// Verdict of a fuel-bounded, semi-decidable question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriState {
    Holds,
    Fails,
    /// Fuel ran out before the question could be settled.
    Unknown(String),
}

impl TriState {
    pub fn unknown(reason: impl Into<String>) -> TriState {
        TriState::Unknown(reason.into())
    }

    pub fn holds(&self) -> bool {
        matches!(self, TriState::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, TriState::Fails)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriState::Unknown(_))
    }

    pub fn from_bool(b: bool) -> TriState {
        if b {
            TriState::Holds
        } else {
            TriState::Fails
        }
    }

    /// Conjunction: `Fails` dominates, then `Unknown`, then `Holds`.
    pub fn all<I>(verdicts: I) -> TriState
    where
        I: IntoIterator<Item = TriState>,
    {
        let mut unknown = None;
        for v in verdicts {
            match v {
                TriState::Fails => return TriState::Fails,
                TriState::Unknown(r) => {
                    unknown.get_or_insert(r);
                }
                TriState::Holds => {}
            }
        }
        match unknown {
            Some(r) => TriState::Unknown(r),
            None => TriState::Holds,
        }
    }

    /// Disjunction: `Holds` dominates, then `Unknown`, then `Fails`.
    pub fn any<I>(verdicts: I) -> TriState
    where
        I: IntoIterator<Item = TriState>,
    {
        let mut unknown = None;
        for v in verdicts {
            match v {
                TriState::Holds => return TriState::Holds,
                TriState::Unknown(r) => {
                    unknown.get_or_insert(r);
                }
                TriState::Fails => {}
            }
        }
        match unknown {
            Some(r) => TriState::Unknown(r),
            None => TriState::Fails,
        }
    }

    pub fn and(self, other: TriState) -> TriState {
        TriState::all([self, other])
    }

    pub fn label(&self) -> &'static str {
        match self {
            TriState::Holds => "Holds",
            TriState::Fails => "Fails",
            TriState::Unknown(_) => "Unknown",
        }
    }

    /// Process exit code for a top-level verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            TriState::Holds => 0,
            TriState::Fails => 1,
            TriState::Unknown(_) => 2,
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriState::Unknown(r) => write!(f, "Unknown ({r})"),
            v => f.write_str(v.label()),
        }
    }
}

impl Serialize for TriState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}
