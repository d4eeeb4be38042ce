use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Three-valued result of a bounded search or formula evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "value", content = "reason", rename_all = "lowercase")]
pub enum TriState {
    True,
    False,
    Unknown(String),
}

impl TriState {
    pub fn from_bool(b: bool) -> TriState {
        if b {
            TriState::True
        } else {
            TriState::False
        }
    }

    pub fn unknown(reason: impl Into<String>) -> TriState {
        TriState::Unknown(reason.into())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, TriState::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, TriState::False)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriState::Unknown(_))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            TriState::True => Some(true),
            TriState::False => Some(false),
            TriState::Unknown(_) => None,
        }
    }

    /// Strong Kleene negation.
    pub fn not(self) -> TriState {
        match self {
            TriState::True => TriState::False,
            TriState::False => TriState::True,
            u => u,
        }
    }

    /// Strong Kleene conjunction.
    pub fn and(self, other: TriState) -> TriState {
        match (self, other) {
            (TriState::False, _) | (_, TriState::False) => TriState::False,
            (TriState::True, TriState::True) => TriState::True,
            (TriState::Unknown(r), _) | (_, TriState::Unknown(r)) => TriState::Unknown(r),
        }
    }

    /// Strong Kleene disjunction.
    pub fn or(self, other: TriState) -> TriState {
        match (self, other) {
            (TriState::True, _) | (_, TriState::True) => TriState::True,
            (TriState::False, TriState::False) => TriState::False,
            (TriState::Unknown(r), _) | (_, TriState::Unknown(r)) => TriState::Unknown(r),
        }
    }

    pub fn implies(self, other: TriState) -> TriState {
        self.not().or(other)
    }

    /// Process exit code: 0 true, 1 false, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            TriState::True => 0,
            TriState::False => 1,
            TriState::Unknown(_) => 2,
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriState::True => write!(f, "TRUE"),
            TriState::False => write!(f, "FALSE"),
            TriState::Unknown(_) => write!(f, "UNKNOWN"),
        }
    }
}

/// Finite scan limits standing in for unbounded searches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub n_from: i64,
    pub n_to: i64,
    /// Window length, where the search needs one.
    pub m: Option<usize>,
    pub candidate_cap: u64,
    /// Wall-clock limit in seconds; expiry is reported as unknown.
    pub wall_clock_cap: Option<f64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { n_from: 0, n_to: 1_000_000, m: None, candidate_cap: 100_000_000, wall_clock_cap: None }
    }
}

impl SearchBudget {
    pub fn range(n_from: i64, n_to: i64) -> SearchBudget {
        SearchBudget { n_from, n_to, ..SearchBudget::default() }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.n_from > self.n_to {
            return Err(crate::Error::InvalidArgument(format!(
                "budget range is empty: n_from {} > n_to {}",
                self.n_from, self.n_to
            )));
        }
        if self.candidate_cap == 0 || self.wall_clock_cap.is_some_and(|w| w <= 0.0) {
            return Err(crate::Error::InvalidArgument("budget caps must be positive".into()));
        }
        Ok(())
    }

    pub fn deadline(&self) -> Deadline {
        Deadline { end: self.wall_clock_cap.map(|s| Instant::now() + Duration::from_secs_f64(s)) }
    }
}

/// Wall-clock limit derived from a budget.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    end: Option<Instant>,
}

impl Deadline {
    pub fn none() -> Deadline {
        Deadline { end: None }
    }

    pub fn expired(&self) -> bool {
        self.end.is_some_and(|e| Instant::now() >= e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kleene_tables() {
        let u = || TriState::unknown("u");
        assert_eq!(TriState::False.and(u()), TriState::False);
        assert!(TriState::True.and(u()).is_unknown());
        assert_eq!(TriState::True.or(u()), TriState::True);
        assert!(TriState::False.or(u()).is_unknown());
        assert!(u().not().is_unknown());
        assert_eq!(TriState::False.implies(u()), TriState::True);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(TriState::True.exit_code(), 0);
        assert_eq!(TriState::False.exit_code(), 1);
        assert_eq!(TriState::unknown("x").exit_code(), 2);
    }
}
