//! Operational semantics over ▶◀-classes of labels and bounded reachable
//! LTS construction.

mod lts;
mod oracle;
mod step;

use thiserror::Error;

use crate::chain::NormalLabel;
use crate::process::Process;

pub use lts::{build_lts, LtsState, LtsTransition, SymbolicLts};
pub use oracle::concrete_step_oracle;
pub use step::{sorted_steps, symbolic_step};

pub const DEFAULT_MAX_STATES: usize = 10_000;
pub const DEFAULT_MAX_UNFOLD: usize = 64;
pub const DEFAULT_ORACLE_LEN: usize = 7;

/// Deliberate faults used to check that test harnesses notice broken
/// semantics.
#[doc(hidden)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mutation {
    /// (Com) keeps only interleavings that start with the left label's
    /// first block.
    DropInterleavings,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bounds {
    pub max_states: usize,
    pub max_unfold: usize,
    /// Apply structural normalization to every target.
    pub normalize: bool,
    #[doc(hidden)]
    pub mutation: Option<Mutation>,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds {
            max_states: DEFAULT_MAX_STATES,
            max_unfold: DEFAULT_MAX_UNFOLD,
            normalize: true,
            mutation: None,
        }
    }
}

impl Bounds {
    pub fn with_max_states(self, max_states: usize) -> Bounds {
        Bounds { max_states, ..self }
    }

    pub fn with_max_unfold(self, max_unfold: usize) -> Bounds {
        Bounds { max_unfold, ..self }
    }

    pub fn with_normalize(self, normalize: bool) -> Bounds {
        Bounds { normalize, ..self }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum SemanticsError {
    #[error("unguarded recursion through `{name}`: more than {limit} unfoldings without a prefix")]
    UnguardedRecursion { name: String, limit: usize },
    #[error("`{0}` is not defined")]
    UndefinedConstant(String),
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
}

impl SemanticsError {
    pub fn code(&self) -> &'static str {
        match self {
            SemanticsError::UnguardedRecursion { .. } => "UnguardedRecursion",
            SemanticsError::UndefinedConstant(_) => "UndefinedConstant",
            SemanticsError::Arity { .. } => "ArityError",
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SymbolicTransition {
    pub label: NormalLabel,
    pub target: Process,
}
