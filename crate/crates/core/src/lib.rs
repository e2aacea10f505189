//! Core Network Algebra (CNA) workbench.
//!
//! CNA is a CCS-like process calculus whose actions are *links* `a\b` and
//! whose transitions are labelled by *link chains*, so that a single
//! transition can describe an open multiparty synchronisation routed
//! through any number of processes.
//!
//! - [`chain`]: links, link chains, and their canonical forms.
//! - [`process`]: abstract syntax, the `.cna` grammar, printing and substitution.
//! - [`semantics`]: symbolic transitions (one per ▶◀-class) and LTS construction.
//! - [`equivalence`]: network and strong bisimilarity, plus algebraic law checks.
//! - [`routing`]: routing infrastructures, their graphs and path analysis.

pub mod chain;
pub mod equivalence;
pub mod name;
pub mod process;
pub mod routing;
pub mod semantics;

pub use chain::{parse_chain, Block, ChainError, EssentialLabel, Link, LinkChain, NormalLabel, Renaming, Site};
pub use name::{ch, Chan};
