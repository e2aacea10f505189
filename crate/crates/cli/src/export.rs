//! LTS documents: the structured JSON form and Graphviz DOT.

use std::fmt::Write as _;

use cna_core::process::{format_process, parse_process, Definitions, ParseError};
use cna_core::semantics::{Bounds, LtsState, LtsTransition, SymbolicLts};
use cna_core::{Block, ChainError, Link, NormalLabel, Site};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Structured,
    Dot,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LinkDoc {
    pub s: String,
    pub t: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: usize,
    pub term: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub src: usize,
    pub dst: usize,
    pub blocks: Vec<Vec<LinkDoc>>,
    pub essential: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LtsDoc {
    pub version: String,
    pub complete: bool,
    pub initial: usize,
    pub states: Vec<StateDoc>,
    pub transitions: Vec<TransitionDoc>,
}

pub fn blocks_doc(label: &NormalLabel) -> Vec<Vec<LinkDoc>> {
    label
        .blocks()
        .iter()
        .map(|b| {
            b.links()
                .iter()
                .map(|l| LinkDoc { s: l.source().to_string(), t: l.target().to_string() })
                .collect()
        })
        .collect()
}

pub fn to_doc(lts: &SymbolicLts) -> LtsDoc {
    LtsDoc {
        version: FORMAT_VERSION.to_string(),
        complete: lts.complete,
        initial: lts.initial,
        states: lts.states.iter().enumerate().map(|(id, s)| StateDoc { id, term: s.key.clone() }).collect(),
        transitions: lts
            .transitions
            .iter()
            .map(|t| TransitionDoc {
                src: t.src,
                dst: t.dst,
                blocks: blocks_doc(&t.label),
                essential: t.essential().to_string(),
            })
            .collect(),
    }
}

pub fn export_lts(lts: &SymbolicLts, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut out = serde_json::to_string_pretty(&to_doc(lts)).expect("documents serialize");
            out.push('\n');
            out
        }
        Format::Dot => to_dot(lts),
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(lts: &SymbolicLts) -> String {
    let mut out = String::from("digraph lts {\n  node [shape=circle];\n");
    for (id, s) in lts.states.iter().enumerate() {
        let peripheries = if id == lts.initial { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  s{id} [label=\"{id}\", tooltip=\"{}\"{peripheries}];", dot_escape(&s.key));
    }
    for t in &lts.transitions {
        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"];", t.src, t.dst, dot_escape(&t.essential().to_string()));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported document version {0:?}")]
    Version(String),
    #[error("state ids must be 0..n in order; found {found} at position {position}")]
    StateIds { position: usize, found: usize },
    #[error("transition refers to unknown state {0}")]
    UnknownState(usize),
    #[error("state {id}: {source}")]
    Term { id: usize, source: ParseError },
    #[error("invalid label: {0}")]
    Label(#[from] ChainError),
    #[error("essential {stored:?} disagrees with blocks, which reduce to {computed:?}")]
    Essential { stored: String, computed: String },
}

fn label_from_doc(blocks: &[Vec<LinkDoc>]) -> Result<NormalLabel, ChainError> {
    let blocks = blocks
        .iter()
        .map(|b| {
            let links = b
                .iter()
                .map(|l| Link::new(l.s.parse::<Site>()?, l.t.parse::<Site>()?))
                .collect::<Result<Vec<_>, _>>()?;
            Block::new(links)
        })
        .collect::<Result<Vec<_>, _>>()?;
    NormalLabel::from_blocks(blocks)
}

/// Rebuilds an LTS from its structured document. Terms are parsed against
/// `defs`. Every state of a complete document counts as expanded; in an
/// incomplete one, only states with recorded successors do.
pub fn import_lts(text: &str, defs: &Definitions, bounds: Bounds) -> Result<SymbolicLts, ImportError> {
    let doc: LtsDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(ImportError::Version(doc.version));
    }
    let n = doc.states.len();
    let mut states = Vec::with_capacity(n);
    for (position, s) in doc.states.iter().enumerate() {
        if s.id != position {
            return Err(ImportError::StateIds { position, found: s.id });
        }
        let term = parse_process(&s.term, defs)
            .map_err(|source| ImportError::Term { id: s.id, source })?
            .canonicalize();
        let key = format_process(&term);
        states.push(LtsState { term, key, expanded: doc.complete });
    }
    if doc.initial >= n {
        return Err(ImportError::UnknownState(doc.initial));
    }
    let mut transitions = Vec::with_capacity(doc.transitions.len());
    for t in &doc.transitions {
        for id in [t.src, t.dst] {
            if id >= n {
                return Err(ImportError::UnknownState(id));
            }
        }
        let label = label_from_doc(&t.blocks)?;
        let computed = label.reduce().to_string();
        if computed != t.essential {
            return Err(ImportError::Essential { stored: t.essential.clone(), computed });
        }
        states[t.src].expanded = true;
        transitions.push(LtsTransition { src: t.src, label, dst: t.dst });
    }
    Ok(SymbolicLts::from_parts(states, doc.initial, transitions, doc.complete, bounds))
}
