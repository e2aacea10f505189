use std::collections::{HashMap, VecDeque};

use super::step::{settle, sorted_steps};
use super::{Bounds, SemanticsError};
use crate::chain::{EssentialLabel, NormalLabel};
use crate::process::{format_process, Definitions, Process};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LtsState {
    /// Canonical term.
    pub term: Process,
    /// Canonical text of `term`; states are deduplicated on it.
    pub key: String,
    /// All successors of this state are recorded.
    pub expanded: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LtsTransition {
    pub src: usize,
    pub label: NormalLabel,
    pub dst: usize,
}

impl LtsTransition {
    pub fn essential(&self) -> EssentialLabel {
        self.label.reduce()
    }
}

/// Reachable states numbered in breadth-first discovery order; each
/// state's transitions are sorted by label then target text.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolicLts {
    pub states: Vec<LtsState>,
    pub initial: usize,
    pub transitions: Vec<LtsTransition>,
    pub complete: bool,
    pub bounds: Bounds,
    outgoing: Vec<std::ops::Range<usize>>,
}

impl SymbolicLts {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn outgoing(&self, state: usize) -> &[LtsTransition] {
        &self.transitions[self.outgoing[state].clone()]
    }

    pub fn find(&self, key: &str) -> Option<usize> {
        self.states.iter().position(|s| s.key == key)
    }

    /// Rebuilds an LTS from stored parts, e.g. after import.
    pub fn from_parts(
        states: Vec<LtsState>,
        initial: usize,
        mut transitions: Vec<LtsTransition>,
        complete: bool,
        bounds: Bounds,
    ) -> SymbolicLts {
        transitions.sort_by_key(|t| t.src);
        let mut outgoing = vec![0..0; states.len()];
        let mut start = 0;
        for (id, range) in outgoing.iter_mut().enumerate() {
            let end = start + transitions[start..].iter().take_while(|t| t.src == id).count();
            *range = start..end;
            start = end;
        }
        SymbolicLts { states, initial, transitions, complete, bounds, outgoing }
    }
}

/// Breadth-first closure of [`super::symbolic_step`] from the normalized
/// initial term. Exploration stops once `bounds.max_states` states exist
/// and a further one is needed; the result is then marked incomplete.
pub fn build_lts(p: &Process, defs: &Definitions, bounds: &Bounds) -> Result<SymbolicLts, SemanticsError> {
    let init = settle(p, bounds).canonicalize();
    let init_key = format_process(&init);
    let mut states = vec![LtsState { term: init, key: init_key.clone(), expanded: false }];
    let mut index: HashMap<String, usize> = HashMap::from([(init_key, 0)]);
    let mut transitions = Vec::new();
    let mut outgoing: Vec<std::ops::Range<usize>> = vec![Default::default()];
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;

    while let Some(id) = queue.pop_front() {
        let steps = sorted_steps(&states[id].term, defs, bounds)?;
        let fresh = steps
            .iter()
            .filter(|(_, _, key)| !index.contains_key(key))
            .map(|(_, _, key)| key.as_str())
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        if states.len() + fresh > bounds.max_states {
            complete = false;
            break;
        }
        let start = transitions.len();
        for (label, target, key) in steps {
            let dst = match index.get(&key) {
                Some(&dst) => dst,
                None => {
                    let dst = states.len();
                    index.insert(key.clone(), dst);
                    states.push(LtsState { term: target, key, expanded: false });
                    outgoing.push(0..0);
                    queue.push_back(dst);
                    dst
                }
            };
            transitions.push(LtsTransition { src: id, label, dst });
        }
        outgoing[id] = start..transitions.len();
        states[id].expanded = true;
    }

    Ok(SymbolicLts { states, initial: 0, transitions, complete, bounds: *bounds, outgoing })
}
