//! Network bisimilarity and its strong variant over bounded symbolic LTSs.
//!
//! Network mode matches labels by their ▷◁ reduct, strong mode by their
//! ▶◀ class. Complete LTSs are decided by signature refinement on the
//! disjoint union. Distinguishing witnesses come from a pair game that
//! only ever attacks from fully expanded states, so a witness found in a
//! truncated LTS is still a proof of inequivalence.

mod laws;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::chain::{EssentialLabel, NormalLabel};
use crate::process::{Definitions, Process};
use crate::semantics::{build_lts, Bounds, SemanticsError, SymbolicLts};

pub use laws::{generate_process, law_harness, HarnessConfig, LawReport, LawResult};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Mode {
    #[default]
    Network,
    Strong,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Network => "network",
            Mode::Strong => "strong",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "network" => Ok(Mode::Network),
            "strong" => Ok(Mode::Strong),
            other => Err(format!("unknown mode `{other}`, expected network or strong")),
        }
    }
}

/// What two transitions must share to match.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LabelKey {
    Essential(EssentialLabel),
    Normal(NormalLabel),
}

impl LabelKey {
    pub fn of(label: &NormalLabel, mode: Mode) -> LabelKey {
        match mode {
            Mode::Network => LabelKey::Essential(label.reduce()),
            Mode::Strong => LabelKey::Normal(label.clone()),
        }
    }
}

impl fmt::Display for LabelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKey::Essential(e) => write!(f, "{e}"),
            LabelKey::Normal(n) => f.write_str(&n.blocks_string()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// One attacker move at the pair `(left, right)`: the attacker plays `key`
/// on `side` reaching `attacker_target`; `defender_target` is the reply
/// followed by the trace, absent on the final move where no reply exists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessStep {
    pub left: usize,
    pub right: usize,
    pub side: Side,
    pub key: LabelKey,
    pub attacker_target: usize,
    pub defender_target: Option<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub steps: Vec<WitnessStep>,
}

impl Witness {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Checks the trace against both LTSs: every move exists, every reply
    /// matches, and on the final pair the defender has no reply at all.
    pub fn replays(&self, left: &SymbolicLts, right: &SymbolicLts, mode: Mode) -> bool {
        let (mut l, mut r) = (left.initial, right.initial);
        for (i, step) in self.steps.iter().enumerate() {
            if (step.left, step.right) != (l, r) {
                return false;
            }
            let (att, att_state, def, def_state) = match step.side {
                Side::Left => (left, l, right, r),
                Side::Right => (right, r, left, l),
            };
            if !def.states[def_state].expanded {
                return false;
            }
            let has_move = att
                .outgoing(att_state)
                .iter()
                .any(|t| t.dst == step.attacker_target && LabelKey::of(&t.label, mode) == step.key);
            if !has_move {
                return false;
            }
            let replies: Vec<usize> = def
                .outgoing(def_state)
                .iter()
                .filter(|t| LabelKey::of(&t.label, mode) == step.key)
                .map(|t| t.dst)
                .collect();
            let last = i + 1 == self.steps.len();
            match (last, step.defender_target) {
                (true, None) => return replies.is_empty(),
                (false, Some(d)) if replies.contains(&d) => {
                    (l, r) = match step.side {
                        Side::Left => (step.attacker_target, d),
                        Side::Right => (d, step.attacker_target),
                    };
                }
                _ => return false,
            }
        }
        false
    }

    pub fn render(&self, left: &SymbolicLts, right: &SymbolicLts) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let (att, def) = match step.side {
                Side::Left => (left, right),
                Side::Right => (right, left),
            };
            out.push_str(&format!(
                "({}, {}) {} plays {} to {}",
                left.states[step.left].key,
                right.states[step.right].key,
                step.side.as_str(),
                step.key,
                att.states[step.attacker_target].key
            ));
            match step.defender_target {
                Some(d) => out.push_str(&format!("; reply {}\n", def.states[d].key)),
                None => out.push_str("; no reply\n"),
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Bisimilar,
    Distinguished(Witness),
    Unknown(String),
}

impl Verdict {
    pub fn is_bisimilar(&self) -> bool {
        matches!(self, Verdict::Bisimilar)
    }

    pub fn is_distinguished(&self) -> bool {
        matches!(self, Verdict::Distinguished(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Bisimilar => "Bisimilar",
            Verdict::Distinguished(_) => "Distinguished",
            Verdict::Unknown(_) => "Unknown",
        }
    }
}

/// A verdict together with the two LTSs it was computed on.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub verdict: Verdict,
    pub left: SymbolicLts,
    pub right: SymbolicLts,
}

pub fn check_bisim(
    p: &Process,
    q: &Process,
    defs: &Definitions,
    mode: Mode,
    bounds: &Bounds,
) -> Result<Verdict, SemanticsError> {
    compare(p, q, defs, mode, bounds).map(|c| c.verdict)
}

pub fn compare(
    p: &Process,
    q: &Process,
    defs: &Definitions,
    mode: Mode,
    bounds: &Bounds,
) -> Result<Comparison, SemanticsError> {
    let left = build_lts(p, defs, bounds)?;
    let right = build_lts(q, defs, bounds)?;
    let verdict = check_lts(&left, &right, mode);
    Ok(Comparison { verdict, left, right })
}

/// Decides the initial states of two already built LTSs.
pub fn check_lts(left: &SymbolicLts, right: &SymbolicLts, mode: Mode) -> Verdict {
    let keyed = Keyed::new(left, right, mode);
    if left.complete && right.complete {
        let blocks = keyed.refine();
        if blocks[keyed.left_id(left.initial)] == blocks[keyed.right_id(right.initial)] {
            return Verdict::Bisimilar;
        }
    }
    match keyed.witness(left.initial, right.initial) {
        Some(w) => Verdict::Distinguished(w),
        None => {
            let mut reasons = Vec::new();
            for (side, l) in [("left", left), ("right", right)] {
                if !l.complete {
                    reasons.push(format!("{side} LTS truncated at {} states", l.bounds.max_states));
                }
            }
            Verdict::Unknown(reasons.join("; "))
        }
    }
}

/// The disjoint union with interned label keys: left states first.
struct Keyed {
    offset: usize,
    expanded: Vec<bool>,
    /// Per state, sorted `(key id, global target)` pairs.
    edges: Vec<Vec<(usize, usize)>>,
    keys: Vec<LabelKey>,
}

impl Keyed {
    fn new(left: &SymbolicLts, right: &SymbolicLts, mode: Mode) -> Keyed {
        let offset = left.states.len();
        let mut intern: HashMap<LabelKey, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut edges = Vec::with_capacity(offset + right.states.len());
        let mut expanded = Vec::with_capacity(edges.capacity());
        for (lts, base) in [(left, 0), (right, offset)] {
            for (id, state) in lts.states.iter().enumerate() {
                let mut out: Vec<(usize, usize)> = lts
                    .outgoing(id)
                    .iter()
                    .map(|t| {
                        let key = LabelKey::of(&t.label, mode);
                        let k = *intern.entry(key.clone()).or_insert_with(|| {
                            keys.push(key);
                            keys.len() - 1
                        });
                        (k, base + t.dst)
                    })
                    .collect();
                out.sort_unstable();
                out.dedup();
                edges.push(out);
                expanded.push(state.expanded);
            }
        }
        Keyed { offset, expanded, edges, keys }
    }

    fn left_id(&self, s: usize) -> usize {
        s
    }

    fn right_id(&self, s: usize) -> usize {
        self.offset + s
    }

    /// Coarsest stable partition; returns a block id per global state.
    fn refine(&self) -> Vec<usize> {
        let n = self.edges.len();
        let mut block = vec![0usize; n];
        let mut count = 1;
        loop {
            let mut ids: HashMap<(usize, BTreeSet<(usize, usize)>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for s in 0..n {
                let sig: BTreeSet<(usize, usize)> = self.edges[s].iter().map(|&(k, d)| (k, block[d])).collect();
                let fresh = ids.len();
                next[s] = *ids.entry((block[s], sig)).or_insert(fresh);
            }
            let new_count = ids.len();
            block = next;
            if new_count == count {
                return block;
            }
            count = new_count;
        }
    }

    fn replies(&self, s: usize, key: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[s].iter().filter(move |&&(k, _)| k == key).map(|&(_, d)| d)
    }

    /// Pairs reachable from `(l0, r0)` by matched moves, as global ids.
    fn reachable_pairs(&self, l0: usize, r0: usize) -> Vec<(usize, usize)> {
        let start = (self.left_id(l0), self.right_id(r0));
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some((p, q)) = stack.pop() {
            for &(k, p2) in &self.edges[p] {
                for q2 in self.replies(q, k) {
                    if seen.insert((p2, q2)) {
                        stack.push((p2, q2));
                    }
                }
            }
            for &(k, q2) in &self.edges[q] {
                for p2 in self.replies(p, k) {
                    if seen.insert((p2, q2)) {
                        stack.push((p2, q2));
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Shortest attacker strategy; depth-`k` pairs are distinguished by a
    /// move all of whose replies lead to pairs of depth below `k`.
    fn witness(&self, l0: usize, r0: usize) -> Option<Witness> {
        let pairs = self.reachable_pairs(l0, r0);
        let mut depth: BTreeMap<(usize, usize), (usize, Move)> = BTreeMap::new();
        let mut level = 0;
        loop {
            level += 1;
            let mut found = Vec::new();
            for &(p, q) in &pairs {
                if depth.contains_key(&(p, q)) || !self.expanded[p] || !self.expanded[q] {
                    continue;
                }
                if let Some(m) = self.attack(p, q, &depth) {
                    found.push(((p, q), m));
                }
            }
            if found.is_empty() {
                break;
            }
            for (pair, m) in found {
                depth.insert(pair, (level, m));
            }
        }
        let start = (self.left_id(l0), self.right_id(r0));
        depth.get(&start)?;
        let mut steps = Vec::new();
        let mut at = start;
        while let Some((_, m)) = depth.get(&at) {
            let (p, q) = at;
            steps.push(WitnessStep {
                left: p,
                right: q - self.offset,
                side: m.side,
                key: self.keys[m.key].clone(),
                attacker_target: match m.side {
                    Side::Left => m.attacker_target,
                    Side::Right => m.attacker_target - self.offset,
                },
                defender_target: m.reply.map(|d| match m.side {
                    Side::Left => d - self.offset,
                    Side::Right => d,
                }),
            });
            match m.reply {
                None => break,
                Some(d) => {
                    at = match m.side {
                        Side::Left => (m.attacker_target, d),
                        Side::Right => (d, m.attacker_target),
                    }
                }
            }
        }
        Some(Witness { steps })
    }

    /// A move from `(p, q)` every reply to which lands in `depth`; the
    /// recorded reply is the one whose pair is shallowest.
    fn attack(&self, p: usize, q: usize, depth: &BTreeMap<(usize, usize), (usize, Move)>) -> Option<Move> {
        for side in [Side::Left, Side::Right] {
            let (att, def) = match side {
                Side::Left => (p, q),
                Side::Right => (q, p),
            };
            for &(k, a2) in &self.edges[att] {
                let mut best: Option<(usize, usize)> = None;
                let mut all = true;
                for d2 in self.replies(def, k) {
                    let pair = match side {
                        Side::Left => (a2, d2),
                        Side::Right => (d2, a2),
                    };
                    match depth.get(&pair) {
                        Some((lvl, _)) => {
                            if best.is_none_or(|(w, _)| *lvl < w) {
                                best = Some((*lvl, d2));
                            }
                        }
                        None => {
                            all = false;
                            break;
                        }
                    }
                }
                if all {
                    return Some(Move { side, key: k, attacker_target: a2, reply: best.map(|(_, d)| d) });
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug)]
struct Move {
    side: Side,
    key: usize,
    attacker_target: usize,
    reply: Option<usize>,
}
