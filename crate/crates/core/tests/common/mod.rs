#![allow(dead_code)]

use cna_core::{Block, Link, LinkChain, NormalLabel};

/// Every member of the label's class with exactly `n` links: blocks in
/// order, virtual runs between them (possibly empty where the facing
/// channels agree) and on the outside.
pub fn paddings(label: &NormalLabel, n: usize) -> Vec<LinkChain> {
    fn go(blocks: &[Block], first: bool, room: usize, acc: &mut Vec<Link>, out: &mut Vec<LinkChain>) {
        let Some((b, rest)) = blocks.split_first() else {
            let mut c = acc.clone();
            c.extend(std::iter::repeat_n(Link::virtual_link(), room));
            if let Ok(c) = LinkChain::new(c) {
                out.push(c);
            }
            return;
        };
        let need: usize = blocks.iter().map(|b| b.links().len()).sum();
        for gap in 0..=room.saturating_sub(need) {
            if !first && gap == 0 && acc.last().map(|l| l.target()) != Some(b.first_source()) {
                continue;
            }
            let mark = acc.len();
            acc.extend(std::iter::repeat_n(Link::virtual_link(), gap));
            acc.extend(b.links().iter().cloned());
            go(rest, false, room - gap - b.links().len(), acc, out);
            acc.truncate(mark);
        }
    }
    let mut out = Vec::new();
    if n >= label.size() {
        go(label.blocks(), true, n, &mut Vec::new(), &mut out);
    }
    out
}

use std::collections::BTreeSet;

use cna_core::equivalence::generate_process;
use cna_core::process::{format_process, parse_program, Definitions, Process};
use cna_core::semantics::{concrete_step_oracle, sorted_steps, Bounds};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ORACLE_LEN: usize = 7;

pub fn generator_defs() -> Definitions {
    parse_program("R(a, b) := a\\b . R(a, b)\nS(a) := tau\\a . 0 + a\\tau . S(a)").unwrap().defs
}

/// `n` processes of depth at most 4 from a fixed seed.
pub fn seeded_processes(seed: u64, n: usize, defs: &Definitions) -> Vec<Process> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| generate_process(&mut rng, 4, defs)).collect()
}

pub type Steps = BTreeSet<(NormalLabel, String)>;

/// Symbolic steps whose labels fit in `len` links.
pub fn symbolic_within(p: &Process, defs: &Definitions, len: usize) -> Steps {
    sorted_steps(p, defs, &Bounds::default())
        .unwrap()
        .into_iter()
        .filter(|(l, _, _)| l.min_length() <= len)
        .map(|(l, _, k)| (l, k))
        .collect()
}

pub fn oracle_normalized(p: &Process, defs: &Definitions, len: usize) -> Steps {
    concrete_step_oracle(p, defs, len, &Bounds::default())
        .unwrap()
        .into_iter()
        .map(|(s, t)| (s.normalize(), format_process(&t.canonicalize())))
        .collect()
}
