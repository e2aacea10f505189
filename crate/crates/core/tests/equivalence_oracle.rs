mod common;

use std::collections::BTreeSet;

use cna_core::equivalence::{check_lts, LabelKey, Mode, Verdict};
use cna_core::process::{Definitions, Process};
use cna_core::semantics::{build_lts, Bounds, SymbolicLts};

use common::*;

/// Greatest fixpoint by repeated deletion from the full relation.
fn naive_bisimilar(l: &SymbolicLts, r: &SymbolicLts, mode: Mode) -> bool {
    let moves = |lts: &SymbolicLts, s: usize| -> Vec<(LabelKey, usize)> {
        lts.outgoing(s).iter().map(|t| (LabelKey::of(&t.label, mode), t.dst)).collect()
    };
    let (lm, rm): (Vec<_>, Vec<_>) = ((0..l.state_count()).map(|s| moves(l, s)).collect(), (0..r.state_count()).map(|s| moves(r, s)).collect());
    let mut rel: BTreeSet<(usize, usize)> =
        (0..l.state_count()).flat_map(|x| (0..r.state_count()).map(move |y| (x, y))).collect();
    loop {
        let kept: BTreeSet<(usize, usize)> = rel
            .iter()
            .filter(|&&(x, y)| {
                lm[x].iter().all(|(k, x2)| rm[y].iter().any(|(k2, y2)| k == k2 && rel.contains(&(*x2, *y2))))
                    && rm[y].iter().all(|(k, y2)| lm[x].iter().any(|(k2, x2)| k == k2 && rel.contains(&(*x2, *y2))))
            })
            .copied()
            .collect();
        if kept.len() == rel.len() {
            return rel.contains(&(l.initial, r.initial));
        }
        rel = kept;
    }
}

/// Pairs mixing unrelated processes with variants that only differ in
/// inert structure or duplicated choice.
fn pairs(defs: &Definitions) -> Vec<(Process, Process)> {
    let ps = seeded_processes(21, 120, defs);
    let mut out = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        let q = &ps[(i * 7 + 3) % ps.len()];
        out.push((p.clone(), q.clone()));
        out.push((p.clone(), Process::sum(p.clone(), p.clone())));
        out.push((Process::par(p.clone(), q.clone()), Process::par(q.clone(), p.clone())));
        out.push((Process::sum(p.clone(), q.clone()), Process::sum(q.clone(), Process::par(p.clone(), Process::Nil))));
        out.push((Process::par(p.clone(), q.clone()), Process::sum(p.clone(), q.clone())));
    }
    out
}

fn small_lts(p: &Process, defs: &Definitions) -> Option<SymbolicLts> {
    let lts = build_lts(p, defs, &Bounds::default().with_max_states(50)).ok()?;
    lts.complete.then_some(lts)
}

#[test]
fn refinement_agrees_with_the_naive_fixpoint() {
    let defs = generator_defs();
    let (mut yes, mut no) = (0, 0);
    for (p, q) in pairs(&defs) {
        let (Some(l), Some(r)) = (small_lts(&p, &defs), small_lts(&q, &defs)) else { continue };
        for mode in [Mode::Network, Mode::Strong] {
            let verdict = check_lts(&l, &r, mode);
            let naive = naive_bisimilar(&l, &r, mode);
            assert_eq!(verdict.is_bisimilar(), naive, "{mode:?}: {}", verdict.name());
            match &verdict {
                Verdict::Bisimilar => yes += 1,
                Verdict::Distinguished(w) => {
                    no += 1;
                    assert!(w.replays(&l, &r, mode));
                }
                Verdict::Unknown(why) => panic!("complete LTSs gave Unknown: {why}"),
            }
        }
    }
    assert!(yes >= 100 && no >= 100, "too lopsided: {yes} bisimilar, {no} distinguished");
}

#[test]
fn verdicts_are_reflexive_symmetric_and_strong_refines_network() {
    let defs = generator_defs();
    for (p, q) in pairs(&defs).into_iter().take(300) {
        let (Some(l), Some(r)) = (small_lts(&p, &defs), small_lts(&q, &defs)) else { continue };
        for mode in [Mode::Network, Mode::Strong] {
            assert!(check_lts(&l, &l, mode).is_bisimilar());
            assert_eq!(check_lts(&l, &r, mode).is_bisimilar(), check_lts(&r, &l, mode).is_bisimilar());
        }
        if check_lts(&l, &r, Mode::Strong).is_bisimilar() {
            assert!(check_lts(&l, &r, Mode::Network).is_bisimilar());
        }
    }
}

#[test]
fn truncated_comparisons_never_claim_bisimilarity() {
    let prog = cna_core::process::parse_program("C(a) := a\\a . (C(a) | C(a))\nD(a) := a\\a . D(a)").unwrap();
    let bounds = Bounds::default().with_max_states(5);
    let l = build_lts(&prog.resolve("C").unwrap(), &prog.defs, &bounds).unwrap();
    let r = build_lts(&prog.resolve("D").unwrap(), &prog.defs, &bounds).unwrap();
    assert!(!l.complete);
    assert!(!check_lts(&l, &r, Mode::Network).is_bisimilar());
}
