mod common;

use std::collections::BTreeSet;

use cna_core::process::{format_process, parse_program, Definitions, Process};
use cna_core::semantics::{build_lts, concrete_step_oracle, symbolic_step, Bounds};
use cna_core::{ch, parse_chain, LinkChain, Site};

use common::*;

#[test]
fn prefix_oracle_enumerates_paddings() {
    let prog = parse_program("main := a\\b . 0").unwrap();
    let p = prog.resolve("main").unwrap();
    let got: BTreeSet<String> =
        concrete_step_oracle(&p, &prog.defs, 2, &Bounds::default()).unwrap().into_iter().map(|(s, _)| s.to_string()).collect();
    let want: BTreeSet<String> = ["a\\b", "a\\b ; _\\_", "_\\_ ; a\\b"].iter().map(|s| s.to_string()).collect();
    assert_eq!(got, want);
}

#[test]
fn symbolic_steps_match_the_oracle() {
    let defs = generator_defs();
    let (mut compared, mut active) = (0, 0);
    for (i, p) in seeded_processes(7, 200, &defs).iter().enumerate() {
        let sym = symbolic_within(p, &defs, ORACLE_LEN);
        let ora = oracle_normalized(p, &defs, ORACLE_LEN);
        assert_eq!(sym, ora, "process {i}: {}", format_process(p));
        compared += sym.len();
        active += usize::from(!sym.is_empty());
    }
    eprintln!("{compared} transitions over {active} active processes");
    assert!(active >= 150 && compared >= 300);
}

#[test]
fn oracle_sets_are_accordion_closed() {
    let defs = generator_defs();
    for p in seeded_processes(8, 200, &defs) {
        let raw: BTreeSet<(LinkChain, String)> = concrete_step_oracle(&p, &defs, ORACLE_LEN, &Bounds::default())
            .unwrap()
            .into_iter()
            .map(|(s, t)| (s, format_process(&t.canonicalize())))
            .collect();
        for (s, target) in &raw {
            for n in 1..=ORACLE_LEN {
                for q in paddings(&s.normalize(), n) {
                    assert!(raw.contains(&(q.clone(), target.clone())), "{}: {s} present but {q} missing", format_process(&p));
                }
            }
        }
    }
}

/// Solid links a single step can use: every parallel component fires at
/// most one prefix, and a sum fires one of its summands.
fn size_bound(p: &Process, defs: &Definitions, budget: usize) -> usize {
    match p {
        Process::Nil => 0,
        Process::Prefix(l, _) => l.size(),
        Process::Sum(l, r) => size_bound(l, defs, budget).max(size_bound(r, defs, budget)),
        Process::Par(l, r) => size_bound(l, defs, budget) + size_bound(r, defs, budget),
        Process::Restrict(_, b) | Process::Rename(b, _) => size_bound(b, defs, budget),
        Process::Call(name, args) if budget > 0 => size_bound(&defs.get(name).unwrap().instantiate(args), defs, budget - 1),
        Process::Call(..) => usize::MAX,
    }
}

#[test]
fn labels_respect_structural_invariants() {
    let defs = generator_defs();
    for p in seeded_processes(9, 200, &defs) {
        let bound = size_bound(&p, &defs, 8);
        for t in symbolic_step(&p, &defs, &Bounds::default()).unwrap() {
            assert!(t.label.size() <= bound, "{} has {} > {bound}", format_process(&p), t.label.blocks_string());
            let blocks = t.label.blocks();
            for (i, b) in blocks.iter().enumerate() {
                let links = b.links();
                for (j, l) in links.iter().enumerate() {
                    let inner_src = j > 0 || i > 0;
                    let inner_tgt = j + 1 < links.len() || i + 1 < blocks.len();
                    if l.source().is_tau() {
                        assert!(!inner_src || j > 0, "tau source at a junction in {}", t.label.blocks_string());
                    }
                    if l.target().is_tau() {
                        assert!(!inner_tgt || j + 1 < links.len(), "tau target at a junction in {}", t.label.blocks_string());
                    }
                    assert!(!matches!(l.source(), Site::Virtual));
                }
            }
        }
    }
}

#[test]
fn lts_construction_is_deterministic() {
    let defs = generator_defs();
    for p in seeded_processes(10, 100, &defs) {
        let bounds = Bounds::default().with_max_states(300);
        assert_eq!(build_lts(&p, &defs, &bounds).unwrap(), build_lts(&p, &defs, &bounds).unwrap());
    }
}

#[test]
fn restriction_hides_matched_channels() {
    let prog = parse_program("main := new c in (a\\c . 0 | c\\b . 0)").unwrap();
    let p = prog.resolve("main").unwrap();
    let labels: BTreeSet<String> =
        symbolic_step(&p, &prog.defs, &Bounds::default()).unwrap().iter().map(|t| t.label.reduce().to_string()).collect();
    assert_eq!(labels, BTreeSet::from(["a\\b".to_string()]));
    assert!(!labels.iter().any(|l| parse_chain(l).unwrap().mentions(&ch("c"))));
}
