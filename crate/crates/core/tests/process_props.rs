mod common;

use std::collections::BTreeSet;

use cna_core::ch;
use cna_core::equivalence::{check_bisim, Mode};
use cna_core::process::{format_process, parse_process, parse_program, Process};
use cna_core::semantics::{build_lts, Bounds};

use common::*;

fn corpus() -> Vec<(String, String)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cna"))
        .map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_definitions_print_and_reparse() {
    let files = corpus();
    assert!(files.len() >= 8);
    for (path, src) in files {
        let prog = parse_program(&src).unwrap_or_else(|e| panic!("{path}: {e}"));
        let printed = prog.defs.to_string();
        let again = parse_program(&printed).unwrap_or_else(|e| panic!("{path} reprinted: {e}\n{printed}"));
        assert_eq!(again.defs.to_string(), printed, "{path}");
        for (name, def) in prog.defs.iter() {
            assert!(def.body.alpha_eq(&again.defs.get(name).unwrap().body), "{path}: {name}");
        }
    }
}

#[test]
fn random_terms_print_and_reparse() {
    let defs = generator_defs();
    for p in seeded_processes(31, 300, &defs) {
        let text = format_process(&p);
        let back = parse_process(&text, &defs).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!(back.alpha_eq(&p), "{text}");
        assert_eq!(format_process(&back), text);
    }
}

#[test]
fn structural_normalization_is_a_shrinking_idempotent_bisimulation() {
    let defs = generator_defs();
    let bounds = Bounds::default().with_max_states(200);
    for p in seeded_processes(32, 200, &defs) {
        let wrapped = Process::par(Process::restrict(ch("z"), Process::par(Process::Nil, p.clone())), Process::Nil);
        let n = wrapped.struct_normalize();
        assert_eq!(n.struct_normalize(), n);
        assert!(n.node_count() <= wrapped.node_count());
        assert_eq!(n, p.struct_normalize());
        let unnormalized = bounds.with_normalize(false);
        if let (Ok(l), Ok(r)) = (build_lts(&wrapped, &defs, &unnormalized), build_lts(&n, &defs, &unnormalized)) {
            if l.complete && r.complete {
                assert!(cna_core::equivalence::check_lts(&l, &r, Mode::Strong).is_bisimilar(), "{}", format_process(&p));
            }
        }
    }
}

#[test]
fn substitution_bounds_free_names() {
    let defs = generator_defs();
    for p in seeded_processes(33, 200, &defs) {
        for (b, a) in [("b", "a"), ("a", "c"), ("d", "b")] {
            let (b, a) = (ch(b), ch(a));
            let q = p.subst(&b, &a);
            let mut allowed: BTreeSet<_> = p.free_names();
            allowed.remove(&a);
            allowed.insert(b.clone());
            assert!(q.free_names().is_subset(&allowed), "{} {{{b}/{a}}}", format_process(&p));
            if !p.free_names().contains(&a) {
                assert!(q.alpha_eq(&p));
            }
        }
    }
}

#[test]
fn substitution_preserves_network_bisimilarity() {
    let defs = generator_defs();
    let bounds = Bounds::default().with_max_states(200);
    let fwd = |a: &str, b: &str| format!("{a}\\{b} . 0");
    let pairs = [
        (fwd("a", "b"), "new h in (a\\h . 0 | h\\b . 0)".to_string()),
        ("a\\b . 0 + a\\b . 0".to_string(), fwd("a", "b")),
        ("tau\\a . 0 | b\\tau . 0".to_string(), "b\\tau . 0 | tau\\a . 0".to_string()),
    ];
    for (l, r) in pairs {
        let (l, r) = (parse_process(&l, &defs).unwrap(), parse_process(&r, &defs).unwrap());
        assert!(check_bisim(&l, &r, &defs, Mode::Network, &bounds).unwrap().is_bisimilar());
        for (b, a) in [("b", "a"), ("a", "b"), ("c", "a"), ("h", "a")] {
            let (b, a) = (ch(b), ch(a));
            let v = check_bisim(&l.subst(&b, &a), &r.subst(&b, &a), &defs, Mode::Network, &bounds).unwrap();
            assert!(v.is_bisimilar(), "{} vs {} under {{{b}/{a}}}", format_process(&l), format_process(&r));
        }
    }
}
