use std::collections::BTreeSet;

use cna_core::ch;
use cna_core::process::parse_program;
use cna_core::routing::*;
use cna_core::semantics::{build_lts, sorted_steps, Bounds};
use cna_core::Chan;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Gen {
    rng: ChaCha8Rng,
    names: usize,
}

impl Gen {
    fn chans(&mut self, prefix: &str, n: usize) -> Vec<Chan> {
        (0..n)
            .map(|_| {
                self.names += 1;
                ch(&format!("{prefix}{}", self.names))
            })
            .collect()
    }

    fn infra(&mut self, left: Vec<Chan>, right: Vec<Chan>, layers: usize) -> Infra {
        self.names += 1;
        let name = format!("I{}", self.names);
        if layers <= 1 || self.rng.gen_ratio(1, 3) {
            let mut links = BTreeSet::new();
            for i in 0..left.len() {
                for j in 0..right.len() {
                    if self.rng.gen_ratio(1, 2) {
                        links.insert((i, j));
                    }
                }
            }
            return Infra::basic(&name, left, right, links);
        }
        let width = self.rng.gen_range(1..=3);
        let shared = self.chans("h", width);
        let l = self.infra(left, shared.clone(), layers - 1);
        let r = self.infra(shared.clone(), right, layers - 1);
        Infra::compose(&name, l, r, shared)
    }

    fn root(&mut self) -> Infra {
        let (n, m) = (self.rng.gen_range(1..=3), self.rng.gen_range(1..=3));
        let (left, right) = (self.chans("a", n), self.chans("b", m));
        self.infra(left, right, 3)
    }
}

fn composites(n: usize) -> Vec<Infra> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(5), names: 0 };
    (0..n).map(|_| g.root()).collect()
}

/// End-to-end connectivity as a relational composition of link sets.
fn connections(infra: &Infra) -> BTreeSet<(Chan, Chan)> {
    match infra {
        Infra::Basic { left, right, links, .. } => links.iter().map(|&(i, j)| (left[i].clone(), right[j].clone())).collect(),
        Infra::Compose { left, right, .. } => {
            let (l, r) = (connections(left), connections(right));
            l.iter()
                .flat_map(|(a, h)| r.iter().filter(move |(h2, _)| h == h2).map(move |(_, b)| (a.clone(), b.clone())))
                .collect()
        }
    }
}

fn leaf_arcs(infra: &Infra) -> BTreeSet<(Chan, Chan)> {
    match infra {
        Infra::Basic { .. } => connections(infra),
        Infra::Compose { left, right, .. } => leaf_arcs(left).union(&leaf_arcs(right)).cloned().collect(),
    }
}

fn layers(infra: &Infra) -> usize {
    match infra {
        Infra::Basic { .. } => 1,
        Infra::Compose { left, right, .. } => 1 + layers(left).max(layers(right)),
    }
}

#[test]
fn random_composites_verify() {
    let bounds = Bounds::default();
    let all = composites(50);
    assert!(all.iter().filter(|i| layers(i) == 3).count() >= 10);
    for infra in all {
        let report = verify_paths(&infra, &bounds).unwrap();
        assert!(report.passed(), "{infra}\n{report}");
    }
}

#[test]
fn graph_and_lts_agree_with_relational_composition() {
    for infra in composites(50) {
        let g = infra_graph(&infra).unwrap();
        assert_eq!(g.arcs, leaf_arcs(&infra));
        let pairs = connections(&infra);
        assert_eq!(g.reachable_pairs(), pairs);
        let (p, defs) = infra_to_process(&infra).unwrap();
        let lts = build_lts(&p, &defs, &Bounds::default()).unwrap();
        let labels: BTreeSet<String> = lts.outgoing(lts.initial).iter().map(|t| t.essential().to_string()).collect();
        let want: BTreeSet<String> = pairs.iter().map(|(a, b)| format!("{a}\\{b}")).collect();
        assert_eq!(labels, want, "{infra}");
        assert!(lts.transitions.iter().all(|t| t.dst == lts.initial));
    }
}

#[test]
fn basic_equivalent_is_idempotent() {
    for infra in composites(50) {
        let once = basic_equivalent(&infra, "B").unwrap();
        assert_eq!(basic_equivalent(&once, "B").unwrap(), once);
        assert_eq!(infra_graph(&once).unwrap().arcs, connections(&infra));
    }
}

#[test]
fn corpus_composite_has_two_three_hop_routes() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/composite.infra")).unwrap();
    let file = parse_infra(&src).unwrap();
    let root = file.root().unwrap();
    let (p, defs) = infra_to_process(root).unwrap();
    let lts = build_lts(&p, &defs, &Bounds::default()).unwrap();
    let labels: BTreeSet<(String, usize)> =
        lts.transitions.iter().map(|t| (t.essential().to_string(), t.label.size())).collect();
    assert_eq!(labels, BTreeSet::from([("req1\\srv2".to_string(), 3), ("req2\\srv2".to_string(), 3)]));
    assert!(verify_paths(root, &Bounds::default()).unwrap().passed());
}

#[test]
fn dynamic_links_come_and_go() {
    let (p, defs) = build_dynamic_infra(1, 1);
    let bounds = Bounds::default();
    let essentials = |q: &cna_core::process::Process| -> Vec<(String, cna_core::process::Process)> {
        sorted_steps(q, &defs, &bounds).unwrap().into_iter().map(|(l, t, _)| (l.reduce().to_string(), t)).collect()
    };
    let start = essentials(&p);
    assert!(start.iter().all(|(l, _)| l != "a1\\b1"));
    let (_, added) = start.iter().find(|(l, _)| l == "add_1_1\\tau").unwrap();
    let present = essentials(added);
    let (_, forwarded) = present.iter().find(|(l, _)| l == "a1\\b1").unwrap();
    assert!(essentials(forwarded).iter().any(|(l, _)| l == "a1\\b1"));
    let (_, removed) = present.iter().find(|(l, _)| l == "rem_1_1\\tau").unwrap();
    assert!(essentials(removed).iter().all(|(l, _)| l != "a1\\b1"));

    let prog = parse_program("R(a, b) := a\\b . R(a, b)").unwrap();
    assert!(build_lts(&prog.resolve("R").unwrap(), &prog.defs, &bounds).unwrap().complete);
}
