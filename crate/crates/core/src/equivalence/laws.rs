use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_bisim, Mode, Verdict};
use crate::chain::{EssentialLabel, Link, Renaming, Site};
use crate::name::{ch, fresh_name, Chan};
use crate::process::{format_process, Definitions, Process};
use crate::semantics::Bounds;

const ALPHABET: [&str; 3] = ["a", "b", "c"];
const MAX_DEPTH: usize = 4;
const MAX_WIDTH: usize = 3;

#[derive(Clone, Copy, Debug)]
pub struct HarnessConfig {
    pub seed: u64,
    pub samples: usize,
    pub mode: Mode,
    pub bounds: Bounds,
}

impl Default for HarnessConfig {
    fn default() -> HarnessConfig {
        HarnessConfig {
            seed: 0,
            samples: 100,
            mode: Mode::Network,
            bounds: Bounds::default().with_max_states(2_000),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LawResult {
    pub name: &'static str,
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
    pub counterexample: Option<(String, String)>,
}

impl LawResult {
    fn new(name: &'static str) -> LawResult {
        LawResult { name, pass: 0, fail: 0, unknown: 0, counterexample: None }
    }

    fn record(&mut self, lhs: &Process, rhs: &Process, verdict: &Verdict) {
        match verdict {
            Verdict::Bisimilar => self.pass += 1,
            Verdict::Unknown(_) => self.unknown += 1,
            Verdict::Distinguished(_) => {
                self.fail += 1;
                self.counterexample
                    .get_or_insert_with(|| (format_process(lhs), format_process(rhs)));
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LawReport {
    pub seed: u64,
    pub samples: usize,
    pub mode: Mode,
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn failures(&self) -> usize {
        self.laws.iter().map(|l| l.fail).sum()
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.name == name)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} samples {} mode {}", self.seed, self.samples, self.mode.as_str())?;
        for law in &self.laws {
            writeln!(f, "{:<42} pass {:>4} fail {:>4} unknown {:>4}", law.name, law.pass, law.fail, law.unknown)?;
            if let Some((l, r)) = &law.counterexample {
                writeln!(f, "    counterexample: {l}  vs  {r}")?;
            }
        }
        Ok(())
    }
}

fn chan(rng: &mut impl Rng) -> Chan {
    ch(ALPHABET.choose(rng).expect("non-empty"))
}

fn site(rng: &mut impl Rng) -> Site {
    if rng.gen_ratio(1, 4) {
        Site::Tau
    } else {
        Site::Chan(chan(rng))
    }
}

fn label(rng: &mut impl Rng) -> EssentialLabel {
    let first = Link::new(site(rng), site(rng)).expect("solid");
    if rng.gen_ratio(1, 6) {
        let second = Link::new(site(rng), site(rng)).expect("solid");
        let links = vec![first.clone(), Link::virtual_link(), second];
        if let Ok(l) = EssentialLabel::new(links) {
            return l;
        }
    }
    EssentialLabel::single(first)
}

/// A random closed-against-`defs` process of depth at most `depth` using
/// channels `a`, `b`, `c`, with at most three parallel components.
pub fn generate_process(rng: &mut impl Rng, depth: usize, defs: &Definitions) -> Process {
    gen(rng, depth.min(MAX_DEPTH), true, defs)
}

fn gen(rng: &mut impl Rng, depth: usize, allow_par: bool, defs: &Definitions) -> Process {
    let calls: Vec<(&String, usize)> = defs.iter().map(|(n, d)| (n, d.params.len())).collect();
    if depth == 0 {
        return if rng.gen_ratio(1, 2) { Process::Nil } else { Process::prefix(label(rng), Process::Nil) };
    }
    let choice = rng.gen_range(0..12);
    match choice {
        0 => Process::Nil,
        1..=4 => Process::prefix(label(rng), gen(rng, depth - 1, allow_par, defs)),
        5 | 6 => Process::sum(gen(rng, depth - 1, allow_par, defs), gen(rng, depth - 1, allow_par, defs)),
        7 | 8 if allow_par => {
            let width = rng.gen_range(2..=MAX_WIDTH);
            Process::par_of((0..width).map(|_| gen(rng, depth - 1, false, defs)))
        }
        9 => Process::restrict(chan(rng), gen(rng, depth - 1, allow_par, defs)),
        10 => {
            let (x, y) = (chan(rng), chan(rng));
            let body = gen(rng, depth - 1, allow_par, defs);
            if x == y {
                body
            } else {
                Process::rename(body, Renaming::swap(x, y))
            }
        }
        11 if !calls.is_empty() => {
            let (name, arity) = calls[rng.gen_range(0..calls.len())];
            Process::call(name, (0..arity).map(|_| chan(rng)).collect())
        }
        _ => Process::prefix(label(rng), gen(rng, depth - 1, allow_par, defs)),
    }
}

const ALGEBRAIC: [&str; 8] = [
    "P | Q ~ Q | P",
    "(P | Q) | R ~ P | (Q | R)",
    "P | 0 ~ P",
    "P + Q ~ Q + P",
    "(P + Q) + R ~ P + (Q + R)",
    "P + 0 ~ P",
    "P + P ~ P",
    "new x in new y in P ~ new y in new x in P",
];

const CONTEXTS: [&str; 5] = [
    "congruence: prefix",
    "congruence: sum",
    "congruence: parallel",
    "congruence: restriction",
    "congruence: renaming",
];

const SUBSTITUTION: &str = "substitution: P{b/a} ~ Q{b/a}";

fn instance(law: usize, rng: &mut impl Rng, defs: &Definitions) -> (Process, Process) {
    let mut r2 = ChaCha8Rng::seed_from_u64(rng.gen());
    let p = generate_process(&mut r2, 3, defs);
    let q = generate_process(&mut r2, 2, defs);
    let r = generate_process(&mut r2, 2, defs);
    match law {
        0 => (Process::par(p.clone(), q.clone()), Process::par(q, p)),
        1 => (
            Process::par(Process::par(p.clone(), q.clone()), r.clone()),
            Process::par(p, Process::par(q, r)),
        ),
        2 => (Process::par(p.clone(), Process::Nil), p),
        3 => (Process::sum(p.clone(), q.clone()), Process::sum(q, p)),
        4 => (
            Process::sum(Process::sum(p.clone(), q.clone()), r.clone()),
            Process::sum(p, Process::sum(q, r)),
        ),
        5 => (Process::sum(p.clone(), Process::Nil), p),
        6 => (Process::sum(p.clone(), p.clone()), p),
        7 => {
            let (x, y) = (chan(&mut r2), chan(&mut r2));
            (
                Process::restrict(x.clone(), Process::restrict(y.clone(), p.clone())),
                Process::restrict(y, Process::restrict(x, p)),
            )
        }
        _ => unreachable!("law index"),
    }
}

/// `a\b . X` against the same hop split through a fresh hidden channel.
fn forwarder_pair(rng: &mut impl Rng, defs: &Definitions) -> (Process, Process) {
    let (a, b) = (chan(rng), chan(rng));
    let x = generate_process(rng, 2, defs);
    let mut taken = x.all_names();
    taken.insert(a.clone());
    taken.insert(b.clone());
    let c = fresh_name("h", |s| taken.iter().any(|t| t.as_str() == s));
    let hop = |s: &Chan, t: &Chan| EssentialLabel::single(Link::new(Site::Chan(s.clone()), Site::Chan(t.clone())).expect("solid"));
    let lhs = Process::prefix(hop(&a, &b), x.clone());
    let rhs = Process::restrict(
        c.clone(),
        Process::par(Process::prefix(hop(&a, &c), Process::Nil), Process::prefix(hop(&c, &b), x)),
    );
    (lhs, rhs)
}

fn decide(lhs: &Process, rhs: &Process, defs: &Definitions, cfg: &HarnessConfig) -> Verdict {
    match check_bisim(lhs, rhs, defs, cfg.mode, &cfg.bounds) {
        Ok(v) => v,
        Err(e) => Verdict::Unknown(e.to_string()),
    }
}

/// A pair drawn from the algebraic laws (and, in network mode, the
/// forwarder expansion) that the checker confirms to be bisimilar.
fn bisimilar_pair(rng: &mut impl Rng, defs: &Definitions, cfg: &HarnessConfig) -> Option<(Process, Process)> {
    for _ in 0..8 {
        let pick = rng.gen_range(0..=ALGEBRAIC.len());
        let (l, r) = if pick == ALGEBRAIC.len() && cfg.mode == Mode::Network {
            forwarder_pair(rng, defs)
        } else {
            instance(pick % ALGEBRAIC.len(), rng, defs)
        };
        if decide(&l, &r, defs, cfg).is_bisimilar() {
            return Some((l, r));
        }
    }
    None
}

fn wrap(context: usize, p: &Process, rng: &mut impl Rng, extra: &Process) -> Process {
    match context {
        0 => Process::prefix(label(rng), p.clone()),
        1 => Process::sum(p.clone(), extra.clone()),
        2 => Process::par(p.clone(), extra.clone()),
        3 => Process::restrict(chan(rng), p.clone()),
        4 => {
            let all: Vec<Chan> = ALPHABET.iter().map(|s| ch(s)).collect();
            let mut shuffled = all.clone();
            shuffled.shuffle(rng);
            let phi = Renaming::new(all.into_iter().zip(shuffled)).expect("shuffle is a permutation");
            Process::rename(p.clone(), phi)
        }
        _ => unreachable!("context index"),
    }
}

/// Checks algebraic laws, closure of bisimilarity under the five
/// contexts, and closure under substitution on seeded random samples.
pub fn law_harness(defs: &Definitions, cfg: &HarnessConfig) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut laws = Vec::new();

    for (i, name) in ALGEBRAIC.iter().enumerate() {
        let mut result = LawResult::new(name);
        for _ in 0..cfg.samples {
            let (l, r) = instance(i, &mut rng, defs);
            result.record(&l, &r, &decide(&l, &r, defs, cfg));
        }
        laws.push(result);
    }

    for (i, name) in CONTEXTS.iter().enumerate() {
        let mut result = LawResult::new(name);
        for _ in 0..cfg.samples {
            let Some((p, q)) = bisimilar_pair(&mut rng, defs, cfg) else {
                result.unknown += 1;
                continue;
            };
            let extra = generate_process(&mut rng, 2, defs);
            let mut ctx_rng = ChaCha8Rng::seed_from_u64(rng.gen());
            let lhs = wrap(i, &p, &mut ctx_rng.clone(), &extra);
            let rhs = wrap(i, &q, &mut ctx_rng, &extra);
            result.record(&lhs, &rhs, &decide(&lhs, &rhs, defs, cfg));
        }
        laws.push(result);
    }

    let mut result = LawResult::new(SUBSTITUTION);
    for _ in 0..cfg.samples {
        let Some((p, q)) = bisimilar_pair(&mut rng, defs, cfg) else {
            result.unknown += 1;
            continue;
        };
        let (b, a) = (chan(&mut rng), chan(&mut rng));
        let (lhs, rhs) = (p.subst(&b, &a), q.subst(&b, &a));
        result.record(&lhs, &rhs, &decide(&lhs, &rhs, defs, cfg));
    }
    laws.push(result);

    LawReport { seed: cfg.seed, samples: cfg.samples, mode: cfg.mode, laws }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Mutation;

    #[test]
    fn generator_is_seeded() {
        let defs = Definitions::new();
        let a = generate_process(&mut ChaCha8Rng::seed_from_u64(7), 4, &defs);
        let b = generate_process(&mut ChaCha8Rng::seed_from_u64(7), 4, &defs);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_names_stay_in_the_alphabet() {
        let defs = Definitions::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = generate_process(&mut rng, 4, &defs);
            assert!(p.all_names().iter().all(|c| ALPHABET.contains(&c.as_str())));
        }
    }

    #[test]
    fn small_run_passes_and_mutant_is_caught() {
        let defs = Definitions::new();
        let cfg = HarnessConfig { samples: 10, ..HarnessConfig::default() };
        let report = law_harness(&defs, &cfg);
        assert_eq!(report.failures(), 0, "{report}");
        let mutant = HarnessConfig {
            samples: 30,
            bounds: Bounds { mutation: Some(Mutation::DropInterleavings), ..cfg.bounds },
            ..cfg
        };
        let report = law_harness(&defs, &mutant);
        assert!(report.law("P | Q ~ Q | P").unwrap().fail > 0, "{report}");
    }
}
