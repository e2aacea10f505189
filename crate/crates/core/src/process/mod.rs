//! CNA process terms.
//!
//! Prefixes carry essential labels; a single solid link is the one-link
//! case. Subterms are shared behind [`Arc`] so that stepping can clone
//! large parallel compositions cheaply.

mod format;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::chain::{EssentialLabel, Renaming};
use crate::name::{fresh_name, Chan};

pub use format::format_process;
pub use parse::{parse_process, parse_program, ParseError, ParseErrorKind};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Process {
    Nil,
    Prefix(EssentialLabel, Arc<Process>),
    Sum(Arc<Process>, Arc<Process>),
    Par(Arc<Process>, Arc<Process>),
    Restrict(Chan, Arc<Process>),
    Rename(Arc<Process>, Renaming),
    Call(String, Vec<Chan>),
}

impl Process {
    pub fn prefix(label: EssentialLabel, cont: Process) -> Process {
        Process::Prefix(label, Arc::new(cont))
    }

    pub fn sum(l: Process, r: Process) -> Process {
        Process::Sum(Arc::new(l), Arc::new(r))
    }

    pub fn par(l: Process, r: Process) -> Process {
        Process::Par(Arc::new(l), Arc::new(r))
    }

    pub fn restrict(a: Chan, body: Process) -> Process {
        Process::Restrict(a, Arc::new(body))
    }

    pub fn rename(body: Process, phi: Renaming) -> Process {
        Process::Rename(Arc::new(body), phi)
    }

    pub fn call(name: &str, args: Vec<Chan>) -> Process {
        Process::Call(name.to_string(), args)
    }

    /// Left-nested sum of `terms`; `0` when empty.
    pub fn sum_of(terms: impl IntoIterator<Item = Process>) -> Process {
        fold_left(terms, Process::sum)
    }

    /// Left-nested parallel composition of `terms`; `0` when empty.
    pub fn par_of(terms: impl IntoIterator<Item = Process>) -> Process {
        fold_left(terms, Process::par)
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Nil)
    }

    /// Number of syntax nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Process::Nil | Process::Call(..) => 1,
            Process::Prefix(_, p) | Process::Restrict(_, p) | Process::Rename(p, _) => 1 + p.node_count(),
            Process::Sum(l, r) | Process::Par(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn free_names(&self) -> BTreeSet<Chan> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Chan>) {
        match self {
            Process::Nil => {}
            Process::Prefix(label, cont) => {
                out.extend(label.channels().cloned());
                cont.collect_free(out);
            }
            Process::Sum(l, r) | Process::Par(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Process::Restrict(a, body) => {
                let mut inner = body.free_names();
                inner.remove(a);
                out.extend(inner);
            }
            Process::Rename(body, phi) => {
                out.extend(body.free_names().iter().map(|c| phi.apply(c)));
            }
            Process::Call(_, args) => out.extend(args.iter().cloned()),
        }
    }

    /// Every channel spelled anywhere in the term: free, bound, in renaming
    /// tables and call arguments.
    pub fn all_names(&self) -> BTreeSet<Chan> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<Chan>) {
        match self {
            Process::Nil => {}
            Process::Prefix(label, cont) => {
                out.extend(label.channels().cloned());
                cont.collect_all(out);
            }
            Process::Sum(l, r) | Process::Par(l, r) => {
                l.collect_all(out);
                r.collect_all(out);
            }
            Process::Restrict(a, body) => {
                out.insert(a.clone());
                body.collect_all(out);
            }
            Process::Rename(body, phi) => {
                for (k, v) in phi.pairs() {
                    out.insert(k.clone());
                    out.insert(v.clone());
                }
                body.collect_all(out);
            }
            Process::Call(_, args) => out.extend(args.iter().cloned()),
        }
    }

    /// Applies the transposition `(x y)` to every name occurrence, binders
    /// included. This is always an α-safe renaming.
    pub fn swap_names(&self, x: &Chan, y: &Chan) -> Process {
        let t = |c: &Chan| {
            if c == x {
                y.clone()
            } else if c == y {
                x.clone()
            } else {
                c.clone()
            }
        };
        match self {
            Process::Nil => Process::Nil,
            Process::Prefix(label, cont) => Process::prefix(label.map_chan(t), cont.swap_names(x, y)),
            Process::Sum(l, r) => Process::sum(l.swap_names(x, y), r.swap_names(x, y)),
            Process::Par(l, r) => Process::par(l.swap_names(x, y), r.swap_names(x, y)),
            Process::Restrict(a, body) => Process::restrict(t(a), body.swap_names(x, y)),
            Process::Rename(body, phi) => Process::rename(body.swap_names(x, y), phi.swap_names(x, y)),
            Process::Call(name, args) => Process::Call(name.clone(), args.iter().map(t).collect()),
        }
    }

    /// Capture-avoiding substitution `self{b/a}`.
    pub fn subst(&self, b: &Chan, a: &Chan) -> Process {
        let mut sigma = BTreeMap::new();
        sigma.insert(a.clone(), b.clone());
        self.subst_many(&sigma)
    }

    /// Simultaneous capture-avoiding substitution of every key of `sigma`
    /// by its value.
    pub fn subst_many(&self, sigma: &BTreeMap<Chan, Chan>) -> Process {
        if sigma.is_empty() {
            return self.clone();
        }
        let map = |c: &Chan| sigma.get(c).cloned().unwrap_or_else(|| c.clone());
        match self {
            Process::Nil => Process::Nil,
            Process::Prefix(label, cont) => Process::prefix(label.map_chan(map), cont.subst_many(sigma)),
            Process::Sum(l, r) => Process::sum(l.subst_many(sigma), r.subst_many(sigma)),
            Process::Par(l, r) => Process::par(l.subst_many(sigma), r.subst_many(sigma)),
            Process::Restrict(c, body) => {
                let mut inner = sigma.clone();
                inner.remove(c);
                let free = body.free_names();
                inner.retain(|k, _| free.contains(k));
                let captures = inner.values().any(|v| v == c);
                if captures {
                    let mut taken = body.all_names();
                    taken.extend(sigma.keys().cloned());
                    taken.extend(sigma.values().cloned());
                    let d = fresh_name(c.as_str(), |s| taken.iter().any(|t| t.as_str() == s));
                    let renamed = body.swap_names(c, &d);
                    Process::restrict(d, renamed.subst_many(&inner))
                } else {
                    Process::restrict(c.clone(), body.subst_many(&inner))
                }
            }
            Process::Rename(body, phi) => {
                let inv = phi.inverse();
                let conjugated: BTreeMap<Chan, Chan> =
                    sigma.iter().map(|(k, v)| (inv.apply(k), inv.apply(v))).collect();
                Process::rename(body.subst_many(&conjugated), phi.clone())
            }
            Process::Call(name, args) => Process::Call(name.clone(), args.iter().map(map).collect()),
        }
    }

    /// Removes inert structure outside prefixes: `P|0`, `0|P`, `(νa)0`,
    /// `(νa)P` with `a` not free in `P`, and `0[φ]`.
    pub fn struct_normalize(&self) -> Process {
        match self {
            Process::Nil | Process::Prefix(..) | Process::Call(..) => self.clone(),
            Process::Sum(l, r) => {
                let (l2, r2) = (l.struct_normalize(), r.struct_normalize());
                if l2 == **l && r2 == **r {
                    self.clone()
                } else {
                    Process::sum(l2, r2)
                }
            }
            Process::Par(l, r) => {
                let (l2, r2) = (l.struct_normalize(), r.struct_normalize());
                match (l2.is_nil(), r2.is_nil()) {
                    (true, _) => r2,
                    (_, true) => l2,
                    _ if l2 == **l && r2 == **r => self.clone(),
                    _ => Process::par(l2, r2),
                }
            }
            Process::Restrict(a, body) => {
                let b2 = body.struct_normalize();
                if b2.is_nil() || !b2.free_names().contains(a) {
                    b2
                } else if b2 == **body {
                    self.clone()
                } else {
                    Process::restrict(a.clone(), b2)
                }
            }
            Process::Rename(body, phi) => {
                let b2 = body.struct_normalize();
                if b2.is_nil() {
                    Process::Nil
                } else {
                    Process::rename(b2, phi.clone())
                }
            }
        }
    }

    /// α-canonical form: binders renamed `n0, n1, ...` left to right,
    /// skipping names that occur free.
    pub fn canonicalize(&self) -> Process {
        let mut skip = self.free_names();
        free_table_names(self, &mut Vec::new(), &mut skip);
        let mut counter = 0usize;
        canon(self, &BTreeMap::new(), &skip, &mut counter)
    }

    pub fn alpha_eq(&self, other: &Process) -> bool {
        self.canonicalize() == other.canonicalize()
    }
}

fn fold_left(terms: impl IntoIterator<Item = Process>, join: fn(Process, Process) -> Process) -> Process {
    let mut it = terms.into_iter();
    match it.next() {
        None => Process::Nil,
        Some(first) => it.fold(first, join),
    }
}

fn free_table_names(p: &Process, bound: &mut Vec<Chan>, out: &mut BTreeSet<Chan>) {
    match p {
        Process::Nil | Process::Call(..) => {}
        Process::Prefix(_, c) => free_table_names(c, bound, out),
        Process::Sum(l, r) | Process::Par(l, r) => {
            free_table_names(l, bound, out);
            free_table_names(r, bound, out);
        }
        Process::Restrict(a, body) => {
            bound.push(a.clone());
            free_table_names(body, bound, out);
            bound.pop();
        }
        Process::Rename(body, phi) => {
            for (k, v) in phi.pairs() {
                for c in [k, v] {
                    if !bound.contains(c) {
                        out.insert(c.clone());
                    }
                }
            }
            free_table_names(body, bound, out);
        }
    }
}

fn canon(p: &Process, env: &BTreeMap<Chan, Chan>, skip: &BTreeSet<Chan>, counter: &mut usize) -> Process {
    let map = |c: &Chan| env.get(c).cloned().unwrap_or_else(|| c.clone());
    match p {
        Process::Nil => Process::Nil,
        Process::Prefix(label, cont) => Process::prefix(label.map_chan(map), canon(cont, env, skip, counter)),
        Process::Sum(l, r) => {
            let l2 = canon(l, env, skip, counter);
            Process::sum(l2, canon(r, env, skip, counter))
        }
        Process::Par(l, r) => {
            let l2 = canon(l, env, skip, counter);
            Process::par(l2, canon(r, env, skip, counter))
        }
        Process::Restrict(a, body) => {
            let name = loop {
                let candidate = Chan::from_static(&format!("n{counter}"));
                *counter += 1;
                if !skip.contains(&candidate) {
                    break candidate;
                }
            };
            let mut inner = env.clone();
            inner.insert(a.clone(), name.clone());
            Process::restrict(name, canon(body, &inner, skip, counter))
        }
        Process::Rename(body, phi) => {
            let table = Renaming::new(phi.pairs().map(|(k, v)| (map(k), map(v)))).expect("conjugated permutation");
            Process::rename(canon(body, env, skip, counter), table)
        }
        Process::Call(name, args) => Process::Call(name.clone(), args.iter().map(map).collect()),
    }
}

impl fmt::Display for Process {
    /// Prints the term as is; see [`format_process`] for the α-canonical form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::print(self))
    }
}

/// A (possibly recursive) parametric definition `A(x̃) := P`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Definition {
    pub params: Vec<Chan>,
    pub body: Process,
    /// Parameters were inferred from the body's free names rather than
    /// written out.
    pub implicit: bool,
}

impl Definition {
    /// The body with formals replaced by `args`.
    pub fn instantiate(&self, args: &[Chan]) -> Process {
        let sigma: BTreeMap<Chan, Chan> = self
            .params
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .filter(|(k, v)| k != v)
            .collect();
        self.body.subst_many(&sigma)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Definitions {
    defs: BTreeMap<String, Definition>,
}

impl Definitions {
    pub fn new() -> Definitions {
        Definitions::default()
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, def: Definition) -> Option<Definition> {
        self.defs.insert(name.into(), def)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Definition)> {
        self.defs.iter()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// `name(params)` for a definition, the natural entry point it names.
    pub fn entry(&self, name: &str) -> Option<Process> {
        self.defs.get(name).map(|d| Process::Call(name.to_string(), d.params.clone()))
    }

    /// Merges `other` into `self`; entries of `other` win on clashes.
    pub fn extend(&mut self, other: Definitions) {
        self.defs.extend(other.defs);
    }
}

impl fmt::Display for Definitions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, def) in &self.defs {
            if def.implicit || def.params.is_empty() {
                writeln!(f, "{name} := {}", format_process(&def.body))?;
            } else {
                let params: Vec<&str> = def.params.iter().map(Chan::as_str).collect();
                writeln!(f, "{name}({}) := {}", params.join(", "), format_process(&def.body))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Program {
    pub defs: Definitions,
    pub main: Option<Process>,
}

impl Program {
    /// Resolves an entry point: a bare definition name means that
    /// definition applied to its own formals, anything else is parsed as a
    /// process expression over the program's definitions.
    pub fn resolve(&self, entry: &str) -> Result<Process, ParseError> {
        if entry.trim() == "main" {
            if let Some(main) = &self.main {
                return Ok(main.clone());
            }
        }
        if let Some(p) = self.defs.entry(entry.trim()) {
            return Ok(p);
        }
        parse_process(entry, &self.defs)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.defs)?;
        if let Some(main) = &self.main {
            writeln!(f, "main := {}", format_process(main))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::ch;

    fn p(src: &str) -> Process {
        parse_process(src, &Definitions::new()).unwrap()
    }

    #[test]
    fn free_names_examples() {
        assert_eq!(p("new a in a\\b . 0").free_names(), [ch("b")].into());
        assert_eq!(p("(a\\b . 0)[a<->c]").free_names(), [ch("b"), ch("c")].into());
        assert!(Process::Nil.free_names().is_empty());
    }

    #[test]
    fn free_names_under_renaming_match_unfolded_substitution() {
        // On a closed sample, pushing the swap into the prefix yields the
        // same free names as applying the renaming to them.
        let renamed = p("(a\\b . 0)[a<->c]");
        let pushed = p("c\\b . 0");
        assert_eq!(renamed.free_names(), pushed.free_names());
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(p("tau\\a . 0").subst(&ch("b"), &ch("a")), p("tau\\b . 0"));
        let got = p("new c in a\\c . 0").subst(&ch("c"), &ch("a"));
        assert!(got.alpha_eq(&p("new c0 in c\\c0 . 0")), "{got}");
        assert!(!got.alpha_eq(&p("new c in c\\c . 0")));
        assert_eq!(
            Process::call("A", vec![ch("a"), ch("x")]).subst(&ch("b"), &ch("a")),
            Process::call("A", vec![ch("b"), ch("x")])
        );
    }

    #[test]
    fn substitution_through_renaming_uses_inverse_image() {
        // (c\b.0)[a<->c] has free names {a, b}; substituting x for a must
        // touch the c inside.
        let term = p("(c\\b . 0)[a<->c]");
        let got = term.subst(&ch("x"), &ch("a"));
        assert_eq!(got.free_names(), [ch("b"), ch("x")].into());
    }

    #[test]
    fn subst_free_names_bound() {
        let term = p("new c in (a\\c . 0 | c\\b . 0) + b\\a . 0");
        let got = term.subst(&ch("b"), &ch("a"));
        let mut allowed = term.free_names();
        allowed.remove(&ch("a"));
        allowed.insert(ch("b"));
        assert!(got.free_names().is_subset(&allowed));
    }

    #[test]
    fn struct_normalize_examples() {
        let q = p("a\\b . 0");
        let wrapped = Process::restrict(ch("c"), Process::par(Process::Nil, q.clone()));
        assert_eq!(wrapped.struct_normalize(), q);
        assert_eq!(p("0 | 0").struct_normalize(), Process::Nil);
        let under_prefix = p("a\\b . (0 | 0)");
        assert_eq!(under_prefix.struct_normalize(), under_prefix);
        assert_eq!(p("(0)[a<->b]").struct_normalize(), Process::Nil);
        assert_eq!(p("new a in 0").struct_normalize(), Process::Nil);
        let kept = p("new a in a\\b . 0");
        assert_eq!(kept.struct_normalize(), kept);
    }

    #[test]
    fn struct_normalize_strictly_shrinks_or_fixes() {
        let term = p("new c in (0 | (0 | new d in (a\\b . 0 | 0)))");
        let once = term.struct_normalize();
        assert!(once.node_count() < term.node_count());
        assert_eq!(once.struct_normalize(), once);
    }

    #[test]
    fn canonical_names_avoid_free_names() {
        let term = p("new x in x\\n0 . 0");
        assert_eq!(format_process(&term), "new n1 in n1\\n0 . 0");
        assert_eq!(format_process(&p("new x in x\\a . 0")), "new n0 in n0\\a . 0");
        assert_eq!(format_process(&p("new y in y\\a . 0")), "new n0 in n0\\a . 0");
    }

    #[test]
    fn canonicalize_conjugates_renaming_tables() {
        let a = p("new x in (x\\b . 0)[x<->b]");
        let b = p("new y in (y\\b . 0)[y<->b]");
        assert_eq!(format_process(&a), format_process(&b));
    }
}
