//! Routing infrastructures: basic forwarders, their layered composition,
//! the induced graph, and the single-hop infrastructure offering one link
//! per boundary path.

mod dynamic;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::chain::{EssentialLabel, Link, Site};
use crate::equivalence::{check_bisim, Mode, Verdict};
use crate::name::{fresh_name, Chan};
use crate::process::{Definition, Definitions, Process};
use crate::semantics::{build_lts, Bounds, SemanticsError};

pub use dynamic::build_dynamic_infra;
pub use parse::{parse_infra, InfraFile};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum RoutingError {
    #[error("interface mismatch in `{name}`: {detail}")]
    InterfaceMismatch { name: String, detail: String },
    #[error("invalid infrastructure `{name}`: {detail}")]
    Invalid { name: String, detail: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Infra {
    /// Links are `(left index, right index)` pairs.
    Basic { name: String, left: Vec<Chan>, right: Vec<Chan>, links: BTreeSet<(usize, usize)> },
    /// `left`'s right interface and `right`'s left interface are both
    /// `shared`, which the composition hides.
    Compose { name: String, left: Box<Infra>, right: Box<Infra>, shared: Vec<Chan> },
}

impl Infra {
    pub fn basic(name: &str, left: Vec<Chan>, right: Vec<Chan>, links: impl IntoIterator<Item = (usize, usize)>) -> Infra {
        Infra::Basic { name: name.to_string(), left, right, links: links.into_iter().collect() }
    }

    pub fn compose(name: &str, left: Infra, right: Infra, shared: Vec<Chan>) -> Infra {
        Infra::Compose { name: name.to_string(), left: Box::new(left), right: Box::new(right), shared }
    }

    pub fn name(&self) -> &str {
        match self {
            Infra::Basic { name, .. } | Infra::Compose { name, .. } => name,
        }
    }

    pub fn left(&self) -> &[Chan] {
        match self {
            Infra::Basic { left, .. } => left,
            Infra::Compose { left, .. } => left.left(),
        }
    }

    pub fn right(&self) -> &[Chan] {
        match self {
            Infra::Basic { right, .. } => right,
            Infra::Compose { right, .. } => right.right(),
        }
    }

    /// Left interface followed by right interface: the parameters of the
    /// generated definition.
    pub fn interface(&self) -> Vec<Chan> {
        self.left().iter().chain(self.right()).cloned().collect()
    }

    pub fn validate(&self) -> Result<(), RoutingError> {
        let invalid = |detail: String| RoutingError::Invalid { name: self.name().to_string(), detail };
        let iface = self.interface();
        if iface.iter().collect::<BTreeSet<_>>().len() != iface.len() {
            return Err(invalid("interface channels must be distinct".into()));
        }
        match self {
            Infra::Basic { left, right, links, .. } => {
                if let Some((i, j)) = links.iter().find(|(i, j)| *i >= left.len() || *j >= right.len()) {
                    return Err(invalid(format!("link ({i}, {j}) is outside the interface")));
                }
                Ok(())
            }
            Infra::Compose { name, left, right, shared } => {
                left.validate()?;
                right.validate()?;
                if left.right() != shared.as_slice() || right.left() != shared.as_slice() {
                    return Err(RoutingError::InterfaceMismatch {
                        name: name.clone(),
                        detail: format!(
                            "`{}` offers ({}) and `{}` expects ({}) but the composition shares ({})",
                            left.name(),
                            join(left.right()),
                            right.name(),
                            join(right.left()),
                            join(shared)
                        ),
                    });
                }
                if let Some(c) = shared.iter().find(|c| iface.contains(c)) {
                    return Err(invalid(format!("shared channel `{c}` is also on the outer interface")));
                }
                Ok(())
            }
        }
    }

    fn collect_definitions(&self, defs: &mut BTreeMap<String, Definition>) -> Result<(), RoutingError> {
        let params = self.interface();
        let call = Process::Call(self.name().to_string(), params.clone());
        let body = match self {
            Infra::Basic { left, right, links, .. } => Process::sum_of(
                links.iter().map(|&(i, j)| Process::prefix(hop(&left[i], &right[j]), call.clone())),
            ),
            Infra::Compose { left, right, shared, .. } => {
                left.collect_definitions(defs)?;
                right.collect_definitions(defs)?;
                let inner = Process::par(
                    Process::Call(left.name().to_string(), left.interface()),
                    Process::Call(right.name().to_string(), right.interface()),
                );
                shared.iter().rev().fold(inner, |acc, c| Process::restrict(c.clone(), acc))
            }
        };
        let def = Definition { params, body, implicit: false };
        match defs.get(self.name()) {
            Some(existing) if *existing != def => Err(RoutingError::Invalid {
                name: self.name().to_string(),
                detail: "the name is used for two different infrastructures".into(),
            }),
            _ => {
                defs.insert(self.name().to_string(), def);
                Ok(())
            }
        }
    }
}

fn join(cs: &[Chan]) -> String {
    cs.iter().map(Chan::as_str).collect::<Vec<_>>().join(", ")
}

fn hop(a: &Chan, b: &Chan) -> EssentialLabel {
    EssentialLabel::single(Link::new(Site::Chan(a.clone()), Site::Chan(b.clone())).expect("channels are solid"))
}

/// The definitions of every component and the call to the root.
fn chan_list(cs: &[Chan]) -> String {
    let names: Vec<&str> = cs.iter().map(Chan::as_str).collect();
    format!("({})", names.join(", "))
}

/// `.infra` source declaring every component, operands first.
impl fmt::Display for Infra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infra::Basic { name, left, right, links } => {
                let links: Vec<String> = links.iter().map(|&(i, j)| format!("{}->{}", left[i], right[j])).collect();
                writeln!(f, "basic {name} left{} right{} {{ {} }}", chan_list(left), chan_list(right), links.join(", "))
            }
            Infra::Compose { name, left, right, shared } => {
                write!(f, "{left}{right}")?;
                writeln!(f, "compose {name} = {} * {} over {}", left.name(), right.name(), chan_list(shared))
            }
        }
    }
}

pub fn infra_to_process(infra: &Infra) -> Result<(Process, Definitions), RoutingError> {
    infra.validate()?;
    let mut map = BTreeMap::new();
    infra.collect_definitions(&mut map)?;
    let mut defs = Definitions::new();
    for (name, def) in map {
        defs.insert(name, def);
    }
    Ok((Process::Call(infra.name().to_string(), infra.interface()), defs))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InfraGraph {
    pub nodes: BTreeSet<Chan>,
    pub arcs: BTreeSet<(Chan, Chan)>,
    pub left: Vec<Chan>,
    pub right: Vec<Chan>,
}

impl InfraGraph {
    /// Every path of at least one arc from a left to a right boundary node.
    pub fn boundary_paths(&self) -> Vec<Vec<Chan>> {
        let mut out = Vec::new();
        for start in &self.left {
            let mut path = vec![start.clone()];
            self.extend_paths(&mut path, &mut out);
        }
        out
    }

    fn extend_paths(&self, path: &mut Vec<Chan>, out: &mut Vec<Vec<Chan>>) {
        let last = path.last().expect("non-empty").clone();
        if path.len() > 1 && self.right.contains(&last) {
            out.push(path.clone());
        }
        for (_, next) in self.arcs.iter().filter(|(s, _)| *s == last) {
            if !path.contains(next) {
                path.push(next.clone());
                self.extend_paths(path, out);
                path.pop();
            }
        }
    }

    /// Boundary pairs `(a, b)` joined by some path.
    pub fn reachable_pairs(&self) -> BTreeSet<(Chan, Chan)> {
        self.boundary_paths()
            .into_iter()
            .map(|p| (p[0].clone(), p[p.len() - 1].clone()))
            .collect()
    }
}

/// The graph whose arcs are the links of all basic components; hidden
/// channels of different compositions are renamed apart as `name_k`.
pub fn infra_graph(infra: &Infra) -> Result<InfraGraph, RoutingError> {
    infra.validate()?;
    Ok(graph(infra))
}

fn graph(infra: &Infra) -> InfraGraph {
    match infra {
        Infra::Basic { left, right, links, .. } => InfraGraph {
            nodes: left.iter().chain(right).cloned().collect(),
            arcs: links.iter().map(|&(i, j)| (left[i].clone(), right[j].clone())).collect(),
            left: left.clone(),
            right: right.clone(),
        },
        Infra::Compose { left, right, .. } => {
            let mut gl = graph(left);
            let mut gr = graph(right);
            let internal = |g: &InfraGraph| -> BTreeSet<Chan> {
                g.nodes.iter().filter(|c| !g.left.contains(c) && !g.right.contains(c)).cloned().collect()
            };
            let mut taken: BTreeSet<Chan> = gl.nodes.union(&gr.nodes).cloned().collect();
            let outer_right: BTreeSet<Chan> = gr.right.iter().cloned().collect();
            let left_clash: Vec<Chan> = internal(&gl).intersection(&outer_right).cloned().collect();
            rename_apart(&mut gl, left_clash, &mut taken);
            let used: BTreeSet<Chan> = gl.nodes.iter().filter(|c| !gr.left.contains(c)).cloned().collect();
            let right_clash: Vec<Chan> = internal(&gr).intersection(&used).cloned().collect();
            rename_apart(&mut gr, right_clash, &mut taken);
            InfraGraph {
                nodes: gl.nodes.union(&gr.nodes).cloned().collect(),
                arcs: gl.arcs.union(&gr.arcs).cloned().collect(),
                left: gl.left,
                right: gr.right,
            }
        }
    }
}

fn rename_apart(g: &mut InfraGraph, names: Vec<Chan>, taken: &mut BTreeSet<Chan>) {
    if names.is_empty() {
        return;
    }
    let mut renaming = BTreeMap::new();
    for c in names {
        let fresh = fresh_name(&format!("{c}_"), |s| taken.iter().any(|t| t.as_str() == s));
        taken.insert(fresh.clone());
        renaming.insert(c, fresh);
    }
    let map = |c: &Chan| renaming.get(c).cloned().unwrap_or_else(|| c.clone());
    g.nodes = g.nodes.iter().map(map).collect();
    g.arcs = g.arcs.iter().map(|(s, t)| (map(s), map(t))).collect();
}

/// The basic infrastructure with one link for each boundary pair joined
/// by a path.
pub fn basic_equivalent(infra: &Infra, name: &str) -> Result<Infra, RoutingError> {
    let g = infra_graph(infra)?;
    let pos = |side: &[Chan], c: &Chan| side.iter().position(|x| x == c).expect("boundary node");
    let links = g.reachable_pairs().iter().map(|(a, b)| (pos(&g.left, a), pos(&g.right, b))).collect::<Vec<_>>();
    Ok(Infra::basic(name, g.left.clone(), g.right.clone(), links))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckStatus {
    Pass,
    Fail,
    Unknown,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Unknown => "unknown",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Offending transitions or paths, or the reason for `Unknown`.
    pub details: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathReport {
    pub checks: Vec<PathCheck>,
}

impl PathReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }
}

impl fmt::Display for PathReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{:<30} {}", check.name, check.status.as_str())?;
            for d in &check.details {
                writeln!(f, "    {d}")?;
            }
        }
        Ok(())
    }
}

const CHECK_TRANSITIONS: &str = "transitions follow paths";
const CHECK_PATHS: &str = "paths have transitions";
const CHECK_BISIM: &str = "bisimilar to basic equivalent";

/// Checks the path/transition correspondence in both directions and the
/// network bisimilarity with [`basic_equivalent`].
pub fn verify_paths(infra: &Infra, bounds: &Bounds) -> Result<PathReport, RoutingError> {
    let graph = infra_graph(infra)?;
    let (p, defs) = infra_to_process(infra)?;
    let lts = build_lts(&p, &defs, bounds).map_err(semantics)?;

    let mut lengths: BTreeMap<(Chan, Chan), BTreeSet<usize>> = BTreeMap::new();
    for path in graph.boundary_paths() {
        lengths.entry((path[0].clone(), path[path.len() - 1].clone())).or_default().insert(path.len() - 1);
    }

    let mut bad = Vec::new();
    let mut seen: BTreeSet<(Chan, Chan, usize)> = BTreeSet::new();
    for t in &lts.transitions {
        let essential = t.essential();
        let ok = match essential.links() {
            [link] => match (link.source().as_chan(), link.target().as_chan()) {
                (Some(a), Some(b)) => {
                    let n = t.label.size();
                    let matched = lengths.get(&(a.clone(), b.clone())).is_some_and(|ls| ls.contains(&n));
                    if matched {
                        seen.insert((a.clone(), b.clone(), n));
                    }
                    matched && t.dst == lts.initial
                }
                _ => false,
            },
            _ => false,
        };
        if !ok {
            bad.push(format!("{} (size {})", t.label.blocks_string(), t.label.size()));
        }
    }
    let truncated = |status: CheckStatus| {
        if status == CheckStatus::Pass && !lts.complete {
            CheckStatus::Unknown
        } else {
            status
        }
    };
    let first = PathCheck {
        name: CHECK_TRANSITIONS,
        status: if bad.is_empty() { truncated(CheckStatus::Pass) } else { CheckStatus::Fail },
        details: bad,
    };

    let missing: Vec<String> = lengths
        .iter()
        .flat_map(|((a, b), ls)| ls.iter().map(move |n| (a, b, *n)))
        .filter(|(a, b, n)| !seen.contains(&((*a).clone(), (*b).clone(), *n)))
        .map(|(a, b, n)| format!("{a} ->* {b} of length {n}"))
        .collect();
    let second = PathCheck {
        name: CHECK_PATHS,
        status: if missing.is_empty() { CheckStatus::Pass } else { truncated(CheckStatus::Fail) },
        details: missing,
    };

    let basic = basic_equivalent(infra, &format!("{}_paths", infra.name()))?;
    let (q, qdefs) = infra_to_process(&basic)?;
    let mut all = defs.clone();
    all.extend(qdefs);
    let verdict = check_bisim(&p, &q, &all, Mode::Network, bounds).map_err(semantics)?;
    let third = match verdict {
        Verdict::Bisimilar => PathCheck { name: CHECK_BISIM, status: CheckStatus::Pass, details: vec![] },
        Verdict::Distinguished(w) => PathCheck {
            name: CHECK_BISIM,
            status: CheckStatus::Fail,
            details: w.steps.iter().map(|s| format!("{} plays {}", s.side.as_str(), s.key)).collect(),
        },
        Verdict::Unknown(reason) => PathCheck { name: CHECK_BISIM, status: CheckStatus::Unknown, details: vec![reason] },
    };

    Ok(PathReport { checks: vec![first, second, third] })
}

fn semantics(e: SemanticsError) -> RoutingError {
    RoutingError::Invalid { name: String::new(), detail: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::ch;

    fn chans(names: &[&str]) -> Vec<Chan> {
        names.iter().map(|n| ch(n)).collect()
    }

    pub(crate) fn composite() -> Infra {
        let r1 = Infra::basic("R1", chans(&["req1", "req2"]), chans(&["s1", "s2"]), [(0, 0), (0, 1), (1, 1)]);
        let r2 = Infra::basic("R2", chans(&["s1", "s2"]), chans(&["t1", "t2"]), [(0, 0), (1, 1)]);
        let r3 = Infra::basic("R3", chans(&["t1", "t2"]), chans(&["srv1", "srv2"]), [(1, 1)]);
        let q = Infra::compose("Q", r1, r2, chans(&["s1", "s2"]));
        Infra::compose("R", q, r3, chans(&["t1", "t2"]))
    }

    #[test]
    fn basic_becomes_recursive_sum() {
        let r1 = Infra::basic("R1", chans(&["req1", "req2"]), chans(&["s1", "s2"]), [(0, 0), (0, 1), (1, 1)]);
        let (p, defs) = infra_to_process(&r1).unwrap();
        assert_eq!(p.to_string(), "R1(req1, req2, s1, s2)");
        assert_eq!(
            defs.get("R1").unwrap().body.to_string(),
            "req1\\s1 . R1(req1, req2, s1, s2) + req1\\s2 . R1(req1, req2, s1, s2) + req2\\s2 . R1(req1, req2, s1, s2)"
        );
        let empty = Infra::basic("E", chans(&["a"]), chans(&["b"]), []);
        let (_, defs) = infra_to_process(&empty).unwrap();
        assert_eq!(defs.get("E").unwrap().body, Process::Nil);
    }

    #[test]
    fn composition_restricts_shared_channels() {
        let (_, defs) = infra_to_process(&composite()).unwrap();
        assert_eq!(
            defs.get("R").unwrap().body.to_string(),
            "new t1, t2 in (Q(req1, req2, t1, t2) | R3(t1, t2, srv1, srv2))"
        );
        assert_eq!(
            defs.get("Q").unwrap().body.to_string(),
            "new s1, s2 in (R1(req1, req2, s1, s2) | R2(s1, s2, t1, t2))"
        );
    }

    #[test]
    fn mismatched_interfaces_are_rejected() {
        let a = Infra::basic("A", chans(&["x"]), chans(&["y"]), [(0, 0)]);
        let b = Infra::basic("B", chans(&["z"]), chans(&["w"]), [(0, 0)]);
        let bad = Infra::compose("C", a, b, chans(&["y"]));
        assert!(matches!(infra_to_process(&bad), Err(RoutingError::InterfaceMismatch { .. })));
    }

    #[test]
    fn composite_graph_and_paths() {
        let g = infra_graph(&composite()).unwrap();
        let arcs: BTreeSet<(String, String)> =
            g.arcs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let want: BTreeSet<(String, String)> = [
            ("req1", "s1"),
            ("req1", "s2"),
            ("req2", "s2"),
            ("s1", "t1"),
            ("s2", "t2"),
            ("t2", "srv2"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        assert_eq!(arcs, want);
        let pairs = g.reachable_pairs();
        assert_eq!(pairs, [(ch("req1"), ch("srv2")), (ch("req2"), ch("srv2"))].into());
    }

    #[test]
    fn internal_names_are_renamed_apart() {
        let hop = |n: &str, a: &str, b: &str| Infra::basic(n, chans(&[a]), chans(&[b]), [(0, 0)]);
        let ab = Infra::compose("AB", hop("A", "x", "m"), hop("B", "m", "y"), chans(&["m"]));
        let ef = Infra::compose("EF", hop("E", "y", "m"), hop("F", "m", "z"), chans(&["m"]));
        let g = infra_graph(&Infra::compose("X", ab, ef, chans(&["y"]))).unwrap();
        assert_eq!(g.nodes.len(), 5);
        assert!(g.nodes.contains(&ch("m_0")));
        let paths = g.boundary_paths();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len(), 5);
    }

    #[test]
    fn basic_equivalent_of_the_composite() {
        let s = basic_equivalent(&composite(), "S").unwrap();
        let (_, defs) = infra_to_process(&s).unwrap();
        assert_eq!(
            defs.get("S").unwrap().body.to_string(),
            "req1\\srv2 . S(req1, req2, srv1, srv2) + req2\\srv2 . S(req1, req2, srv1, srv2)"
        );
    }

    #[test]
    fn composite_paths_verify() {
        let report = verify_paths(&composite(), &Bounds::default()).unwrap();
        assert!(report.passed(), "{report}");
    }
}
