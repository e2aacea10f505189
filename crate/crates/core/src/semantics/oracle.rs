use std::collections::BTreeSet;

use super::step::{fold_target, settle, unfold};
use super::{Bounds, SemanticsError};
use crate::chain::{EssentialLabel, Link, LinkChain};
use crate::process::{format_process, Definitions, Process};

/// Every concrete transition whose label has at most `max_len` links.
/// (Act) pads the prefix with virtual links in every valid way; the other
/// rules act on concrete chains. Independent of label normal forms.
pub fn concrete_step_oracle(
    p: &Process,
    defs: &Definitions,
    max_len: usize,
    bounds: &Bounds,
) -> Result<BTreeSet<(LinkChain, Process)>, SemanticsError> {
    assert!(max_len >= 1, "oracle length must be positive");
    let raw = go(p, defs, max_len, bounds, bounds.max_unfold)?;
    Ok(raw.into_iter().map(|(s, t)| (s, settle(&t, bounds))).collect())
}

/// All chains of length `n` carrying the label's solid links in order with
/// virtual links elsewhere.
fn paddings(label: &EssentialLabel, n: usize) -> Vec<LinkChain> {
    let solid: Vec<&Link> = label.links().iter().filter(|l| l.is_solid()).collect();
    let mut out = Vec::new();
    if n < solid.len() {
        return out;
    }
    let mut slots = Vec::new();
    place(&solid, n, 0, &mut slots, &mut out);
    out
}

fn place(solid: &[&Link], n: usize, from: usize, slots: &mut Vec<usize>, out: &mut Vec<LinkChain>) {
    if slots.len() == solid.len() {
        let mut links = vec![Link::virtual_link(); n];
        for (link, &i) in solid.iter().zip(slots.iter()) {
            links[i] = (*link).clone();
        }
        if let Ok(chain) = LinkChain::new(links) {
            out.push(chain);
        }
        return;
    }
    let remaining = solid.len() - slots.len();
    for i in from..=n - remaining {
        slots.push(i);
        place(solid, n, i + 1, slots, out);
        slots.pop();
    }
}

type Concrete = BTreeSet<(LinkChain, Process)>;

fn go(p: &Process, defs: &Definitions, max_len: usize, bounds: &Bounds, budget: usize) -> Result<Concrete, SemanticsError> {
    let mut out = Concrete::new();
    match p {
        Process::Nil => {}
        Process::Prefix(label, cont) => {
            for n in 1..=max_len {
                for chain in paddings(label, n) {
                    out.insert((chain, (**cont).clone()));
                }
            }
        }
        Process::Sum(l, r) => {
            out.extend(go(l, defs, max_len, bounds, budget)?);
            out.extend(go(r, defs, max_len, bounds, budget)?);
        }
        Process::Par(l, r) => {
            let left = go(l, defs, max_len, bounds, budget)?;
            let right = go(r, defs, max_len, bounds, budget)?;
            for (s, l2) in &left {
                out.insert((s.clone(), Process::Par(l2.clone().into(), r.clone())));
            }
            for (s, r2) in &right {
                out.insert((s.clone(), Process::Par(l.clone(), r2.clone().into())));
            }
            for (s1, l2) in &left {
                for (s2, r2) in right.iter().filter(|(s2, _)| s2.len() == s1.len()) {
                    if let Some(s) = s1.merge(s2) {
                        out.insert((s, Process::par(l2.clone(), r2.clone())));
                    }
                }
            }
        }
        Process::Restrict(a, body) => {
            for (s, b2) in go(body, defs, max_len, bounds, budget)? {
                if let Some(s2) = s.restrict(a) {
                    out.insert((s2, Process::restrict(a.clone(), b2)));
                }
            }
        }
        Process::Rename(body, phi) => {
            for (s, b2) in go(body, defs, max_len, bounds, budget)? {
                out.insert((s.rename(phi), Process::rename(b2, phi.clone())));
            }
        }
        Process::Call(name, args) => {
            let body = unfold(name, args, defs, budget, bounds.max_unfold)?;
            let body_key = format_process(&settle(&body, bounds));
            for (s, target) in go(&body, defs, max_len, bounds, budget - 1)? {
                out.insert((s, fold_target(target, &body_key, p, bounds)));
            }
        }
    }
    Ok(out)
}
