use std::collections::BTreeSet;

use super::{Bounds, Mutation, SemanticsError, SymbolicTransition};
use crate::chain::NormalLabel;
use crate::process::{format_process, Definitions, Process};

/// One transition per ▶◀-class of labels. Targets are structurally
/// normalized when `bounds.normalize` is set.
pub fn symbolic_step(
    p: &Process,
    defs: &Definitions,
    bounds: &Bounds,
) -> Result<BTreeSet<SymbolicTransition>, SemanticsError> {
    let raw = step(p, defs, bounds, bounds.max_unfold)?;
    Ok(raw
        .into_iter()
        .map(|(label, target)| SymbolicTransition { label, target: settle(&target, bounds) })
        .collect())
}

/// Transitions sorted by label and canonical target text, with targets in
/// canonical form. This order numbers states in [`super::build_lts`].
pub fn sorted_steps(
    p: &Process,
    defs: &Definitions,
    bounds: &Bounds,
) -> Result<Vec<(NormalLabel, Process, String)>, SemanticsError> {
    let mut out: Vec<(NormalLabel, Process, String)> = symbolic_step(p, defs, bounds)?
        .into_iter()
        .map(|t| {
            let canon = t.target.canonicalize();
            let key = format_process(&canon);
            (t.label, canon, key)
        })
        .collect();
    out.sort_by(|a, b| (&a.0, &a.2).cmp(&(&b.0, &b.2)));
    out.dedup_by(|a, b| a.0 == b.0 && a.2 == b.2);
    Ok(out)
}

pub(super) fn settle(p: &Process, bounds: &Bounds) -> Process {
    if bounds.normalize {
        p.struct_normalize()
    } else {
        p.clone()
    }
}

pub(super) fn unfold(
    name: &str,
    args: &[crate::name::Chan],
    defs: &Definitions,
    budget: usize,
    limit: usize,
) -> Result<Process, SemanticsError> {
    let def = defs.get(name).ok_or_else(|| SemanticsError::UndefinedConstant(name.to_string()))?;
    if def.params.len() != args.len() {
        return Err(SemanticsError::Arity {
            name: name.to_string(),
            expected: def.params.len(),
            got: args.len(),
        });
    }
    if budget == 0 {
        return Err(SemanticsError::UnguardedRecursion { name: name.to_string(), limit });
    }
    Ok(def.instantiate(args))
}

/// Replaces a target that is the unfolded body itself by the call, so
/// that a recursive constant returns to a single state.
pub(super) fn fold_target(target: Process, body_key: &str, call: &Process, bounds: &Bounds) -> Process {
    if format_process(&settle(&target, bounds)) == body_key {
        call.clone()
    } else {
        target
    }
}

type Raw = BTreeSet<(NormalLabel, Process)>;

fn step(p: &Process, defs: &Definitions, bounds: &Bounds, budget: usize) -> Result<Raw, SemanticsError> {
    let mut out = Raw::new();
    match p {
        Process::Nil => {}
        Process::Prefix(label, cont) => {
            out.insert((label.to_normal(), (**cont).clone()));
        }
        Process::Sum(l, r) => {
            out.extend(step(l, defs, bounds, budget)?);
            out.extend(step(r, defs, bounds, budget)?);
        }
        Process::Par(l, r) => {
            let left = step(l, defs, bounds, budget)?;
            let right = step(r, defs, bounds, budget)?;
            for (s, l2) in &left {
                out.insert((s.clone(), Process::Par(l2.clone().into(), r.clone())));
            }
            for (s, r2) in &right {
                out.insert((s.clone(), Process::Par(l.clone(), r2.clone().into())));
            }
            for (s1, l2) in &left {
                for (s2, r2) in &right {
                    for merged in s1.merge_symbolic(s2) {
                        if bounds.mutation == Some(Mutation::DropInterleavings)
                            && merged.blocks()[0] != s1.blocks()[0]
                        {
                            continue;
                        }
                        out.insert((merged, Process::par(l2.clone(), r2.clone())));
                    }
                }
            }
        }
        Process::Restrict(a, body) => {
            for (s, b2) in step(body, defs, bounds, budget)? {
                if let Some(s2) = s.restrict(a) {
                    out.insert((s2, Process::restrict(a.clone(), b2)));
                }
            }
        }
        Process::Rename(body, phi) => {
            for (s, b2) in step(body, defs, bounds, budget)? {
                out.insert((s.rename(phi), Process::rename(b2, phi.clone())));
            }
        }
        Process::Call(name, args) => {
            let body = unfold(name, args, defs, budget, bounds.max_unfold)?;
            let body_key = format_process(&settle(&body, bounds));
            for (s, target) in step(&body, defs, bounds, budget - 1)? {
                out.insert((s, fold_target(target, &body_key, p, bounds)));
            }
        }
    }
    Ok(out)
}
