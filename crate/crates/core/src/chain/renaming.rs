use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ChainError;
use crate::name::Chan;

/// A finite permutation of channels; identity outside its support.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Renaming {
    map: BTreeMap<Chan, Chan>,
}

impl Renaming {
    pub fn identity() -> Renaming {
        Renaming::default()
    }

    pub fn swap(a: Chan, b: Chan) -> Renaming {
        Renaming::new([(a.clone(), b.clone()), (b, a)]).expect("a swap is a permutation")
    }

    /// Validates that `pairs` describe a permutation: the map is a function,
    /// injective, and its domain equals its range.
    pub fn new(pairs: impl IntoIterator<Item = (Chan, Chan)>) -> Result<Renaming, ChainError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if let Some(prev) = map.insert(from.clone(), to.clone()) {
                if prev != to {
                    return Err(ChainError::InvalidRenaming(format!(
                        "{from} is mapped to both {prev} and {to}"
                    )));
                }
            }
        }
        let range: BTreeSet<&Chan> = map.values().collect();
        if range.len() != map.len() {
            return Err(ChainError::InvalidRenaming("not injective".into()));
        }
        let domain: BTreeSet<&Chan> = map.keys().collect();
        if domain != range {
            return Err(ChainError::InvalidRenaming(
                "domain and range differ, so the map is not a permutation".into(),
            ));
        }
        map.retain(|k, v| k != v);
        Ok(Renaming { map })
    }

    pub fn apply(&self, c: &Chan) -> Chan {
        self.map.get(c).cloned().unwrap_or_else(|| c.clone())
    }

    pub fn inverse(&self) -> Renaming {
        Renaming {
            map: self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        }
    }

    /// `self.then(other)` applies `self` first: `x ↦ other(self(x))`.
    pub fn then(&self, other: &Renaming) -> Renaming {
        let support: BTreeSet<Chan> = self.map.keys().chain(other.map.keys()).cloned().collect();
        Renaming::new(support.into_iter().map(|x| {
            let y = other.apply(&self.apply(&x));
            (x, y)
        }))
        .expect("composition of permutations")
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Non-fixed points, sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (&Chan, &Chan)> {
        self.map.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Chan> {
        self.map.keys()
    }

    /// Conjugates by the transposition `(x y)`: the permutation acting on
    /// names after `x` and `y` have been exchanged everywhere.
    pub(crate) fn swap_names(&self, x: &Chan, y: &Chan) -> Renaming {
        let t = |c: &Chan| {
            if c == x {
                y.clone()
            } else if c == y {
                x.clone()
            } else {
                c.clone()
            }
        };
        Renaming {
            map: self.map.iter().map(|(k, v)| (t(k), t(v))).collect(),
        }
    }
}

impl fmt::Display for Renaming {
    /// Two-cycles print as `a<->b`, longer cycles as explicit `a->b` items.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        for (k, v) in &self.map {
            if self.map.get(v) == Some(k) {
                if k < v {
                    items.push(format!("{k}<->{v}"));
                }
            } else {
                items.push(format!("{k}->{v}"));
            }
        }
        write!(f, "[{}]", items.join(", "))
    }
}

impl std::str::FromStr for Renaming {
    type Err = ChainError;

    /// Accepts the printed form, with or without brackets: `[a<->b, c->d, d->c]`.
    fn from_str(s: &str) -> Result<Renaming, ChainError> {
        let body = s.trim();
        let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).unwrap_or(body);
        let chan = |t: &str| {
            Chan::new(t.trim()).ok_or_else(|| ChainError::Syntax(format!("`{}` is not a channel", t.trim())))
        };
        let mut pairs = Vec::new();
        for item in body.split(',').filter(|i| !i.trim().is_empty()) {
            if let Some((a, b)) = item.split_once("<->") {
                let (a, b) = (chan(a)?, chan(b)?);
                pairs.push((a.clone(), b.clone()));
                pairs.push((b, a));
            } else if let Some((a, b)) = item.split_once("->") {
                pairs.push((chan(a)?, chan(b)?));
            } else {
                return Err(ChainError::Syntax(format!("expected `a<->b` or `a->b`, found `{}`", item.trim())));
            }
        }
        Renaming::new(pairs)
    }
}
