//! Links and link chains.
//!
//! A link `source\target` forwards whatever is available at its source
//! site to its target site. Chains are sequences of links whose adjacent
//! sites agree; they are the transition labels of the calculus. The
//! operations here (merge, restriction, renaming, substitution) are strict
//! partial functions: undefinedness is reported as `None`.
//!
//! The ▶◀-canonical carrier [`NormalLabel`] and the essential carrier
//! [`EssentialLabel`] live in [`normal`].

mod normal;
mod renaming;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::name::Chan;

pub use normal::{Block, EssentialLabel, NormalLabel};
pub use renaming::Renaming;

/// An endpoint of a link.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Site {
    Chan(Chan),
    Tau,
    Virtual,
}

impl Site {
    pub fn chan(name: &str) -> Site {
        Site::Chan(Chan::from_static(name))
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, Site::Virtual)
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Site::Tau)
    }

    pub fn as_chan(&self) -> Option<&Chan> {
        match self {
            Site::Chan(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_chan(&self, a: &Chan) -> bool {
        self.as_chan() == Some(a)
    }

    fn map_chan(&self, f: impl Fn(&Chan) -> Chan) -> Site {
        match self {
            Site::Chan(c) => Site::Chan(f(c)),
            other => other.clone(),
        }
    }

    /// Merge of two actions: defined only when at least one is virtual.
    fn merge(&self, other: &Site) -> Option<Site> {
        match (self, other) {
            (s, Site::Virtual) => Some(s.clone()),
            (Site::Virtual, s) => Some(s.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Chan(c) => write!(f, "{c}"),
            Site::Tau => f.write_str("tau"),
            Site::Virtual => f.write_str("_"),
        }
    }
}

impl FromStr for Site {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Site, ChainError> {
        match s {
            "tau" => Ok(Site::Tau),
            "_" => Ok(Site::Virtual),
            other => Chan::new(other)
                .map(Site::Chan)
                .ok_or_else(|| ChainError::Syntax(format!("invalid site {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid link {0}: sites must be both virtual or both specified")]
    InvalidLink(String),
    #[error("invalid adjacency between links {0} and {1}")]
    InvalidAdjacency(usize, usize),
    #[error("a link chain needs at least one solid link")]
    AllVirtual,
    #[error("invalid renaming: {0}")]
    InvalidRenaming(String),
    #[error("not a valid label: {0}")]
    InvalidLabel(String),
}

/// A valid link: solid (no virtual site) or the virtual link `_\_`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Link {
    source: Site,
    target: Site,
}

impl Link {
    pub fn new(source: Site, target: Site) -> Result<Link, ChainError> {
        if source.is_virtual() != target.is_virtual() {
            return Err(ChainError::InvalidLink(format!("{source}\\{target}")));
        }
        Ok(Link { source, target })
    }

    pub fn virtual_link() -> Link {
        Link {
            source: Site::Virtual,
            target: Site::Virtual,
        }
    }

    /// Solid link between two sites given as chain-literal tokens.
    /// Panics on virtual or malformed sites; meant for literals in code.
    pub fn solid(source: &str, target: &str) -> Link {
        let link = Link::new(source.parse().unwrap(), target.parse().unwrap()).unwrap();
        assert!(link.is_solid(), "{link} is not solid");
        link
    }

    pub fn source(&self) -> &Site {
        &self.source
    }

    pub fn target(&self) -> &Site {
        &self.target
    }

    pub fn is_solid(&self) -> bool {
        !self.source.is_virtual()
    }

    pub fn is_virtual(&self) -> bool {
        self.source.is_virtual()
    }

    /// Homomorphic merge; `None` when both links are solid.
    pub fn merge(&self, other: &Link) -> Option<Link> {
        Some(Link {
            source: self.source.merge(&other.source)?,
            target: self.target.merge(&other.target)?,
        })
    }

    pub(crate) fn map_chan(&self, f: impl Fn(&Chan) -> Chan) -> Link {
        Link {
            source: self.source.map_chan(&f),
            target: self.target.map_chan(&f),
        }
    }

    pub fn mentions(&self, a: &Chan) -> bool {
        self.source.is_chan(a) || self.target.is_chan(a)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\\{}", self.source, self.target)
    }
}

impl FromStr for Link {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Link, ChainError> {
        let (source, target) = s
            .split_once('\\')
            .ok_or_else(|| ChainError::Syntax(format!("expected `site\\site`, found {:?}", s.trim())))?;
        if target.contains('\\') {
            return Err(ChainError::Syntax(format!("too many `\\` in {:?}", s.trim())));
        }
        Link::new(source.trim().parse()?, target.trim().parse()?)
    }
}

/// Adjacency condition between the target of one link and the source of
/// the next: equal when both are channels, and τ faces only τ.
pub(crate) fn sites_compatible(target: &Site, next_source: &Site) -> bool {
    if let (Site::Chan(x), Site::Chan(y)) = (target, next_source) {
        if x != y {
            return false;
        }
    }
    target.is_tau() == next_source.is_tau()
}

/// A nonempty, valid link chain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinkChain {
    links: Vec<Link>,
}

impl LinkChain {
    pub fn new(links: Vec<Link>) -> Result<LinkChain, ChainError> {
        if links.is_empty() {
            return Err(ChainError::Syntax("empty chain".into()));
        }
        for i in 1..links.len() {
            if !sites_compatible(&links[i - 1].target, &links[i].source) {
                return Err(ChainError::InvalidAdjacency(i, i + 1));
            }
        }
        if links.iter().all(Link::is_virtual) {
            return Err(ChainError::AllVirtual);
        }
        Ok(LinkChain { links })
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Number of links, virtual ones included.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of solid links.
    pub fn size(&self) -> usize {
        self.links.iter().filter(|l| l.is_solid()).count()
    }

    pub fn is_solid(&self) -> bool {
        self.links.iter().all(Link::is_solid)
    }

    pub fn merge(&self, other: &LinkChain) -> Option<LinkChain> {
        if self.len() != other.len() {
            return None;
        }
        let links = self
            .links
            .iter()
            .zip(&other.links)
            .map(|(l, r)| l.merge(r))
            .collect::<Option<Vec<_>>>()?;
        LinkChain::new(links).ok()
    }

    /// True when every occurrence of `a` sits at a junction facing another `a`.
    pub fn is_matched(&self, a: &Chan) -> bool {
        let n = self.links.len();
        if self.links[0].source.is_chan(a) || self.links[n - 1].target.is_chan(a) {
            return false;
        }
        (1..n).all(|i| {
            let left = self.links[i - 1].target.is_chan(a);
            let right = self.links[i].source.is_chan(a);
            left == right
        })
    }

    pub fn restrict(&self, a: &Chan) -> Option<LinkChain> {
        if !self.is_matched(a) {
            return None;
        }
        let links = self
            .links
            .iter()
            .map(|l| Link {
                source: hide(&l.source, a),
                target: hide(&l.target, a),
            })
            .collect();
        Some(LinkChain { links })
    }

    pub fn rename(&self, phi: &Renaming) -> LinkChain {
        LinkChain {
            links: self.links.iter().map(|l| l.map_chan(|c| phi.apply(c))).collect(),
        }
    }

    /// Replaces every occurrence of `a` by `b`.
    pub fn subst(&self, b: &Chan, a: &Chan) -> LinkChain {
        LinkChain {
            links: self
                .links
                .iter()
                .map(|l| l.map_chan(|c| if c == a { b.clone() } else { c.clone() }))
                .collect(),
        }
    }

    pub fn mentions(&self, a: &Chan) -> bool {
        self.links.iter().any(|l| l.mentions(a))
    }

    pub fn channels(&self) -> impl Iterator<Item = &Chan> {
        self.links
            .iter()
            .flat_map(|l| [l.source.as_chan(), l.target.as_chan()])
            .flatten()
    }

    /// The ▶◀-canonical form.
    pub fn normalize(&self) -> NormalLabel {
        let mut blocks: Vec<Vec<Link>> = Vec::new();
        let mut open = false;
        for link in &self.links {
            if link.is_virtual() {
                open = false;
                continue;
            }
            let joins = open
                && blocks
                    .last()
                    .and_then(|b| b.last())
                    .is_some_and(|prev| prev.target.is_tau());
            if joins {
                blocks.last_mut().unwrap().push(link.clone());
            } else {
                blocks.push(vec![link.clone()]);
            }
            open = true;
        }
        NormalLabel::from_blocks_unchecked(blocks.into_iter().map(Block::from_links_unchecked).collect())
    }

    /// The essential representative ⌊s⌋.
    pub fn reduce(&self) -> EssentialLabel {
        self.normalize().reduce()
    }
}

fn hide(site: &Site, a: &Chan) -> Site {
    if site.is_chan(a) {
        Site::Tau
    } else {
        site.clone()
    }
}

impl fmt::Display for LinkChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_links(f, &self.links)
    }
}

pub(crate) fn write_links(f: &mut fmt::Formatter<'_>, links: &[Link]) -> fmt::Result {
    for (i, link) in links.iter().enumerate() {
        if i > 0 {
            f.write_str(" ; ")?;
        }
        write!(f, "{link}")?;
    }
    Ok(())
}

impl FromStr for LinkChain {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<LinkChain, ChainError> {
        parse_chain(s)
    }
}

/// Parses the `;`-separated chain literal syntax, e.g. `tau\a ; a\b ; _\_`.
pub fn parse_chain(text: &str) -> Result<LinkChain, ChainError> {
    let links = text
        .split(';')
        .map(str::parse::<Link>)
        .collect::<Result<Vec<_>, _>>()?;
    LinkChain::new(links)
}
