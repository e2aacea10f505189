use std::collections::BTreeSet;
use std::fmt;

use super::{write_links, ChainError, Link, LinkChain, Renaming, Site};
use crate::name::Chan;

/// A maximal run of solid links glued at τ-matched junctions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Block {
    links: Vec<Link>,
}

impl Block {
    pub fn new(links: Vec<Link>) -> Result<Block, ChainError> {
        if links.is_empty() {
            return Err(ChainError::InvalidLabel("empty block".into()));
        }
        if let Some(l) = links.iter().find(|l| l.is_virtual()) {
            return Err(ChainError::InvalidLabel(format!("virtual link {l} inside a block")));
        }
        for w in links.windows(2) {
            if !(w[0].target().is_tau() && w[1].source().is_tau()) {
                return Err(ChainError::InvalidLabel(format!(
                    "junction {} / {} inside a block is not τ-matched",
                    w[0], w[1]
                )));
            }
        }
        Ok(Block { links })
    }

    pub(crate) fn from_links_unchecked(links: Vec<Link>) -> Block {
        debug_assert!(Block::new(links.clone()).is_ok());
        Block { links }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn first_source(&self) -> &Site {
        self.links[0].source()
    }

    pub fn last_target(&self) -> &Site {
        self.links[self.links.len() - 1].target()
    }

    /// The single link `first source \ last target`.
    pub fn collapse(&self) -> Link {
        Link::new(self.first_source().clone(), self.last_target().clone()).expect("solid sites")
    }

    fn map_chan(&self, f: impl Fn(&Chan) -> Chan) -> Block {
        Block {
            links: self.links.iter().map(|l| l.map_chan(&f)).collect(),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.links.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

/// Canonical representative of a ▶◀-class: blocks separated by exactly one
/// implicit virtual link, no outer virtuals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NormalLabel {
    blocks: Vec<Block>,
}

impl NormalLabel {
    pub fn from_blocks(blocks: Vec<Block>) -> Result<NormalLabel, ChainError> {
        if blocks.is_empty() {
            return Err(ChainError::InvalidLabel("no blocks".into()));
        }
        for w in blocks.windows(2) {
            if w[0].last_target().as_chan().is_none() || w[1].first_source().as_chan().is_none() {
                return Err(ChainError::InvalidLabel(format!(
                    "blocks {} and {} must meet at channels",
                    w[0], w[1]
                )));
            }
        }
        Ok(NormalLabel { blocks })
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<Block>) -> NormalLabel {
        debug_assert!(NormalLabel::from_blocks(blocks.clone()).is_ok());
        NormalLabel { blocks }
    }

    /// Builds a label from block literals, e.g. `&[&["tau\\a"], &["a\\b"]]`.
    pub fn parse_blocks(blocks: &[&[&str]]) -> Result<NormalLabel, ChainError> {
        let blocks = blocks
            .iter()
            .map(|b| b.iter().map(|l| l.parse()).collect::<Result<Vec<Link>, _>>().and_then(Block::new))
            .collect::<Result<Vec<_>, _>>()?;
        NormalLabel::from_blocks(blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.links.len()).sum()
    }

    /// Length of the shortest concrete chain in the class: blocks whose
    /// facing channels coincide may touch without a virtual link.
    pub fn min_length(&self) -> usize {
        let gaps = self
            .blocks
            .windows(2)
            .filter(|w| w[0].last_target() != w[1].first_source())
            .count();
        self.size() + gaps
    }

    /// The concrete chain with one virtual link between consecutive blocks.
    pub fn denotation(&self) -> LinkChain {
        let mut links = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                links.push(Link::virtual_link());
            }
            links.extend(b.links.iter().cloned());
        }
        LinkChain::new(links).expect("normal labels denote valid chains")
    }

    pub fn first_source(&self) -> &Site {
        self.blocks[0].first_source()
    }

    pub fn last_target(&self) -> &Site {
        self.blocks[self.blocks.len() - 1].last_target()
    }

    pub fn reduce(&self) -> EssentialLabel {
        EssentialLabel {
            links: self.blocks.iter().map(Block::collapse).collect(),
        }
    }

    pub fn rename(&self, phi: &Renaming) -> NormalLabel {
        NormalLabel {
            blocks: self.blocks.iter().map(|b| b.map_chan(|c| phi.apply(c))).collect(),
        }
    }

    pub fn subst(&self, b: &Chan, a: &Chan) -> NormalLabel {
        NormalLabel {
            blocks: self
                .blocks
                .iter()
                .map(|blk| blk.map_chan(|c| if c == a { b.clone() } else { c.clone() }))
                .collect(),
        }
    }

    pub fn mentions(&self, a: &Chan) -> bool {
        self.blocks.iter().any(|b| b.links.iter().any(|l| l.mentions(a)))
    }

    /// All ▶◀-classes reachable by merging some padding of `self` with some
    /// padding of `other`: order-preserving interleavings of the two block
    /// sequences in which a block starting with τ comes first and a block
    /// ending with τ comes last.
    pub fn merge_symbolic(&self, other: &NormalLabel) -> BTreeSet<NormalLabel> {
        let mut out = BTreeSet::new();
        let total = self.blocks.len() + other.blocks.len();
        let mut acc = Vec::with_capacity(total);
        interleave(&self.blocks, &other.blocks, total, &mut acc, &mut out);
        out
    }

    /// Restriction lifted to ▶◀-classes: fuses junctions where both facing
    /// sites are `a`, fails on any pending occurrence.
    pub fn restrict(&self, a: &Chan) -> Option<NormalLabel> {
        if self.first_source().is_chan(a) || self.last_target().is_chan(a) {
            return None;
        }
        let mut out: Vec<Block> = Vec::with_capacity(self.blocks.len());
        let mut current = self.blocks[0].links.clone();
        for next in &self.blocks[1..] {
            let left = current.last().unwrap().target().is_chan(a);
            let right = next.first_source().is_chan(a);
            match (left, right) {
                (true, true) => {
                    let last = current.pop().unwrap();
                    current.push(Link::new(last.source().clone(), Site::Tau).unwrap());
                    let mut rest = next.links.clone();
                    rest[0] = Link::new(Site::Tau, rest[0].target().clone()).unwrap();
                    current.extend(rest);
                }
                (false, false) => {
                    out.push(Block::from_links_unchecked(std::mem::take(&mut current)));
                    current = next.links.clone();
                }
                _ => return None,
            }
        }
        out.push(Block::from_links_unchecked(current));
        Some(NormalLabel::from_blocks_unchecked(out))
    }

    /// `[[tau\a], [a\b]]` style rendering of the block structure.
    pub fn blocks_string(&self) -> String {
        let inner: Vec<String> = self.blocks.iter().map(Block::to_string).collect();
        format!("[{}]", inner.join(", "))
    }
}

fn interleave(
    left: &[Block],
    right: &[Block],
    total: usize,
    acc: &mut Vec<Block>,
    out: &mut BTreeSet<NormalLabel>,
) {
    if left.is_empty() && right.is_empty() {
        out.insert(NormalLabel::from_blocks_unchecked(acc.clone()));
        return;
    }
    for (pick, rest_l, rest_r) in [
        (left.first(), left.get(1..), Some(right)),
        (right.first(), Some(left), right.get(1..)),
    ] {
        let (Some(block), Some(rest_l), Some(rest_r)) = (pick, rest_l, rest_r) else {
            continue;
        };
        let position = acc.len();
        if block.first_source().is_tau() && position != 0 {
            continue;
        }
        if block.last_target().is_tau() && position != total - 1 {
            continue;
        }
        acc.push(block.clone());
        interleave(rest_l, rest_r, total, acc, out);
        acc.pop();
    }
}

impl fmt::Display for NormalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.denotation())
    }
}

/// Canonical representative of a ▷◁-class: solid links that alternate with
/// single virtual links, meeting their neighbours at channels.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EssentialLabel {
    links: Vec<Link>,
}

impl EssentialLabel {
    pub fn new(links: Vec<Link>) -> Result<EssentialLabel, ChainError> {
        if links.is_empty() {
            return Err(ChainError::InvalidLabel("empty essential label".into()));
        }
        if let Some(l) = links.iter().find(|l| l.is_virtual()) {
            return Err(ChainError::InvalidLabel(format!("virtual link {l} in essential label")));
        }
        for w in links.windows(2) {
            if w[0].target().as_chan().is_none() || w[1].source().as_chan().is_none() {
                return Err(ChainError::InvalidLabel(format!(
                    "{} and {} must meet at channels",
                    w[0], w[1]
                )));
            }
        }
        Ok(EssentialLabel { links })
    }

    /// Accepts exactly the essential chains: solid and virtual links
    /// alternating, solid at both extremes.
    pub fn from_chain(chain: &LinkChain) -> Option<EssentialLabel> {
        let links = chain.links();
        if links.len().is_multiple_of(2) {
            return None;
        }
        let alternating = links
            .iter()
            .enumerate()
            .all(|(i, l)| l.is_solid() == (i % 2 == 0));
        if !alternating {
            return None;
        }
        Some(EssentialLabel {
            links: links.iter().step_by(2).cloned().collect(),
        })
    }

    pub fn single(link: Link) -> EssentialLabel {
        EssentialLabel::new(vec![link]).expect("a single solid link is essential")
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn size(&self) -> usize {
        self.links.len()
    }

    pub fn to_chain(&self) -> LinkChain {
        let mut links = Vec::with_capacity(self.links.len() * 2);
        for (i, l) in self.links.iter().enumerate() {
            if i > 0 {
                links.push(Link::virtual_link());
            }
            links.push(l.clone());
        }
        LinkChain::new(links).expect("essential labels denote valid chains")
    }

    /// Each link is its own block: junctions are channels and never fuse.
    pub fn to_normal(&self) -> NormalLabel {
        NormalLabel::from_blocks_unchecked(
            self.links
                .iter()
                .map(|l| Block::from_links_unchecked(vec![l.clone()]))
                .collect(),
        )
    }

    pub fn rename(&self, phi: &Renaming) -> EssentialLabel {
        EssentialLabel {
            links: self.links.iter().map(|l| l.map_chan(|c| phi.apply(c))).collect(),
        }
    }

    pub fn subst(&self, b: &Chan, a: &Chan) -> EssentialLabel {
        EssentialLabel {
            links: self
                .links
                .iter()
                .map(|l| l.map_chan(|c| if c == a { b.clone() } else { c.clone() }))
                .collect(),
        }
    }

    pub(crate) fn map_chan(&self, f: impl Fn(&Chan) -> Chan) -> EssentialLabel {
        EssentialLabel {
            links: self.links.iter().map(|l| l.map_chan(&f)).collect(),
        }
    }

    pub fn channels(&self) -> impl Iterator<Item = &Chan> {
        self.links
            .iter()
            .flat_map(|l| [l.source().as_chan(), l.target().as_chan()])
            .flatten()
    }
}

impl fmt::Display for EssentialLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain = self.to_chain();
        write_links(f, chain.links())
    }
}

impl std::str::FromStr for EssentialLabel {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<EssentialLabel, ChainError> {
        let chain: LinkChain = s.parse()?;
        EssentialLabel::from_chain(&chain)
            .ok_or_else(|| ChainError::InvalidLabel(format!("{chain} is not essential")))
    }
}
