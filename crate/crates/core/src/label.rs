//! Cyclically ordered partitions, written linearly with the block holding
//! the largest entry (the n-block) in last position.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::linkage::{Linkage, Subset};

/// Label of a cell: an ordered list of disjoint nonempty blocks covering
/// `[n]`, with `n` in the last block.
///
/// Labels order first by dimension (more blocks means lower dimension), then
/// lexicographically block by block, comparing each block as its ascending
/// member list. Cell ids follow this order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellLabel {
    blocks: Vec<Subset>,
}

impl CellLabel {
    /// Wraps a block list without validation.
    pub fn from_blocks(blocks: Vec<Subset>) -> Self {
        debug_assert!(!blocks.is_empty());
        CellLabel { blocks }
    }

    /// Parses the brace form, e.g. `{3}{4,5,6}{7,1,2}`. Members inside a block
    /// may come in any order. The result is checked to be an ordered partition
    /// of `[n]` with `n` in the last block, but not for admissibility.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidLabel { label: text.to_string(), reason: reason.to_string() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.trim_start_matches('(').trim_end_matches(')');
        let mut blocks = Vec::new();
        let mut seen = Subset::EMPTY;
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(|| bad("expected `{`"))?;
            let (inner, tail) = body.split_once('}').ok_or_else(|| bad("unclosed block"))?;
            let mut block = Subset::EMPTY;
            for tok in inner.split(',') {
                let e: usize = tok.parse().map_err(|_| bad("entries must be positive integers"))?;
                if e == 0 || e > n {
                    return Err(bad("entry out of range"));
                }
                if seen.contains(e) {
                    return Err(bad("repeated entry"));
                }
                seen = seen.with(e);
                block = block.with(e);
            }
            blocks.push(block);
            rest = tail;
        }
        if seen != Subset::full(n) {
            return Err(bad("blocks do not cover every entry"));
        }
        if !blocks.last().is_some_and(|b| b.contains(n)) {
            return Err(bad("the block holding n must come last"));
        }
        Ok(CellLabel { blocks })
    }

    /// Checks admissibility and the block count for a given linkage.
    pub fn validate(&self, linkage: &Linkage) -> Result<()> {
        let n = linkage.n();
        let bad = |reason: &str| Error::InvalidLabel { label: self.to_string(), reason: reason.to_string() };
        let union = self.blocks.iter().fold(Subset::EMPTY, |acc, b| acc.union(*b));
        let total: usize = self.blocks.iter().map(|b| b.len()).sum();
        if union != linkage.full() || total != n {
            return Err(bad("not a partition of [n]"));
        }
        if !self.nset().contains(n) {
            return Err(bad("the block holding n must come last"));
        }
        if self.blocks.len() < 3 {
            return Err(bad("fewer than three blocks"));
        }
        if let Some(b) = self.blocks.iter().find(|b| linkage.is_long(**b)) {
            return Err(bad(&format!("block {b} is long")));
        }
        Ok(())
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Largest entry, which lies in the last block.
    pub fn n(&self) -> usize {
        self.nset().max_entry().expect("nonempty n-block")
    }

    pub fn dim(&self) -> usize {
        self.n() - self.blocks.len()
    }

    /// The block containing `n`.
    pub fn nset(&self) -> Subset {
        *self.blocks.last().expect("nonempty label")
    }

    /// Index of the block holding `entry`.
    pub fn position(&self, entry: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(entry))
    }

    pub fn is_all_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.is_singleton())
    }

    /// All codimension-one faces: every ordered split of one block. A split
    /// of the n-block into `J` (without n) and `K` yields two cyclic
    /// placements, `J` right before `K` and `J` at the front.
    pub fn facets(&self) -> Vec<CellLabel> {
        let last = self.blocks.len() - 1;
        let n = self.n();
        let mut out = Vec::with_capacity(self.facet_count());
        for (b, &block) in self.blocks.iter().enumerate() {
            if block.len() < 2 {
                continue;
            }
            for first in block.proper_subsets() {
                let second = block.minus(first);
                if b < last {
                    let mut blocks = Vec::with_capacity(self.blocks.len() + 1);
                    blocks.extend_from_slice(&self.blocks[..b]);
                    blocks.push(first);
                    blocks.push(second);
                    blocks.extend_from_slice(&self.blocks[b + 1..]);
                    out.push(CellLabel { blocks });
                } else if !first.contains(n) {
                    let mut before = self.blocks[..last].to_vec();
                    before.push(first);
                    before.push(second);
                    out.push(CellLabel { blocks: before });

                    let mut front = Vec::with_capacity(self.blocks.len() + 1);
                    front.push(first);
                    front.extend_from_slice(&self.blocks[..last]);
                    front.push(second);
                    out.push(CellLabel { blocks: front });
                }
            }
        }
        out
    }

    /// `Σ_B (2^|B| − 2)` over all blocks.
    pub fn facet_count(&self) -> usize {
        self.blocks.iter().map(|b| (1usize << b.len()) - 2).sum()
    }

    /// Whether `self` is a face of `other`: every block of `other` is a union
    /// of cyclically consecutive blocks of `self`, in the same cyclic order.
    /// Reflexive.
    pub fn is_face_of(&self, other: &CellLabel) -> bool {
        if self.n() != other.n() || self.blocks.len() < other.blocks.len() {
            return false;
        }
        let last = other.blocks.len() - 1;
        let mut groups = Vec::with_capacity(self.blocks.len());
        for &block in &self.blocks {
            match other.blocks.iter().position(|o| block.is_subset_of(*o)) {
                Some(g) => groups.push(g),
                None => return false,
            }
        }
        // The n-group forms a cyclic interval ending at the last position:
        // strip a leading run of it, the trailing run must then reach the end.
        let lead = groups.iter().take_while(|&&g| g == last).count();
        let trail = groups.iter().rev().take_while(|&&g| g == last).count();
        if lead == groups.len() {
            return last == 0;
        }
        let middle = &groups[lead..groups.len() - trail];
        if middle.contains(&last) {
            return false;
        }
        // Remaining groups must appear as consecutive runs 0, 1, ..., last-1.
        let mut expected = 0;
        for &g in middle {
            if g == expected {
                expected += 1;
            } else if g + 1 != expected {
                return false;
            }
        }
        expected == last
    }

    /// Lexicographic comparison of block lists, each block compared as its
    /// ascending member list.
    fn cmp_blocks(&self, other: &CellLabel) -> Ordering {
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            match a.cmp_members(*b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.blocks.len().cmp(&other.blocks.len())
    }
}

impl Ord for CellLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        other.blocks.len().cmp(&self.blocks.len()).then_with(|| self.cmp_blocks(other))
    }
}

impl PartialOrd for CellLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Blocks in order, members ascending except that `n` opens its block:
/// `{3}{4,5,6}{7,1,2}`.
impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (body, last) = self.blocks.split_at(self.blocks.len() - 1);
        for b in body {
            write!(f, "{b}")?;
        }
        let n = self.n();
        write!(f, "{{{n}")?;
        for e in last[0].without(n).iter() {
            write!(f, ",{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}
