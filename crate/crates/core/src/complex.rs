//! The regular CW complex whose cells are the admissible cyclically ordered
//! partitions of `[n]`, together with its Hasse diagram.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::CellLabel;
use crate::linkage::{Linkage, Subset};

/// Dense index of a cell; ids follow the canonical label order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct CellId(pub u32);

impl CellId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Limit on `n` for complex construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_n: Option<usize>,
}

impl SizeGuard {
    pub const DEFAULT_MAX_N: usize = 9;

    pub fn limit(max_n: usize) -> Self {
        SizeGuard { max_n: Some(max_n) }
    }

    pub fn unlimited() -> Self {
        SizeGuard { max_n: None }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        match self.max_n {
            Some(max_n) if n > max_n => Err(Error::SizeGuard { n, max_n }),
            _ => Ok(()),
        }
    }
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard::limit(Self::DEFAULT_MAX_N)
    }
}

/// Compressed adjacency lists.
#[derive(Clone, Debug, Default)]
struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<CellId>,
}

impl Adjacency {
    fn of(&self, id: CellId) -> &[CellId] {
        let i = id.index();
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    fn transpose(&self, cells: usize) -> Adjacency {
        let mut counts = vec![0u32; cells + 1];
        for t in &self.targets {
            counts[t.index() + 1] += 1;
        }
        for i in 0..cells {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut targets = vec![CellId(0); self.targets.len()];
        for src in 0..cells {
            for t in self.of(CellId(src as u32)) {
                let slot = &mut fill[t.index()];
                targets[*slot as usize] = CellId(src as u32);
                *slot += 1;
            }
        }
        Adjacency { offsets, targets }
    }
}

/// All cells of the complex with facet and coface adjacency.
#[derive(Clone)]
pub struct Complex {
    linkage: Linkage,
    cells: Vec<CellLabel>,
    /// Cells of dimension k occupy ids `dim_start[k]..dim_start[k + 1]`.
    dim_start: Vec<usize>,
    index: HashMap<CellLabel, CellId>,
    facets: Adjacency,
    cofacets: Adjacency,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Complex").field("linkage", &self.linkage).field("cells_per_dim", &self.cells_per_dim()).finish()
    }
}

impl Complex {
    /// Enumerates all cells under the default size guard.
    pub fn new(linkage: &Linkage) -> Result<Self> {
        Self::with_guard(linkage, SizeGuard::default())
    }

    pub fn with_guard(linkage: &Linkage, guard: SizeGuard) -> Result<Self> {
        let n = linkage.n();
        guard.check(n)?;
        let mut cells = enumerate_labels(linkage);
        cells.sort_unstable();

        let top = n - 3;
        let mut dim_start = vec![0; top + 2];
        for c in &cells {
            dim_start[c.dim() + 1] += 1;
        }
        for k in 0..=top {
            dim_start[k + 1] += dim_start[k];
        }

        let index: HashMap<CellLabel, CellId> =
            cells.iter().enumerate().map(|(i, c)| (c.clone(), CellId(i as u32))).collect();

        let mut offsets = Vec::with_capacity(cells.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0u32);
        for c in &cells {
            for f in c.facets() {
                targets.push(index[&f]);
            }
            offsets.push(targets.len() as u32);
        }
        let facets = Adjacency { offsets, targets };
        let cofacets = facets.transpose(cells.len());

        Ok(Complex { linkage: linkage.clone(), cells, dim_start, index, facets, cofacets })
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn n(&self) -> usize {
        self.linkage.n()
    }

    /// Top dimension `n − 3`.
    pub fn top_dim(&self) -> usize {
        self.n() - 3
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn label(&self, id: CellId) -> &CellLabel {
        &self.cells[id.index()]
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.cells
    }

    pub fn id(&self, label: &CellLabel) -> Option<CellId> {
        self.index.get(label).copied()
    }

    /// Looks a label up from its brace text.
    pub fn find(&self, text: &str) -> Result<CellId> {
        let label = CellLabel::parse(text, self.n())?;
        self.id(&label)
            .ok_or_else(|| Error::InvalidLabel { label: text.to_string(), reason: "not a cell of this complex".into() })
    }

    pub fn dim(&self, id: CellId) -> usize {
        self.dim_start.partition_point(|&s| s <= id.index()) - 1
    }

    pub fn ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len() as u32).map(CellId)
    }

    pub fn cells_of_dim(&self, k: usize) -> impl Iterator<Item = CellId> {
        let range = if k <= self.top_dim() { self.dim_start[k]..self.dim_start[k + 1] } else { 0..0 };
        range.map(|i| CellId(i as u32))
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        if k <= self.top_dim() {
            self.dim_start[k + 1] - self.dim_start[k]
        } else {
            0
        }
    }

    pub fn cells_per_dim(&self) -> Vec<usize> {
        (0..=self.top_dim()).map(|k| self.count_of_dim(k)).collect()
    }

    pub fn facets(&self, id: CellId) -> &[CellId] {
        self.facets.of(id)
    }

    pub fn cofacets(&self, id: CellId) -> &[CellId] {
        self.cofacets.of(id)
    }

    pub fn is_facet(&self, lower: CellId, upper: CellId) -> bool {
        self.facets(upper).contains(&lower)
    }

    /// `Σ_k (−1)^k · #(k-cells)`.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells_per_dim().iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// Face test by downward reachability in the Hasse diagram. Reflexive.
    pub fn is_face_by_reachability(&self, face: CellId, cell: CellId) -> bool {
        let target_dim = self.dim(face);
        if target_dim > self.dim(cell) {
            return false;
        }
        let mut frontier = vec![cell];
        for _ in target_dim..self.dim(cell) {
            let mut next: Vec<CellId> = frontier.iter().flat_map(|&c| self.facets(c).iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            frontier = next;
        }
        frontier.contains(&face)
    }

    /// Checks duplicate-free facet lists, facet dimensions, and the diamond
    /// property on every interval of length two.
    pub fn validate_regular(&self) -> Vec<RegularityViolation> {
        let mut violations = Vec::new();
        let mut counts: HashMap<CellId, u32> = HashMap::new();
        for id in self.ids() {
            let facets = self.facets(id);
            let d = self.dim(id);
            let mut sorted = facets.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                violations.push(RegularityViolation::DuplicateFacet { cell: self.label(id).to_string() });
            }
            if facets.iter().any(|&f| self.dim(f) + 1 != d) {
                violations.push(RegularityViolation::FacetDimension { cell: self.label(id).to_string() });
            }
            if d < 2 {
                continue;
            }
            counts.clear();
            for &f in facets {
                for &g in self.facets(f) {
                    *counts.entry(g).or_default() += 1;
                }
            }
            let mut bad: Vec<_> = counts.iter().filter(|(_, &c)| c != 2).map(|(&g, &c)| (g, c)).collect();
            bad.sort_unstable();
            for (g, c) in bad {
                violations.push(RegularityViolation::Diamond {
                    upper: self.label(id).to_string(),
                    lower: self.label(g).to_string(),
                    intermediates: c,
                });
            }
        }
        violations
    }
}

/// A failure of the regular-complex checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RegularityViolation {
    DuplicateFacet { cell: String },
    FacetDimension { cell: String },
    Diamond { upper: String, lower: String, intermediates: u32 },
}

/// Depth-first generation of admissible ordered partitions: choose the
/// n-block, then the remaining blocks front to back, abandoning long blocks.
fn enumerate_labels(linkage: &Linkage) -> Vec<CellLabel> {
    let n = linkage.n();
    let others = linkage.full().without(n);
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    for extra in std::iter::once(Subset::EMPTY).chain(others.proper_subsets()).chain([others]) {
        let nset = extra.with(n);
        if !linkage.is_short(nset) {
            continue;
        }
        let rest = others.minus(extra);
        prefix.clear();
        fill_blocks(linkage, rest, nset, &mut prefix, &mut out);
    }
    out
}

fn fill_blocks(linkage: &Linkage, rest: Subset, nset: Subset, prefix: &mut Vec<Subset>, out: &mut Vec<CellLabel>) {
    if rest.is_empty() {
        if prefix.len() >= 2 {
            let mut blocks = prefix.clone();
            blocks.push(nset);
            out.push(CellLabel::from_blocks(blocks));
        }
        return;
    }
    for block in rest.proper_subsets().chain([rest]) {
        if linkage.is_short(block) {
            prefix.push(block);
            fill_blocks(linkage, rest.minus(block), nset, prefix, out);
            prefix.pop();
        }
    }
}
