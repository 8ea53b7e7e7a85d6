//! Gradient paths (V-paths) between critical cells.
//!
//! A path from a critical `(p+1)`-cell `β₀` is `β₀, α₁, β₁, …, αₘ₊₁` where
//! each `αᵢ` (i ≤ m) is matched up with `βᵢ`, each `αᵢ₊₁ ≠ αᵢ` is a facet of
//! `βᵢ`, and the final `α` is critical. Counting uses dynamic programming
//! over the graph of p-cells; explicit enumeration is a separate plain
//! depth-first search so the two can be checked against each other.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::Rng;

use crate::complex::{CellId, Complex};
use crate::error::{Error, Result};
use crate::matching::VectorField;

/// Default cap on explicitly materialized paths.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// The alternating cell sequence of a gradient path, starting with the
/// source cell itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradientPath {
    cells: Vec<CellId>,
}

impl GradientPath {
    pub fn new(cells: Vec<CellId>) -> Self {
        GradientPath { cells }
    }

    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn source(&self) -> CellId {
        self.cells[0]
    }

    pub fn target(&self) -> CellId {
        *self.cells.last().expect("nonempty path")
    }

    /// The lower cells `α₁, …, αₘ₊₁`.
    pub fn lower_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells.iter().skip(1).step_by(2).copied()
    }

    /// The upper cells `β₀, …, βₘ`.
    pub fn upper_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells.iter().step_by(2).copied()
    }

    pub fn labels(&self, cx: &Complex) -> Vec<String> {
        self.cells.iter().map(|&c| cx.label(c).to_string()).collect()
    }
}

/// Facets of the coface `α` is matched with, other than `α`.
pub fn successors(cx: &Complex, field: &VectorField, alpha: CellId) -> Result<Vec<CellId>> {
    let beta = field.matched_up(alpha).ok_or_else(|| Error::Unmatched(cx.label(alpha).to_string()))?;
    Ok(cx.facets(beta).iter().copied().filter(|&a| a != alpha).collect())
}

fn next_cells<'a>(cx: &'a Complex, field: &VectorField, alpha: CellId) -> impl Iterator<Item = CellId> + 'a {
    let facets: &[CellId] = match field.matched_up(alpha) {
        Some(beta) => cx.facets(beta),
        None => &[],
    };
    facets.iter().copied().filter(move |&a| a != alpha)
}

/// Number of gradient paths, saturating at `u128::MAX`, with exact parity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PathCount {
    pub count: u128,
    pub parity: bool,
}

impl PathCount {
    fn add(&mut self, other: PathCount) {
        self.count = self.count.saturating_add(other.count);
        self.parity ^= other.parity;
    }
}

/// The p-cells reachable from the facets of a source `(p+1)`-cell, with the
/// V-path moves between them, in topological order.
#[derive(Clone, Debug)]
pub struct PathDag {
    source: CellId,
    order: Vec<CellId>,
    edges: HashMap<CellId, Vec<CellId>>,
}

impl PathDag {
    /// Fails with `Cyclic` if a closed V-path is reachable.
    pub fn from_source(cx: &Complex, field: &VectorField, source: CellId) -> Result<Self> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut mark: HashMap<CellId, Mark> = HashMap::new();
        let mut edges: HashMap<CellId, Vec<CellId>> = HashMap::new();
        let mut post = Vec::new();
        for &start in cx.facets(source) {
            if mark.contains_key(&start) {
                continue;
            }
            let mut stack: Vec<(CellId, usize)> = vec![(start, 0)];
            mark.insert(start, Mark::Active);
            edges.insert(start, next_cells(cx, field, start).collect());
            while let Some(&(node, next)) = stack.last() {
                let succ = &edges[&node];
                if next < succ.len() {
                    let s = succ[next];
                    stack.last_mut().expect("nonempty").1 += 1;
                    match mark.get(&s) {
                        None => {
                            mark.insert(s, Mark::Active);
                            edges.insert(s, next_cells(cx, field, s).collect());
                            stack.push((s, 0));
                        }
                        Some(Mark::Active) => return Err(Error::Cyclic(cx.label(s).to_string())),
                        Some(Mark::Done) => {}
                    }
                } else {
                    mark.insert(node, Mark::Done);
                    post.push(node);
                    stack.pop();
                }
            }
        }
        post.reverse();
        Ok(PathDag { source, order: post, edges })
    }

    pub fn source(&self) -> CellId {
        self.source
    }

    /// Reachable p-cells, each before all of its successors.
    pub fn order(&self) -> &[CellId] {
        &self.order
    }

    pub fn successors(&self, alpha: CellId) -> &[CellId] {
        self.edges.get(&alpha).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Path counts from the source to every reachable critical p-cell.
    pub fn counts(&self, cx: &Complex, field: &VectorField) -> BTreeMap<CellId, PathCount> {
        let mut ways: HashMap<CellId, PathCount> = HashMap::new();
        for &a in cx.facets(self.source) {
            ways.entry(a).or_default().add(PathCount { count: 1, parity: true });
        }
        let mut out = BTreeMap::new();
        for &node in &self.order {
            let here = ways.get(&node).copied().unwrap_or_default();
            if field.is_critical(node) {
                out.insert(node, here);
                continue;
            }
            for &s in self.successors(node) {
                ways.entry(s).or_default().add(here);
            }
        }
        out
    }
}

/// Path counts from `beta` to every critical cell one dimension lower.
pub fn path_counts_from(cx: &Complex, field: &VectorField, beta: CellId) -> Result<BTreeMap<CellId, PathCount>> {
    Ok(PathDag::from_source(cx, field, beta)?.counts(cx, field))
}

pub fn count_paths(cx: &Complex, field: &VectorField, beta: CellId, alpha: CellId) -> Result<PathCount> {
    Ok(path_counts_from(cx, field, beta)?.get(&alpha).copied().unwrap_or_default())
}

/// Parity of the number of gradient paths from `beta` to `alpha`.
pub fn count_paths_mod2(cx: &Complex, field: &VectorField, beta: CellId, alpha: CellId) -> Result<bool> {
    Ok(count_paths(cx, field, beta, alpha)?.parity)
}

/// Every gradient path from `beta` to `alpha`, by exhaustive depth-first
/// search. Fails with `PathCapExceeded` once more than `cap` paths are found
/// and with `Cyclic` if the walk revisits a cell on the current branch.
pub fn enumerate_paths(
    cx: &Complex,
    field: &VectorField,
    beta: CellId,
    alpha: CellId,
    cap: usize,
) -> Result<Vec<GradientPath>> {
    let mut found = Vec::new();
    let mut trail = vec![beta];
    for &a in cx.facets(beta) {
        walk(cx, field, a, alpha, cap, &mut trail, &mut found)?;
    }
    Ok(found)
}

fn walk(
    cx: &Complex,
    field: &VectorField,
    at: CellId,
    target: CellId,
    cap: usize,
    trail: &mut Vec<CellId>,
    found: &mut Vec<GradientPath>,
) -> Result<()> {
    if trail.iter().skip(1).step_by(2).any(|&c| c == at) {
        return Err(Error::Cyclic(cx.label(at).to_string()));
    }
    trail.push(at);
    if at == target {
        if found.len() == cap {
            return Err(Error::PathCapExceeded { cap });
        }
        found.push(GradientPath::new(trail.clone()));
    } else if let Some(up) = field.matched_up(at) {
        trail.push(up);
        for &next in cx.facets(up) {
            if next != at {
                walk(cx, field, next, target, cap, trail, found)?;
            }
        }
        trail.pop();
    }
    trail.pop();
    Ok(())
}

/// Whether entries keep their relative placement along a cell sequence: once
/// a larger entry sits in a block strictly left of a smaller one, and the
/// smaller one is outside the n-block, the two stay in different blocks in
/// that order in every later cell.
///
/// Entries of the n-block are exempt: a split of the n-block may place its
/// first part at the front of the linear string.
pub fn check_order_invariant(cx: &Complex, cells: &[CellId]) -> bool {
    let n = cx.n();
    let positions = |id: CellId| -> Vec<usize> {
        let label = cx.label(id);
        let mut pos = vec![0; n + 1];
        for (i, b) in label.blocks().iter().enumerate() {
            for e in b.iter() {
                pos[e] = i;
            }
        }
        pos
    };
    cells.windows(2).all(|w| {
        let (before, after) = (positions(w[0]), positions(w[1]));
        let last = cx.label(w[0]).block_count() - 1;
        (1..=n).all(|big| {
            (1..big).all(|small| before[big] >= before[small] || before[small] == last || after[big] < after[small])
        })
    })
}

/// A random V-walk from `start` (matched up or critical of dimension p+1):
/// repeatedly pick a facet and, while it is matched up, continue through its
/// partner. Stops at the first cell that cannot be continued.
pub fn random_walk<R: Rng>(cx: &Complex, field: &VectorField, start: CellId, rng: &mut R) -> Vec<CellId> {
    let mut cells = vec![start];
    let mut upper = start;
    let mut prev: Option<CellId> = None;
    loop {
        let options: Vec<CellId> = cx.facets(upper).iter().copied().filter(|&a| Some(a) != prev).collect();
        if options.is_empty() {
            break;
        }
        let a = options[rng.gen_range(0..options.len())];
        cells.push(a);
        match field.matched_up(a) {
            Some(b) => {
                cells.push(b);
                upper = b;
                prev = Some(a);
            }
            None => break,
        }
        if cells.len() > 4 * cx.len() {
            break;
        }
    }
    cells
}

/// Graphviz rendering of one path: facet relations among its cells as solid
/// edges, its matched pairs in bold.
pub fn path_dot(cx: &Complex, field: &VectorField, path: &GradientPath) -> String {
    let mut cells: Vec<CellId> = path.cells().to_vec();
    cells.sort_unstable();
    cells.dedup();
    let mut out = String::from("digraph gradient_path {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n");
    for &c in &cells {
        let style = if field.is_critical(c) { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  \"{}\" [label=\"{}\"{}];", cx.label(c), cx.label(c), style);
    }
    for &hi in &cells {
        for &lo in cx.facets(hi) {
            if !cells.contains(&lo) {
                continue;
            }
            let joined = path.cells().windows(2).any(|w| w[0] == lo && w[1] == hi) && field.partner(lo) == Some(hi);
            let style = if joined { " [style=bold, penwidth=2.5]" } else { "" };
            let _ = writeln!(out, "  \"{}\" -> \"{}\"{};", cx.label(lo), cx.label(hi), style);
        }
    }
    out.push_str("}\n");
    out
}
