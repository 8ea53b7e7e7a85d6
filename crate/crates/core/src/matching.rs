//! The discrete vector field built by moving the minimal movable entry, and
//! the classification of its critical cells.
//!
//! Paired cells differ by moving a single entry `k` either forward (the
//! singleton `{k}` merges into the following block) or backward (`k` leaves
//! its block and becomes a singleton just before it). The n-block never
//! changes.

use serde::Serialize;

use crate::complex::{CellId, Complex};
use crate::error::{Error, Result};
use crate::label::CellLabel;
use crate::linkage::{Linkage, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Forward,
    Backward,
}

/// How a pair arises: which entry moves, in which direction. The pair is
/// created on step number `entry`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MoveReport {
    pub entry: usize,
    pub kind: MoveKind,
}

impl MoveReport {
    pub fn step(&self) -> usize {
        self.entry
    }
}

/// `{k}` is a singleton followed by a block `I` without `n`, with `k < I`
/// and `{k} ∪ I` short.
pub fn forward_movable(linkage: &Linkage, cell: &CellLabel, k: usize) -> bool {
    let blocks = cell.blocks();
    let Some(b) = blocks.iter().position(|s| *s == Subset::singleton(k)) else {
        return false;
    };
    if b + 2 >= blocks.len() {
        // Either {k} is the n-block or it is followed by the n-block.
        return false;
    }
    let next = blocks[b + 1];
    next.min_entry().is_some_and(|m| k < m) && linkage.is_short(next.with(k))
}

/// `k` is the minimum of a non-singleton block `J` without `n`, and `J` is
/// preceded by a non-singleton, by a singleton `{m}` with `m > k`, or
/// (cyclically, when `J` comes first) by the n-block.
pub fn backward_movable(cell: &CellLabel, k: usize) -> bool {
    let blocks = cell.blocks();
    let Some(b) = cell.position(k) else {
        return false;
    };
    let block = blocks[b];
    if b + 1 == blocks.len() || block.len() < 2 || block.min_entry() != Some(k) {
        return false;
    }
    if b == 0 {
        return true;
    }
    let prev = blocks[b - 1];
    !prev.is_singleton() || prev.min_entry().is_some_and(|m| m > k)
}

/// Merges the singleton `{k}` into the block after it.
pub fn move_forward(cell: &CellLabel, k: usize) -> CellLabel {
    let mut blocks = cell.blocks().to_vec();
    let b = cell.position(k).expect("entry present");
    let next = blocks.remove(b + 1);
    blocks[b] = blocks[b].union(next);
    CellLabel::from_blocks(blocks)
}

/// Splits `k` out of its block, placing `{k}` right before the remainder.
pub fn move_backward(cell: &CellLabel, k: usize) -> CellLabel {
    let mut blocks = cell.blocks().to_vec();
    let b = cell.position(k).expect("entry present");
    blocks[b] = blocks[b].without(k);
    blocks.insert(b, Subset::singleton(k));
    CellLabel::from_blocks(blocks)
}

/// Moves the minimal movable entry, if any. `None` means the cell is critical.
pub fn pair_search(linkage: &Linkage, cell: &CellLabel) -> Option<(CellLabel, MoveReport)> {
    let n = cell.n();
    (1..n).find_map(|k| {
        if forward_movable(linkage, cell, k) {
            Some((move_forward(cell, k), MoveReport { entry: k, kind: MoveKind::Forward }))
        } else if backward_movable(cell, k) {
            Some((move_backward(cell, k), MoveReport { entry: k, kind: MoveKind::Backward }))
        } else {
            None
        }
    })
}

/// A partial matching of cells with cofacets.
///
/// Ids grow with dimension, so a cell is matched upward exactly when its
/// partner has the larger id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    partner: Vec<Option<CellId>>,
    /// The move behind each pair of the original field, stored on both cells;
    /// pairs created by path reversal carry none.
    moves: Vec<Option<MoveReport>>,
}

impl VectorField {
    pub fn empty(cells: usize) -> Self {
        VectorField { partner: vec![None; cells], moves: vec![None; cells] }
    }

    /// Runs the pair search on every cell and checks it is an involution.
    pub fn build(cx: &Complex) -> Result<Self> {
        let linkage = cx.linkage();
        let mut field = VectorField::empty(cx.len());
        for id in cx.ids() {
            let label = cx.label(id);
            if let Some((other, report)) = pair_search(linkage, label) {
                let partner = cx
                    .id(&other)
                    .ok_or_else(|| Error::InconsistentMatch { cell: label.to_string(), partner: other.to_string() })?;
                field.partner[id.index()] = Some(partner);
                field.moves[id.index()] = Some(report);
            }
        }
        for id in cx.ids() {
            if let Some(p) = field.partner(id) {
                let same_entry = field.moves[p.index()].map(|m| m.entry) == field.moves[id.index()].map(|m| m.entry);
                if field.partner(p) != Some(id) || !same_entry {
                    return Err(Error::InconsistentMatch {
                        cell: cx.label(id).to_string(),
                        partner: cx.label(p).to_string(),
                    });
                }
            }
        }
        field.check_axioms(cx)?;
        Ok(field)
    }

    /// Sequential simulation of the pairing steps `k = 1, ..., n−1`: on step
    /// `k`, pair `(⋯ {k} I ⋯)` with `(⋯ {k} ∪ I ⋯)` whenever `I` avoids `n`
    /// and `1, ..., k−1`, the merged block is short, and neither cell was
    /// paired on an earlier step.
    pub fn build_literal_steps(cx: &Complex) -> Result<Self> {
        let n = cx.n();
        let mut field = VectorField::empty(cx.len());
        for k in 1..n {
            let mut step_pairs: Vec<(CellId, CellId)> = Vec::new();
            let mut claimed = vec![false; cx.len()];
            for alpha in cx.ids() {
                if field.partner(alpha).is_some() {
                    continue;
                }
                let label = cx.label(alpha);
                let blocks = label.blocks();
                let Some(b) = blocks.iter().position(|s| *s == Subset::singleton(k)) else {
                    continue;
                };
                if b + 2 >= blocks.len() {
                    continue;
                }
                let next = blocks[b + 1];
                if next.iter().any(|e| e < k) {
                    continue;
                }
                let merged = blocks[b].union(next);
                if !cx.linkage().is_short(merged) {
                    continue;
                }
                let beta = cx.id(&move_forward(label, k)).expect("merged label is a cell");
                if field.partner(beta).is_some() {
                    continue;
                }
                for cell in [alpha, beta] {
                    if std::mem::replace(&mut claimed[cell.index()], true) {
                        return Err(Error::AmbiguousStep { step: k, cell: cx.label(cell).to_string() });
                    }
                }
                step_pairs.push((alpha, beta));
            }
            for (alpha, beta) in step_pairs {
                let report = MoveReport { entry: k, kind: MoveKind::Forward };
                field.pair(alpha, beta);
                field.moves[alpha.index()] = Some(report);
                field.moves[beta.index()] = Some(MoveReport { kind: MoveKind::Backward, ..report });
            }
        }
        field.check_axioms(cx)?;
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn partner(&self, id: CellId) -> Option<CellId> {
        self.partner[id.index()]
    }

    pub fn move_report(&self, id: CellId) -> Option<MoveReport> {
        self.moves[id.index()]
    }

    pub fn is_critical(&self, id: CellId) -> bool {
        self.partner[id.index()].is_none()
    }

    /// The coface this cell is paired with, if it is the lower member.
    pub fn matched_up(&self, id: CellId) -> Option<CellId> {
        self.partner(id).filter(|&p| p > id)
    }

    /// `(lower, upper)` for every pair, ordered by the lower id.
    pub fn pairs(&self) -> impl Iterator<Item = (CellId, CellId)> + '_ {
        self.partner.iter().enumerate().filter_map(|(i, p)| {
            let id = CellId(i as u32);
            p.filter(|&p| p > id).map(|p| (id, p))
        })
    }

    pub fn pair_count(&self) -> usize {
        self.pairs().count()
    }

    /// Records `(lower, upper)` as a pair, dropping any move report.
    pub(crate) fn pair(&mut self, lower: CellId, upper: CellId) {
        self.partner[lower.index()] = Some(upper);
        self.partner[upper.index()] = Some(lower);
        self.moves[lower.index()] = None;
        self.moves[upper.index()] = None;
    }

    pub(crate) fn unpair(&mut self, id: CellId) {
        if let Some(p) = self.partner[id.index()].take() {
            self.partner[p.index()] = None;
            self.moves[p.index()] = None;
        }
        self.moves[id.index()] = None;
    }

    /// Critical cells grouped by dimension, ascending ids.
    pub fn critical_cells(&self, cx: &Complex) -> Vec<Vec<CellId>> {
        (0..=cx.top_dim()).map(|k| cx.cells_of_dim(k).filter(|&c| self.is_critical(c)).collect()).collect()
    }

    pub fn critical_counts(&self, cx: &Complex) -> Vec<usize> {
        self.critical_cells(cx).iter().map(Vec::len).collect()
    }

    /// Involution, one pair per cell, and each lower cell a facet of its
    /// upper cell.
    pub fn check_axioms(&self, cx: &Complex) -> Result<()> {
        if self.partner.len() != cx.len() {
            return Err(Error::FieldAxiomViolation("field and complex sizes differ".into()));
        }
        for id in cx.ids() {
            let Some(p) = self.partner(id) else { continue };
            if self.partner(p) != Some(id) {
                return Err(Error::FieldAxiomViolation(format!(
                    "{} is paired with {} but not conversely",
                    cx.label(id),
                    cx.label(p)
                )));
            }
            let (lo, hi) = if p > id { (id, p) } else { (p, id) };
            if !cx.is_facet(lo, hi) {
                return Err(Error::FieldAxiomViolation(format!(
                    "{} is not a facet of its partner {}",
                    cx.label(lo),
                    cx.label(hi)
                )));
            }
        }
        Ok(())
    }

    /// True iff no closed V-path exists.
    pub fn is_acyclic(&self, cx: &Complex) -> bool {
        self.find_cycle(cx).is_none()
    }

    /// Searches the graph `α → α'` (α matched up to β, α' ≠ α a facet of β)
    /// for a directed cycle and returns one if present.
    pub fn find_cycle(&self, cx: &Complex) -> Option<Vec<CellId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut mark = vec![Mark::New; cx.len()];
        let successors = |a: CellId| -> &[CellId] {
            match self.matched_up(a) {
                Some(b) => cx.facets(b),
                None => &[],
            }
        };
        for root in cx.ids() {
            if mark[root.index()] != Mark::New || self.matched_up(root).is_none() {
                continue;
            }
            // Stack of (node, next successor index).
            let mut stack: Vec<(CellId, usize)> = vec![(root, 0)];
            mark[root.index()] = Mark::Active;
            while let Some(&(node, next)) = stack.last() {
                let succ = successors(node);
                if next < succ.len() {
                    let s = succ[next];
                    stack.last_mut().expect("nonempty").1 += 1;
                    if s == node {
                        continue;
                    }
                    match mark[s.index()] {
                        Mark::New => {
                            mark[s.index()] = Mark::Active;
                            stack.push((s, 0));
                        }
                        Mark::Active => {
                            let start = stack.iter().position(|&(c, _)| c == s).expect("on stack");
                            return Some(stack[start..].iter().map(|&(c, _)| c).collect());
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node.index()] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }
}

/// Structure of a critical cell.
///
/// `spade` and `club` are strings of singletons in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum CriticalClass {
    /// `(♠ {n,*})`.
    Type1 { spade: Vec<usize>, nset: Subset },
    /// `(♠ {k} I ♣ {n,*})` with `I` k-prelong, `k < I`, `k < ♠`.
    Type2 { spade: Vec<usize>, k: usize, prelong: Subset, club: Vec<usize>, nset: Subset },
}

impl CriticalClass {
    pub fn is_type1(&self) -> bool {
        matches!(self, CriticalClass::Type1 { .. })
    }

    pub fn nset(&self) -> Subset {
        match self {
            CriticalClass::Type1 { nset, .. } | CriticalClass::Type2 { nset, .. } => *nset,
        }
    }

    /// Short name for reports: `type1` or `type2`.
    pub fn name(&self) -> &'static str {
        if self.is_type1() {
            "type1"
        } else {
            "type2"
        }
    }
}

fn is_decreasing(entries: &[usize]) -> bool {
    entries.windows(2).all(|w| w[0] > w[1])
}

/// Matches a label against the two critical shapes without consulting the
/// pair search.
pub fn critical_pattern(linkage: &Linkage, cell: &CellLabel) -> Option<CriticalClass> {
    let blocks = cell.blocks();
    let nset = cell.nset();
    let body = &blocks[..blocks.len() - 1];
    let wide: Vec<usize> = (0..body.len()).filter(|&i| !body[i].is_singleton()).collect();
    let singles = |range: &[Subset]| -> Option<Vec<usize>> {
        range.iter().map(|b| if b.is_singleton() { b.min_entry() } else { None }).collect()
    };
    let type2 = |p: usize| -> Option<CriticalClass> {
        // `p` is the position of the prelong block.
        if p == 0 {
            return None;
        }
        let k = singles(&body[p - 1..p])?[0];
        let spade = singles(&body[..p - 1])?;
        let club = singles(&body[p + 1..])?;
        let prelong = body[p];
        let ok = is_decreasing(&spade)
            && is_decreasing(&club)
            && spade.iter().all(|&s| k < s)
            && prelong.min_entry().is_some_and(|m| k < m)
            && linkage.is_prelong(prelong, k).unwrap_or(false);
        ok.then_some(CriticalClass::Type2 { spade, k, prelong, club, nset })
    };
    match wide.as_slice() {
        [] => {
            let seq = singles(body)?;
            let ascents: Vec<usize> = (0..seq.len().saturating_sub(1)).filter(|&i| seq[i] < seq[i + 1]).collect();
            match ascents.as_slice() {
                [] => Some(CriticalClass::Type1 { spade: seq, nset }),
                [i] => type2(i + 1),
                _ => None,
            }
        }
        [p] => type2(*p),
        _ => None,
    }
}

/// Classifies a critical cell; fails with `NotCritical` if the pair search
/// moves an entry, and with `ClassificationGap` if the cell fits neither
/// shape.
pub fn classify_critical(linkage: &Linkage, cell: &CellLabel) -> Result<CriticalClass> {
    if pair_search(linkage, cell).is_some() {
        return Err(Error::NotCritical(cell.to_string()));
    }
    critical_pattern(linkage, cell).ok_or_else(|| Error::ClassificationGap(cell.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(text: &str, n: usize) -> CellLabel {
        CellLabel::parse(text, n).unwrap()
    }

    fn equilateral(n: usize) -> Linkage {
        Linkage::from_integers(&vec![1; n]).unwrap()
    }

    #[test]
    fn forward_movability_examples() {
        let c = label("{5}{6}{3}{2}{1}{8,4,7}", 8);
        // Equal lengths are degenerate for even n; every pair is short here.
        let l8 = Linkage::from_integers(&[10, 10, 10, 10, 10, 10, 10, 11]).unwrap();
        assert!(forward_movable(&l8, &c, 5));
        assert!(!forward_movable(&l8, &label("{6}{5}{4}{3}{2}{1}{7}", 7), 6));
        let l7 = equilateral(7);
        assert!(forward_movable(&l7, &label("{1}{2}{3}{4}{5}{6}{7}", 7), 1));
    }

    #[test]
    fn backward_movability_examples() {
        assert!(backward_movable(&label("{7,5}{3}{8,1,2,4,6}", 8), 5));
        assert!(backward_movable(&label("{7}{5}{3}{6,2}{1}{8,4}", 8), 2));
        assert!(!backward_movable(&label("{3}{4,5,6}{7,1,2}", 7), 4));
        assert!(!backward_movable(&label("{3}{4,5,6}{7,1,2}", 7), 7));
    }

    #[test]
    fn pair_search_examples() {
        let l8 = Linkage::from_integers(&[10, 10, 10, 10, 10, 10, 10, 11]).unwrap();
        let (p, r) = pair_search(&l8, &label("{7,5}{3}{8,1,2,4,6}", 8)).unwrap();
        assert_eq!(p, label("{5}{7}{3}{8,1,2,4,6}", 8));
        assert_eq!(r, MoveReport { entry: 5, kind: MoveKind::Backward });
        let (p, r) = pair_search(&l8, &label("{5}{6}{3}{2}{1}{8,4,7}", 8)).unwrap();
        assert_eq!(p, label("{5,6}{3}{2}{1}{8,4,7}", 8));
        assert_eq!(r, MoveReport { entry: 5, kind: MoveKind::Forward });
        assert!(pair_search(&l8, &label("{7}{5}{3}{8,1,2,4,6}", 8)).is_none());
        let (p, _) = pair_search(&l8, &label("{7}{5}{3}{6,2}{1}{8,4}", 8)).unwrap();
        assert_eq!(p, label("{7}{5}{3}{2}{6}{1}{8,4}", 8));
    }

    #[test]
    fn triangle_field_is_empty() {
        let cx = Complex::new(&equilateral(3)).unwrap();
        let f = VectorField::build(&cx).unwrap();
        assert_eq!(f.pair_count(), 0);
        assert_eq!(f.critical_counts(&cx), vec![2]);
        assert_eq!(VectorField::build_literal_steps(&cx).unwrap(), f);
    }

    #[test]
    fn classification_examples() {
        let l7 = equilateral(7);
        let l8 = Linkage::from_integers(&[10, 10, 10, 10, 10, 10, 10, 11]).unwrap();
        assert_eq!(
            classify_critical(&l8, &label("{7}{5}{3}{8,1,2,4,6}", 8)).unwrap(),
            CriticalClass::Type1 { spade: vec![7, 5, 3], nset: [1, 2, 4, 6, 8].into_iter().collect() }
        );
        assert_eq!(
            classify_critical(&l7, &label("{3}{4,5,6}{7,1,2}", 7)).unwrap(),
            CriticalClass::Type2 {
                spade: vec![],
                k: 3,
                prelong: [4, 5, 6].into_iter().collect(),
                club: vec![],
                nset: [1, 2, 7].into_iter().collect()
            }
        );
        assert_eq!(
            classify_critical(&l7, &label("{6}{5}{1}{2,3,4}{7}", 7)).unwrap(),
            CriticalClass::Type2 {
                spade: vec![6, 5],
                k: 1,
                prelong: [2, 3, 4].into_iter().collect(),
                club: vec![],
                nset: [7].into_iter().collect()
            }
        );
        assert!(matches!(classify_critical(&l7, &label("{1}{2}{3}{4}{5}{6}{7}", 7)), Err(Error::NotCritical(_))));
    }

    #[test]
    fn corrupted_field_fails_axioms() {
        let cx = Complex::new(&equilateral(5)).unwrap();
        let mut f = VectorField::build(&cx).unwrap();
        let (a, b) = f.pairs().next().unwrap();
        f.partner[a.index()] = None;
        assert!(f.check_axioms(&cx).is_err());
        f.partner[a.index()] = Some(b);
        assert!(f.check_axioms(&cx).is_ok());
    }
}
