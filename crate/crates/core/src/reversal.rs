//! Simultaneous reversal of the unique gradient paths between pairs of
//! critical cells of the second type.
//!
//! The pair `β = (♠ {k} I ♣ {n,*,j})`, `α = (♠ {k} I {j} ♣ {n,*})` is
//! reversed when `I` is j-prelong and `j` exceeds every member of `*`, every
//! member of `♣`, and `k`.
//!
//! Without the last condition the reversed field generally has closed
//! V-paths; [`ReversalRule::WithoutKCondition`] builds that field for
//! comparison.

use std::collections::HashSet;

use serde::Serialize;

use crate::complex::{CellId, Complex};
use crate::error::{Error, Result};
use crate::label::CellLabel;
use crate::linkage::Subset;
use crate::matching::{critical_pattern, CriticalClass, VectorField};
use crate::paths::{enumerate_paths, GradientPath};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reversal {
    pub beta: CellId,
    pub alpha: CellId,
    /// The entry that leaves the n-block.
    pub moved: usize,
    pub path: GradientPath,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReversalPlan {
    pub reversals: Vec<Reversal>,
}

impl ReversalPlan {
    pub fn len(&self) -> usize {
        self.reversals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reversals.is_empty()
    }

    pub fn export(&self, cx: &Complex) -> Vec<ReversalExport> {
        self.reversals
            .iter()
            .map(|r| ReversalExport {
                beta: cx.label(r.beta).to_string(),
                alpha: cx.label(r.alpha).to_string(),
                path: r.path.labels(cx),
                moved: r.moved,
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReversalExport {
    pub beta: String,
    pub alpha: String,
    pub path: Vec<String>,
    pub moved: usize,
}

/// Which pairs get reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReversalRule {
    /// All three entry conditions.
    Standard,
    /// Drops the requirement `j > k`.
    WithoutKCondition,
}

/// Critical cells `β = (♠ {k} I ♣ {n,*,j})` and `α = (♠ {k} I ♣∪{j} {n,*})`
/// of the second type with `I` j-prelong, where `♣∪{j}` keeps decreasing
/// order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConnectedPair {
    pub beta: CellId,
    pub alpha: CellId,
    pub j: usize,
    pub k: usize,
    /// `j` exceeds every other member of the n-block but `n`.
    pub above_star: bool,
    /// `j` exceeds every member of `♣`.
    pub above_club: bool,
}

impl ConnectedPair {
    pub fn selected(&self, rule: ReversalRule) -> bool {
        self.above_star && self.above_club && (rule == ReversalRule::WithoutKCondition || self.j > self.k)
    }
}

/// Every such pair; fails with `MissingPartner` if some `α` is not a
/// critical cell of the second type.
pub fn connected_pairs(cx: &Complex, field: &VectorField) -> Result<Vec<ConnectedPair>> {
    let linkage = cx.linkage();
    let n = cx.n();
    let mut out = Vec::new();
    for beta in cx.ids().filter(|&c| field.is_critical(c)) {
        let Some(CriticalClass::Type2 { spade, k, prelong, club, nset }) = critical_pattern(linkage, cx.label(beta))
        else {
            continue;
        };
        let star = nset.without(n);
        for j in star.iter() {
            if !linkage.is_prelong(prelong, j)? {
                continue;
            }
            let mut blocks: Vec<Subset> = spade.iter().map(|&s| Subset::singleton(s)).collect();
            blocks.push(Subset::singleton(k));
            blocks.push(prelong);
            blocks.extend(club.iter().filter(|&&c| c > j).map(|&c| Subset::singleton(c)));
            blocks.push(Subset::singleton(j));
            blocks.extend(club.iter().filter(|&&c| c < j).map(|&c| Subset::singleton(c)));
            blocks.push(nset.without(j));
            let alpha_label = CellLabel::from_blocks(blocks);
            let alpha = cx
                .id(&alpha_label)
                .filter(|&a| field.is_critical(a))
                .filter(|&a| matches!(critical_pattern(linkage, cx.label(a)), Some(CriticalClass::Type2 { .. })))
                .ok_or_else(|| Error::MissingPartner(alpha_label.to_string()))?;
            out.push(ConnectedPair {
                beta,
                alpha,
                j,
                k,
                above_star: star.max_entry() == Some(j),
                above_club: club.iter().all(|&c| c < j),
            });
        }
    }
    Ok(out)
}

/// Whether a path from `β` opens by splitting `j` off the n-block and
/// placing it right before the rest of that block.
pub fn starts_with_backward_split(cx: &Complex, path: &GradientPath, j: usize) -> bool {
    let beta = cx.label(path.source());
    let blocks = beta.blocks();
    let mut expected = blocks[..blocks.len() - 1].to_vec();
    expected.push(Subset::singleton(j));
    expected.push(beta.nset().without(j));
    path.cells().get(1).is_some_and(|&c| cx.label(c) == &CellLabel::from_blocks(expected))
}

/// The unique path joining a connected pair; fails with `NonUniquePath`
/// otherwise.
pub fn unique_path(cx: &Complex, field: &VectorField, pair: &ConnectedPair, cap: usize) -> Result<GradientPath> {
    let mut paths = enumerate_paths(cx, field, pair.beta, pair.alpha, cap)?;
    if paths.len() != 1 {
        return Err(Error::NonUniquePath {
            beta: cx.label(pair.beta).to_string(),
            alpha: cx.label(pair.alpha).to_string(),
            count: paths.len() as u128,
        });
    }
    Ok(paths.pop().expect("one path"))
}

/// Selects the pairs to reverse and finds their paths, requiring each path
/// to be unique.
pub fn plan_reversals(cx: &Complex, field: &VectorField, cap: usize) -> Result<ReversalPlan> {
    plan_with_rule(cx, field, ReversalRule::Standard, cap)
}

pub fn plan_with_rule(cx: &Complex, field: &VectorField, rule: ReversalRule, cap: usize) -> Result<ReversalPlan> {
    let mut plan = ReversalPlan::default();
    let mut used: HashSet<CellId> = HashSet::new();
    for pair in connected_pairs(cx, field)?.into_iter().filter(|p| p.selected(rule)) {
        let path = unique_path(cx, field, &pair, cap)?;
        for cell in [pair.beta, pair.alpha] {
            if !used.insert(cell) {
                return Err(Error::DuplicateEndpoint(cx.label(cell).to_string()));
            }
        }
        plan.reversals.push(Reversal { beta: pair.beta, alpha: pair.alpha, moved: pair.j, path });
    }
    Ok(plan)
}

/// Reverses every planned path at once: pairs `(αᵢ, βᵢ)` are dropped and
/// `(αᵢ₊₁, βᵢ)` added along each path.
pub fn apply_reversals(cx: &Complex, field: &VectorField, plan: &ReversalPlan) -> Result<VectorField> {
    let mut seen: HashSet<CellId> = HashSet::new();
    for r in &plan.reversals {
        for &c in r.path.cells() {
            if !seen.insert(c) {
                return Err(Error::FieldAxiomViolation(format!("cell {} lies on two reversed paths", cx.label(c))));
            }
        }
    }
    let mut out = field.clone();
    for r in &plan.reversals {
        // β₀ α₁ β₁ α₂ … βₘ αₘ₊₁: odd positions before the last are matched
        // upward with their right neighbour.
        let cells = r.path.cells();
        for &alpha in cells[1..cells.len() - 1].iter().step_by(2) {
            out.unpair(alpha);
        }
        for step in cells.chunks(2) {
            out.pair(step[1], step[0]);
        }
    }
    out.check_axioms(cx)?;
    Ok(out)
}

/// Critical cells of the initial field expected to survive the reversal:
/// all of the first type, and those `(♠ {k} I ♣ {n,*})` of the second type
/// with `k` above every member of `*` and of `♣`.
pub fn predicted_survivors(cx: &Complex, field: &VectorField) -> Result<Vec<Vec<CellId>>> {
    let linkage = cx.linkage();
    let n = cx.n();
    let mut out = vec![Vec::new(); cx.top_dim() + 1];
    for c in cx.ids().filter(|&c| field.is_critical(c)) {
        let class =
            critical_pattern(linkage, cx.label(c)).ok_or_else(|| Error::ClassificationGap(cx.label(c).to_string()))?;
        let keep = match &class {
            CriticalClass::Type1 { .. } => true,
            CriticalClass::Type2 { k, club, nset, .. } => {
                nset.without(n).iter().all(|s| s < *k) && club.iter().all(|c| c < k)
            }
        };
        if keep {
            out[cx.dim(c)].push(c);
        }
    }
    Ok(out)
}

/// Compares the critical cells of the reversed field with the prediction.
pub fn check_survivors(cx: &Complex, initial: &VectorField, reversed: &VectorField) -> Result<()> {
    let predicted = predicted_survivors(cx, initial)?;
    let actual = reversed.critical_cells(cx);
    if predicted == actual {
        return Ok(());
    }
    let p: HashSet<CellId> = predicted.iter().flatten().copied().collect();
    let a: HashSet<CellId> = actual.iter().flatten().copied().collect();
    let mut extra: Vec<String> = a.difference(&p).map(|&c| cx.label(c).to_string()).collect();
    let mut missing: Vec<String> = p.difference(&a).map(|&c| cx.label(c).to_string()).collect();
    extra.sort();
    missing.sort();
    Err(Error::PredictionMismatch(format!("unexpected critical {extra:?}; expected but matched {missing:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::Linkage;
    use crate::paths::DEFAULT_PATH_CAP;

    fn setup(text: &str) -> (Complex, VectorField) {
        let cx = Complex::new(&Linkage::parse(text).unwrap()).unwrap();
        let f = VectorField::build(&cx).unwrap();
        (cx, f)
    }

    #[test]
    fn equilateral_seven_plan() {
        let (cx, f) = setup("1,1,1,1,1,1,1");
        let plan = plan_reversals(&cx, &f, DEFAULT_PATH_CAP).unwrap();
        let beta = cx.find("{1}{4,5,6}{7,2,3}").unwrap();
        let alpha = cx.find("{1}{4,5,6}{3}{7,2}").unwrap();
        let r = plan.reversals.iter().find(|r| r.beta == beta).expect("pair is planned");
        assert_eq!(r.alpha, alpha);
        assert_eq!(r.moved, 3);
        let survivor = cx.find("{3}{4,5,6}{7,1,2}").unwrap();
        assert!(plan.reversals.iter().all(|r| r.beta != survivor && r.alpha != survivor));

        let f2 = apply_reversals(&cx, &f, &plan).unwrap();
        assert!(!f2.is_critical(beta));
        assert!(!f2.is_critical(alpha));
        assert!(f2.is_critical(survivor));
        assert_eq!(f2.critical_counts(&cx), vec![1, 6, 30, 6, 1]);
        check_survivors(&cx, &f, &f2).unwrap();
        assert!(f2.is_acyclic(&cx));
    }

    #[test]
    fn empty_plan_leaves_field_unchanged() {
        let (cx, f) = setup("1,1,1,1,7/2");
        let plan = plan_reversals(&cx, &f, DEFAULT_PATH_CAP).unwrap();
        assert!(plan.is_empty());
        assert_eq!(apply_reversals(&cx, &f, &plan).unwrap(), f);
        assert_eq!(f.critical_counts(&cx), vec![1, 0, 1]);
    }

    #[test]
    fn overlapping_paths_are_rejected() {
        let (cx, f) = setup("1,1,1,1,1,1,1");
        let mut plan = plan_reversals(&cx, &f, DEFAULT_PATH_CAP).unwrap();
        let first = plan.reversals[0].clone();
        plan.reversals.push(first);
        assert!(matches!(apply_reversals(&cx, &f, &plan), Err(Error::FieldAxiomViolation(_))));
    }
}
