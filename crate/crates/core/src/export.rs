//! JSON and Graphviz views of complexes, fields and critical cells.

use std::fmt::Write;

use serde::Serialize;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::matching::{critical_pattern, CriticalClass, MoveKind, VectorField};

/// Hasse diagrams above this many edges need an explicit override.
pub const DOT_MAX_N: usize = 5;

/// One matched pair: lower label, upper label, moved entry, move kind.
/// Pairs created by path reversal have entry 0 and kind `reversed`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PairExport(pub String, pub String, pub usize, pub &'static str);

#[derive(Clone, Debug, Serialize)]
pub struct FieldExport {
    pub pairs: Vec<PairExport>,
    pub critical: Vec<Vec<String>>,
}

pub fn field_export(cx: &Complex, field: &VectorField) -> FieldExport {
    let pairs = field
        .pairs()
        .map(|(lo, hi)| {
            let (entry, kind) = match field.move_report(lo) {
                Some(r) => (r.entry, if r.kind == MoveKind::Forward { "forward" } else { "backward" }),
                None => (0, "reversed"),
            };
            PairExport(cx.label(lo).to_string(), cx.label(hi).to_string(), entry, kind)
        })
        .collect();
    let critical = field
        .critical_cells(cx)
        .into_iter()
        .map(|ids| ids.into_iter().map(|c| cx.label(c).to_string()).collect())
        .collect();
    FieldExport { pairs, critical }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalEntry {
    pub label: String,
    pub dim: usize,
    pub class: CriticalClass,
}

/// Critical cells grouped by dimension, each with its shape.
pub fn critical_export(cx: &Complex, field: &VectorField) -> Result<Vec<Vec<CriticalEntry>>> {
    field
        .critical_cells(cx)
        .into_iter()
        .map(|ids| {
            ids.into_iter()
                .map(|c| {
                    let label = cx.label(c);
                    let class = critical_pattern(cx.linkage(), label)
                        .ok_or_else(|| Error::ClassificationGap(label.to_string()))?;
                    Ok(CriticalEntry { label: label.to_string(), dim: cx.dim(c), class })
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HasseNode {
    pub id: u32,
    pub label: String,
    pub dim: usize,
    pub critical: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HasseExport {
    pub nodes: Vec<HasseNode>,
    /// `[facet, cell, matched]`.
    pub edges: Vec<(u32, u32, bool)>,
}

pub fn hasse_export(cx: &Complex, field: &VectorField) -> HasseExport {
    let nodes = cx
        .ids()
        .map(|c| HasseNode { id: c.0, label: cx.label(c).to_string(), dim: cx.dim(c), critical: field.is_critical(c) })
        .collect();
    let edges = cx
        .ids()
        .flat_map(|hi| cx.facets(hi).iter().map(move |&lo| (lo.0, hi.0, field.partner(lo) == Some(hi))))
        .collect();
    HasseExport { nodes, edges }
}

/// Graphviz Hasse diagram with matched pairs in bold and critical cells
/// doubly outlined. Refuses `n > DOT_MAX_N` unless `force` is set.
pub fn hasse_dot(cx: &Complex, field: &VectorField, force: bool) -> Result<String> {
    if cx.n() > DOT_MAX_N && !force {
        return Err(Error::SizeGuard { n: cx.n(), max_n: DOT_MAX_N });
    }
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n");
    for d in 0..=cx.top_dim() {
        let _ = write!(out, "  {{ rank=same;");
        for c in cx.cells_of_dim(d) {
            let _ = write!(out, " c{};", c.0);
        }
        out.push_str(" }\n");
    }
    for c in cx.ids() {
        let extra = if field.is_critical(c) { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  c{} [label=\"{}\"{}];", c.0, cx.label(c), extra);
    }
    for hi in cx.ids() {
        for &lo in cx.facets(hi) {
            let style = if field.partner(lo) == Some(hi) { " [style=bold, penwidth=2.5]" } else { "" };
            let _ = writeln!(out, "  c{} -> c{}{};", lo.0, hi.0, style);
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::Linkage;

    fn setup(text: &str) -> (Complex, VectorField) {
        let cx = Complex::new(&Linkage::parse(text).unwrap()).unwrap();
        let f = VectorField::build(&cx).unwrap();
        (cx, f)
    }

    #[test]
    fn field_pairs_carry_moves() {
        let (cx, f) = setup("1,1,1,1,1,1,1");
        let e = field_export(&cx, &f);
        assert_eq!(e.pairs.len(), f.pair_count());
        assert!(e.pairs.contains(&PairExport(
            "{1}{2}{3}{4}{5}{6}{7}".into(),
            "{1,2}{3}{4}{5}{6}{7}".into(),
            1,
            "forward"
        )));
        assert_eq!(e.critical.iter().map(Vec::len).sum::<usize>(), f.critical_counts(&cx).iter().sum::<usize>());
    }

    #[test]
    fn dot_guard() {
        let (cx, f) = setup("1,1,1,1,1,3/2");
        assert!(matches!(hasse_dot(&cx, &f, false), Err(Error::SizeGuard { n: 6, max_n: 5 })));
        assert!(hasse_dot(&cx, &f, true).is_ok());
        let (cx, f) = setup("1,1,1,3/2");
        let dot = hasse_dot(&cx, &f, false).unwrap();
        assert_eq!(dot.matches(" -> ").count(), hasse_export(&cx, &f).edges.len());
        assert_eq!(dot.matches("peripheries=2").count(), 2);
    }

    #[test]
    fn critical_entries_are_classified() {
        let (cx, f) = setup("1,1,1,1,7/2");
        let groups = critical_export(&cx, &f).unwrap();
        assert_eq!(groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 0, 1]);
        assert_eq!(groups[0][0].label, "{4}{3}{2}{1}{5}");
        assert!(groups[0][0].class.is_type1());
    }
}
