//! Worked examples: labels, pairings, critical cells, the sphere and
//! two-tori families, gradient paths between critical cells.

use itertools::Itertools;

use linkage_morse::matching::{critical_pattern, pair_search, CriticalClass};
use linkage_morse::paths::{count_paths, enumerate_paths, path_counts_from};
use linkage_morse::reversal::{connected_pairs, starts_with_backward_split, unique_path};
use linkage_morse::{CellLabel, Complex, Linkage, Subset, VectorField};

const CAP: usize = 1_000_000;

fn label(text: &str, n: usize) -> CellLabel {
    CellLabel::parse(text, n).unwrap()
}

fn setup(text: &str) -> (Complex, VectorField) {
    let cx = Complex::new(&Linkage::parse(text).unwrap()).unwrap();
    let f = VectorField::build(&cx).unwrap();
    (cx, f)
}

/// Generic linkages with sorted integer lengths in `1..=max`.
fn generic_linkages(n: usize, max: i64) -> impl Iterator<Item = Linkage> {
    (1..=max).combinations_with_replacement(n).filter_map(|v| Linkage::from_integers(&v).ok())
}

fn critical_labels(cx: &Complex, f: &VectorField) -> Vec<Vec<String>> {
    f.critical_cells(cx).into_iter().map(|ids| ids.into_iter().map(|c| cx.label(c).to_string()).collect()).collect()
}

#[test]
fn order_inside_a_block_is_irrelevant() {
    assert_eq!(label("{3}{1}{4,2,5,6}", 6), label("{3}{1}{2,4,5,6}", 6));
    assert_ne!(label("{1}{3}{4,2,5,6}", 6), label("{3}{1}{4,2,5,6}", 6));
}

#[test]
fn facets_split_one_block() {
    let cell = label("{3,7}{1,2}{5,6}{4,8}{9}", 9);
    let facets = cell.facets();
    assert!(facets.contains(&label("{7}{3}{1,2}{5,6}{4,8}{9}", 9)));
    assert!(facets.contains(&label("{3}{7}{1,2}{5,6}{4,8}{9}", 9)));
    assert!(label("{7}{3}{1}{2}{5,6}{4,8}{9}", 9).is_face_of(&cell));
    assert!(!label("{7}{3}{5,6}{1,2}{8}{4,9}", 9).is_face_of(&cell));
    assert_eq!(cell.dim(), 4);
    assert_eq!(label("{7}{3}{5,6}{1}{8}{2}{4,9}", 9).dim(), 2);
}

/// Whether every block of each label is short for `l`.
fn all_cells(l: &Linkage, labels: &[&CellLabel]) -> bool {
    labels.iter().all(|c| c.validate(l).is_ok())
}

#[test]
fn listed_pairings_hold_whenever_the_cells_exist() {
    let cases =
        [("{5}{6}{3}{2}{1}{8,4,7}", "{5,6}{3}{2}{1}{8,4,7}"), ("{7}{5}{3}{6,2}{1}{8,4}", "{7}{5}{3}{2}{6}{1}{8,4}")];
    for (cell, partner) in cases {
        let (cell, partner) = (label(cell, 8), label(partner, 8));
        let mut witnesses = 0;
        for l in generic_linkages(8, 5) {
            if !all_cells(&l, &[&cell, &partner]) {
                continue;
            }
            witnesses += 1;
            assert_eq!(pair_search(&l, &cell).map(|(p, _)| p), Some(partner.clone()), "{cell} on {}", l.input_text());
            assert_eq!(
                pair_search(&l, &partner).map(|(p, _)| p),
                Some(cell.clone()),
                "{partner} on {}",
                l.input_text()
            );
        }
        assert!(witnesses > 0, "{cell}");
    }
}

/// With sorted lengths `{1,2,4,6,8}` outweighs `{3,5,7}`, so labels with that
/// n-block are never cells. The pairing never looks at the n-block's length,
/// so the rule still applies to them as labels.
#[test]
fn labels_with_a_long_nset_follow_the_same_rule() {
    let nset = Subset::from_bits(0).with(1).with(2).with(4).with(6).with(8);
    for l in generic_linkages(8, 6) {
        assert!(!l.is_short(nset));
    }
    let l = Linkage::parse("1,1,1,1,1,1,1,3/2").unwrap();
    let cell = label("{7,5}{3}{8,1,2,4,6}", 8);
    let partner = label("{5}{7}{3}{8,1,2,4,6}", 8);
    assert_eq!(pair_search(&l, &cell).map(|(p, _)| p), Some(partner.clone()));
    assert_eq!(pair_search(&l, &partner).map(|(p, _)| p), Some(cell));
    let critical = label("{7}{5}{3}{8,1,2,4,6}", 8);
    assert!(pair_search(&l, &critical).is_none());
    assert!(matches!(critical_pattern(&l, &critical), Some(CriticalClass::Type1 { .. })));
}

#[test]
fn second_shape_is_critical_exactly_when_the_block_is_prelong() {
    let cell = label("{5}{3}{6,4}{1}{7,2}", 7);
    let (mut prelong, mut not_prelong) = (0, 0);
    for l in generic_linkages(7, 6).filter(|l| cell.validate(l).is_ok()) {
        let expected = l.is_prelong(Subset::singleton(4).with(6), 3).unwrap();
        assert_eq!(pair_search(&l, &cell).is_none(), expected, "{}", l.input_text());
        if expected {
            prelong += 1;
        } else {
            not_prelong += 1;
        }
    }
    assert!(prelong > 0 && not_prelong > 0);
}

#[test]
fn sphere_has_two_critical_cells() {
    for n in 4..=8 {
        let lengths = std::iter::repeat_n("1", n - 1).chain([&*format!("{}/2", 2 * n - 3)]).join(",");
        let (cx, f) = setup(&lengths);
        let descending = (1..n).rev().map(|e| format!("{{{e}}}")).join("");
        let middle = (2..n).rev().join(",");
        let mut expected = vec![Vec::<String>::new(); n - 2];
        expected[0].push(format!("{descending}{{{n}}}"));
        expected[n - 3].push(format!("{{1}}{{{middle}}}{{{n}}}"));
        let got: Vec<Vec<String>> = critical_labels(&cx, &f)
            .into_iter()
            .map(|v| v.into_iter().map(|s| label(&s, n).to_string()).collect())
            .collect();
        let want: Vec<Vec<String>> =
            expected.into_iter().map(|v| v.into_iter().map(|s| label(&s, n).to_string()).collect()).collect();
        assert_eq!(got, want, "n = {n}");
    }
}

#[test]
fn two_tori_critical_cells_start_with_the_two_long_entries() {
    for n in 5..=8 {
        let eps = format!("1/{}", 10 * n);
        let lengths = std::iter::repeat_n(eps.as_str(), n - 3).chain(["1", "1", "1"]).join(",");
        let (cx, f) = setup(&lengths);
        let l = cx.linkage();
        for c in cx.ids().filter(|&c| f.is_critical(c)) {
            let blocks = cx.label(c).blocks();
            let head = (blocks[0], blocks[1]);
            let class = critical_pattern(l, cx.label(c)).unwrap();
            let (first, second) = if class.is_type1() { (n - 1, n - 2) } else { (n - 2, n - 1) };
            assert_eq!(head, (Subset::singleton(first), Subset::singleton(second)), "{}", cx.label(c));
            let tail: Vec<Subset> = blocks[2..blocks.len() - 1].to_vec();
            assert!(tail.iter().all(|b| b.is_singleton()));
            assert!(tail.windows(2).all(|w| w[0].min_entry() > w[1].min_entry()));
        }
        let counts = f.critical_counts(&cx);
        assert_eq!(counts, linkage_morse::homology::betti_from_short_sets(l).0, "n = {n}");
    }
}

#[test]
fn no_paths_from_the_first_shape_to_the_second() {
    for n in 5..=6 {
        for l in generic_linkages(n, 5) {
            let cx = Complex::new(&l).unwrap();
            let f = VectorField::build(&cx).unwrap();
            for beta in cx.ids().filter(|&c| f.is_critical(c) && cx.dim(c) > 0) {
                if !critical_pattern(&l, cx.label(beta)).unwrap().is_type1() {
                    continue;
                }
                for (alpha, count) in path_counts_from(&cx, &f, beta).unwrap() {
                    if count.count > 0 && f.is_critical(alpha) && cx.dim(alpha) + 1 == cx.dim(beta) {
                        assert!(critical_pattern(&l, cx.label(alpha)).unwrap().is_type1());
                    }
                }
            }
        }
    }
}

#[test]
fn connected_pairs_are_joined_by_one_path_opening_with_a_backward_split() {
    let mut pairs = 0;
    for n in 5..=6 {
        for l in generic_linkages(n, 5) {
            let cx = Complex::new(&l).unwrap();
            let f = VectorField::build(&cx).unwrap();
            for pair in connected_pairs(&cx, &f).unwrap() {
                let path = unique_path(&cx, &f, &pair, CAP).unwrap();
                assert!(starts_with_backward_split(&cx, &path, pair.j));
                pairs += 1;
            }
        }
    }
    assert!(pairs > 100);
    let (cx, f) = setup("1,1,1,1,1,1,1");
    let found = connected_pairs(&cx, &f).unwrap();
    assert_eq!(found.len(), 84);
    for pair in &found {
        let path = unique_path(&cx, &f, pair, CAP).unwrap();
        assert!(starts_with_backward_split(&cx, &path, pair.j));
    }
}

fn type2_parts(l: &Linkage, c: &CellLabel) -> Option<(Vec<usize>, usize, Subset, Subset)> {
    match critical_pattern(l, c)? {
        CriticalClass::Type2 { spade, k, prelong, nset, .. } => Some((spade, k, prelong, nset)),
        CriticalClass::Type1 { .. } => None,
    }
}

#[test]
fn changing_prelong_set_with_leading_entry_from_the_front() {
    let (cx, f) = setup("1,1,2,2,2,3");
    let l = cx.linkage();
    let beta = cx.find("{3}{1}{2,4,5}{6}").unwrap();
    let alpha = cx.find("{3}{4,5}{2}{1}{6}").unwrap();
    assert!(f.is_critical(beta) && f.is_critical(alpha));
    let (spade1, k1, i1, nset1) = type2_parts(l, cx.label(beta)).unwrap();
    let (_, k2, i2, _) = type2_parts(l, cx.label(alpha)).unwrap();
    assert_ne!(i1, i2);
    assert_ne!(k1, k2);
    assert!(spade1.contains(&k2));
    assert!(!nset1.contains(k2));
    let paths = enumerate_paths(&cx, &f, beta, alpha, CAP).unwrap();
    let shown: Vec<Vec<String>> = paths.iter().map(|p| p.labels(&cx)).collect();
    let expected = [
        vec![
            "{3}{1}{2,4,5}{6}",
            "{3}{1}{2}{4,5}{6}",
            "{3}{1,2}{4,5}{6}",
            "{3}{2}{1}{4,5}{6}",
            "{3}{2}{1,4,5}{6}",
            "{3}{2}{4,5}{1}{6}",
            "{3}{2,4,5}{1}{6}",
            "{3}{4,5}{2}{1}{6}",
        ],
        vec![
            "{3}{1}{2,4,5}{6}",
            "{3}{1}{4,5}{2}{6}",
            "{3}{1,4,5}{2}{6}",
            "{3}{4,5}{1}{2}{6}",
            "{3}{4,5}{1,2}{6}",
            "{3}{4,5}{2}{1}{6}",
        ],
    ];
    assert_eq!(shown.len(), 2);
    for e in expected {
        let e: Vec<String> = e.into_iter().map(String::from).collect();
        assert!(shown.contains(&e), "{e:?}");
    }
    assert_eq!(count_paths(&cx, &f, beta, alpha).unwrap().count, 2);
}

#[test]
fn changing_prelong_set_moves_a_front_or_nset_entry_before_it() {
    let (mut from_nset, mut from_front) = (0, 0);
    for n in 5..=6 {
        for l in generic_linkages(n, 5) {
            let cx = Complex::new(&l).unwrap();
            let f = VectorField::build(&cx).unwrap();
            for beta in cx.ids().filter(|&c| f.is_critical(c) && cx.dim(c) > 0) {
                let Some((spade1, k1, i1, nset1)) = type2_parts(&l, cx.label(beta)) else { continue };
                for (alpha, count) in path_counts_from(&cx, &f, beta).unwrap() {
                    if count.count == 0 || !f.is_critical(alpha) || cx.dim(alpha) + 1 != cx.dim(beta) {
                        continue;
                    }
                    let Some((_, k2, i2, _)) = type2_parts(&l, cx.label(alpha)) else { continue };
                    if i1 == i2 {
                        continue;
                    }
                    assert_ne!(k1, k2);
                    if nset1.contains(k2) {
                        from_nset += 1;
                    } else {
                        assert!(spade1.contains(&k2), "{} -> {}", cx.label(beta), cx.label(alpha));
                        assert!(!count.parity, "{} -> {}", cx.label(beta), cx.label(alpha));
                        from_front += 1;
                    }
                }
            }
        }
    }
    assert!(from_nset > 0 && from_front > 0);
}
