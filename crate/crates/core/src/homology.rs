//! Mod-2 cellular homology, the short-set Betti formula, the bijection between
//! short sets and surviving critical cells, and the Morse differential.

use std::fmt;

use serde::Serialize;

use crate::complex::{CellId, Complex};
use crate::error::{Error, Result};
use crate::label::CellLabel;
use crate::linkage::{Linkage, Subset};
use crate::matching::VectorField;
use crate::paths::path_counts_from;

/// Dense matrix over the two-element field, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// XORs row `src` into row `dst`.
    fn add_row(&mut self, src: usize, dst: usize) {
        let w = self.words;
        let (s, d) = (src * w, dst * w);
        if s < d {
            let (a, b) = self.data.split_at_mut(d);
            b[..w].iter_mut().zip(&a[s..s + w]).for_each(|(x, y)| *x ^= y);
        } else {
            let (a, b) = self.data.split_at_mut(s);
            a[d..d + w].iter_mut().zip(&b[..w]).for_each(|(x, y)| *x ^= y);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y) = self.data.split_at_mut(hi * w);
        x[lo * w..lo * w + w].swap_with_slice(&mut y[..w]);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions of the set entries, row by row.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).filter(move |&c| self.get(r, c)).map(move |c| (r, c)))
    }

    /// Rank by Gaussian elimination, pivoting on the lowest available column
    /// and then the lowest available row.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let (word, bit) = (c / 64, c % 64);
            let Some(p) = (rank..m.rows).find(|&r| m.data[r * m.words + word] >> bit & 1 == 1) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in rank + 1..m.rows {
                if m.data[r * m.words + word] >> bit & 1 == 1 {
                    m.add_row(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        let w = out.words;
        for r in 0..self.rows {
            for k in (0..self.cols).filter(|&k| self.get(r, k)) {
                let src = other.row(k);
                out.data[r * w..(r + 1) * w].iter_mut().zip(src).for_each(|(x, y)| *x ^= y);
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(32) {
            let line: String = (0..self.cols.min(64)).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Boundary map `∂_k` as sorted columns of facet indices, both sides indexed
/// locally within their dimension.
#[derive(Clone, Debug)]
pub struct SparseBoundary {
    pub dim: usize,
    pub rows: usize,
    pub columns: Vec<Vec<u32>>,
}

fn first_id(cx: &Complex, k: usize) -> u32 {
    cx.cells_of_dim(k).next().map_or(0, |c| c.0)
}

/// `∂_k` for `k = 1..=top_dim`, in sparse column form.
pub fn sparse_boundaries(cx: &Complex) -> Vec<SparseBoundary> {
    (1..=cx.top_dim())
        .map(|k| {
            let lo = first_id(cx, k - 1);
            let columns = cx
                .cells_of_dim(k)
                .map(|c| {
                    let mut col: Vec<u32> = cx.facets(c).iter().map(|f| f.0 - lo).collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            SparseBoundary { dim: k, rows: cx.count_of_dim(k - 1), columns }
        })
        .collect()
}

/// Dense `∂_k` for `k = 1..=top_dim`: entry `(facet, cell)` is 1 exactly on
/// the facet relation. Entry `i` of the result is `∂_{i+1}`.
pub fn boundary_matrices_mod2(cx: &Complex) -> Vec<BitMatrix> {
    sparse_boundaries(cx).iter().map(to_dense).collect()
}

fn to_dense(b: &SparseBoundary) -> BitMatrix {
    let mut m = BitMatrix::zeros(b.rows, b.columns.len());
    for (c, col) in b.columns.iter().enumerate() {
        for &r in col {
            m.flip(r as usize, c);
        }
    }
    m
}

/// Symmetric difference of two sorted index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Column reduction of one boundary map. Columns listed in `skip` are known
/// to reduce to zero. Returns the pivot rows of the nonzero reduced columns.
fn reduce_columns(b: &SparseBoundary, skip: &[bool]) -> Vec<u32> {
    const NONE: u32 = u32::MAX;
    let mut owner = vec![NONE; b.rows];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); b.columns.len()];
    let mut pivots = Vec::new();
    for (j, col) in b.columns.iter().enumerate() {
        if skip.get(j).copied().unwrap_or(false) {
            continue;
        }
        let mut cur = col.clone();
        while let Some(&low) = cur.last() {
            let o = owner[low as usize];
            if o == NONE {
                owner[low as usize] = j as u32;
                pivots.push(low);
                break;
            }
            cur = xor_sorted(&cur, &reduced[o as usize]);
        }
        reduced[j] = cur;
    }
    pivots
}

/// Ranks of `∂_1..=∂_top` by sparse column reduction, working downward in
/// dimension so pivot rows of `∂_{k+1}` clear columns of `∂_k`.
pub fn sparse_ranks(cx: &Complex) -> Vec<usize> {
    let maps = sparse_boundaries(cx);
    let mut ranks = vec![0; maps.len()];
    let mut skip: Vec<bool> = Vec::new();
    for (i, b) in maps.iter().enumerate().rev() {
        let pivots = reduce_columns(b, &skip);
        ranks[i] = pivots.len();
        skip = vec![false; b.rows];
        for p in pivots {
            skip[p as usize] = true;
        }
    }
    ranks
}

pub fn dense_ranks(cx: &Complex) -> Vec<usize> {
    boundary_matrices_mod2(cx).iter().map(BitMatrix::rank).collect()
}

/// How ranks are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMethod {
    Dense,
    Sparse,
    /// Dense while every boundary matrix has at most `DENSE_LIMIT` entries.
    Auto,
}

pub const DENSE_LIMIT: usize = 1 << 24;

fn dense_fits(cx: &Complex) -> bool {
    (1..=cx.top_dim()).all(|k| cx.count_of_dim(k) * cx.count_of_dim(k - 1) <= DENSE_LIMIT)
}

/// Betti numbers `b_0..=b_{n-3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn euler(&self) -> i64 {
        self.0.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn betti_mod2(cx: &Complex) -> BettiVector {
    betti_mod2_with(cx, RankMethod::Auto)
}

/// `b_k = c_k − rank ∂_k − rank ∂_{k+1}`.
pub fn betti_mod2_with(cx: &Complex, method: RankMethod) -> BettiVector {
    let ranks = match method {
        RankMethod::Dense => dense_ranks(cx),
        RankMethod::Sparse => sparse_ranks(cx),
        RankMethod::Auto if dense_fits(cx) => dense_ranks(cx),
        RankMethod::Auto => sparse_ranks(cx),
    };
    let rank = |k: usize| if k == 0 || k > ranks.len() { 0 } else { ranks[k - 1] };
    BettiVector((0..=cx.top_dim()).map(|k| cx.count_of_dim(k) - rank(k) - rank(k + 1)).collect())
}

/// `b_k = a_k + a_{n−3−k}` where `a_k` counts short sets of size `k+1`
/// containing `n`.
pub fn betti_from_short_sets(linkage: &Linkage) -> BettiVector {
    let a = linkage.short_set_profile();
    let top = a.len() - 1;
    BettiVector((0..=top).map(|k| a[k] + a[top - k]).collect())
}

/// First `k` with `∂_k ∂_{k+1} ≠ 0`, if any.
pub fn boundary_squared_failure(cx: &Complex) -> Option<usize> {
    if dense_fits(cx) {
        let maps = boundary_matrices_mod2(cx);
        return maps.windows(2).position(|w| !w[0].mul(&w[1]).is_zero()).map(|i| i + 1);
    }
    let maps = sparse_boundaries(cx);
    for pair in maps.windows(2) {
        let (lower, upper) = (&pair[0], &pair[1]);
        for col in &upper.columns {
            let mut acc: Vec<u32> = Vec::new();
            for &f in col {
                acc = xor_sorted(&acc, &lower.columns[f as usize]);
            }
            if !acc.is_empty() {
                return Some(lower.dim);
            }
        }
    }
    None
}

/// The two critical cells attached to a short set `J` containing `n`: the
/// first-type cell with n-block `J`, and the second-type cell
/// `(♠ {j} I ♣ {n,*})` where `I` collects the largest entries outside `J` as
/// long as it stays short, `j` is the next one, and the entries of `J`
/// other than `n` become decreasing singletons split around `j`.
pub fn bijection_map(linkage: &Linkage, j_set: Subset) -> Result<(CellLabel, CellLabel)> {
    let n = linkage.n();
    if !j_set.contains(n) {
        return Err(Error::MissingN(j_set.to_string()));
    }
    if !j_set.is_subset_of(linkage.full()) || linkage.is_long(j_set) {
        return Err(Error::NotShort(j_set.to_string()));
    }
    let rest = j_set.without(n);
    let complement = linkage.full().minus(j_set);

    let mut type1: Vec<Subset> = complement.iter().rev().map(Subset::singleton).collect();
    type1.push(j_set);

    let mut prelong = Subset::EMPTY;
    let mut remaining = complement.iter().rev();
    let j = loop {
        let x = remaining.next().expect("the complement of a short set is long");
        if linkage.is_short(prelong.with(x)) {
            prelong = prelong.with(x);
        } else {
            break x;
        }
    };
    let nset = complement.minus(prelong).without(j).with(n);
    let mut type2: Vec<Subset> = rest.iter().rev().filter(|&s| s > j).map(Subset::singleton).collect();
    type2.push(Subset::singleton(j));
    type2.push(prelong);
    type2.extend(rest.iter().rev().filter(|&s| s < j).map(Subset::singleton));
    type2.push(nset);
    Ok((CellLabel::from_blocks(type1), CellLabel::from_blocks(type2)))
}

/// Mod-2 Morse differential of an acyclic field: entry `i` maps critical
/// `(i+1)`-cells (columns) to critical `i`-cells (rows), each entry the
/// parity of the number of gradient paths.
pub fn morse_differential_mod2(cx: &Complex, field: &VectorField) -> Result<Vec<BitMatrix>> {
    let critical = field.critical_cells(cx);
    let mut out = Vec::new();
    for k in 1..critical.len() {
        let (lower, upper) = (&critical[k - 1], &critical[k]);
        let mut m = BitMatrix::zeros(lower.len(), upper.len());
        if !lower.is_empty() {
            for (c, &beta) in upper.iter().enumerate() {
                let counts = path_counts_from(cx, field, beta)?;
                for (r, alpha) in lower.iter().enumerate() {
                    if counts.get(alpha).is_some_and(|p| p.parity) {
                        m.set(r, c, true);
                    }
                }
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Fails with `NonzeroDifferential` naming the first odd path count.
pub fn check_zero_differential(cx: &Complex, field: &VectorField) -> Result<()> {
    let critical = field.critical_cells(cx);
    for (i, m) in morse_differential_mod2(cx, field)?.iter().enumerate() {
        if let Some((r, c)) = m.ones().next() {
            let beta: CellId = critical[i + 1][c];
            let alpha: CellId = critical[i][r];
            return Err(Error::NonzeroDifferential(format!(
                "odd number of paths from {} to {}",
                cx.label(beta),
                cx.label(alpha)
            )));
        }
    }
    Ok(())
}
