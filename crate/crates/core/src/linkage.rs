//! Linkages and their shortness predicates.
//!
//! Entries are numbered `1..=n` after sorting the lengths in non-decreasing
//! order, so entry `n` is always a longest edge. A [`Subset`] stores entry
//! `e` in bit `e`; bit 0 is unused.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Hard upper bound on the number of edges (the shortness table has `2^n`
/// entries).
pub const MAX_EDGES: usize = 24;

/// A set of entries of `[n]`, as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(entry: usize) -> Self {
        debug_assert!((1..32).contains(&entry));
        Subset(1 << entry)
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        Subset(((1u64 << (n + 1)) - 2) as u32)
    }

    pub fn contains(self, entry: usize) -> bool {
        entry < 32 && self.0 >> entry & 1 == 1
    }

    pub fn with(self, entry: usize) -> Self {
        Subset(self.0 | 1 << entry)
    }

    pub fn without(self, entry: usize) -> Self {
        Subset(self.0 & !(1 << entry))
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn minus(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.0.is_power_of_two()
    }

    pub fn min_entry(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max_entry(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl DoubleEndedIterator<Item = usize> + Clone {
        (0..32).filter(move |&e| self.contains(e))
    }

    /// Nonempty proper subsets, in increasing bitmask order.
    pub fn proper_subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut sub = 0u32;
        std::iter::from_fn(move || {
            sub = sub.wrapping_sub(full) & full;
            (sub != full && sub != 0).then_some(Subset(sub))
        })
    }

    /// Compares the ascending member lists lexicographically.
    pub fn cmp_members(self, other: Subset) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Equal;
        }
        let d = diff.trailing_zeros();
        // The lists agree below d; the one holding d either meets a larger
        // element in the other list (and is smaller) or outlives it.
        let (other_bits, ord) = if self.0 >> d & 1 == 1 { (other.0, Less) } else { (self.0, Greater) };
        if other_bits >> d == 0 {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(Subset::EMPTY, Subset::with)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Parses a comma-separated list of positive rationals such as `1,1,1,3/2`.
/// Whitespace is ignored.
pub fn parse_lengths(text: &str) -> Result<Vec<BigRational>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    compact.split(',').map(parse_rational).collect()
}

fn parse_rational(token: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{token}` is not of the form p or p/q"));
    let (sign, body) = match token.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, token.strip_prefix('+').unwrap_or(token)),
    };
    let digits = |s: &str| -> Result<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str(s).map_err(|_| bad())
    };
    let (p, q) = match body.split_once('/') {
        Some((p, q)) => (digits(p)?, digits(q)?),
        None => (digits(body)?, BigInt::one()),
    };
    if q.is_zero() {
        return Err(Error::Parse(format!("`{token}` has a zero denominator")));
    }
    Ok(BigRational::new(p * sign, q))
}

/// A generic polygonal linkage with lengths sorted non-decreasingly.
#[derive(Clone)]
pub struct Linkage {
    lengths: Vec<BigRational>,
    input: Vec<BigRational>,
    /// `entry_of_input[i]` is the entry (1-based) of the i-th input edge.
    entry_of_input: Vec<usize>,
    perimeter: BigRational,
    /// Indexed by `subset.bits() >> 1`.
    short: Vec<bool>,
}

impl fmt::Debug for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Linkage")
            .field("lengths", &self.lengths_text())
            .field("perimeter", &self.perimeter.to_string())
            .finish()
    }
}

impl Linkage {
    /// Validates and sorts a list of edge lengths given in user order.
    pub fn new(input: Vec<BigRational>) -> Result<Self> {
        let n = input.len();
        if n < 3 {
            return Err(Error::TooFewEdges(n));
        }
        if n > MAX_EDGES {
            return Err(Error::TooManyEdges(n));
        }
        if let Some(i) = input.iter().position(|l| !l.is_positive()) {
            return Err(Error::NonPositiveLength { edge: i + 1, value: input[i].to_string() });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| input[a].cmp(&input[b]).then(a.cmp(&b)));
        let lengths: Vec<BigRational> = order.iter().map(|&i| input[i].clone()).collect();
        let mut entry_of_input = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            entry_of_input[i] = pos + 1;
        }
        let perimeter: BigRational = lengths.iter().sum();

        let largest = &lengths[n - 1];
        if largest * BigInt::from(2) >= perimeter {
            return Err(Error::EmptyModuliSpace { edge: order[n - 1] + 1 });
        }

        // Common denominator so subset sums are integers.
        let denom = lengths.iter().fold(BigInt::one(), |acc, l| acc.lcm(l.denom()));
        let weights: Vec<BigInt> = lengths.iter().map(|l| l.numer() * (&denom / l.denom())).collect();
        let total: BigInt = weights.iter().sum();

        // Gray-code walk over all 2^n subsets; `code` holds entries at bits 0..n.
        let mut short = vec![false; 1 << n];
        let mut sum = BigInt::zero();
        let mut witness: Option<u32> = None;
        let mut code: u32 = 0;
        for step in 0u32..(1u32 << n) {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                code ^= 1 << bit;
                if code >> bit & 1 == 1 {
                    sum += &weights[bit];
                } else {
                    sum -= &weights[bit];
                }
            }
            let doubled = &sum * 2;
            short[code as usize] = doubled < total;
            if doubled == total && witness.is_none_or(|w| code < w) {
                witness = Some(code);
            }
        }
        let linkage = Linkage { lengths, input, entry_of_input, perimeter, short };
        if let Some(code) = witness {
            let subset = Subset::from_bits(code << 1);
            return Err(Error::DegenerateLinkage { subset: linkage.to_input_indices(subset).to_string() });
        }
        Ok(linkage)
    }

    /// Parses and validates the comma-separated text form.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_lengths(text)?)
    }

    /// Convenience constructor for integer lengths.
    pub fn from_integers(lengths: &[i64]) -> Result<Self> {
        Self::new(lengths.iter().map(|&l| BigRational::from_integer(l.into())).collect())
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    /// Length of entry `e` (1-based, sorted order).
    pub fn length(&self, entry: usize) -> &BigRational {
        &self.lengths[entry - 1]
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }

    pub fn input_lengths(&self) -> &[BigRational] {
        &self.input
    }

    pub fn perimeter(&self) -> &BigRational {
        &self.perimeter
    }

    /// Entry assigned to the `i`-th input edge (both 1-based).
    pub fn entry_of_input(&self, input_index: usize) -> usize {
        self.entry_of_input[input_index - 1]
    }

    /// Input position (1-based) of entry `e`.
    pub fn input_of_entry(&self, entry: usize) -> usize {
        self.entry_of_input.iter().position(|&e| e == entry).map(|i| i + 1).expect("entry in range")
    }

    /// `permutation[e - 1]` is the input position of entry `e`.
    pub fn permutation(&self) -> Vec<usize> {
        (1..=self.n()).map(|e| self.input_of_entry(e)).collect()
    }

    fn to_input_indices(&self, subset: Subset) -> Subset {
        subset.iter().map(|e| self.input_of_entry(e)).collect()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n())
    }

    pub fn lengths_text(&self) -> String {
        join(&self.lengths)
    }

    pub fn input_text(&self) -> String {
        join(&self.input)
    }

    /// Exact length sum of a subset.
    pub fn subset_sum(&self, subset: Subset) -> BigRational {
        subset.iter().map(|e| self.length(e)).sum()
    }

    /// Sum strictly below half the perimeter. The empty set is short.
    pub fn is_short(&self, subset: Subset) -> bool {
        debug_assert!(subset.is_subset_of(self.full()));
        self.short[(subset.bits() >> 1) as usize]
    }

    pub fn is_long(&self, subset: Subset) -> bool {
        !self.is_short(subset)
    }

    /// `subset` is short and becomes long once `entry` is added.
    pub fn is_prelong(&self, subset: Subset, entry: usize) -> Result<bool> {
        if subset.contains(entry) {
            return Err(Error::MemberOverlap { entry });
        }
        Ok(self.is_short(subset) && self.is_long(subset.with(entry)))
    }

    /// Short subsets containing `n`, in increasing bitmask order.
    pub fn short_sets_with_n(&self) -> impl Iterator<Item = Subset> + '_ {
        let n = self.n();
        let rest = self.full().without(n).bits();
        (0..=rest)
            .filter(move |m| m & !rest == 0)
            .map(move |m| Subset::from_bits(m).with(n))
            .filter(|s| self.is_short(*s))
    }

    /// `a[k]` counts short sets of size `k + 1` containing `n`, for
    /// `k = 0..=n-3`.
    pub fn short_set_profile(&self) -> Vec<usize> {
        let n = self.n();
        let mut profile = vec![0; n - 2];
        for s in self.short_sets_with_n() {
            // A short set containing n has at most n-2 elements: its
            // complement is long and so has at least two members.
            profile[s.len() - 1] += 1;
        }
        profile
    }
}

fn join(values: &[BigRational]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Serializable summary of a linkage.
#[derive(Debug, Clone, Serialize)]
pub struct LinkageSummary {
    pub input: Vec<String>,
    pub sorted: Vec<String>,
    /// Input position (1-based) of each sorted entry.
    pub permutation: Vec<usize>,
    pub perimeter: String,
}

impl From<&Linkage> for LinkageSummary {
    fn from(l: &Linkage) -> Self {
        LinkageSummary {
            input: l.input.iter().map(|v| v.to_string()).collect(),
            sorted: l.lengths.iter().map(|v| v.to_string()).collect(),
            permutation: l.permutation(),
            perimeter: l.perimeter.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(entries: &[usize]) -> Subset {
        entries.iter().copied().collect()
    }

    fn equilateral(n: usize) -> Linkage {
        Linkage::from_integers(&vec![1; n]).unwrap()
    }

    #[test]
    fn parses_integer_and_fraction_tokens() {
        let v = parse_lengths(" 1, 1,1 ,3/2").unwrap();
        assert_eq!(v[3], BigRational::new(3.into(), 2.into()));
        assert!(parse_lengths("1,,2").is_err());
        assert!(parse_lengths("1,2/0,3").is_err());
        assert!(parse_lengths("1.5,1,1").is_err());
    }

    #[test]
    fn equilateral_seven_is_valid() {
        let l = equilateral(7);
        assert_eq!(l.n(), 7);
        assert_eq!(l.perimeter(), &BigRational::from_integer(7.into()));
    }

    #[test]
    fn rejects_bad_linkages() {
        assert_eq!(Linkage::parse("1,1,1,1").unwrap_err(), Error::DegenerateLinkage { subset: "{1,2}".into() });
        assert!(matches!(Linkage::parse("1,1,5"), Err(Error::EmptyModuliSpace { edge: 3 })));
        assert!(matches!(Linkage::parse("1,1"), Err(Error::TooFewEdges(2))));
        assert!(matches!(Linkage::parse("1,0,1"), Err(Error::NonPositiveLength { edge: 2, .. })));
        assert!(matches!(Linkage::parse("1,-1,1"), Err(Error::NonPositiveLength { .. })));
    }

    #[test]
    fn sorts_and_records_permutation() {
        let l = Linkage::parse("5,1,2,4,4,4,5,6").unwrap();
        assert_eq!(l.lengths_text(), "1,2,4,4,4,5,5,6");
        assert_eq!(l.entry_of_input(1), 6);
        assert_eq!(l.entry_of_input(2), 1);
        assert_eq!(l.input_of_entry(8), 8);
        assert_eq!(l.permutation(), vec![2, 3, 4, 5, 6, 1, 7, 8]);
    }

    #[test]
    fn shortness_examples() {
        let l = equilateral(7);
        assert!(l.is_short(set(&[1, 2, 7])));
        assert!(!l.is_short(set(&[4, 5, 6, 7])));
        assert!(l.is_short(Subset::EMPTY));
    }

    #[test]
    fn prelong_examples() {
        let l = equilateral(7);
        assert!(l.is_prelong(set(&[4, 5, 6]), 1).unwrap());
        assert!(!l.is_prelong(set(&[4, 5]), 1).unwrap());
        assert!(!l.is_prelong(set(&[4, 5, 6, 7]), 1).unwrap());
        assert_eq!(l.is_prelong(set(&[1, 4]), 1), Err(Error::MemberOverlap { entry: 1 }));
    }

    #[test]
    fn profile_examples() {
        assert_eq!(equilateral(7).short_set_profile(), vec![1, 6, 15, 0, 0]);
        assert_eq!(Linkage::parse("1,1,1,1,7/2").unwrap().short_set_profile(), vec![1, 0, 0]);
        assert_eq!(Linkage::parse("1,1,1,3/2").unwrap().short_set_profile(), vec![1, 0]);
    }

    #[test]
    fn subset_helpers() {
        let s = set(&[2, 5, 7]);
        assert_eq!(s.to_string(), "{2,5,7}");
        assert_eq!(s.min_entry(), Some(2));
        assert_eq!(s.max_entry(), Some(7));
        assert_eq!(s.proper_subsets().count(), 6);
        assert_eq!(Subset::full(4), set(&[1, 2, 3, 4]));
        use std::cmp::Ordering::*;
        assert_eq!(set(&[1]).cmp_members(set(&[1, 2])), Less);
        assert_eq!(set(&[1, 3]).cmp_members(set(&[1, 2])), Greater);
        assert_eq!(set(&[2]).cmp_members(set(&[1, 5])), Greater);
        assert_eq!(set(&[1, 2, 3]).cmp_members(set(&[1, 2])), Greater);
    }
}
