//! Selectors, conjunctive conditions and row match sets.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dataset::{Dataset, Schema};
use crate::error::{Error, Result};

/// One attribute-value test. Ordered by attribute, then value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Selector {
    pub attribute: usize,
    pub value: usize,
}

impl Selector {
    pub fn new(attribute: usize, value: usize) -> Self {
        Selector { attribute, value }
    }

    pub fn matches(&self, row: &[usize]) -> bool {
        row.get(self.attribute) == Some(&self.value)
    }
}

/// A conjunction of selectors over pairwise-distinct attributes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Condition {
    selectors: Vec<Selector>,
}

impl Condition {
    pub fn new(mut selectors: Vec<Selector>) -> Result<Self> {
        if selectors.is_empty() {
            return Err(Error::InvalidArgument("a condition needs at least one selector".into()));
        }
        selectors.sort_unstable();
        if selectors.windows(2).any(|w| w[0].attribute == w[1].attribute) {
            return Err(Error::InvalidArgument(
                "selectors of a condition must use distinct attributes".into(),
            ));
        }
        Ok(Condition { selectors })
    }

    /// Caller guarantees the selectors are sorted with distinct attributes.
    pub(crate) fn from_sorted(selectors: Vec<Selector>) -> Self {
        debug_assert!(selectors.windows(2).all(|w| w[0].attribute < w[1].attribute));
        Condition { selectors }
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.selectors
    }

    pub fn len(&self) -> usize {
        self.selectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selectors.is_empty()
    }

    pub fn matches(&self, row: &[usize]) -> bool {
        self.selectors.iter().all(|s| s.matches(row))
    }

    /// Selector-set inclusion.
    pub fn is_subset_of(&self, other: &Condition) -> bool {
        is_sorted_subset(&self.selectors, &other.selectors)
    }

    /// `IF attr1 is val1 AND attr2 is val2`
    pub fn render(&self, schema: &Schema) -> String {
        let mut out = String::from("IF ");
        for (i, s) in self.selectors.iter().enumerate() {
            if i > 0 {
                out.push_str(" AND ");
            }
            let attribute = &schema.attributes[s.attribute];
            let _ = write!(
                out,
                "{} is {}",
                attribute.name,
                attribute.value_name(s.value).unwrap_or("?")
            );
        }
        out
    }
}

pub(crate) fn is_sorted_subset(small: &[Selector], large: &[Selector]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    small.iter().all(|s| it.any(|l| l == s))
}

/// A set of row indices in `[0, universe)`, one bit per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchSet {
    words: Vec<u64>,
    universe: usize,
}

impl MatchSet {
    pub fn empty(universe: usize) -> Self {
        MatchSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = MatchSet {
            words: vec![u64::MAX; universe.div_ceil(64)],
            universe,
        };
        if !universe.is_multiple_of(64) {
            if let Some(last) = set.words.last_mut() {
                *last = (1u64 << (universe % 64)) - 1;
            }
        }
        set
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = MatchSet::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "row {i} outside universe {}", self.universe);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn intersection(&self, other: &MatchSet) -> MatchSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// Writes `self ∩ other` into `out` without allocating.
    pub fn intersection_into(&self, other: &MatchSet, out: &mut MatchSet) {
        debug_assert_eq!(self.universe, other.universe);
        out.universe = self.universe;
        out.words.clear();
        out.words
            .extend(self.words.iter().zip(&other.words).map(|(a, b)| a & b));
    }

    pub fn intersect_with(&mut self, other: &MatchSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &MatchSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &MatchSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersects(&self, other: &MatchSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersection_len(&self, other: &MatchSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &MatchSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

/// Distinct selectors occurring in the given rows, in selector order.
pub fn selectors_present(d: &Dataset, rows: &MatchSet) -> Vec<Selector> {
    let mut seen: Vec<Vec<bool>> = d
        .schema()
        .attributes
        .iter()
        .map(|a| vec![false; a.values.len()])
        .collect();
    for r in rows.iter() {
        for (a, &v) in d.row(r).iter().enumerate() {
            seen[a][v] = true;
        }
    }
    seen.iter()
        .enumerate()
        .flat_map(|(a, values)| {
            values
                .iter()
                .enumerate()
                .filter(|(_, &s)| s)
                .map(move |(v, _)| Selector::new(a, v))
        })
        .collect()
}

/// Every size-`n_c` combination of `selectors` with pairwise-distinct
/// attributes, in lexicographic order of selector positions.
pub fn enumerate_conditions(selectors: &[Selector], n_c: usize) -> Conditions<'_> {
    Conditions {
        pool: selectors,
        size: n_c,
        stack: Vec::with_capacity(n_c),
        started: false,
        done: n_c == 0,
    }
}

pub struct Conditions<'a> {
    pool: &'a [Selector],
    size: usize,
    stack: Vec<usize>,
    started: bool,
    done: bool,
}

impl Iterator for Conditions<'_> {
    type Item = Condition;

    fn next(&mut self) -> Option<Condition> {
        if self.done {
            return None;
        }
        let mut start = if self.started {
            // resume after the last emitted combination
            self.stack.pop().map_or(0, |p| p + 1)
        } else {
            self.started = true;
            0
        };
        loop {
            if self.stack.len() == self.size {
                let selectors = self.stack.iter().map(|&p| self.pool[p]).collect();
                return Some(Condition::new(selectors).expect("distinct attributes"));
            }
            let pool = self.pool;
            let stack = &self.stack;
            let next = (start..pool.len())
                .find(|&p| stack.iter().all(|&q| pool[q].attribute != pool[p].attribute));
            match next {
                Some(p) => {
                    self.stack.push(p);
                    start = p + 1;
                }
                None => match self.stack.pop() {
                    Some(q) => start = q + 1,
                    None => {
                        self.done = true;
                        return None;
                    }
                },
            }
        }
    }
}

/// Rows of `within` matching every selector of `c`, by direct row scan.
pub fn match_condition(c: &Condition, d: &Dataset, within: &MatchSet) -> MatchSet {
    let mut out = MatchSet::empty(within.universe());
    for r in within.iter() {
        if c.matches(d.row(r)) {
            out.insert(r);
        }
    }
    out
}

/// Precomputed per-selector match sets over one dataset; a condition's
/// matches are the intersection of its selectors' sets.
#[derive(Debug, Clone)]
pub struct SelectorIndex {
    offsets: Vec<usize>,
    sets: Vec<MatchSet>,
    universe: usize,
}

impl SelectorIndex {
    pub fn new(d: &Dataset) -> Self {
        let mut offsets = Vec::with_capacity(d.n_attributes() + 1);
        let mut total = 0;
        for a in &d.schema().attributes {
            offsets.push(total);
            total += a.values.len();
        }
        offsets.push(total);
        let mut sets = vec![MatchSet::empty(d.len()); total];
        for (r, row) in d.rows().iter().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                sets[offsets[a] + v].insert(r);
            }
        }
        SelectorIndex {
            offsets,
            sets,
            universe: d.len(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Rows whose value equals the selector's; empty for values outside the
    /// indexed vocabulary.
    pub fn rows_of(&self, s: Selector) -> Option<&MatchSet> {
        let id = self.offsets.get(s.attribute)? + s.value;
        if id < *self.offsets.get(s.attribute + 1)? {
            self.sets.get(id)
        } else {
            None
        }
    }

    pub fn matches(&self, c: &Condition, within: &MatchSet) -> MatchSet {
        let mut out = within.clone();
        for &s in c.selectors() {
            match self.rows_of(s) {
                Some(rows) => out.intersect_with(rows),
                None => return MatchSet::empty(within.universe()),
            }
        }
        out
    }
}
