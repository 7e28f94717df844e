//! Frames of discernment and propositions encoded as bit patterns.
//!
//! Singleton `i` of a frame occupies bit `i` of a [`Proposition`], so the
//! integer value of a proposition doubles as its index into dense tables of
//! length `2^n`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported frame. Dense tables hold `2^20` entries at most.
pub const MAX_FRAME_SIZE: usize = 20;

/// Ordered set of mutually exclusive singleton labels.
#[derive(Clone)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel(i));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        if labels.len() > MAX_FRAME_SIZE {
            return Err(Error::FrameTooLarge(labels.len()));
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    /// Number of singletons `|Θ|`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of propositions in the power set, `2^n`.
    pub fn power_set_size(&self) -> usize {
        1usize << self.len()
    }

    /// The whole frame `Θ`.
    pub fn full(&self) -> Proposition {
        Proposition::full(self.len())
    }

    pub fn singleton(&self, index: usize) -> Proposition {
        assert!(index < self.len(), "singleton index out of range");
        Proposition::singleton(index)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Builds a proposition from labels. Order does not matter; repeats are rejected.
    pub fn proposition<I, S>(&self, labels: I) -> Result<Proposition>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u32;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            if bits & (1 << i) != 0 {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            bits |= 1 << i;
        }
        Ok(Proposition(bits))
    }

    /// Parses a comma-separated label list such as `a,b,c`.
    pub fn parse_proposition(&self, list: &str) -> Result<Proposition> {
        self.proposition(list.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    /// Labels of `p` in frame order.
    pub fn labels_of(&self, p: Proposition) -> Vec<&str> {
        p.indices().map(|i| self.labels[i].as_str()).collect()
    }

    pub fn contains(&self, p: Proposition) -> bool {
        p.0 & !self.full().0 == 0
    }

    pub fn complement(&self, p: Proposition) -> Proposition {
        Proposition(!p.0 & self.full().0)
    }

    /// Compact rendering: concatenated labels when every label is a single
    /// character (`abcde`), otherwise a braced comma list (`{c3,c4,c5}`).
    pub fn display(&self, p: Proposition) -> String {
        if p.is_empty() {
            return "∅".to_string();
        }
        let labels = self.labels_of(p);
        if self.labels.iter().all(|l| l.chars().count() == 1) {
            labels.concat()
        } else {
            format!("{{{}}}", labels.join(","))
        }
    }

    /// Renders a collection as `{x, y, z}` in canonical order.
    pub fn display_set<'a, I>(&self, props: I) -> String
    where
        I: IntoIterator<Item = &'a Proposition>,
    {
        let mut props: Vec<Proposition> = props.into_iter().copied().collect();
        props.sort();
        let parts: Vec<String> = props.iter().map(|&p| self.display(p)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub(crate) fn check_same(&self, other: &Frame) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FrameMismatch(format!(
                "[{}] vs [{}]",
                self.labels.join(","),
                other.labels.join(",")
            )))
        }
    }

    pub(crate) fn check_contains(&self, p: Proposition) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::FrameMismatch(format!(
                "proposition {:#x} exceeds a frame of {} singletons",
                p.0,
                self.len()
            )))
        }
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// A subset of the frame; bit `i` set means singleton `i` is included.
///
/// Ordering is by cardinality first, then lexicographically by the ascending
/// list of member indices, so `{a, b, ab, ad, abc}` sorts the way the sets
/// are usually written out by hand.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Proposition(u32);

impl Proposition {
    pub const EMPTY: Proposition = Proposition(0);

    pub const fn from_bits(bits: u32) -> Self {
        Proposition(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Dense-table index.
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn full(n: usize) -> Self {
        if n >= 32 {
            Proposition(u32::MAX)
        } else {
            Proposition((1u32 << n) - 1)
        }
    }

    pub const fn singleton(i: usize) -> Self {
        Proposition(1 << i)
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    pub const fn union(self, other: Self) -> Self {
        Proposition(self.0 | other.0)
    }

    pub const fn intersection(self, other: Self) -> Self {
        Proposition(self.0 & other.0)
    }

    pub const fn difference(self, other: Self) -> Self {
        Proposition(self.0 & !other.0)
    }

    pub const fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    /// True when `self` meets both `event` and its complement.
    pub const fn straddles(self, event: Self) -> bool {
        self.intersects(event) && !self.is_subset_of(event)
    }

    pub const fn contains_index(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Member indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, including `∅` and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(self.0),
        }
    }
}

impl Ord for Proposition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .count_ones()
            .cmp(&other.0.count_ones())
            .then_with(|| other.0.reverse_bits().cmp(&self.0.reverse_bits()))
    }
}

impl PartialOrd for Proposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Proposition({:#b})", self.0)
    }
}

/// Submask enumeration in decreasing numeric order.
pub struct Subsets {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = Proposition;

    fn next(&mut self) -> Option<Proposition> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & self.mask)
        };
        Some(Proposition(cur))
    }
}
