//! Bundles of items as fixed-width bit sets.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported item universe. Valuation tables hold `2^m` entries.
pub const MAX_ITEMS: usize = 24;

/// A subset of the item universe `{0, .., m-1}`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle(u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_mask(mask: u32) -> Self {
        Bundle(mask)
    }

    /// The full universe of `m` items.
    pub fn full(num_items: usize) -> Self {
        debug_assert!(num_items <= MAX_ITEMS);
        Bundle(((1u64 << num_items) - 1) as u32)
    }

    pub fn singleton(item: usize) -> Self {
        debug_assert!(item < MAX_ITEMS);
        Bundle(1 << item)
    }

    /// Builds a bundle from item indices, rejecting indices `>= num_items`.
    pub fn from_items<I: IntoIterator<Item = usize>>(items: I, num_items: usize) -> Result<Self> {
        let mut mask = 0u32;
        for index in items {
            if index >= num_items || index >= MAX_ITEMS {
                return Err(Error::ItemOutOfRange { index, num_items });
            }
            mask |= 1 << index;
        }
        Ok(Bundle(mask))
    }

    #[inline]
    pub const fn mask(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn contains(self, item: usize) -> bool {
        self.0 >> item & 1 == 1
    }

    #[inline]
    pub const fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    #[inline]
    pub const fn with(self, item: usize) -> Bundle {
        Bundle(self.0 | 1 << item)
    }

    #[inline]
    pub const fn without(self, item: usize) -> Bundle {
        Bundle(self.0 & !(1 << item))
    }

    #[inline]
    pub const fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    /// Item indices in increasing order.
    pub fn items(self) -> Items {
        Items(self.0)
    }

    /// All subsets of `self`, starting from the empty set, in increasing mask order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }

    /// Every bundle over `m` items, in mask order.
    pub fn all(num_items: usize) -> impl Iterator<Item = Bundle> {
        (0..1u32 << num_items).map(Bundle)
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.items()).finish()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, item) in self.items().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{item}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(Bundle::EMPTY, Bundle::with)
    }
}

pub struct Items(u32);

impl Iterator for Items {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let item = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Items {}

/// Submask enumeration in increasing order: `s -> (s - u) & u`.
pub struct Subsets {
    universe: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = Bundle;

    fn next(&mut self) -> Option<Bundle> {
        let current = self.next?;
        self.next = if current == self.universe {
            None
        } else {
            Some(current.wrapping_sub(self.universe) & self.universe)
        };
        Some(Bundle(current))
    }
}
