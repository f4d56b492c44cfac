//! The element model and the compare-exchange gate.
//!
//! Every algorithm in this crate works on slices of [`TaggedElement`]. Keys
//! may repeat; ties are broken by the element's original position, so the
//! ordering is always strict.
//!
//! Public indices are 1-based. Internally the slices are 0-based, and the
//! conversion happens at the API boundary only.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A key paired with its 1-based origin index. Ordered lexicographically on
/// `(key, origin)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedElement {
    pub key: i64,
    pub origin: u32,
}

impl TaggedElement {
    pub fn new(key: i64, origin: u32) -> Self {
        Self { key, origin }
    }
}

impl Ord for TaggedElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then(self.origin.cmp(&other.origin))
    }
}

impl PartialOrd for TaggedElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TaggedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.key, self.origin)
    }
}

/// Tags `keys` with origins `1..=n`.
pub fn tag(keys: &[i64]) -> Vec<TaggedElement> {
    keys.iter()
        .enumerate()
        .map(|(i, &key)| TaggedElement::new(key, (i + 1) as u32))
        .collect()
}

pub fn keys(array: &[TaggedElement]) -> Vec<i64> {
    array.iter().map(|e| e.key).collect()
}

pub fn is_sorted(array: &[TaggedElement]) -> bool {
    array.windows(2).all(|w| w[0] < w[1])
}

/// Compare-exchange on 1-based positions `i` and `j`.
///
/// Afterwards the smaller element sits at `min(i, j)`. Returns whether the
/// two elements were swapped.
pub fn compare_exchange(array: &mut [TaggedElement], i: usize, j: usize) -> Result<bool> {
    let len = array.len();
    for index in [i, j] {
        if index == 0 || index > len {
            return Err(Error::IndexOutOfBounds { index, len });
        }
    }
    if i == j {
        return Err(Error::SameIndex(i));
    }
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    Ok(gate(array, lo - 1, hi - 1))
}

/// Unchecked 0-based gate, `lo < hi`.
#[inline]
pub(crate) fn gate(array: &mut [TaggedElement], lo: usize, hi: usize) -> bool {
    debug_assert!(lo < hi);
    if array[lo] > array[hi] {
        array.swap(lo, hi);
        true
    } else {
        false
    }
}
