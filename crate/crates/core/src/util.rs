//! Small combinatorial helpers shared by the searches.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Wall-clock limit checked cooperatively inside search loops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(limit: Duration) -> Self {
        Deadline(Instant::now().checked_add(limit))
    }

    pub fn at(instant: Instant) -> Self {
        Deadline(Some(instant))
    }

    pub fn expired(&self) -> bool {
        matches!(self.0, Some(t) if Instant::now() >= t)
    }

    #[inline]
    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(Error::Timeout)
        } else {
            Ok(())
        }
    }
}

/// All `k`-element subsets of `items`, in lexicographic order of positions.
pub fn combinations<T: Copy>(items: &[T], k: usize) -> Combinations<'_, T> {
    Combinations { items, idx: (0..k).collect(), done: k > items.len() }
}

pub struct Combinations<'a, T> {
    items: &'a [T],
    idx: Vec<usize>,
    done: bool,
}

impl<T: Copy> Iterator for Combinations<'_, T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let n = self.items.len();
        let k = self.idx.len();
        // Advance the rightmost position that still has room.
        match (0..k).rev().find(|&i| self.idx[i] < n - k + i) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Every subset of `items`, smallest first, each size in lexicographic order.
pub fn all_subsets<T: Copy>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0..=items.len()).flat_map(move |k| combinations(items, k))
}
