//! Walker/Vose alias table over the positive-probability elements of a
//! distribution.
//!
//! One draw costs a single 64-bit random word: the high half of
//! `word * slots` picks the slot and the low half is the coin compared
//! against the slot's threshold.

use alloc::vec::Vec;

use crate::distribution::DiscreteDistribution;

#[derive(Clone, Copy, Debug)]
struct Slot {
    /// `P(keep primary | slot)` scaled to `2^64`.
    threshold: u64,
    primary: u32,
    alias: u32,
}

#[derive(Clone, Debug)]
pub struct AliasTable {
    slots: Vec<Slot>,
    elements: usize,
}

impl AliasTable {
    /// Builds the table. Zero-probability elements get no slot and are never
    /// drawn.
    ///
    /// # Panics
    ///
    /// If the distribution has `2^32` or more elements.
    pub fn new(dist: &DiscreteDistribution) -> Self {
        assert!(
            dist.len() <= u32::MAX as usize,
            "alias table indices are 32-bit"
        );
        let positive: Vec<(u32, f64)> = dist
            .elements()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.prob > 0.0)
            .map(|(i, e)| (i as u32, e.prob))
            .collect();
        let total: f64 = positive.iter().map(|&(_, p)| p).sum();
        let m = positive.len();

        let mut scaled: Vec<f64> = positive
            .iter()
            .map(|&(_, p)| p * m as f64 / total)
            .collect();
        let mut slots: Vec<Slot> = positive
            .iter()
            .map(|&(i, _)| Slot {
                threshold: u64::MAX,
                primary: i,
                alias: i,
            })
            .collect();

        let (mut small, mut large): (Vec<usize>, Vec<usize>) =
            (0..m).partition(|&k| scaled[k] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            slots[s].threshold = to_threshold(scaled[s]);
            slots[s].alias = positive[l].0;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers on either list are full slots up to rounding; their
        // defaults already keep the primary with certainty.

        AliasTable {
            slots,
            elements: dist.len(),
        }
    }

    /// Number of elements of the distribution the table was built for.
    pub fn element_count(&self) -> usize {
        self.elements
    }

    /// Draws an element index from a uniform 64-bit word.
    #[inline]
    pub fn draw(&self, word: u64) -> usize {
        let wide = u128::from(word) * self.slots.len() as u128;
        let slot = &self.slots[(wide >> 64) as usize];
        if (wide as u64) < slot.threshold {
            slot.primary as usize
        } else {
            slot.alias as usize
        }
    }
}

fn to_threshold(p: f64) -> u64 {
    // `as` saturates, so p >= 1 maps to u64::MAX
    (p * 18_446_744_073_709_551_616.0) as u64
}
