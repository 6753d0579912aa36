//! Query access to a distribution.
//!
//! [`DualOracle`] answers SAMP (draw a label), EVAL (probability of a label)
//! and probability-revealing draws, and counts every query. The estimator is
//! written against [`ProbabilityRevealing`], so it never evaluates a label it
//! has not drawn.

use alloc::borrow::Cow;

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::alias::AliasTable;
use crate::distribution::{DiscreteDistribution, Label};
use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounts {
    pub samp: u64,
    pub eval: u64,
}

/// Access model in which every sample arrives together with its probability.
pub trait ProbabilityRevealing {
    fn sample_with_prob(&mut self) -> (Label, f64);

    fn query_counts(&self) -> QueryCounts;
}

/// SAMP/EVAL access to one distribution with a seeded random stream.
///
/// Two oracles built from the same distribution and seed produce identical
/// streams. Counters only ever increase.
#[derive(Clone, Debug)]
pub struct DualOracle<'a> {
    dist: &'a DiscreteDistribution,
    table: Cow<'a, AliasTable>,
    rng: Xoshiro256PlusPlus,
    counts: QueryCounts,
}

impl<'a> DualOracle<'a> {
    pub fn new(dist: &'a DiscreteDistribution, seed: u64) -> Self {
        Self::build(dist, Cow::Owned(AliasTable::new(dist)), seed)
    }

    /// Reuses a prebuilt sampler table, e.g. across the trials of one
    /// experiment.
    ///
    /// # Panics
    ///
    /// If `table` was built for a distribution of a different size.
    pub fn with_table(dist: &'a DiscreteDistribution, table: &'a AliasTable, seed: u64) -> Self {
        assert_eq!(
            table.element_count(),
            dist.len(),
            "sampler table does not belong to this distribution"
        );
        Self::build(dist, Cow::Borrowed(table), seed)
    }

    fn build(dist: &'a DiscreteDistribution, table: Cow<'a, AliasTable>, seed: u64) -> Self {
        DualOracle {
            dist,
            table,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            counts: QueryCounts::default(),
        }
    }

    #[inline]
    fn draw_index(&mut self) -> usize {
        self.table.draw(self.rng.next_u64())
    }

    /// SAMP: a label drawn from the distribution.
    pub fn samp(&mut self) -> Label {
        self.counts.samp += 1;
        let i = self.draw_index();
        self.dist.elements()[i].label
    }

    /// EVAL: the exact probability of `label`.
    pub fn eval(&mut self, label: Label) -> Result<f64> {
        self.counts.eval += 1;
        self.dist.prob(label)
    }

    pub fn query_counts(&self) -> QueryCounts {
        self.counts
    }
}

impl ProbabilityRevealing for DualOracle<'_> {
    /// Counts as one SAMP and one EVAL.
    #[inline]
    fn sample_with_prob(&mut self) -> (Label, f64) {
        self.counts.samp += 1;
        self.counts.eval += 1;
        let e = self.dist.elements()[self.draw_index()];
        (e.label, e.prob)
    }

    fn query_counts(&self) -> QueryCounts {
        self.counts
    }
}

/// Seed of trial `index` under `master`, mixed with the SplitMix64 finalizer
/// so neighbouring indices yield unrelated streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
