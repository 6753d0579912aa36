//! Full-knowledge finite distributions and their ground-truth quantities.
//!
//! Elements are ordered canonically by `(prob, label)`: lighter elements come
//! first and equal probabilities are broken by the label order. All exact
//! quantities here (quantiles, effective support sizes) are defined against
//! that order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Allowed deviation of the total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Cumulative masses within this distance of a level count as equal to it.
/// Absorbs summation rounding, so e.g. 100 elements of mass 1/1000 carry
/// exactly 0.1.
pub const LEVEL_SLACK: f64 = 1e-12;

/// Identifier of a universe element. The order on labels breaks ties between
/// equally likely elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u64);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for Label {
    fn from(v: u64) -> Self {
        Label(v)
    }
}

/// A labelled probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element {
    pub label: Label,
    pub prob: f64,
}

impl Element {
    pub fn new(label: impl Into<Label>, prob: f64) -> Self {
        Element {
            label: label.into(),
            prob,
        }
    }
}

/// The canonical order `≺`: smaller probability first, then smaller label.
///
/// Probabilities of validated distributions are finite and never `-0.0`, so
/// `total_cmp` coincides with the numeric order here.
#[inline]
pub fn canonical_cmp(a: &Element, b: &Element) -> Ordering {
    a.prob
        .total_cmp(&b.prob)
        .then_with(|| a.label.cmp(&b.label))
}

/// `a ≽ b` under the canonical order.
#[inline]
pub fn succeeds_or_equal(a: &Element, b: &Element) -> bool {
    a.prob > b.prob || (a.prob == b.prob && a.label >= b.label)
}

/// Element indices sorted by `≺`, with prefix sums of probability along that
/// permutation.
#[derive(Clone, Debug)]
pub struct CanonicalRank {
    permutation: Vec<usize>,
    cumulative: Vec<f64>,
}

impl CanonicalRank {
    fn build(elements: &[Element]) -> Self {
        let mut permutation: Vec<usize> = (0..elements.len()).collect();
        permutation.sort_unstable_by(|&i, &j| canonical_cmp(&elements[i], &elements[j]));
        let mut acc = NeumaierSum::default();
        let cumulative = permutation
            .iter()
            .map(|&i| {
                acc.add(elements[i].prob);
                acc.value()
            })
            .collect();
        CanonicalRank {
            permutation,
            cumulative,
        }
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// `cumulative()[k]` is `P(X ≼ e)` for the element `e` at rank `k`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug)]
enum LabelIndex {
    /// `elements[i].label == Label(i)` for every `i`.
    Dense,
    /// Element indices sorted by label.
    Sorted(Vec<usize>),
}

/// A validated finite distribution.
///
/// Construction checks the invariants (nonnegative, finite probabilities,
/// unique labels, unit mass within [`MASS_TOLERANCE`]) and builds the
/// canonical rank. Values are immutable afterwards. Elements of probability
/// zero are kept so large universes can be modelled, but they never count
/// towards an effective support size.
#[derive(Clone, Debug)]
pub struct DiscreteDistribution {
    elements: Vec<Element>,
    index: LabelIndex,
    rank: CanonicalRank,
}

impl DiscreteDistribution {
    pub fn new(mut elements: Vec<Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty);
        }
        for e in elements.iter_mut() {
            if !e.prob.is_finite() {
                return Err(Error::NonFiniteProbability {
                    label: e.label,
                    prob: e.prob,
                });
            }
            if e.prob < 0.0 {
                return Err(Error::NegativeProbability {
                    label: e.label,
                    prob: e.prob,
                });
            }
            // normalize -0.0 so that total_cmp agrees with ==
            if e.prob == 0.0 {
                e.prob = 0.0;
            }
        }

        let dense = elements
            .iter()
            .enumerate()
            .all(|(i, e)| e.label.0 == i as u64);
        let index = if dense {
            LabelIndex::Dense
        } else {
            let mut by_label: Vec<usize> = (0..elements.len()).collect();
            by_label.sort_unstable_by_key(|&i| elements[i].label);
            if let Some(w) = by_label
                .windows(2)
                .find(|w| elements[w[0]].label == elements[w[1]].label)
            {
                return Err(Error::DuplicateLabel(elements[w[0]].label));
            }
            LabelIndex::Sorted(by_label)
        };

        let rank = CanonicalRank::build(&elements);
        let sum = rank.total_mass();
        if !(1.0 - MASS_TOLERANCE..=1.0 + MASS_TOLERANCE).contains(&sum) {
            return Err(Error::MassNotOne {
                sum,
                tolerance: MASS_TOLERANCE,
            });
        }

        Ok(DiscreteDistribution {
            elements,
            index,
            rank,
        })
    }

    /// Builds from `(label, prob)` pairs.
    pub fn from_pairs<I, L>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, f64)>,
        L: Into<Label>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(l, p)| Element::new(l, p))
                .collect(),
        )
    }

    /// Elements in their original order.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of elements with positive probability.
    pub fn support_size(&self) -> usize {
        self.elements.iter().filter(|e| e.prob > 0.0).count()
    }

    pub fn rank(&self) -> &CanonicalRank {
        &self.rank
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        match &self.index {
            LabelIndex::Dense => {
                let i = usize::try_from(label.0).ok()?;
                (i < self.elements.len()).then_some(i)
            }
            LabelIndex::Sorted(by_label) => by_label
                .binary_search_by_key(&label, |&i| self.elements[i].label)
                .ok()
                .map(|k| by_label[k]),
        }
    }

    pub fn element(&self, label: Label) -> Result<Element> {
        self.index_of(label)
            .map(|i| self.elements[i])
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn prob(&self, label: Label) -> Result<f64> {
        self.element(label).map(|e| e.prob)
    }

    /// `a ≺ b` under the canonical order.
    pub fn precedes(&self, a: Label, b: Label) -> Result<bool> {
        let (ea, eb) = (self.element(a)?, self.element(b)?);
        Ok(canonical_cmp(&ea, &eb) == Ordering::Less)
    }

    /// Canonical rank position of the ε-quantile.
    pub fn quantile_rank(&self, eps: f64) -> Result<usize> {
        check_level(eps)?;
        let cumulative = self.rank.cumulative();
        let k = cumulative.partition_point(|&c| c <= eps + LEVEL_SLACK);
        // The final prefix sum is within MASS_TOLERANCE of 1, so it exceeds
        // every admissible eps; rounding must not push the quantile past it.
        Ok(k.min(cumulative.len() - 1))
    }

    /// The ε-quantile: the smallest element `x` under `≺` with
    /// `P(X ≼ x) > eps` (by more than [`LEVEL_SLACK`]). It always has
    /// positive probability.
    pub fn exact_quantile(&self, eps: f64) -> Result<Element> {
        let k = self.quantile_rank(eps)?;
        Ok(self.elements[self.rank.permutation[k]])
    }

    /// ε-effective support size: the number of elements `≽` the ε-quantile.
    pub fn exact_ess(&self, eps: f64) -> Result<usize> {
        Ok(self.elements.len() - self.quantile_rank(eps)?)
    }

    /// ε-effective support size by a direct scan: the smallest `n` such that
    /// all but the `n` heaviest elements carry at most `eps` of the mass.
    ///
    /// Quadratic in the number of elements. It shares nothing with
    /// [`Self::exact_ess`] beyond the input and exists to cross-check it.
    pub fn exact_ess_bruteforce(&self, eps: f64) -> Result<usize> {
        check_level(eps)?;
        let mut heaviest_first: Vec<f64> = self.elements.iter().map(|e| e.prob).collect();
        heaviest_first.sort_unstable_by(|a, b| b.total_cmp(a));
        let len = heaviest_first.len();
        for n in 1..=len {
            // lightest first, matching how the mass of a tail accumulates
            let mut tail = NeumaierSum::default();
            heaviest_first[n..].iter().rev().for_each(|&p| tail.add(p));
            if tail.value() <= eps + LEVEL_SLACK {
                return Ok(n);
            }
        }
        Ok(len)
    }

    /// Returns a copy with `count` zero-probability elements appended, labelled
    /// after the current maximum label.
    pub fn with_zero_padding(&self, count: usize) -> Result<Self> {
        let next = self.elements.iter().map(|e| e.label.0).max().unwrap_or(0) + 1;
        let mut elements = self.elements.clone();
        elements.extend((0..count as u64).map(|k| Element::new(next + k, 0.0)));
        Self::new(elements)
    }
}

fn check_level(eps: f64) -> Result<()> {
    if (0.0..1.0 - MASS_TOLERANCE).contains(&eps) {
        Ok(())
    } else {
        Err(Error::out_of_range("eps", eps, "0 <= eps < 1 - 1e-9"))
    }
}

/// Total variation distance `½ Σ |p₁(x) − p₂(x)|` over the union of labels.
pub fn tv_distance(p1: &DiscreteDistribution, p2: &DiscreteDistribution) -> f64 {
    let mut mass: BTreeMap<Label, (f64, f64)> = BTreeMap::new();
    for e in p1.elements() {
        mass.entry(e.label).or_default().0 = e.prob;
    }
    for e in p2.elements() {
        mass.entry(e.label).or_default().1 = e.prob;
    }
    let l1: f64 = mass.values().map(|&(a, b)| (a - b).abs()).sum();
    (0.5 * l1).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels(dist: &DiscreteDistribution) -> Vec<u64> {
        dist.rank()
            .permutation()
            .iter()
            .map(|&i| dist.elements()[i].label.0)
            .collect()
    }

    fn uniform(n: u64) -> DiscreteDistribution {
        DiscreteDistribution::from_pairs((0..n).map(|i| (i, 1.0 / n as f64))).unwrap()
    }

    #[test]
    fn validate_examples() {
        let d = DiscreteDistribution::from_pairs([(0u64, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(labels(&d), vec![0, 1]);

        let err = DiscreteDistribution::from_pairs([(0u64, 0.5), (1, 0.6)]).unwrap_err();
        assert!(matches!(err, Error::MassNotOne { .. }));

        let d = DiscreteDistribution::from_pairs([(0u64, 1.0), (1, 0.0)]).unwrap();
        assert_eq!(labels(&d), vec![1, 0]);
    }

    #[test]
    fn validate_rejects_bad_input() {
        assert_eq!(DiscreteDistribution::new(vec![]).unwrap_err(), Error::Empty);
        assert!(matches!(
            DiscreteDistribution::from_pairs([(0u64, 1.2), (1, -0.2)]).unwrap_err(),
            Error::NegativeProbability { .. }
        ));
        assert_eq!(
            DiscreteDistribution::from_pairs([(7u64, 0.5), (7, 0.5)]).unwrap_err(),
            Error::DuplicateLabel(Label(7))
        );
        assert!(matches!(
            DiscreteDistribution::from_pairs([(0u64, f64::NAN)]).unwrap_err(),
            Error::NonFiniteProbability { .. }
        ));
        // just inside and just outside the tolerance
        assert!(DiscreteDistribution::from_pairs([(0u64, 1.0 + 0.5e-9)]).is_ok());
        assert!(DiscreteDistribution::from_pairs([(0u64, 1.0 + 2e-9)]).is_err());
    }

    #[test]
    fn sparse_labels_are_looked_up() {
        let d = DiscreteDistribution::from_pairs([(40u64, 0.25), (3, 0.5), (1000, 0.25)]).unwrap();
        assert_eq!(d.prob(Label(3)).unwrap(), 0.5);
        assert_eq!(d.prob(Label(1000)).unwrap(), 0.25);
        assert_eq!(d.prob(Label(4)).unwrap_err(), Error::UnknownLabel(Label(4)));
        assert_eq!(labels(&d), vec![40, 1000, 3]);
    }

    #[test]
    fn negative_zero_sorts_with_zero() {
        let d = DiscreteDistribution::from_pairs([(0u64, 1.0), (1, -0.0), (2, 0.0)]).unwrap();
        assert_eq!(labels(&d), vec![1, 2, 0]);
    }

    #[test]
    fn precedes_examples() {
        let d = DiscreteDistribution::from_pairs([(0u64, 0.3), (1, 0.7)]).unwrap();
        assert!(d.precedes(Label(0), Label(1)).unwrap());
        assert!(!d.precedes(Label(1), Label(0)).unwrap());
        assert!(!d.precedes(Label(0), Label(0)).unwrap());
        let d = DiscreteDistribution::from_pairs([(0u64, 0.5), (1, 0.5)]).unwrap();
        assert!(d.precedes(Label(0), Label(1)).unwrap());
        assert_eq!(
            d.precedes(Label(0), Label(9)).unwrap_err(),
            Error::UnknownLabel(Label(9))
        );
    }

    #[test]
    fn quantile_examples() {
        let u = uniform(10);
        assert_eq!(u.exact_quantile(0.25).unwrap().label, Label(2));
        let d = DiscreteDistribution::from_pairs([(0u64, 0.1), (1, 0.9)]).unwrap();
        assert_eq!(d.exact_quantile(0.1).unwrap().label, Label(1));
        assert_eq!(d.exact_quantile(0.05).unwrap().label, Label(0));
        assert_eq!(d.exact_quantile(0.0).unwrap().label, Label(0));
    }

    #[test]
    fn quantile_rejects_levels_at_one() {
        let u = uniform(10);
        assert!(u.exact_quantile(1.0).is_err());
        assert!(u.exact_quantile(1.0 - 1e-10).is_err());
        assert!(u.exact_quantile(-0.1).is_err());
        assert!(u.exact_quantile(f64::NAN).is_err());
        assert_eq!(u.exact_quantile(0.999).unwrap().label, Label(9));
    }

    #[test]
    fn quantile_skips_zero_elements() {
        let d = DiscreteDistribution::from_pairs([(0u64, 0.0), (1, 0.0), (2, 1.0)]).unwrap();
        let q = d.exact_quantile(0.0).unwrap();
        assert_eq!(q.label, Label(2));
        assert!(q.prob > 0.0);
    }

    #[test]
    fn ess_examples() {
        let u = uniform(10);
        assert_eq!(u.exact_ess(0.25).unwrap(), 8);
        assert_eq!(u.exact_ess_bruteforce(0.25).unwrap(), 8);

        let d = DiscreteDistribution::from_pairs([(0u64, 0.1), (1, 0.9)]).unwrap();
        assert_eq!(d.exact_ess(0.05).unwrap(), 2);
        assert_eq!(d.exact_ess(0.1).unwrap(), 1);
        assert_eq!(d.exact_ess_bruteforce(0.05).unwrap(), 2);
        assert_eq!(d.exact_ess_bruteforce(0.1).unwrap(), 1);

        let point = DiscreteDistribution::from_pairs([(0u64, 1.0)]).unwrap();
        for eps in [0.0, 0.3, 0.9, 0.999] {
            assert_eq!(point.exact_ess(eps).unwrap(), 1);
            assert_eq!(point.exact_ess_bruteforce(eps).unwrap(), 1);
        }
    }

    #[test]
    fn zipf_ess_matches_bruteforce() {
        let weights: Vec<f64> = (1..=100).map(|i| 1.0 / i as f64).collect();
        let total: f64 = weights.iter().sum();
        let d = DiscreteDistribution::from_pairs(
            weights.iter().enumerate().map(|(i, w)| (i as u64, w / total)),
        )
        .unwrap();
        let fast = d.exact_ess(0.1).unwrap();
        assert_eq!(fast, d.exact_ess_bruteforce(0.1).unwrap());
        // exact rational arithmetic gives 60
        assert_eq!(fast, 60);
    }

    #[test]
    fn lattice_boundaries_follow_exact_arithmetic() {
        // plain float prefix sums overshoot these levels by a few ulps
        let u = uniform(1000);
        assert_eq!(u.exact_ess(0.1).unwrap(), 900);
        assert_eq!(u.exact_ess_bruteforce(0.1).unwrap(), 900);
        assert_eq!(u.exact_ess(0.24).unwrap(), 760);
        let u = uniform(10_000);
        assert_eq!(u.exact_ess(0.24).unwrap(), 7600);
        assert_eq!(u.exact_ess_bruteforce(0.24).unwrap(), 7600);
        assert_eq!(u.exact_quantile(0.2).unwrap().label, Label(2000));
    }

    #[test]
    fn ess_ignores_zero_elements() {
        let d = DiscreteDistribution::from_pairs([(0u64, 0.5), (1, 0.5), (2, 0.0), (3, 0.0)]).unwrap();
        assert_eq!(d.exact_ess(0.0).unwrap(), 2);
        assert_eq!(d.exact_ess_bruteforce(0.0).unwrap(), 2);
        assert_eq!(d.support_size(), 2);
    }

    #[test]
    fn tv_examples() {
        let a = DiscreteDistribution::from_pairs([(0u64, 0.7), (1, 0.3)]).unwrap();
        let b = DiscreteDistribution::from_pairs([(0u64, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(tv_distance(&a, &a), 0.0);
        assert!((tv_distance(&a, &b) - 0.2).abs() < 1e-15);
        let x = DiscreteDistribution::from_pairs([(0u64, 1.0)]).unwrap();
        let y = DiscreteDistribution::from_pairs([(1u64, 1.0)]).unwrap();
        assert_eq!(tv_distance(&x, &y), 1.0);
    }

    #[test]
    fn padding_appends_after_max_label() {
        let d = DiscreteDistribution::from_pairs([(5u64, 0.5), (2, 0.5)]).unwrap();
        let p = d.with_zero_padding(3).unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.prob(Label(8)).unwrap(), 0.0);
        assert_eq!(p.exact_ess(0.1).unwrap(), 2);
    }
}
