//! Two-stage estimator of the ε-effective support size.
//!
//! Stage one draws `⌈180/(β²ε)⌉` probability-revealing samples and takes
//! their `(1+β/2)ε` sample quantile under `≺` as the pivot `x`. Stage two
//! draws `t = ⌈500/(εβγ²)⌉` further samples and averages the inverse
//! probability weights `I[y ≽ x] / p(y)`. The estimate is `(1+γ/2)` times
//! that mean. With probability at least 2/3 it lies in
//! `[ess_{(1+β)ε}, (1+γ)·ess_ε]`.
//!
//! The number of queries depends on `(ε, β, γ)` only, never on the
//! distribution or its universe size.

use alloc::vec::Vec;

use crate::distribution::{canonical_cmp, succeeds_or_equal, Element, Label};
use crate::error::{Error, Result};
use crate::oracle::ProbabilityRevealing;

/// Largest slack parameter the guarantee is stated for. Larger β or γ are
/// clamped to it.
pub const MAX_SLACK: f64 = 0.2;

const QUANTILE_SAMPLE_CONSTANT: f64 = 180.0;
const ESTIMATOR_SAMPLE_CONSTANT: f64 = 500.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorParams {
    eps: f64,
    beta: f64,
    gamma: f64,
}

impl EstimatorParams {
    pub fn new(eps: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_eps(eps)?;
        check_slack("beta", beta)?;
        check_slack("gamma", gamma)?;
        Ok(EstimatorParams { eps, beta, gamma })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta_eff(&self) -> f64 {
        self.beta.min(MAX_SLACK)
    }

    pub fn gamma_eff(&self) -> f64 {
        self.gamma.min(MAX_SLACK)
    }

    /// `(1+β)ε ≥ 1`: a single point is within the relaxed distance of any
    /// distribution, so 1 is a valid answer without any queries.
    pub fn is_degenerate(&self) -> bool {
        is_degenerate(self.eps, self.beta_eff())
    }

    pub fn sample_sizes(&self) -> SampleSizes {
        SampleSizes::for_slack(self.eps, self.beta_eff(), self.gamma_eff())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::out_of_range("eps", eps, "0 < eps < 1"))
    }
}

fn check_slack(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::out_of_range(name, v, "a finite value > 0"))
    }
}

fn is_degenerate(eps: f64, beta: f64) -> bool {
    (1.0 + beta) * eps >= 1.0
}

/// Sizes of the quantile sample `R` and of the estimator sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSizes {
    pub quantile: u64,
    pub estimator: u64,
}

impl SampleSizes {
    fn for_slack(eps: f64, beta: f64, gamma: f64) -> Self {
        SampleSizes {
            quantile: ceil_count(QUANTILE_SAMPLE_CONSTANT / (beta * beta * eps)),
            estimator: ceil_count(ESTIMATOR_SAMPLE_CONSTANT / (eps * beta * (gamma * gamma))),
        }
    }

    pub fn total(&self) -> u64 {
        self.quantile + self.estimator
    }
}

pub fn sample_sizes(params: &EstimatorParams) -> SampleSizes {
    params.sample_sizes()
}

/// Ceiling of a real-valued sample size. Values within floating-point noise
/// of an integer are taken as that integer, so `180/(0.2²·0.2)` is 22500 and
/// not 22501.
fn ceil_count(x: f64) -> u64 {
    let nearest = libm::round(x);
    let v = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        libm::ceil(x)
    };
    (v as u64).max(1)
}

/// The stage-one pivot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pivot {
    Element(Element),
    /// `(1+β)ε ≥ 1`; no samples were drawn.
    Degenerate,
}

impl Pivot {
    pub fn element(&self) -> Option<Element> {
        match self {
            Pivot::Element(e) => Some(*e),
            Pivot::Degenerate => None,
        }
    }

    pub fn label(&self) -> Option<Label> {
        self.element().map(|e| e.label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateResult {
    /// The returned approximation of the effective support size.
    pub estimate: f64,
    /// Mean inverse-probability weight `S`.
    pub raw_mean: f64,
    pub pivot: Pivot,
    pub quantile_sample_size: u64,
    pub estimator_sample_size: u64,
    pub samp_queries: u64,
    pub eval_queries: u64,
}

impl EstimateResult {
    fn degenerate() -> Self {
        EstimateResult {
            estimate: 1.0,
            raw_mean: 0.0,
            pivot: Pivot::Degenerate,
            quantile_sample_size: 0,
            estimator_sample_size: 0,
            samp_queries: 0,
            eval_queries: 0,
        }
    }
}

/// The θ sample quantile under `≺`: the smallest sampled element whose
/// `≼`-count, with multiplicity, strictly exceeds `θ·|R|`.
///
/// That is the element at 0-based sorted position `⌊θ·|R|⌋`. `samples` is
/// reordered in place.
pub fn empirical_quantile(samples: &mut [Element], theta: f64) -> Result<Element> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::out_of_range("theta", theta, "0 < theta < 1"));
    }
    let m = samples.len();
    let k = (libm::floor(theta * m as f64) as usize).min(m - 1);
    let (_, kth, _) = samples.select_nth_unstable_by(k, canonical_cmp);
    Ok(*kth)
}

/// Stage one: draws the quantile sample and returns its `(1+β/2)ε` quantile.
pub fn select_pivot<O>(oracle: &mut O, params: &EstimatorParams) -> Pivot
where
    O: ProbabilityRevealing + ?Sized,
{
    if params.is_degenerate() {
        return Pivot::Degenerate;
    }
    draw_pivot(oracle, params.eps, params.beta_eff(), params.sample_sizes().quantile)
}

fn draw_pivot<O>(oracle: &mut O, eps: f64, beta: f64, size: u64) -> Pivot
where
    O: ProbabilityRevealing + ?Sized,
{
    let mut sample: Vec<Element> = (0..size)
        .map(|_| {
            let (label, prob) = oracle.sample_with_prob();
            Element { label, prob }
        })
        .collect();
    let theta = (1.0 + beta / 2.0) * eps;
    let e = empirical_quantile(&mut sample, theta).expect("sample size is at least 1 and theta < 1");
    Pivot::Element(e)
}

/// Sample mean and variance of the weights `I[y ≽ pivot] / p(y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedTailMean {
    pub mean: f64,
    /// Unbiased sample variance of a single weight.
    pub variance: f64,
    pub draws: u64,
}

impl WeightedTailMean {
    pub fn std_error(&self) -> f64 {
        libm::sqrt(self.variance / self.draws as f64)
    }
}

/// Stage two: averages `I[y ≽ pivot] / p(y)` over `draws` fresh samples.
///
/// For the ε*-quantile as pivot this is an unbiased estimate of `ess_{ε*}`.
pub fn weighted_tail_mean<O>(oracle: &mut O, pivot: &Element, draws: u64) -> WeightedTailMean
where
    O: ProbabilityRevealing + ?Sized,
{
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..draws {
        let (label, prob) = oracle.sample_with_prob();
        if succeeds_or_equal(&Element { label, prob }, pivot) {
            let w = 1.0 / prob;
            sum += w;
            sum_sq += w * w;
        }
    }
    let n = draws as f64;
    let mean = if draws == 0 { 0.0 } else { sum / n };
    let variance = if draws > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    WeightedTailMean {
        mean,
        variance,
        draws,
    }
}

struct RawRun {
    raw_mean: f64,
    pivot: Pivot,
    sizes: SampleSizes,
    samp_queries: u64,
    eval_queries: u64,
}

fn run_stages<O>(oracle: &mut O, eps: f64, beta: f64, gamma: f64) -> RawRun
where
    O: ProbabilityRevealing + ?Sized,
{
    let before = oracle.query_counts();
    let sizes = SampleSizes::for_slack(eps, beta, gamma);
    let pivot = draw_pivot(oracle, eps, beta, sizes.quantile);
    let x = pivot.element().expect("non-degenerate run");
    let stats = weighted_tail_mean(oracle, &x, sizes.estimator);
    let after = oracle.query_counts();
    RawRun {
        raw_mean: stats.mean,
        pivot,
        sizes,
        samp_queries: after.samp - before.samp,
        eval_queries: after.eval - before.eval,
    }
}

impl RawRun {
    fn into_result(self, scale: f64) -> EstimateResult {
        EstimateResult {
            estimate: scale * self.raw_mean,
            raw_mean: self.raw_mean,
            pivot: self.pivot,
            quantile_sample_size: self.sizes.quantile,
            estimator_sample_size: self.sizes.estimator,
            samp_queries: self.samp_queries,
            eval_queries: self.eval_queries,
        }
    }
}

/// `(1+γ)`-approximation of the `[ε, (1+β)ε]` effective support size.
///
/// If every stage-two draw falls below the pivot the mean is 0 and so is the
/// estimate; no floor is applied.
pub fn estimate_ess<O>(oracle: &mut O, params: &EstimatorParams) -> EstimateResult
where
    O: ProbabilityRevealing + ?Sized,
{
    if params.is_degenerate() {
        return EstimateResult::degenerate();
    }
    let gamma = params.gamma_eff();
    run_stages(oracle, params.eps, params.beta_eff(), gamma).into_result(1.0 + gamma / 2.0)
}

/// Slack parameters the unicriterion estimator runs the two stages with.
pub fn unicriterion_inner_params(eps: f64, beta: f64) -> (f64, f64) {
    let beta_inner = beta.min(MAX_SLACK) / 2.0;
    (beta_inner, eps * beta_inner)
}

/// Estimate in `[ess_{(1+β)ε}, ess_ε]`: no multiplicative slack.
///
/// Runs the stages with `β' = min(β, 0.2)/2` and `γ = εβ'`, then returns
/// `(1+γ/2)/(1+γ)·S`. The result is real valued and can sit just below an
/// integer band endpoint; its ceiling is what lies in the band.
pub fn estimate_ess_unicriterion<O>(oracle: &mut O, eps: f64, beta: f64) -> Result<EstimateResult>
where
    O: ProbabilityRevealing + ?Sized,
{
    check_eps(eps)?;
    check_slack("beta", beta)?;
    if is_degenerate(eps, beta.min(MAX_SLACK)) {
        return Ok(EstimateResult::degenerate());
    }
    let (beta_inner, gamma) = unicriterion_inner_params(eps, beta);
    let scale = (1.0 + gamma / 2.0) / (1.0 + gamma);
    Ok(run_stages(oracle, eps, beta_inner, gamma).into_result(scale))
}
