//! Seeded trial batches of the estimator, checked against exact bands.
//!
//! The harness has full knowledge of the distribution, which it needs to
//! compute ground truth. The estimator itself only sees an oracle.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use ess_core::alias::AliasTable;
use ess_core::{
    derive_seed, estimate_ess, estimate_ess_unicriterion, make_distribution, DiscreteDistribution,
    DualOracle, EstimateResult, EstimatorParams, GeneratorSpec, MASS_TOLERANCE,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolkitError};
use crate::io::read_distribution;
use crate::report::{emit_report, ConfigEcho, ExperimentReport, ReportFormat, Summary, TrialRecord};

/// Relative tolerance at band endpoints.
pub const BAND_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Accept `[ess_{(1+β)ε}, (1+γ)·ess_ε]`.
    Bicriteria,
    /// Accept `[ess_{(1+β)ε}, ess_ε]`.
    Unicriterion,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bicriteria => "bicriteria",
            Mode::Unicriterion => "unicriterion",
        })
    }
}

impl FromStr for Mode {
    type Err = ToolkitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bicriteria" => Ok(Mode::Bicriteria),
            "unicriterion" => Ok(Mode::Unicriterion),
            other => Err(ToolkitError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Where a distribution comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum DistSource {
    File(PathBuf),
    Generated(GeneratorSpec),
}

impl DistSource {
    /// An existing path is a file; anything else must be a generator spec.
    pub fn parse(s: &str) -> Result<Self> {
        if Path::new(s).is_file() {
            return Ok(DistSource::File(PathBuf::from(s)));
        }
        s.parse::<GeneratorSpec>()
            .map(DistSource::Generated)
            .map_err(|e| ToolkitError::Config(format!("`{s}` is neither a readable file nor a generator spec ({e})")))
    }

    pub fn load(&self) -> Result<DiscreteDistribution> {
        match self {
            DistSource::File(path) => read_distribution(path),
            DistSource::Generated(spec) => Ok(make_distribution(spec)?),
        }
    }
}

impl fmt::Display for DistSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSource::File(p) => write!(f, "{}", p.display()),
            DistSource::Generated(spec) => write!(f, "{spec}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dist_source: DistSource,
    pub eps: f64,
    pub beta: f64,
    /// Ignored in unicriterion mode, where γ is derived from ε and β.
    pub gamma: f64,
    pub mode: Mode,
    pub trials: u64,
    pub master_seed: u64,
    /// `None` skips writing the report.
    pub out_path: Option<PathBuf>,
    pub format: ReportFormat,
    /// `Some(1)` runs trials serially, `Some(k)` on a pool of `k` threads,
    /// `None` on the global pool. Results do not depend on it.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(dist_source: DistSource, eps: f64, beta: f64, gamma: f64, mode: Mode) -> Self {
        ExperimentConfig {
            dist_source,
            eps,
            beta,
            gamma,
            mode,
            trials: 1,
            master_seed: 0,
            out_path: None,
            format: ReportFormat::Json,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ToolkitError::Config("trials must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(ToolkitError::Config("threads must be at least 1".into()));
        }
        EstimatorParams::new(self.eps, self.beta, self.gamma)?;
        Ok(())
    }
}

/// An acceptance band `[low, high]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub low: f64,
    pub high: f64,
    pub mode: Mode,
    /// `ess_ε`.
    pub ess_eps: usize,
    /// `ess_{(1+β)ε}`.
    pub ess_relaxed: usize,
}

impl Band {
    /// Bicriteria estimates are compared as real numbers. Unicriterion
    /// estimates are compared by their ceiling: the band endpoints are support
    /// sizes, and the rescaled estimate `S/(1+γ)` may sit a fraction below an
    /// integer endpoint.
    pub fn contains(&self, estimate: f64) -> bool {
        let tol = BAND_TOLERANCE * self.high;
        let value = match self.mode {
            Mode::Bicriteria => estimate,
            Mode::Unicriterion => (estimate - tol).ceil(),
        };
        self.low - tol <= value && value <= self.high + tol
    }
}

/// `ess` at a level, with levels at or above 1 answered by a single point.
fn ess_at_level(dist: &DiscreteDistribution, level: f64) -> Result<usize> {
    if level >= 1.0 - MASS_TOLERANCE {
        Ok(1)
    } else {
        Ok(dist.exact_ess(level)?)
    }
}

/// The band an estimate must land in for `(eps, beta, gamma)` and `mode`.
pub fn band_for(dist: &DiscreteDistribution, eps: f64, beta: f64, gamma: f64, mode: Mode) -> Result<Band> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ess_core::Error::OutOfRange {
            name: "eps",
            value: eps,
            expected: "0 < eps < 1",
        }
        .into());
    }
    let ess_eps = ess_at_level(dist, eps)?;
    let ess_relaxed = ess_at_level(dist, (1.0 + beta) * eps)?;
    let high = match mode {
        Mode::Bicriteria => (1.0 + gamma) * ess_eps as f64,
        Mode::Unicriterion => ess_eps as f64,
    };
    Ok(Band {
        low: ess_relaxed as f64,
        high,
        mode,
        ess_eps,
        ess_relaxed,
    })
}

/// Whether `estimate` is an acceptable answer. Invalid parameters are never
/// accepted.
pub fn check_band(estimate: f64, dist: &DiscreteDistribution, eps: f64, beta: f64, gamma: f64, mode: Mode) -> bool {
    band_for(dist, eps, beta, gamma, mode).is_ok_and(|b| b.contains(estimate))
}

fn estimate_once(
    dist: &DiscreteDistribution,
    table: &AliasTable,
    config: &ExperimentConfig,
    params: &EstimatorParams,
    seed: u64,
) -> Result<EstimateResult> {
    let mut oracle = DualOracle::with_table(dist, table, seed);
    Ok(match config.mode {
        Mode::Bicriteria => estimate_ess(&mut oracle, params),
        Mode::Unicriterion => estimate_ess_unicriterion(&mut oracle, config.eps, config.beta)?,
    })
}

/// Runs the configured trials on an already loaded distribution. Does not
/// write anything.
pub fn run_trials(dist: &DiscreteDistribution, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let params = EstimatorParams::new(config.eps, config.beta, config.gamma)?;
    let band = band_for(dist, config.eps, config.beta, config.gamma, config.mode)?;
    let table = AliasTable::new(dist);

    let trial = |i: u64| -> Result<TrialRecord> {
        let seed = derive_seed(config.master_seed, i);
        let start = Instant::now();
        let r = estimate_once(dist, &table, config, &params, seed)?;
        let wall_time_ns = start.elapsed().as_nanos() as u64;
        Ok(TrialRecord {
            trial_index: i,
            seed,
            estimate: r.estimate,
            raw_mean: r.raw_mean,
            band_low: band.low,
            band_high: band.high,
            success: band.contains(r.estimate),
            samp_queries: r.samp_queries,
            eval_queries: r.eval_queries,
            wall_time_ns,
        })
    };

    let records: Vec<TrialRecord> = match config.threads {
        Some(1) => (0..config.trials).map(trial).collect::<Result<_>>()?,
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| ToolkitError::Config(format!("cannot start {k} threads: {e}")))?
            .install(|| (0..config.trials).into_par_iter().map(trial).collect::<Result<_>>())?,
        None => (0..config.trials).into_par_iter().map(trial).collect::<Result<_>>()?,
    };

    let sizes = match config.mode {
        Mode::Bicriteria => params.sample_sizes(),
        Mode::Unicriterion => {
            let (beta_inner, gamma) = ess_core::estimator::unicriterion_inner_params(config.eps, config.beta);
            EstimatorParams::new(config.eps, beta_inner, gamma)?.sample_sizes()
        }
    };
    let degenerate = records.iter().all(|r| r.samp_queries == 0);
    let summary = summarize(&records, &band, if degenerate { None } else { Some(sizes) });

    Ok(ExperimentReport {
        config: ConfigEcho {
            dist: config.dist_source.to_string(),
            eps: config.eps,
            beta: config.beta,
            gamma: match config.mode {
                Mode::Bicriteria => config.gamma,
                Mode::Unicriterion => ess_core::estimator::unicriterion_inner_params(config.eps, config.beta).1,
            },
            mode: config.mode,
            trials: config.trials,
            master_seed: config.master_seed,
        },
        summary,
        trials: records,
    })
}

fn summarize(records: &[TrialRecord], band: &Band, sizes: Option<ess_core::SampleSizes>) -> Summary {
    let n = records.len() as u64;
    let successes = records.iter().filter(|r| r.success).count() as u64;
    let estimates = records.iter().map(|r| r.estimate);
    Summary {
        trials: n,
        successes,
        success_rate: successes as f64 / n as f64,
        estimate_mean: estimates.clone().sum::<f64>() / n as f64,
        estimate_min: estimates.clone().fold(f64::INFINITY, f64::min),
        estimate_max: estimates.fold(f64::NEG_INFINITY, f64::max),
        ess_eps: band.ess_eps as u64,
        ess_relaxed: band.ess_relaxed as u64,
        band_low: band.low,
        band_high: band.high,
        quantile_sample_size: sizes.map_or(0, |s| s.quantile),
        estimator_sample_size: sizes.map_or(0, |s| s.estimator),
        total_samp_queries: records.iter().map(|r| r.samp_queries).sum(),
        total_eval_queries: records.iter().map(|r| r.eval_queries).sum(),
    }
}

/// Loads the distribution, runs every trial and writes the report to
/// `out_path` when one is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let dist = config.dist_source.load()?;
    let report = run_trials(&dist, config)?;
    if let Some(path) = &config.out_path {
        let bytes = emit_report(&report, config.format)?;
        fs::write(path, bytes).map_err(|e| ToolkitError::io(path, e))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> DiscreteDistribution {
        make_distribution(&GeneratorSpec::uniform(n)).unwrap()
    }

    #[test]
    fn band_examples() {
        let u = uniform(1000);
        assert!(check_band(900.0, &u, 0.1, 0.1, 0.1, Mode::Bicriteria));
        assert!(check_band(890.0, &u, 0.1, 0.1, 0.1, Mode::Bicriteria));
        assert!(check_band(990.0, &u, 0.1, 0.1, 0.1, Mode::Bicriteria));
        assert!(!check_band(889.9, &u, 0.1, 0.1, 0.1, Mode::Bicriteria));
        assert!(!check_band(990.01, &u, 0.1, 0.1, 0.1, Mode::Bicriteria));

        let point = make_distribution(&GeneratorSpec::point_mass()).unwrap();
        for (eps, beta, gamma) in [(0.2, 0.2, 0.2), (0.5, 0.1, 0.05), (0.9, 0.2, 0.2)] {
            assert!(check_band(1.0, &point, eps, beta, gamma, Mode::Bicriteria));
            assert!(check_band(1.0, &point, eps, beta, gamma, Mode::Unicriterion));
        }
        assert!(!check_band(1.0, &point, 1.5, 0.2, 0.2, Mode::Bicriteria));
    }

    #[test]
    fn unicriterion_band_rounds_up() {
        let point = make_distribution(&GeneratorSpec::point_mass()).unwrap();
        let b = band_for(&point, 0.2, 0.2, 0.0, Mode::Unicriterion).unwrap();
        assert_eq!((b.low, b.high), (1.0, 1.0));
        assert!(b.contains(1.01 / 1.02));
        assert!(!b.contains(1.000_001));
        assert!(b.contains(1.0 + 1e-15));
        assert!(!b.contains(0.0));

        let u = uniform(1000);
        let b = band_for(&u, 0.2, 0.2, 0.0, Mode::Unicriterion).unwrap();
        assert_eq!((b.low, b.high), (760.0, 800.0));
        assert!(b.contains(759.2));
        assert!(!b.contains(758.9));
        assert!(b.contains(800.0));
        assert!(!b.contains(800.3));
    }

    #[test]
    fn bands_are_ordered() {
        let d = make_distribution(&GeneratorSpec::zipf(500, 1.2)).unwrap();
        for eps in [0.01, 0.1, 0.3, 0.6, 0.9] {
            for mode in [Mode::Bicriteria, Mode::Unicriterion] {
                let b = band_for(&d, eps, 0.2, 0.1, mode).unwrap();
                assert!(b.low <= b.high, "{eps} {mode}: {b:?}");
            }
        }
    }

    #[test]
    fn point_mass_experiment_always_succeeds() {
        let cfg = ExperimentConfig {
            trials: 50,
            ..ExperimentConfig::new(
                DistSource::Generated(GeneratorSpec::point_mass()),
                0.2,
                0.2,
                0.2,
                Mode::Bicriteria,
            )
        };
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.summary.success_rate, 1.0);
        assert!(r.trials.iter().all(|t| (t.estimate - 1.1).abs() < 1e-15));
        assert!(r.trials.iter().all(|t| t.samp_queries == 335_000));
        assert_eq!(r.summary.total_samp_queries, 50 * 335_000);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = ExperimentConfig::new(
            DistSource::Generated(GeneratorSpec::uniform(10)),
            0.2,
            0.2,
            0.2,
            Mode::Bicriteria,
        );
        for cfg in [
            ExperimentConfig { trials: 0, ..base.clone() },
            ExperimentConfig { eps: 0.0, ..base.clone() },
            ExperimentConfig { beta: -0.1, ..base.clone() },
            ExperimentConfig { threads: Some(0), ..base.clone() },
        ] {
            let err = run_experiment(&cfg).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn dist_source_parsing() {
        assert_eq!(
            DistSource::parse("uniform:n=5").unwrap(),
            DistSource::Generated(GeneratorSpec::uniform(5))
        );
        assert!(DistSource::parse("no/such/file.csv").is_err());
    }

    #[test]
    fn degenerate_experiment() {
        let cfg = ExperimentConfig {
            trials: 3,
            ..ExperimentConfig::new(
                DistSource::Generated(GeneratorSpec::uniform(100)),
                0.9,
                0.2,
                0.2,
                Mode::Unicriterion,
            )
        };
        let r = run_experiment(&cfg).unwrap();
        assert!(r.trials.iter().all(|t| t.estimate == 1.0 && t.samp_queries == 0 && t.success));
        assert_eq!(r.summary.quantile_sample_size, 0);
    }
}
