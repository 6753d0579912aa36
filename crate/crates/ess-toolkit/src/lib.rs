//! File formats, the Monte Carlo experiment harness and the `ess-toolkit`
//! command line on top of [`ess_core`].

pub mod error;
pub mod harness;
pub mod io;
pub mod report;

pub use error::{Result, ToolkitError};
pub use harness::{
    band_for, check_band, run_experiment, run_trials, Band, DistSource, ExperimentConfig, Mode,
};
pub use io::DistFormat;
pub use report::{emit_report, parse_json_report, ExperimentReport, ReportFormat, TrialRecord};
