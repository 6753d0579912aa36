use alloc::string::String;

use crate::distribution::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("distribution has no elements")]
    Empty,
    #[error("label {label} has negative probability {prob}")]
    NegativeProbability { label: Label, prob: f64 },
    #[error("label {label} has non-finite probability {prob}")]
    NonFiniteProbability { label: Label, prob: f64 },
    #[error("probabilities sum to {sum}, which is not within {tolerance} of 1")]
    MassNotOne { sum: f64, tolerance: f64 },
    #[error("label {0} appears more than once")]
    DuplicateLabel(Label),
    #[error("label {0} is not part of the distribution")]
    UnknownLabel(Label),
    #[error("{name} = {value} is out of range (expected {expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("empirical quantile of an empty sample")]
    EmptySample,
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::OutOfRange {
            name,
            value,
            expected,
        }
    }
}
