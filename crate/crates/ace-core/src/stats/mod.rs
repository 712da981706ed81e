//! Statistics over scored response matrices: internal consistency,
//! a Rasch fit, classical inference helpers and the analysis report.

pub mod alpha;
pub mod infer;
pub mod matrix;
pub mod rasch;
pub mod report;
pub mod sim;

pub use alpha::cronbach_alpha;
pub use infer::{pearson, welch_t, CorrelationResult, WelchResult};
pub use matrix::{MetaTable, PersonMeta, ResponseMatrix};
pub use rasch::{rasch_fit, wright_map, RaschFit, RaschOptions, WrightMap};
pub use report::{analyze, AnalysisReport, InputFile, REPORT_SCHEMA};

use thiserror::Error;

/// Why a statistic could not be computed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("need at least {needed} items, got {got}")]
    TooFewItems { needed: usize, got: usize },
    #[error("inputs have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("input is constant; the statistic is undefined")]
    ConstantInput,
    #[error("both samples have zero variance but different means")]
    ZeroVariance,
    #[error("total score variance is zero, so alpha is undefined")]
    UndefinedAlpha,
    #[error("duplicate id '{id}'")]
    DuplicateId { id: String },
    #[error("empty id in {what}")]
    EmptyId { what: &'static str },
    #[error("response value {value} at row {row}, column '{column}' is not 0 or 1")]
    NotBinary {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row} has {got} responses, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("no responses for item '{id}'")]
    UnknownItem { id: String },
    #[error("only {persons} persons and {items} items remain after removing extreme rows and columns")]
    NotEnoughAfterTrim { persons: usize, items: usize },
}

/// Arithmetic mean; 0 for an empty slice.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Unbiased sample variance with an n - 1 denominator.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_uses_the_unbiased_denominator() {
        assert_eq!(sample_variance(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(sample_variance(&[5.0, 5.0, 5.0]), 0.0);
        assert_eq!(sample_variance(&[2.0]), 0.0);
        // Bernoulli column 1,1,0,0: variance 1/3 with n - 1.
        let v = sample_variance(&[1.0, 1.0, 0.0, 0.0]);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }
}
