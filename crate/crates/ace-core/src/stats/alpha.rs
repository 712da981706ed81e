//! Cronbach's alpha for binary response matrices.

use super::matrix::ResponseMatrix;
use super::{sample_variance, StatsError};

/// Internal consistency `k/(k-1) * (1 - sum(item var) / var(total))`
/// with unbiased sample variances throughout. Needs at least two
/// persons and two items, and a non-constant total score.
pub fn cronbach_alpha(matrix: &ResponseMatrix) -> Result<f64, StatsError> {
    let n = matrix.n_persons();
    let k = matrix.n_items();
    if n < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, got: n });
    }
    if k < 2 {
        return Err(StatsError::TooFewItems { needed: 2, got: k });
    }

    let totals: Vec<f64> = (0..n).map(|p| matrix.person_total(p) as f64).collect();
    let total_var = sample_variance(&totals);
    if total_var == 0.0 {
        return Err(StatsError::UndefinedAlpha);
    }

    let item_var_sum: f64 = (0..k)
        .map(|i| {
            let column: Vec<f64> = (0..n).map(|p| matrix.get(p, i) as f64).collect();
            sample_variance(&column)
        })
        .sum();

    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var_sum / total_var))
}
