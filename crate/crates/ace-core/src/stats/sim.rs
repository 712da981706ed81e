//! Seeded simulation of response matrices from known person and
//! item parameters, mainly for exercising the fitting code on data
//! with a known ground truth.

use super::matrix::ResponseMatrix;
use super::rasch::sigmoid;
use super::StatsError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws one Bernoulli response per person and item pair, with
/// success probability `sigmoid(theta - difficulty)`. The same seed
/// and parameters always produce the same matrix.
pub fn simulate_matrix(
    seed: u64,
    theta: &[f64],
    difficulty: &[f64],
    person_ids: Vec<String>,
    item_ids: Vec<String>,
) -> Result<ResponseMatrix, StatsError> {
    if person_ids.len() != theta.len() || item_ids.len() != difficulty.len() {
        return Err(StatsError::LengthMismatch {
            left: person_ids.len(),
            right: theta.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<u8>> = theta
        .iter()
        .map(|&t| {
            difficulty
                .iter()
                .map(|&b| u8::from(rng.random::<f64>() < sigmoid(t - b)))
                .collect()
        })
        .collect();
    ResponseMatrix::new(person_ids, item_ids, rows)
}
