//! Dichotomous Rasch model fit by joint maximum likelihood.
//!
//! The model puts the success probability of person `p` on item `i`
//! at `sigmoid(theta_p - b_i)`. The fit alternates damped Newton
//! updates of each person ability and each item difficulty, where
//! each one-dimensional step is halved until it does not lower its
//! conditional likelihood, so the joint likelihood never decreases
//! from sweep to sweep. After every sweep the difficulties are
//! recentred to mean zero and the same shift is applied to the
//! abilities, which pins down the scale origin without touching any
//! probability. Persons and items with extreme raw scores carry no
//! information about their parameter and are removed up front, in
//! rounds, until nothing extreme remains.

use super::matrix::ResponseMatrix;
use super::{mean, sample_variance, StatsError};
use serde::Serialize;

/// Logistic function, stable on both tails.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(sigmoid(z))` without overflow on either tail.
fn ln_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// Knobs of the joint maximum likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaschOptions {
    /// Hard cap on alternating sweeps.
    pub max_sweeps: u32,
    /// Convergence: largest parameter change of a sweep falls below
    /// this.
    pub tolerance: f64,
    /// Scale difficulties by `(k - 1) / k` after fitting, a common
    /// correction for the small-sample bias of joint estimation.
    /// Off by default so that the returned estimates satisfy the
    /// score-matching equations to numerical precision.
    pub bias_correction: bool,
}

impl Default for RaschOptions {
    fn default() -> Self {
        RaschOptions {
            max_sweeps: 100,
            tolerance: 1e-6,
            bias_correction: false,
        }
    }
}

/// Result of a Rasch fit, reported for the persons and items that
/// survived extreme-score removal (in their original order).
#[derive(Debug, Clone, PartialEq)]
pub struct RaschFit {
    pub item_ids: Vec<String>,
    pub difficulty: Vec<f64>,
    pub person_ids: Vec<String>,
    pub theta: Vec<f64>,
    /// Asymptotic standard error of each ability.
    pub se_theta: Vec<f64>,
    pub excluded_items: Vec<String>,
    pub excluded_persons: Vec<String>,
    pub sweeps: u32,
    pub converged: bool,
    /// Largest gap between observed and model-expected raw scores at
    /// the returned estimates, across persons and items.
    pub max_score_residual: f64,
    /// Share of observed ability variance not explained by
    /// measurement error.
    pub person_reliability: f64,
    /// Joint log-likelihood at initialisation and after each sweep;
    /// non-decreasing by construction.
    pub ll_history: Vec<f64>,
}

const PARAM_CLAMP: f64 = 10.0;
const MAX_STEP: f64 = 1.0;
const LL_SLACK: f64 = 1e-12;

struct Trimmed {
    persons: Vec<usize>,
    items: Vec<usize>,
}

/// Removes persons and items with perfect or zero raw scores, in
/// rounds, because each removal can make further rows or columns
/// extreme.
fn trim_extremes(matrix: &ResponseMatrix) -> Trimmed {
    let mut persons: Vec<usize> = (0..matrix.n_persons()).collect();
    let mut items: Vec<usize> = (0..matrix.n_items()).collect();
    loop {
        let k = items.len() as u32;
        let kept_persons: Vec<usize> = persons
            .iter()
            .copied()
            .filter(|&p| {
                let r: u32 = items.iter().map(|&i| matrix.get(p, i) as u32).sum();
                r > 0 && r < k
            })
            .collect();
        let n = kept_persons.len() as u32;
        let kept_items: Vec<usize> = items
            .iter()
            .copied()
            .filter(|&i| {
                let s: u32 = kept_persons.iter().map(|&p| matrix.get(p, i) as u32).sum();
                s > 0 && s < n
            })
            .collect();
        let stable = kept_persons.len() == persons.len() && kept_items.len() == items.len();
        persons = kept_persons;
        items = kept_items;
        if stable || persons.is_empty() || items.is_empty() {
            return Trimmed { persons, items };
        }
    }
}

/// Fits the model. Needs at least two non-extreme persons and items.
pub fn rasch_fit(matrix: &ResponseMatrix, options: &RaschOptions) -> Result<RaschFit, StatsError> {
    let trimmed = trim_extremes(matrix);
    let persons = &trimmed.persons;
    let items = &trimmed.items;
    if persons.len() < 2 || items.len() < 2 {
        return Err(StatsError::NotEnoughAfterTrim {
            persons: persons.len(),
            items: items.len(),
        });
    }
    let n = persons.len();
    let k = items.len();

    let raw_person: Vec<f64> = persons
        .iter()
        .map(|&p| items.iter().map(|&i| matrix.get(p, i) as u32).sum::<u32>() as f64)
        .collect();
    let raw_item: Vec<f64> = items
        .iter()
        .map(|&i| persons.iter().map(|&p| matrix.get(p, i) as u32).sum::<u32>() as f64)
        .collect();

    // Log-odds of the observed proportions start every parameter in
    // a sensible spot; extremes are gone, so these are finite.
    let mut theta: Vec<f64> = raw_person
        .iter()
        .map(|&r| (r / (k as f64 - r)).ln())
        .collect();
    let mut b: Vec<f64> = raw_item
        .iter()
        .map(|&s| ((n as f64 - s) / s).ln())
        .collect();
    let center = mean(&b);
    for d in &mut b {
        *d -= center;
    }

    let x = |pi: usize, ii: usize| matrix.get(persons[pi], items[ii]) as f64;

    let joint_ll = |theta: &[f64], b: &[f64]| {
        let mut ll = 0.0;
        for (pi, &t) in theta.iter().enumerate() {
            for (ii, &d) in b.iter().enumerate() {
                let z = t - d;
                ll += if x(pi, ii) > 0.5 {
                    ln_sigmoid(z)
                } else {
                    ln_sigmoid(-z)
                };
            }
        }
        ll
    };

    let mut ll_history = vec![joint_ll(&theta, &b)];
    let mut sweeps = 0;
    let mut converged = false;

    while sweeps < options.max_sweeps {
        let theta_before = theta.clone();
        let b_before = b.clone();

        for pi in 0..n {
            let cond_ll = |t: f64| {
                let mut ll = 0.0;
                for (ii, bi) in b.iter().enumerate() {
                    let z = t - bi;
                    ll += if x(pi, ii) > 0.5 {
                        ln_sigmoid(z)
                    } else {
                        ln_sigmoid(-z)
                    };
                }
                ll
            };
            let mut expected = 0.0;
            let mut info = 0.0;
            for bi in &b {
                let p = sigmoid(theta[pi] - bi);
                expected += p;
                info += p * (1.0 - p);
            }
            if info <= f64::MIN_POSITIVE {
                continue;
            }
            let mut step = ((raw_person[pi] - expected) / info).clamp(-MAX_STEP, MAX_STEP);
            let current = cond_ll(theta[pi]);
            let mut candidate = (theta[pi] + step).clamp(-PARAM_CLAMP, PARAM_CLAMP);
            let mut halvings = 0;
            while cond_ll(candidate) < current - LL_SLACK && halvings < 40 {
                step *= 0.5;
                candidate = (theta[pi] + step).clamp(-PARAM_CLAMP, PARAM_CLAMP);
                halvings += 1;
            }
            if cond_ll(candidate) >= current - LL_SLACK {
                theta[pi] = candidate;
            }
        }

        for ii in 0..k {
            let cond_ll = |d: f64| {
                let mut ll = 0.0;
                for (pi, t) in theta.iter().enumerate() {
                    let z = t - d;
                    ll += if x(pi, ii) > 0.5 {
                        ln_sigmoid(z)
                    } else {
                        ln_sigmoid(-z)
                    };
                }
                ll
            };
            let mut expected = 0.0;
            let mut info = 0.0;
            for t in &theta {
                let p = sigmoid(t - b[ii]);
                expected += p;
                info += p * (1.0 - p);
            }
            if info <= f64::MIN_POSITIVE {
                continue;
            }
            let mut step = ((expected - raw_item[ii]) / info).clamp(-MAX_STEP, MAX_STEP);
            let current = cond_ll(b[ii]);
            let mut candidate = (b[ii] + step).clamp(-PARAM_CLAMP, PARAM_CLAMP);
            let mut halvings = 0;
            while cond_ll(candidate) < current - LL_SLACK && halvings < 40 {
                step *= 0.5;
                candidate = (b[ii] + step).clamp(-PARAM_CLAMP, PARAM_CLAMP);
                halvings += 1;
            }
            if cond_ll(candidate) >= current - LL_SLACK {
                b[ii] = candidate;
            }
        }

        // Fix the origin: difficulties sum to zero, probabilities
        // untouched because both parameter sets shift together.
        let center = mean(&b);
        for d in &mut b {
            *d -= center;
        }
        for t in &mut theta {
            *t -= center;
        }

        sweeps += 1;
        ll_history.push(joint_ll(&theta, &b));

        let delta = theta
            .iter()
            .zip(&theta_before)
            .chain(b.iter().zip(&b_before))
            .map(|(new, old)| (new - old).abs())
            .fold(0.0f64, f64::max);
        if delta < options.tolerance {
            converged = true;
            break;
        }
    }

    // Score residuals and ability standard errors at the estimates,
    // before any bias correction.
    let mut max_score_residual = 0.0f64;
    let mut se_theta = Vec::with_capacity(n);
    for pi in 0..n {
        let mut expected = 0.0;
        let mut info = 0.0;
        for bi in &b {
            let p = sigmoid(theta[pi] - bi);
            expected += p;
            info += p * (1.0 - p);
        }
        max_score_residual = max_score_residual.max((expected - raw_person[pi]).abs());
        se_theta.push(1.0 / info.sqrt());
    }
    for ii in 0..k {
        let expected: f64 = theta.iter().map(|t| sigmoid(t - b[ii])).sum();
        max_score_residual = max_score_residual.max((expected - raw_item[ii]).abs());
    }

    if options.bias_correction {
        let factor = (k as f64 - 1.0) / k as f64;
        for d in &mut b {
            *d *= factor;
        }
    }

    let theta_var = sample_variance(&theta);
    let mean_se2 = mean(&se_theta.iter().map(|s| s * s).collect::<Vec<f64>>());
    let person_reliability = (theta_var - mean_se2) / theta_var;

    let person_kept: std::collections::BTreeSet<usize> = persons.iter().copied().collect();
    let item_kept: std::collections::BTreeSet<usize> = items.iter().copied().collect();
    Ok(RaschFit {
        item_ids: items.iter().map(|&i| matrix.item_ids()[i].clone()).collect(),
        difficulty: b,
        person_ids: persons
            .iter()
            .map(|&p| matrix.person_ids()[p].clone())
            .collect(),
        theta,
        se_theta,
        excluded_items: (0..matrix.n_items())
            .filter(|i| !item_kept.contains(i))
            .map(|i| matrix.item_ids()[i].clone())
            .collect(),
        excluded_persons: (0..matrix.n_persons())
            .filter(|p| !person_kept.contains(p))
            .map(|p| matrix.person_ids()[p].clone())
            .collect(),
        sweeps,
        converged,
        max_score_residual,
        person_reliability,
        ll_history,
    })
}

/// Ability grid from -4 to 4 in steps of 0.1.
pub fn default_theta_grid() -> Vec<f64> {
    (-40..=40).map(|i| i as f64 / 10.0).collect()
}

/// Item characteristic curve: success probability over an ability
/// grid for one difficulty.
pub fn icc_points(difficulty: f64, thetas: &[f64]) -> Vec<(f64, f64)> {
    thetas.iter().map(|&t| (t, sigmoid(t - difficulty))).collect()
}

/// One item on the Wright map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrightMapItem {
    pub id: String,
    pub difficulty: f64,
}

/// One ability histogram bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrightBin {
    /// Inclusive lower edge; the bin spans `[lower, lower + width)`.
    pub lower: f64,
    pub count: usize,
}

/// Person ability histogram aligned with item difficulties on the
/// same logit scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrightMap {
    pub bin_width: f64,
    pub bins: Vec<WrightBin>,
    /// Items sorted from easiest to hardest.
    pub items: Vec<WrightMapItem>,
}

/// Histogram of fitted abilities in 0.5-logit bins plus the items
/// sorted by difficulty. Every fitted person lands in exactly one
/// bin.
pub fn wright_map(fit: &RaschFit) -> WrightMap {
    const WIDTH: f64 = 0.5;
    let mut bins = Vec::new();
    if !fit.theta.is_empty() {
        let min = fit.theta.iter().copied().fold(f64::INFINITY, f64::min);
        let max = fit.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = (min / WIDTH).floor() * WIDTH;
        let hi = (max / WIDTH).floor() * WIDTH;
        let count = ((hi - lo) / WIDTH).round() as usize + 1;
        let mut counts = vec![0usize; count];
        for &t in &fit.theta {
            let idx = (((t - lo) / WIDTH).floor() as usize).min(count - 1);
            counts[idx] += 1;
        }
        bins = counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| WrightBin {
                lower: lo + i as f64 * WIDTH,
                count: c,
            })
            .collect();
    }

    let mut items: Vec<WrightMapItem> = fit
        .item_ids
        .iter()
        .zip(&fit.difficulty)
        .map(|(id, &d)| WrightMapItem {
            id: id.clone(),
            difficulty: d,
        })
        .collect();
    items.sort_by(|a, b| {
        a.difficulty
            .partial_cmp(&b.difficulty)
            .unwrap()
            .then_with(|| a.id.cmp(&b.id))
    });

    WrightMap {
        bin_width: WIDTH,
        bins,
        items,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[u8]]) -> ResponseMatrix {
        let person_ids = (0..rows.len()).map(|i| format!("p{:02}", i + 1)).collect();
        let item_ids = (0..rows[0].len()).map(|i| format!("i{:02}", i + 1)).collect();
        ResponseMatrix::new(person_ids, item_ids, rows.iter().map(|r| r.to_vec()).collect())
            .unwrap()
    }

    fn small_fixture() -> ResponseMatrix {
        matrix(&[
            &[1, 1, 1, 0],
            &[1, 1, 0, 0],
            &[1, 0, 1, 0],
            &[0, 1, 0, 1],
            &[1, 1, 0, 1],
            &[1, 0, 0, 0],
            &[0, 1, 1, 0],
            &[1, 1, 1, 0],
        ])
    }

    #[test]
    fn sigmoid_is_stable_and_symmetric() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(40.0) > 0.999_999);
        assert!(sigmoid(-40.0) < 1e-6);
        assert!(sigmoid(800.0) <= 1.0);
        assert!(sigmoid(-800.0) >= 0.0);
        for z in [-3.0, -0.5, 0.0, 0.7, 2.5] {
            assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fit_converges_and_matches_raw_scores() {
        let m = small_fixture();
        let fit = rasch_fit(&m, &RaschOptions::default()).unwrap();
        assert!(fit.converged, "no convergence in {} sweeps", fit.sweeps);
        assert!(fit.max_score_residual < 1e-4, "residual {}", fit.max_score_residual);
        assert!(fit.excluded_persons.is_empty());
        assert!(fit.excluded_items.is_empty());
        let b_mean: f64 = fit.difficulty.iter().sum::<f64>() / fit.difficulty.len() as f64;
        assert!(b_mean.abs() < 1e-9, "difficulties not centred: {b_mean}");
        // Item 1 was solved by 6 of 8, item 4 by 2 of 8.
        assert!(fit.difficulty[0] < fit.difficulty[3]);
    }

    #[test]
    fn likelihood_never_decreases_across_sweeps() {
        let m = small_fixture();
        let fit = rasch_fit(&m, &RaschOptions::default()).unwrap();
        for pair in fit.ll_history.windows(2) {
            assert!(
                pair[1] >= pair[0] - 1e-9,
                "likelihood dropped from {} to {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn higher_raw_scores_get_higher_abilities() {
        let m = small_fixture();
        let fit = rasch_fit(&m, &RaschOptions::default()).unwrap();
        let totals: Vec<u32> = (0..m.n_persons()).map(|p| m.person_total(p)).collect();
        for a in 0..fit.theta.len() {
            for b in 0..fit.theta.len() {
                if totals[a] > totals[b] {
                    assert!(fit.theta[a] > fit.theta[b]);
                }
                if totals[a] == totals[b] {
                    assert!((fit.theta[a] - fit.theta[b]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn extreme_rows_and_columns_are_removed_in_rounds() {
        let m = matrix(&[
            &[1, 1, 1, 1],
            &[1, 1, 0, 1],
            &[1, 0, 1, 1],
            &[0, 1, 1, 1],
            &[0, 0, 1, 1],
            &[0, 0, 0, 0],
        ]);
        // Person 1 and 6 are extreme; after dropping them item 4 is
        // answered by everyone left, so it goes too.
        let fit = rasch_fit(&m, &RaschOptions::default()).unwrap();
        assert_eq!(fit.excluded_persons, vec!["p01".to_string(), "p06".to_string()]);
        assert_eq!(fit.excluded_items, vec!["i04".to_string()]);
        assert_eq!(fit.person_ids.len(), 4);
        assert_eq!(fit.item_ids.len(), 3);
    }

    #[test]
    fn all_extreme_data_is_an_error() {
        let m = matrix(&[&[1, 1], &[1, 1], &[0, 0]]);
        assert!(matches!(
            rasch_fit(&m, &RaschOptions::default()).unwrap_err(),
            StatsError::NotEnoughAfterTrim { .. }
        ));
    }

    #[test]
    fn bias_correction_scales_difficulties_only() {
        let m = small_fixture();
        let plain = rasch_fit(&m, &RaschOptions::default()).unwrap();
        let corrected = rasch_fit(
            &m,
            &RaschOptions {
                bias_correction: true,
                ..RaschOptions::default()
            },
        )
        .unwrap();
        let factor = 3.0 / 4.0;
        for (a, b) in plain.difficulty.iter().zip(&corrected.difficulty) {
            assert!((a * factor - b).abs() < 1e-12);
        }
        assert_eq!(plain.theta, corrected.theta);
    }

    #[test]
    fn icc_points_rise_with_ability() {
        let grid = default_theta_grid();
        assert_eq!(grid.len(), 81);
        assert_eq!(grid[0], -4.0);
        assert_eq!(grid[80], 4.0);
        let curve = icc_points(0.5, &grid);
        for pair in curve.windows(2) {
            assert!(pair[1].1 > pair[0].1);
        }
        let at_difficulty = icc_points(0.5, &[0.5]);
        assert!((at_difficulty[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wright_map_conserves_every_person() {
        let m = small_fixture();
        let fit = rasch_fit(&m, &RaschOptions::default()).unwrap();
        let map = wright_map(&fit);
        let counted: usize = map.bins.iter().map(|b| b.count).sum();
        assert_eq!(counted, fit.theta.len());
        for pair in map.items.windows(2) {
            assert!(pair[0].difficulty <= pair[1].difficulty);
        }
        for pair in map.bins.windows(2) {
            assert!((pair[1].lower - pair[0].lower - 0.5).abs() < 1e-12);
        }
    }
}
