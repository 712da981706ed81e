//! Pearson correlation and Welch's unequal-variance t-test, with
//! two-sided p-values from the Student t distribution.

use super::{mean, StatsError};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Correlation coefficient with its two-sided significance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    pub p: f64,
}

/// Welch test statistic, its Welch-Satterthwaite degrees of freedom
/// and the two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// Two-sided tail probability of Student's t. Uses the lower tail at
/// `-|t|` so large statistics do not lose precision to cancellation.
fn two_sided_p(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive and finite");
    (2.0 * dist.cdf(-t.abs())).min(1.0)
}

/// Pearson's r as `sum(dx dy) / sqrt(sum(dx^2) * sum(dy^2))`. This
/// form keeps `pearson(x, x)` at exactly 1.0 and `pearson(x, -x)` at
/// exactly -1.0 in floating point. Needs at least 3 paired values and
/// two non-constant inputs; `|r| = 1` reports p = 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: n });
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    let r = sxy / (sxx * syy).sqrt();

    let df = (n - 2) as f64;
    let r2 = r * r;
    let p = if r2 >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r2)).sqrt();
        two_sided_p(t, df)
    };
    Ok(CorrelationResult { r, n, p })
}

/// Welch's t-test for a mean difference between two independent
/// samples of at least two values each. When both samples are
/// constant with equal means the test degenerates to t = 0, p = 1
/// with pooled degrees of freedom; constant samples with different
/// means have no finite statistic and are reported as an error.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<WelchResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewObservations {
            needed: 2,
            got: a.len().min(b.len()),
        });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let va = super::sample_variance(a);
    let vb = super::sample_variance(b);

    if va == 0.0 && vb == 0.0 {
        if ma == mb {
            return Ok(WelchResult {
                t: 0.0,
                df: na + nb - 2.0,
                p: 1.0,
                n_a: a.len(),
                n_b: b.len(),
                mean_a: ma,
                mean_b: mb,
            });
        }
        return Err(StatsError::ZeroVariance);
    }

    let sea = va / na;
    let seb = vb / nb;
    let t = (ma - mb) / (sea + seb).sqrt();
    let df = (sea + seb) * (sea + seb) / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    let p = two_sided_p(t, df);
    Ok(WelchResult {
        t,
        df,
        p,
        n_a: a.len(),
        n_b: b.len(),
        mean_a: ma,
        mean_b: mb,
    })
}
