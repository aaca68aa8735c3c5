//! Chi-square goodness-of-fit against exact probabilities, used to validate
//! samplers and long chain runs against the enumeration oracle.

use crate::error::{Error, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a goodness-of-fit test.
#[derive(Clone, Copy, Debug)]
pub struct GofTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl GofTest {
    pub fn rejected_at(&self, significance: f64) -> bool {
        self.p_value < significance
    }
}

/// Pearson chi-square of observed counts against expected probabilities.
///
/// Cells with expected count below 5 are pooled (ascending by expectation)
/// so the asymptotic chi-square reference applies.
pub fn chi_square_gof(observed: &[u64], expected_probs: &[f64], total: u64) -> Result<GofTest> {
    if observed.len() != expected_probs.len() {
        return Err(Error::validation("observed/expected length mismatch"));
    }
    if total == 0 {
        return Err(Error::validation("no observations"));
    }
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(expected_probs.iter())
        .map(|(&o, &p)| (o as f64, p * total as f64))
        .collect();
    cells.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    // pool small-expectation cells
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            pooled.push(acc);
        }
    }
    if pooled.len() < 2 {
        // everything pooled into one cell; the test is vacuous
        return Ok(GofTest {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
        });
    }
    let statistic: f64 = pooled
        .iter()
        .map(|(o, e)| {
            let d = o - e;
            d * d / e
        })
        .sum();
    let dof = pooled.len() - 1;
    let chi = ChiSquared::new(dof as f64)
        .map_err(|e| Error::numeric(format!("chi-square dof {dof}: {e}")))?;
    let p_value = 1.0 - chi.cdf(statistic);
    Ok(GofTest {
        statistic,
        dof,
        p_value,
    })
}

/// Ordinary least squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::validation("linear_fit needs two equal-length series"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y.iter()) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx == 0.0 {
        return Err(Error::numeric("linear_fit: degenerate x"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts_accepted() {
        let observed = vec![250u64, 248, 252, 250];
        let expected = vec![0.25; 4];
        let t = chi_square_gof(&observed, &expected, 1000).unwrap();
        assert!(!t.rejected_at(1e-4));
        assert!(t.p_value > 0.9);
    }

    #[test]
    fn biased_counts_rejected() {
        let observed = vec![900u64, 40, 30, 30];
        let expected = vec![0.25; 4];
        let t = chi_square_gof(&observed, &expected, 1000).unwrap();
        assert!(t.rejected_at(1e-4));
    }

    #[test]
    fn fit_recovers_slope() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (m, b) = linear_fit(&x, &y).unwrap();
        assert!((m - 3.0).abs() < 1e-12);
        assert!((b + 1.0).abs() < 1e-12);
    }
}
