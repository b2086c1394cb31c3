//! Log-log rate fits, exponential growth fits and the uniformity verdict.

use serde::{Deserialize, Serialize};

use super::ExperimentRecord;
use crate::error::{LnlsError, Result};

/// Largest accepted `max / min` of a quantity claimed to be uniform in `h`.
pub const UNIFORMITY_BAND: f64 = 3.0;

/// Least-squares line `log(error) ≈ slope·log(h) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// `log(error/√h) ≈ log(A) + B·|t|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub a_hat: f64,
    pub b_hat: f64,
    pub residual: f64,
}

/// Spread of a family of constants across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uniformity {
    pub min: f64,
    pub max: f64,
    /// `max / min`.
    pub variation: f64,
    pub pass: bool,
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

fn check_positive(what: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(LnlsError::domain(format!("{what} must be positive and finite for a log fit, got {v}")));
    }
    Ok(())
}

/// Fits the rate exponent of `errors` against `spacings`; needs ≥ 3 distinct spacings.
pub fn fit_rate(spacings: &[f64], errors: &[f64]) -> Result<RateFit> {
    if spacings.len() != errors.len() {
        return Err(LnlsError::shape(format!(
            "{} spacings but {} errors",
            spacings.len(),
            errors.len()
        )));
    }
    let mut distinct = spacings.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(LnlsError::domain(format!(
            "≥ 3 spacings required for a rate fit, got {}",
            distinct.len()
        )));
    }
    check_positive("spacings", spacings)?;
    check_positive("errors", errors)?;
    let x: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (slope, intercept, residual) = least_squares(&x, &y);
    Ok(RateFit { slope, intercept, residual, points: x.len() })
}

/// [`fit_rate`] on `(h, value)` of the given records.
pub fn fit_rate_records(records: &[ExperimentRecord]) -> Result<RateFit> {
    let h: Vec<f64> = records.iter().map(|r| r.h).collect();
    let e: Vec<f64> = records.iter().map(|r| r.value).collect();
    fit_rate(&h, &e)
}

/// Fits `log(scaled_errors)` linearly in `|t|`; `scaled_errors` are typically `error/√h`.
pub fn growth_fit(times: &[f64], scaled_errors: &[f64]) -> Result<GrowthFit> {
    if times.len() != scaled_errors.len() {
        return Err(LnlsError::shape("times and errors differ in length"));
    }
    if times.len() < 3 {
        return Err(LnlsError::domain(format!("≥ 3 times required for a growth fit, got {}", times.len())));
    }
    check_positive("errors", scaled_errors)?;
    let x: Vec<f64> = times.iter().map(|t| t.abs()).collect();
    let y: Vec<f64> = scaled_errors.iter().map(|e| e.ln()).collect();
    let (b, log_a, residual) = least_squares(&x, &y);
    Ok(GrowthFit { a_hat: log_a.exp(), b_hat: b, residual })
}

/// `max/min` of positive values against [`UNIFORMITY_BAND`].
pub fn uniformity(values: &[f64]) -> Uniformity {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let variation = if min > 0.0 { max / min } else { f64::INFINITY };
    Uniformity { min, max, variation, pass: variation < UNIFORMITY_BAND }
}

/// Largest `ratio` per distinct `h` (ascending in `h`), skipping records without a ratio.
pub fn max_ratio_by_h(records: &[ExperimentRecord]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in records {
        let Some(ratio) = r.ratio else { continue };
        match out.iter_mut().find(|(h, _)| *h == r.h) {
            Some(entry) => entry.1 = entry.1.max(ratio),
            None => out.push((r.h, ratio)),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const HS: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.025];

    #[test]
    fn exact_power_laws() {
        let e1: Vec<f64> = HS.iter().map(|h| 3.0 * h).collect();
        let f = fit_rate(&HS, &e1).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert_relative_eq!(f.intercept.exp(), 3.0, max_relative = 1e-12);
        let e2: Vec<f64> = HS.iter().map(|h| h.sqrt()).collect();
        assert!((fit_rate(&HS, &e2).unwrap().slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        let msg = fit_rate(&[0.1, 0.2], &[1.0, 2.0]).unwrap_err().to_string();
        assert!(msg.contains("≥ 3 spacings required"), "{msg}");
        assert!(fit_rate(&[0.1, 0.1, 0.2], &[1.0, 1.0, 2.0]).is_err());
        assert!(fit_rate(&[0.1, 0.2, 0.3], &[1.0, 0.0, 2.0]).is_err());
        assert!(growth_fit(&[0.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn synthetic_exponential_growth() {
        let t = [0.0f64, 0.5, 1.0, 2.0];
        let e: Vec<f64> = t.iter().map(|t| 0.7 * (2.0 * t).exp()).collect();
        let g = growth_fit(&t, &e).unwrap();
        assert!((g.b_hat - 2.0).abs() < 1e-12);
        assert_relative_eq!(g.a_hat, 0.7, max_relative = 1e-12);
    }

    #[test]
    fn uniformity_band() {
        assert!(uniformity(&[1.0, 2.0, 2.9]).pass);
        assert!(!uniformity(&[1.0, 3.0]).pass);
        assert!(!uniformity(&[0.0, 1.0]).pass);
    }

    #[test]
    fn max_ratio_groups_by_spacing() {
        let recs = vec![
            ExperimentRecord::new("x", 0.2, 1.0).with_ratio(1.0),
            ExperimentRecord::new("x", 0.1, 1.0).with_ratio(4.0),
            ExperimentRecord::new("x", 0.2, 1.0).with_ratio(2.0),
            ExperimentRecord::new("x", 0.1, 1.0),
        ];
        assert_eq!(max_ratio_by_h(&recs), vec![(0.1, 4.0), (0.2, 2.0)]);
    }

    proptest! {
        #[test]
        fn recovers_any_power_law(a in 0.01f64..100.0, s in -2.0f64..3.0) {
            let e: Vec<f64> = HS.iter().map(|h| a * h.powf(s)).collect();
            let f = fit_rate(&HS, &e).unwrap();
            prop_assert!((f.slope - s).abs() < 1e-9);
            prop_assert!(f.residual < 1e-9);
        }
    }
}
