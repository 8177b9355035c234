//! Confidence intervals over independent runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `z_{α/2}` for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub mean: f64,
    /// Sample standard deviation (denominator `n − 1`).
    pub std_dev: f64,
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn std_error(&self, n: usize) -> f64 {
        self.std_dev / (n as f64).sqrt()
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.low - slack && v <= self.high + slack
    }
}

/// `mean ± 1.96·sd/√n` over `runs`.
pub fn confidence_interval(runs: &[f64]) -> Result<Interval> {
    let n = runs.len();
    if n < 2 {
        return Err(Error::Statistics(format!(
            "a confidence interval needs at least 2 runs, got {n}"
        )));
    }
    let (mean, sd) = mean_std(runs);
    let half = Z_95 * sd / (n as f64).sqrt();
    Ok(Interval {
        mean,
        std_dev: sd,
        low: mean - half,
        high: mean + half,
    })
}

/// Sample mean and standard deviation; the latter is 0 for fewer than 2 values.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_runs_collapse() {
        let ci = confidence_interval(&[2.5; 10]).unwrap();
        assert_eq!((ci.low, ci.mean, ci.high), (2.5, 2.5, 2.5));
    }

    #[test]
    fn one_to_ten() {
        let runs: Vec<f64> = (1..=10).map(f64::from).collect();
        let ci = confidence_interval(&runs).unwrap();
        assert!((ci.mean - 5.5).abs() < 1e-12);
        assert!((ci.std_dev - 3.0276503540974917).abs() < 1e-12);
        assert!((ci.low - 3.623).abs() < 1e-3);
        assert!((ci.high - 7.377).abs() < 1e-3);
    }

    #[test]
    fn single_run_is_refused() {
        assert!(matches!(
            confidence_interval(&[1.0]),
            Err(Error::Statistics(_))
        ));
        assert!(confidence_interval(&[]).is_err());
    }
}
