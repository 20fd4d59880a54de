//! Baseline estimators, estimate composition and the RAE metric.

mod dmc;
mod is;
mod stats;
mod stratified;

pub use dmc::{dmc_estimate, DMC_BATCH};
pub use is::{importance_sampling, is_weight, BoxMixture, Proposal};
pub use stats::RunningStats;
pub use stratified::{box_mass, stratified_estimate, MIN_SAMPLES_PER_BOX, STRATIFIED_ROUNDS};

use serde::{Deserialize, Serialize};

/// One convergence checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub samples_used: u64,
    pub mean: f64,
}

/// Estimator output: point estimate, estimator variance and a trace of
/// running estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub variance: f64,
    pub n_samples: u64,
    pub trace: Vec<TracePoint>,
}

impl EstimateReport {
    pub fn exact(mean: f64) -> EstimateReport {
        EstimateReport {
            mean,
            variance: 0.0,
            n_samples: 0,
            trace: Vec::new(),
        }
    }

    pub fn std_error(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Sum of estimates over disjoint path conditions, assuming independent
/// estimation runs.
pub fn compose_disjoint_sum(reports: &[EstimateReport]) -> EstimateReport {
    EstimateReport {
        mean: reports.iter().map(|r| r.mean).sum(),
        variance: reports.iter().map(|r| r.variance).sum(),
        n_samples: reports.iter().map(|r| r.n_samples).sum(),
        trace: Vec::new(),
    }
}

/// Product of independent estimates (one per constraint slice).
///
/// Variance of a product of independent estimators:
/// `prod(v_i + m_i^2) - prod(m_i^2)`.
pub fn compose_product(reports: &[EstimateReport]) -> EstimateReport {
    let mean = reports.iter().map(|r| r.mean).product();
    let second: f64 = reports.iter().map(|r| r.variance + r.mean * r.mean).product();
    let sq: f64 = reports.iter().map(|r| r.mean * r.mean).product();
    EstimateReport {
        mean,
        variance: (second - sq).max(0.0),
        n_samples: reports.iter().map(|r| r.n_samples).sum(),
        trace: Vec::new(),
    }
}

/// Relative absolute error `|estimate - truth| / truth`.
pub fn rae(estimate: f64, truth: f64) -> f64 {
    assert!(truth != 0.0, "relative error is undefined for a zero truth");
    (estimate - truth).abs() / truth
}

/// Indices at which to record trace checkpoints among `n` steps: about
/// `max_points` evenly spaced ones, always including the last.
pub(crate) fn checkpoint(i: usize, n: usize, max_points: usize) -> bool {
    let every = n.div_ceil(max_points.max(1)).max(1);
    (i + 1) % every == 0 || i + 1 == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(mean: f64, variance: f64) -> EstimateReport {
        EstimateReport {
            mean,
            variance,
            n_samples: 10,
            trace: Vec::new(),
        }
    }

    #[test]
    fn disjoint_sum() {
        let s = compose_disjoint_sum(&[rep(0.2, 1e-4), rep(0.3, 2e-4)]);
        assert!((s.mean - 0.5).abs() < 1e-15 && (s.variance - 3e-4).abs() < 1e-18);
        let one = compose_disjoint_sum(&[rep(0.7, 1e-3)]);
        assert_eq!((one.mean, one.variance), (0.7, 1e-3));
    }

    #[test]
    fn product_rule() {
        let p = compose_product(&[rep(1.0, 0.0), rep(0.4, 1e-3)]);
        assert_eq!(p.mean, 0.4);
        assert!((p.variance - 1e-3).abs() < 1e-15);
        let p = compose_product(&[rep(0.5, 0.0), rep(0.5, 0.0)]);
        assert_eq!((p.mean, p.variance), (0.25, 0.0));
    }

    #[test]
    fn relative_error() {
        assert_eq!(rae(0.5, 0.5), 0.0);
        assert!((rae(0.55, 0.5) - 0.1).abs() < 1e-15);
        assert_eq!(rae(0.0, 0.5), 1.0);
    }

    #[test]
    fn checkpoints_end_at_last() {
        let hits: Vec<usize> = (0..25).filter(|&i| checkpoint(i, 25, 10)).collect();
        assert_eq!(hits, vec![2, 5, 8, 11, 14, 17, 20, 23, 24]);
        assert!(checkpoint(0, 1, 100));
    }
}
