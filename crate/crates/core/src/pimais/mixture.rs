use crate::distributions::LN_SQRT_2PI;
use crate::rng::StreamRng;
use nalgebra::DMatrix;
use rand_distr::{Distribution as _, StandardNormal};

/// Equal-weight Gaussian mixture `(1/N) sum_n N(mu_n, cov)` with a shared
/// covariance.
#[derive(Clone, Debug)]
pub struct MixtureProposal {
    means: Vec<Vec<f64>>,
    chol: DMatrix<f64>,
    /// `L^{-1} mu_n`, so each component costs O(d) per evaluation.
    white_means: Vec<Vec<f64>>,
    log_norm: f64,
}

impl MixtureProposal {
    /// `chol` is the lower Cholesky factor of the shared covariance.
    pub fn new(means: Vec<Vec<f64>>, chol: DMatrix<f64>) -> MixtureProposal {
        assert!(!means.is_empty());
        let d = chol.nrows();
        let log_det_half: f64 = chol.diagonal().iter().map(|v| v.ln()).sum();
        let mut m = MixtureProposal {
            white_means: Vec::new(),
            means: Vec::new(),
            chol,
            log_norm: -(d as f64) * LN_SQRT_2PI - log_det_half,
        };
        m.white_means = means.iter().map(|mu| m.whiten(mu)).collect();
        m.means = means;
        m
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn n_components(&self) -> usize {
        self.means.len()
    }

    fn whiten(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut s = x[i];
            for j in 0..i {
                s -= self.chol[(i, j)] * y[j];
            }
            y[i] = s / self.chol[(i, i)];
        }
        y
    }

    /// Log-density of component `n` alone.
    pub fn component_log_density(&self, n: usize, x: &[f64]) -> f64 {
        let y = self.whiten(x);
        self.log_norm - 0.5 * sq_dist(&y, &self.white_means[n])
    }

    /// `log((1/N) sum_n N(x; mu_n, cov))` via log-sum-exp.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let y = self.whiten(x);
        let mut best = f64::INFINITY;
        let dists: Vec<f64> = self
            .white_means
            .iter()
            .map(|m| {
                let q = sq_dist(&y, m);
                best = best.min(q);
                q
            })
            .collect();
        let s: f64 = dists.iter().map(|q| (-0.5 * (q - best)).exp()).sum();
        self.log_norm - 0.5 * best + (s / self.means.len() as f64).ln()
    }

    /// Draw from component `n`.
    pub fn sample_component(&self, n: usize, rng: &mut StreamRng, out: &mut [f64]) {
        sample_gaussian(&self.means[n], &self.chol, rng, out)
    }
}

/// Draw from `N(mean, L L^T)` given the lower factor `L`.
pub fn sample_gaussian(mean: &[f64], chol: &DMatrix<f64>, rng: &mut StreamRng, out: &mut [f64]) {
    let d = out.len();
    let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    for i in 0..d {
        out[i] = mean[i] + (0..=i).map(|j| chol[(i, j)] * z[j]).sum::<f64>();
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
