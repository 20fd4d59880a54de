//! Input distributions p(x): densities, analytic gradients, ancestral
//! sampling, univariate CDFs and truncated sampling.

mod univariate;

pub use univariate::{Univariate, MIN_TRUNCATION_MASS};
pub(crate) use univariate::LN_SQRT_2PI;
pub use univariate::open01;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};

/// Draws used whenever a covariance has to be estimated by sampling.
pub const COVARIANCE_SAMPLES: usize = 100;

/// Multivariate Gaussian with its Cholesky factor cached.
#[derive(Clone, Debug, PartialEq)]
pub struct MvGaussian {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    precision: DMatrix<f64>,
    log_norm: f64,
}

impl MvGaussian {
    pub fn new(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<MvGaussian> {
        let d = mean.len();
        if d == 0 || cov.len() != d || cov.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidDistribution("covariance must be d x d".into()));
        }
        let cov = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
        if !cov.iter().chain(&mean).all(|v| v.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite parameter".into()));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::InvalidDistribution("covariance is not symmetric".into()));
        }
        let ch = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidDistribution("covariance is not positive definite".into()))?;
        let chol = ch.l();
        let precision = ch.inverse();
        let log_det_half: f64 = chol.diagonal().iter().map(|v| v.ln()).sum();
        Ok(MvGaussian {
            mean: DVector::from_vec(mean),
            cov,
            chol,
            precision,
            log_norm: -(d as f64) * LN_SQRT_2PI - log_det_half,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Lower Cholesky factor of the covariance.
    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        // Forward substitution L y = x - mean.
        let mut y = [0.0f64; 16];
        let mut heap;
        let y: &mut [f64] = if d <= 16 {
            &mut y[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        let mut q = 0.0;
        for i in 0..d {
            let mut s = x[i] - self.mean[i];
            for j in 0..i {
                s -= self.chol[(i, j)] * y[j];
            }
            y[i] = s / self.chol[(i, i)];
            q += y[i] * y[i];
        }
        self.log_norm - 0.5 * q
    }

    fn grad_into(&self, x: &[f64], g: &mut [f64]) {
        let d = self.dim();
        for i in 0..d {
            g[i] = -(0..d)
                .map(|j| self.precision[(i, j)] * (x[j] - self.mean[j]))
                .sum::<f64>();
        }
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.dim();
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for i in 0..d {
            out[i] = self.mean[i] + (0..=i).map(|j| self.chol[(i, j)] * z[j]).sum::<f64>();
        }
    }
}

/// One conditional factor: `dist` translated by the value of an earlier
/// variable when `loc_from` is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub dist: Univariate,
    pub loc_from: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Independent(Vec<Univariate>),
    MvGaussian(MvGaussian),
    /// Factorized conditional chain, sampled ancestrally in index order.
    Chain(Vec<Factor>),
}

/// A covariance matrix and the number of draws spent estimating it.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceEstimate {
    pub matrix: DMatrix<f64>,
    pub samples_used: usize,
}

impl Distribution {
    pub fn independent(components: Vec<Univariate>) -> Result<Distribution> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution("no components".into()));
        }
        for c in &components {
            c.validated()?;
        }
        Ok(Distribution::Independent(components))
    }

    /// Product of `d` standard normals.
    pub fn std_normal(d: usize) -> Distribution {
        Distribution::Independent(vec![Univariate::standard_normal(); d])
    }

    pub fn mv_gaussian(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Distribution> {
        MvGaussian::new(mean, cov).map(Distribution::MvGaussian)
    }

    pub fn chain(factors: Vec<Factor>) -> Result<Distribution> {
        if factors.is_empty() {
            return Err(Error::InvalidDistribution("no factors".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            f.dist.validated()?;
            if let Some(j) = f.loc_from {
                if j >= i {
                    return Err(Error::InvalidDistribution(format!(
                        "factor {i} references variable {j}, which is not earlier"
                    )));
                }
            }
        }
        Ok(Distribution::Chain(factors))
    }

    pub fn dim(&self) -> usize {
        match self {
            Distribution::Independent(c) => c.len(),
            Distribution::MvGaussian(g) => g.dim(),
            Distribution::Chain(f) => f.len(),
        }
    }

    /// Components when the joint is a product of univariates.
    pub fn as_independent(&self) -> Option<&[Univariate]> {
        match self {
            Distribution::Independent(c) => Some(c),
            _ => None,
        }
    }

    /// Variable groups that are statistically dependent.
    pub fn correlation_groups(&self) -> Vec<Vec<usize>> {
        match self {
            Distribution::Independent(_) => Vec::new(),
            Distribution::MvGaussian(g) => {
                let d = g.dim();
                let mut groups = Vec::new();
                for i in 0..d {
                    for j in i + 1..d {
                        if g.cov[(i, j)] != 0.0 {
                            groups.push(vec![i, j]);
                        }
                    }
                }
                groups
            }
            Distribution::Chain(f) => f
                .iter()
                .enumerate()
                .filter_map(|(i, f)| f.loc_from.map(|j| vec![j, i]))
                .collect(),
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::NanInput);
        }
        Ok(())
    }

    /// Natural log of the joint density; `-inf` outside the support.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.log_density(x))
    }

    /// Unchecked [`Distribution::log_pdf`] for hot loops.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        match self {
            Distribution::Independent(c) => c.iter().zip(x).map(|(u, &v)| u.log_pdf(v)).sum(),
            Distribution::MvGaussian(g) => g.log_pdf(x),
            Distribution::Chain(f) => f
                .iter()
                .enumerate()
                .map(|(i, fac)| fac.dist.log_pdf(x[i] - fac.loc_from.map_or(0.0, |j| x[j])))
                .sum(),
        }
    }

    /// Analytic gradient of the log density.
    pub fn grad_log_pdf(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut g = vec![0.0; x.len()];
        if self.grad_into(x, &mut g) {
            Ok(g)
        } else {
            Err(Error::OutsideSupport)
        }
    }

    /// Writes the gradient into `g`; `false` when `x` is not strictly
    /// inside the support.
    pub fn grad_into(&self, x: &[f64], g: &mut [f64]) -> bool {
        match self {
            Distribution::Independent(c) => {
                for (i, u) in c.iter().enumerate() {
                    match u.grad_log_pdf(x[i]) {
                        Some(v) => g[i] = v,
                        None => return false,
                    }
                }
            }
            Distribution::MvGaussian(m) => m.grad_into(x, g),
            Distribution::Chain(f) => {
                g.iter_mut().for_each(|v| *v = 0.0);
                for (i, fac) in f.iter().enumerate() {
                    let shift = fac.loc_from.map_or(0.0, |j| x[j]);
                    let Some(v) = fac.dist.grad_log_pdf(x[i] - shift) else {
                        return false;
                    };
                    g[i] += v;
                    if let Some(j) = fac.loc_from {
                        g[j] -= v;
                    }
                }
            }
        }
        true
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Distribution::Independent(c) => {
                for (o, u) in out.iter_mut().zip(c) {
                    *o = u.sample(rng);
                }
            }
            Distribution::MvGaussian(g) => g.sample_into(rng, out),
            Distribution::Chain(f) => {
                for (i, fac) in f.iter().enumerate() {
                    let shift = fac.loc_from.map_or(0.0, |j| out[j]);
                    out[i] = shift + fac.dist.sample(rng);
                }
            }
        }
    }

    /// `n` i.i.d. draws from one stream.
    pub fn sample(&self, stream: RngStream, n: usize) -> Vec<Vec<f64>> {
        let mut rng = stream.rng();
        (0..n)
            .map(|_| {
                let mut x = vec![0.0; self.dim()];
                self.sample_into(&mut rng, &mut x);
                x
            })
            .collect()
    }

    /// Covariance Λ of the input distribution: analytic where the family
    /// allows it, otherwise the sample covariance of exactly
    /// [`COVARIANCE_SAMPLES`] draws.
    pub fn covariance(&self, stream: RngStream) -> CovarianceEstimate {
        let d = self.dim();
        match self {
            Distribution::MvGaussian(g) => CovarianceEstimate {
                matrix: g.cov.clone(),
                samples_used: 0,
            },
            Distribution::Independent(c) => {
                let analytic: Vec<Option<f64>> = c.iter().map(Univariate::variance).collect();
                let mut samples_used = 0;
                let sampled = if analytic.iter().any(Option::is_none) {
                    samples_used = COVARIANCE_SAMPLES;
                    Some(sample_covariance(&self.sample(stream, COVARIANCE_SAMPLES)))
                } else {
                    None
                };
                let matrix = DMatrix::from_fn(d, d, |i, j| match (i == j, analytic[i]) {
                    (false, _) => 0.0,
                    (true, Some(v)) => v,
                    (true, None) => sampled.as_ref().expect("sampled")[(i, i)],
                });
                CovarianceEstimate {
                    matrix,
                    samples_used,
                }
            }
            Distribution::Chain(_) => CovarianceEstimate {
                matrix: sample_covariance(&self.sample(stream, COVARIANCE_SAMPLES)),
                samples_used: COVARIANCE_SAMPLES,
            },
        }
    }
}

/// Unbiased sample covariance of row vectors.
pub fn sample_covariance(xs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = xs.len();
    let d = xs.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; d];
    for x in xs {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / n as f64;
        }
    }
    let mut c = DMatrix::zeros(d, d);
    for x in xs {
        for i in 0..d {
            for j in 0..=i {
                c[(i, j)] += (x[i] - mean[i]) * (x[j] - mean[j]);
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for i in 0..d {
        for j in 0..=i {
            c[(i, j)] /= denom;
            c[(j, i)] = c[(i, j)];
        }
    }
    c
}
