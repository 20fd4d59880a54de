//! SYMPAIS: parallel interacting Markov adaptive importance sampling
//! (PI-MAIS) for the satisfaction probability of a constraint.
//!
//! `N` MCMC chains explore the truncated target `p̄(x) = 1_C(x) p(x)`.
//! After every chain step, the chain positions become the means of an
//! equal-weight Gaussian mixture proposal with covariance `factor * Λ`
//! (Λ the input covariance). `M` draws per component are weighted with the
//! deterministic-mixture weight `p̄(x) / ((1/N) sum_j q_j(x))`, and the
//! estimate is the average weight over all `T * N * M` draws.

mod mcmc;
mod mixture;
mod seed;

pub use mcmc::{adapt_scale, hmc_step, leapfrog, rwmh_step, ChainState, Target};
pub use mixture::{sample_gaussian, MixtureProposal};
pub use seed::{choose_seeds, feasible_points, seed_chains, FALLBACK_DRAWS};

use crate::constraint::Constraint;
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::estimators::{EstimateReport, RunningStats, TracePoint};
use crate::interval::{bounding_box, IntervalBox};
use crate::rng::RngStream;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    #[serde(rename = "rwmh")]
    Rwmh,
    #[serde(rename = "rwmh-truncated")]
    RwmhTruncated,
    #[serde(rename = "hmc")]
    Hmc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedStrategy {
    #[serde(rename = "single")]
    Single,
    #[serde(rename = "diverse")]
    Diverse,
    #[serde(rename = "diverse+resample")]
    DiverseResample,
}

macro_rules! str_enum {
    ($t:ty, $($v:path => $s:literal),+) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),+ })
            }
        }
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(Error::Config(format!(
                        "unknown value `{s}` (expected one of: {})",
                        [$($s),+].join(", ")
                    ))),
                }
            }
        }
    };
}

str_enum!(Kernel, Kernel::Rwmh => "rwmh", Kernel::RwmhTruncated => "rwmh-truncated", Kernel::Hmc => "hmc");
str_enum!(
    SeedStrategy,
    SeedStrategy::Single => "single",
    SeedStrategy::Diverse => "diverse",
    SeedStrategy::DiverseResample => "diverse+resample"
);

/// PI-MAIS settings. Defaults: 100 chains, 5 draws per component, 500
/// warmup steps, RWMH scale 1.0, proposal covariance 0.5Λ, HMC with 20
/// leapfrog steps of 0.1, budget 10^6.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PimaisConfig {
    pub n_chains: usize,
    pub samples_per_proposal: usize,
    /// Number of iterations `T`; derived from the budget when unset.
    pub iterations: Option<u64>,
    pub warmup: u64,
    pub rwmh_scale: f64,
    pub proposal_cov_factor: f64,
    pub hmc_steps: usize,
    pub hmc_step_size: f64,
    pub kernel: Kernel,
    pub seed_strategy: SeedStrategy,
    /// Total samples, including warmup and covariance estimation.
    pub budget: u64,
    /// Warmup steps between scale adaptations.
    pub adapt_interval: u64,
    /// Normalized accuracy of the depth-first seed search.
    pub dfs_accuracy: f64,
    pub max_seeds: usize,
}

impl Default for PimaisConfig {
    fn default() -> Self {
        PimaisConfig {
            n_chains: 100,
            samples_per_proposal: 5,
            iterations: None,
            warmup: 500,
            rwmh_scale: 1.0,
            proposal_cov_factor: 0.5,
            hmc_steps: 20,
            hmc_step_size: 0.1,
            kernel: Kernel::Rwmh,
            seed_strategy: SeedStrategy::DiverseResample,
            budget: 1_000_000,
            adapt_interval: 100,
            dfs_accuracy: 0.1,
            max_seeds: 1024,
        }
    }
}

impl PimaisConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_chains == 0 || self.samples_per_proposal == 0 {
            return bad("n_chains and samples_per_proposal must be at least 1");
        }
        if self.iterations == Some(0) {
            return bad("iterations must be at least 1");
        }
        if !(self.rwmh_scale > 0.0 && self.hmc_step_size > 0.0 && self.proposal_cov_factor > 0.0) {
            return bad("rwmh_scale and proposal_cov_factor and hmc_step_size must be positive");
        }
        if self.adapt_interval == 0 || !(self.dfs_accuracy > 0.0) || self.max_seeds == 0 {
            return bad("adapt_interval, dfs_accuracy and max_seeds must be positive");
        }
        let n = self.n_chains as u64;
        if self.budget < n * self.warmup + n * self.samples_per_proposal as u64 {
            return Err(Error::Config(format!(
                "budget {} is below n_chains * (warmup + samples_per_proposal) = {}",
                self.budget,
                n * (self.warmup + self.samples_per_proposal as u64)
            )));
        }
        Ok(())
    }

    /// Number of iterations affordable after warmup and `cov_samples`.
    pub fn plan_iterations(&self, cov_samples: u64) -> Result<u64> {
        let n = self.n_chains as u64;
        let per_iter = n * self.samples_per_proposal as u64;
        let fixed = n * self.warmup + cov_samples;
        let affordable = self.budget.saturating_sub(fixed) / per_iter;
        let t = self.iterations.unwrap_or(affordable);
        if t == 0 || t > affordable {
            return Err(Error::Config(format!(
                "budget {} cannot cover warmup ({}), covariance estimation ({cov_samples}) and {} iteration(s) of {per_iter} draws",
                self.budget,
                n * self.warmup,
                t.max(1)
            )));
        }
        Ok(t)
    }
}

/// Result of a run with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PimaisOutcome {
    pub report: EstimateReport,
    pub seeds: Vec<Vec<f64>>,
    pub final_positions: Vec<Vec<f64>>,
    /// Post-warmup acceptance rate over all chains.
    pub acceptance_rate: f64,
    pub iterations: u64,
}

const STREAM_SEED: u64 = 0;
const STREAM_COV: u64 = 1;
const STREAM_WARMUP: u64 = 2;
const STREAM_ITER: u64 = 3;

struct Stepper<'a> {
    target: Target<'a>,
    kernel: Kernel,
    kernel_box: Option<IntervalBox>,
    hmc_steps: usize,
    hmc_step_size: f64,
}

impl Stepper<'_> {
    fn step(&self, s: &mut ChainState, rng: &mut crate::rng::StreamRng) -> bool {
        let acc = match self.kernel {
            Kernel::Rwmh => rwmh_step(s, &self.target, None, rng),
            Kernel::RwmhTruncated => rwmh_step(s, &self.target, self.kernel_box.as_ref(), rng),
            Kernel::Hmc => hmc_step(s, &self.target, self.hmc_steps, self.hmc_step_size, rng),
        };
        debug_assert!(self.target.constraint.satisfied(&s.position));
        acc
    }
}

fn proposal_chol(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let d = cov.nrows();
    let mut jitter = 0.0;
    let scale = (cov.trace() / d as f64).abs().max(1e-300);
    loop {
        let m = cov + DMatrix::identity(d, d) * jitter;
        if let Some(ch) = m.cholesky() {
            return ch.l();
        }
        jitter = if jitter == 0.0 { 1e-12 * scale } else { jitter * 10.0 };
    }
}

pub fn pimais_run(c: &Constraint, p: &Distribution, cfg: &PimaisConfig, stream: RngStream) -> Result<EstimateReport> {
    pimais_run_detailed(c, p, cfg, stream).map(|o| o.report)
}

/// Runs PI-MAIS and returns the estimate with run diagnostics.
pub fn pimais_run_detailed(
    c: &Constraint,
    p: &Distribution,
    cfg: &PimaisConfig,
    stream: RngStream,
) -> Result<PimaisOutcome> {
    cfg.validate()?;
    if c.dim() != p.dim() {
        return Err(Error::Dimension {
            expected: c.dim(),
            got: p.dim(),
        });
    }
    let cov = p.covariance(stream.derive(STREAM_COV));
    let cov_samples = cov.samples_used as u64;
    let iterations = cfg.plan_iterations(cov_samples)?;
    let chol = proposal_chol(&(cov.matrix * cfg.proposal_cov_factor));
    let kernel_box = match cfg.kernel {
        Kernel::RwmhTruncated => Some(bounding_box(c).ok_or(Error::SeedingFailed)?),
        _ => None,
    };
    let stepper = Stepper {
        target: Target { constraint: c, dist: p },
        kernel: cfg.kernel,
        kernel_box,
        hmc_steps: cfg.hmc_steps,
        hmc_step_size: cfg.hmc_step_size,
    };
    let seeds = seed_chains(c, p, cfg, stream.derive(STREAM_SEED))?;
    let n = cfg.n_chains;
    let m = cfg.samples_per_proposal;
    let d = c.dim();

    let warm_stream = stream.derive(STREAM_WARMUP);
    let adapt = cfg.kernel != Kernel::Hmc;
    let mut chains: Vec<ChainState> = crate::par_map(n, |k| {
        let mut s = ChainState::new(seeds[k].clone(), &stepper.target, cfg.rwmh_scale)
            .expect("seeds satisfy the constraint with positive density");
        let mut rng = warm_stream.derive(k as u64).rng();
        let mut accepted = 0u64;
        for step in 0..cfg.warmup {
            accepted += stepper.step(&mut s, &mut rng) as u64;
            if adapt && (step + 1) % cfg.adapt_interval == 0 {
                s.scale = adapt_scale(accepted as f64 / cfg.adapt_interval as f64, s.scale);
                accepted = 0;
            }
        }
        s
    });

    let iter_stream = stream.derive(STREAM_ITER);
    let fixed = n as u64 * cfg.warmup + cov_samples;
    let mut all = RunningStats::default();
    let mut trace = Vec::with_capacity(iterations as usize);
    let mut accepted = 0u64;
    for t in 0..iterations {
        let moved = crate::par_map(n, |k| {
            let mut s = chains[k].clone();
            let mut rng = iter_stream.derive2(k as u64, t).rng();
            let acc = stepper.step(&mut s, &mut rng);
            let mut draws = Vec::with_capacity(m);
            for _ in 0..m {
                let mut x = vec![0.0; d];
                sample_gaussian(&s.position, &chol, &mut rng, &mut x);
                let lp = stepper.target.log_density(&x);
                draws.push((x, lp));
            }
            (s, acc, draws)
        });
        let q = MixtureProposal::new(moved.iter().map(|(s, _, _)| s.position.clone()).collect(), chol.clone());
        let parts = crate::par_map(n, |k| {
            let mut st = RunningStats::default();
            for (x, lp) in &moved[k].2 {
                let w = if lp.is_finite() { (lp - q.log_density(x)).exp() } else { 0.0 };
                assert!(w.is_finite() && w >= 0.0, "invalid importance weight {w}");
                st.push(w);
            }
            st
        });
        for st in &parts {
            all.merge(st);
        }
        trace.push(TracePoint {
            samples_used: fixed + all.n,
            mean: all.mean,
        });
        accepted += moved.iter().filter(|(_, a, _)| *a).count() as u64;
        chains = moved.into_iter().map(|(s, _, _)| s).collect();
    }
    let total = all.n;
    Ok(PimaisOutcome {
        report: EstimateReport {
            mean: all.mean,
            variance: all.sample_variance() / total as f64,
            n_samples: fixed + total,
            trace,
        },
        seeds,
        final_positions: chains.into_iter().map(|s| s.position).collect(),
        acceptance_rate: accepted as f64 / (iterations * n as u64) as f64,
        iterations,
    })
}
