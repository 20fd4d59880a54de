//! MCMC kernels targeting the truncated density `p̄(x) = 1_C(x) p(x)`.

use crate::constraint::Constraint;
use crate::distributions::{open01, Distribution, Univariate};
use crate::interval::IntervalBox;
use crate::rng::StreamRng;
use rand_distr::{Distribution as _, StandardNormal};

/// The unnormalized truncated target.
#[derive(Clone, Copy)]
pub struct Target<'a> {
    pub constraint: &'a Constraint,
    pub dist: &'a Distribution,
}

impl Target<'_> {
    /// `log p(x)` inside the constraint, `-inf` outside.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        if self.constraint.satisfied(x) {
            self.dist.log_density(x)
        } else {
            f64::NEG_INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub position: Vec<f64>,
    /// `log p̄` at `position`; always finite.
    pub log_target: f64,
    /// Random-walk scale; unused by HMC.
    pub scale: f64,
}

impl ChainState {
    pub fn new(position: Vec<f64>, target: &Target, scale: f64) -> Option<ChainState> {
        let log_target = target.log_density(&position);
        log_target.is_finite().then_some(ChainState {
            position,
            log_target,
            scale,
        })
    }
}

/// Log normalizer of the per-dimension truncated Gaussian kernel centered
/// at `c`: `sum_i log(Phi((hi_i-c_i)/s) - Phi((lo_i-c_i)/s))`. Degenerate
/// dimensions contribute nothing.
fn log_kernel_mass(c: &[f64], b: &IntervalBox, s: f64) -> f64 {
    c.iter()
        .zip(b.iter())
        .filter(|(_, iv)| iv.width() > 0.0)
        .map(|(&ci, iv)| Univariate::Gaussian { loc: ci, scale: s }.mass(iv.lo, iv.hi).ln())
        .sum()
}

/// One random-walk Metropolis-Hastings step. Returns whether the proposal
/// was accepted; on rejection the state is left unchanged.
///
/// Without `kernel_box` the proposal is `N(x, s^2 I)`. With it, each
/// coordinate is drawn from a Gaussian truncated to the box, and the
/// acceptance ratio carries the Hastings correction `Z(x) / Z(x')`.
pub fn rwmh_step(
    s: &mut ChainState,
    target: &Target,
    kernel_box: Option<&IntervalBox>,
    rng: &mut StreamRng,
) -> bool {
    let d = s.position.len();
    let mut prop = vec![0.0; d];
    let mut log_hastings = 0.0;
    match kernel_box {
        None => {
            for (p, &x) in prop.iter_mut().zip(&s.position) {
                let z: f64 = StandardNormal.sample(rng);
                *p = x + s.scale * z;
            }
        }
        Some(b) => {
            for i in 0..d {
                let iv = b[i];
                prop[i] = if iv.width() > 0.0 {
                    match (Univariate::Gaussian {
                        loc: s.position[i],
                        scale: s.scale,
                    })
                    .sample_truncated(iv.lo, iv.hi, rng)
                    {
                        Ok(v) => v,
                        Err(_) => return false,
                    }
                } else {
                    iv.lo
                };
            }
            log_hastings = log_kernel_mass(&s.position, b, s.scale) - log_kernel_mass(&prop, b, s.scale);
        }
    }
    let lt = target.log_density(&prop);
    if !lt.is_finite() {
        return false;
    }
    let log_alpha = lt - s.log_target + log_hastings;
    if log_alpha >= 0.0 || open01(rng).ln() < log_alpha {
        s.position = prop;
        s.log_target = lt;
        true
    } else {
        false
    }
}

/// Piecewise scale tuning on the acceptance rate of the last window.
pub fn adapt_scale(acceptance: f64, scale: f64) -> f64 {
    if acceptance < 0.05 {
        scale * 0.5
    } else if acceptance < 0.2 {
        scale * 0.9
    } else if acceptance > 0.95 {
        scale * 2.0
    } else if acceptance > 0.5 {
        scale * 1.1
    } else {
        scale
    }
}

/// Leapfrog integration of `H(x, rho) = |rho|^2 / 2 - log p(x)` for
/// `steps` steps of size `eps`.
///
/// Returns `None` as soon as a position fails `inside` or leaves the open
/// support of `p`.
pub fn leapfrog(
    dist: &Distribution,
    x: &[f64],
    rho: &[f64],
    eps: f64,
    steps: usize,
    inside: impl Fn(&[f64]) -> bool,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = x.len();
    let mut x = x.to_vec();
    let mut rho = rho.to_vec();
    let mut g = vec![0.0; d];
    if !dist.grad_into(&x, &mut g) {
        return None;
    }
    for _ in 0..steps {
        // grad U = -grad log p
        for i in 0..d {
            rho[i] += 0.5 * eps * g[i];
        }
        for i in 0..d {
            x[i] += eps * rho[i];
        }
        if !inside(&x) || !dist.grad_into(&x, &mut g) {
            return None;
        }
        for i in 0..d {
            rho[i] += 0.5 * eps * g[i];
        }
    }
    Some((x, rho))
}

/// One HMC step with unit mass matrix. Trajectories that leave the
/// constraint are rejected.
pub fn hmc_step(s: &mut ChainState, target: &Target, steps: usize, eps: f64, rng: &mut StreamRng) -> bool {
    let rho: Vec<f64> = (0..s.position.len()).map(|_| StandardNormal.sample(rng)).collect();
    let u = open01(rng);
    let c = target.constraint;
    let Some((x1, rho1)) = leapfrog(target.dist, &s.position, &rho, eps, steps, |x| c.satisfied(x)) else {
        return false;
    };
    let lt = target.dist.log_density(&x1);
    if !lt.is_finite() {
        return false;
    }
    let kinetic = |r: &[f64]| 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let h0 = -s.log_target + kinetic(&rho);
    let h1 = -lt + kinetic(&rho1);
    if h0 - h1 >= 0.0 || u.ln() < h0 - h1 {
        s.position = x1;
        s.log_target = lt;
        true
    } else {
        false
    }
}
