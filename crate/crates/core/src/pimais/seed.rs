use super::{PimaisConfig, SeedStrategy};
use crate::constraint::Constraint;
use crate::distributions::{open01, Distribution};
use crate::error::{Error, Result};
use crate::interval::dfs_feasible_boxes;
use crate::rng::RngStream;

/// Rejection draws from `p` tried when the box search finds nothing.
pub const FALLBACK_DRAWS: usize = 100_000;

/// Feasible candidate points: centers of boxes found by depth-first search
/// that satisfy the constraint and have positive density. Falls back to
/// rejection sampling from `p`.
pub fn feasible_points(
    c: &Constraint,
    p: &Distribution,
    cfg: &PimaisConfig,
    stream: RngStream,
) -> Result<Vec<Vec<f64>>> {
    let pts: Vec<Vec<f64>> = dfs_feasible_boxes(c, cfg.dfs_accuracy, cfg.max_seeds)
        .iter()
        .map(|b| b.center())
        .filter(|x| c.satisfied(x) && p.log_density(x).is_finite())
        .collect();
    if !pts.is_empty() {
        return Ok(pts);
    }
    let mut rng = stream.rng();
    let mut x = vec![0.0; c.dim()];
    for _ in 0..FALLBACK_DRAWS {
        p.sample_into(&mut rng, &mut x);
        if c.satisfied(&x) && p.log_density(&x).is_finite() {
            return Ok(vec![x]);
        }
    }
    Err(Error::SeedingFailed)
}

/// Initial positions for the `N` chains.
///
/// * `single`: the first feasible point, replicated.
/// * `diverse`: the feasible points, cycled when there are fewer than `N`
///   and evenly subsampled (`i * F / N`) when there are more.
/// * `diverse+resample`: `N` categorical draws over the feasible points
///   with probabilities proportional to `p(x_i)`.
pub fn seed_chains(
    c: &Constraint,
    p: &Distribution,
    cfg: &PimaisConfig,
    stream: RngStream,
) -> Result<Vec<Vec<f64>>> {
    let pts = feasible_points(c, p, cfg, stream.derive(0))?;
    Ok(choose_seeds(&pts, p, cfg.seed_strategy, cfg.n_chains, stream.derive(1)))
}

pub fn choose_seeds(
    pts: &[Vec<f64>],
    p: &Distribution,
    strategy: SeedStrategy,
    n: usize,
    stream: RngStream,
) -> Vec<Vec<f64>> {
    let f = pts.len();
    match strategy {
        SeedStrategy::Single => vec![pts[0].clone(); n],
        SeedStrategy::Diverse => (0..n)
            .map(|i| {
                let k = if f >= n { i * f / n } else { i % f };
                pts[k].clone()
            })
            .collect(),
        SeedStrategy::DiverseResample => {
            let logs: Vec<f64> = pts.iter().map(|x| p.log_density(x)).collect();
            let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
            let total: f64 = w.iter().sum();
            let mut cdf = Vec::with_capacity(f);
            let mut acc = 0.0;
            for wi in &w {
                acc += wi / total;
                cdf.push(acc);
            }
            let mut rng = stream.rng();
            (0..n)
                .map(|_| {
                    let u = open01(&mut rng);
                    let k = cdf.partition_point(|&c| c <= u).min(f - 1);
                    pts[k].clone()
                })
                .collect()
        }
    }
}
