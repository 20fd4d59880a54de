use super::{EstimateReport, TracePoint};
use crate::constraint::Constraint;
use crate::distributions::{Distribution, MIN_TRUNCATION_MASS};
use crate::error::{Error, Result};
use crate::interval::{IntervalBox, Paving};
use crate::rng::RngStream;

/// Every outer box with positive mass gets at least this many samples.
pub const MIN_SAMPLES_PER_BOX: u64 = 10;
/// Sampling proceeds in this many rounds, one trace checkpoint each.
pub const STRATIFIED_ROUNDS: u64 = 10;

/// Probability of a box under an independent product: the product of
/// per-dimension CDF differences.
pub fn box_mass(p: &Distribution, b: &IntervalBox) -> Result<f64> {
    let comps = p.as_independent().ok_or(Error::CdfIntractable)?;
    if comps.len() != b.dim() {
        return Err(Error::Dimension {
            expected: comps.len(),
            got: b.dim(),
        });
    }
    Ok(comps.iter().zip(b.iter()).map(|(u, iv)| u.mass(iv.lo, iv.hi)).product())
}

fn per_dim_masses(p: &Distribution, b: &IntervalBox) -> Vec<f64> {
    let comps = p.as_independent().expect("checked independent");
    comps.iter().zip(b.iter()).map(|(u, iv)| u.mass(iv.lo, iv.hi)).collect()
}

/// Splits `budget` over boxes proportionally to `masses`, with a floor of
/// [`MIN_SAMPLES_PER_BOX`] for every box of positive mass. Largest
/// remainders (then lowest index) receive the rounding leftovers.
fn allocate(masses: &[f64], budget: u64) -> Vec<u64> {
    let active = masses.iter().filter(|&&m| m > 0.0).count() as u64;
    let total: f64 = masses.iter().sum();
    let extra = budget.saturating_sub(MIN_SAMPLES_PER_BOX * active);
    let mut alloc = vec![0u64; masses.len()];
    let mut rema = Vec::new();
    let mut used = 0u64;
    for (i, &m) in masses.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let share = extra as f64 * m / total;
        let fl = share.floor() as u64;
        alloc[i] = MIN_SAMPLES_PER_BOX + fl;
        used += fl;
        rema.push((share - fl as f64, i));
    }
    rema.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rema.iter().take(extra.saturating_sub(used) as usize) {
        alloc[i] += 1;
    }
    alloc
}

/// Stratified estimate over a paving: inner boxes contribute their exact
/// mass, outer boxes are sampled with per-dimension truncated draws.
///
/// The mean is `sum_O p(O) * hit_rate(O) + sum_I p(I)`, the variance
/// `sum_O p(O)^2 * var(hit_rate(O))`. A paving that ran out of box budget
/// is still a complete enclosure, so it is accepted.
pub fn stratified_estimate(
    c: &Constraint,
    p: &Distribution,
    paving: &Paving,
    budget: u64,
    stream: RngStream,
) -> Result<EstimateReport> {
    let comps = p.as_independent().ok_or(Error::CdfIntractable)?;
    assert_eq!(c.dim(), comps.len(), "constraint and distribution dimensions differ");
    let inner: f64 = paving
        .inner
        .iter()
        .map(|b| box_mass(p, b))
        .sum::<Result<f64>>()?;
    let masses: Vec<f64> = paving
        .outer
        .iter()
        .map(|b| {
            let dims = per_dim_masses(p, b);
            if dims.iter().all(|&m| m >= MIN_TRUNCATION_MASS) {
                dims.iter().product()
            } else {
                0.0
            }
        })
        .collect();
    let alloc = allocate(&masses, budget);
    let active: Vec<usize> = (0..masses.len()).filter(|&i| alloc[i] > 0).collect();
    let mut hits = vec![0u64; masses.len()];
    let mut counts = vec![0u64; masses.len()];
    let mut trace = Vec::new();
    let mut used = 0u64;
    for round in 0..STRATIFIED_ROUNDS {
        let draws = crate::par_map(active.len(), |k| -> Result<(u64, u64)> {
            let i = active[k];
            let n = alloc[i] * (round + 1) / STRATIFIED_ROUNDS - alloc[i] * round / STRATIFIED_ROUNDS;
            let b = &paving.outer[i];
            let mut rng = stream.derive2(i as u64, round).rng();
            let mut x = vec![0.0; comps.len()];
            let mut h = 0;
            for _ in 0..n {
                for (d, u) in comps.iter().enumerate() {
                    x[d] = u.sample_truncated(b[d].lo, b[d].hi, &mut rng)?;
                }
                h += c.indicator(&x) as u64;
            }
            Ok((n, h))
        });
        for (k, r) in draws.into_iter().enumerate() {
            let (n, h) = r?;
            counts[active[k]] += n;
            hits[active[k]] += h;
            used += n;
        }
        if used > 0 || round + 1 == STRATIFIED_ROUNDS {
            trace.push(TracePoint {
                samples_used: used,
                mean: inner + weighted(&masses, &hits, &counts).0,
            });
        }
    }
    let (outer, variance) = weighted(&masses, &hits, &counts);
    Ok(EstimateReport {
        mean: inner + outer,
        variance,
        n_samples: used,
        trace,
    })
}

fn weighted(masses: &[f64], hits: &[u64], counts: &[u64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut var = 0.0;
    for i in 0..masses.len() {
        if counts[i] == 0 {
            continue;
        }
        let r = hits[i] as f64 / counts[i] as f64;
        mean += masses[i] * r;
        var += masses[i] * masses[i] * r * (1.0 - r) / counts[i] as f64;
    }
    (mean, var)
}
