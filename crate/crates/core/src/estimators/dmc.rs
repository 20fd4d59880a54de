use super::{checkpoint, EstimateReport, TracePoint};
use crate::constraint::Constraint;
use crate::distributions::Distribution;
use crate::rng::RngStream;

/// Samples per batch; each batch draws from its own derived stream, so the
/// result is independent of the thread count.
pub const DMC_BATCH: usize = 4096;

const TRACE_POINTS: usize = 100;

/// Direct Monte Carlo (hit-or-miss): the fraction of `budget` draws from
/// `p` that satisfy `c`, with variance `p(1-p)/N`.
pub fn dmc_estimate(c: &Constraint, p: &Distribution, budget: u64, stream: RngStream) -> EstimateReport {
    assert!(budget >= 1, "budget must be positive");
    assert_eq!(c.dim(), p.dim(), "constraint and distribution dimensions differ");
    let batches = budget.div_ceil(DMC_BATCH as u64) as usize;
    let hits = crate::par_map(batches, |b| {
        let n = (budget - (b * DMC_BATCH) as u64).min(DMC_BATCH as u64);
        let mut rng = stream.derive(b as u64).rng();
        let mut x = vec![0.0; c.dim()];
        let mut h = 0u64;
        for _ in 0..n {
            p.sample_into(&mut rng, &mut x);
            h += c.indicator(&x) as u64;
        }
        (n, h)
    });
    let mut trace = Vec::new();
    let (mut n, mut h) = (0u64, 0u64);
    for (i, (bn, bh)) in hits.iter().enumerate() {
        n += bn;
        h += bh;
        if checkpoint(i, batches, TRACE_POINTS) {
            trace.push(TracePoint {
                samples_used: n,
                mean: h as f64 / n as f64,
            });
        }
    }
    let mean = h as f64 / n as f64;
    EstimateReport {
        mean,
        variance: mean * (1.0 - mean) / n as f64,
        n_samples: n,
        trace,
    }
}
