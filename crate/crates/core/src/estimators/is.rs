use super::{checkpoint, EstimateReport, RunningStats, TracePoint};
use crate::constraint::Constraint;
use crate::distributions::{open01, Distribution};
use crate::interval::IntervalBox;
use crate::rng::{RngStream, StreamRng};

/// An importance-sampling proposal q.
pub trait Proposal: Sync {
    fn dim(&self) -> usize;
    fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]);
    fn log_density(&self, x: &[f64]) -> f64;
}

impl Proposal for Distribution {
    fn dim(&self) -> usize {
        Distribution::dim(self)
    }

    fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]) {
        Distribution::sample_into(self, rng, out)
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        Distribution::log_density(self, x)
    }
}

/// Mixture of uniform distributions on boxes.
#[derive(Clone, Debug)]
pub struct BoxMixture {
    boxes: Vec<IntervalBox>,
    weights: Vec<f64>,
}

impl BoxMixture {
    /// Weights are normalized; boxes should have positive volume.
    pub fn new(boxes: Vec<IntervalBox>, weights: Vec<f64>) -> BoxMixture {
        assert!(!boxes.is_empty() && boxes.len() == weights.len());
        let total: f64 = weights.iter().sum();
        BoxMixture {
            boxes,
            weights: weights.iter().map(|w| w / total).collect(),
        }
    }
}

impl Proposal for BoxMixture {
    fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let u = open01(rng);
        let mut acc = 0.0;
        let mut k = self.boxes.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = i;
                break;
            }
        }
        for (o, iv) in out.iter_mut().zip(self.boxes[k].iter()) {
            *o = iv.lo + (iv.hi - iv.lo) * open01(rng);
        }
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let d: f64 = self
            .boxes
            .iter()
            .zip(&self.weights)
            .filter(|(b, _)| b.contains(x))
            .map(|(b, w)| w / b.volume())
            .sum();
        d.ln()
    }
}

/// Importance weight `1_C(x) p(x) / q(x)`.
pub fn is_weight(c: &Constraint, p: &Distribution, log_q: f64, x: &[f64]) -> f64 {
    if !c.satisfied(x) {
        return 0.0;
    }
    let w = (p.log_density(x) - log_q).exp();
    assert!(w.is_finite(), "non-finite importance weight");
    w
}

const BATCH: usize = 4096;

/// Plain importance sampling with a fixed proposal.
pub fn importance_sampling(
    c: &Constraint,
    p: &Distribution,
    q: &dyn Proposal,
    budget: u64,
    stream: RngStream,
) -> EstimateReport {
    assert!(budget >= 1);
    let batches = budget.div_ceil(BATCH as u64) as usize;
    let parts = crate::par_map(batches, |b| {
        let n = (budget - (b * BATCH) as u64).min(BATCH as u64);
        let mut rng = stream.derive(b as u64).rng();
        let mut x = vec![0.0; q.dim()];
        let mut s = RunningStats::default();
        for _ in 0..n {
            q.sample_into(&mut rng, &mut x);
            s.push(is_weight(c, p, q.log_density(&x), &x));
        }
        s
    });
    let mut all = RunningStats::default();
    let mut trace = Vec::new();
    for (i, s) in parts.iter().enumerate() {
        all.merge(s);
        if checkpoint(i, batches, 100) {
            trace.push(TracePoint {
                samples_used: all.n,
                mean: all.mean,
            });
        }
    }
    EstimateReport {
        mean: all.mean,
        variance: all.variance_of_mean(),
        n_samples: all.n,
        trace,
    }
}
