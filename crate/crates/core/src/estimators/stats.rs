/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two disjoint sample sets (Chan et al.).
    pub fn merge(&mut self, o: &RunningStats) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let mean = if o.mean == self.mean {
            self.mean
        } else {
            self.mean + d * o.n as f64 / n as f64
        };
        self.m2 += o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64;
        self.mean = mean;
        self.n = n;
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Variance of the sample mean.
    pub fn variance_of_mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sample_variance() / self.n as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let mean = xs.iter().sum::<f64>() / 50.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0;
        let mut a = RunningStats::default();
        let mut b = RunningStats::default();
        xs[..20].iter().for_each(|&x| a.push(x));
        xs[20..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.n, 50);
        assert!((a.mean - mean).abs() < 1e-14 && (a.sample_variance() - var).abs() < 1e-13);
    }

    #[test]
    fn constant_values_have_zero_variance() {
        let mut a = RunningStats::default();
        for _ in 0..1000 {
            a.push(0.24);
        }
        let mut b = a;
        b.merge(&a);
        assert_eq!(b.sample_variance(), 0.0);
        assert_eq!(b.mean, 0.24);
    }
}
