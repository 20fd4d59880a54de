use paisc::RngStream;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

/// One hidden ReLU layer followed by a linear output:
/// `z = W0 x + b0`, `a = relu(z)`, `y = W1 a + b1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReluNetwork {
    pub w0: Vec<Vec<f64>>,
    pub b0: Vec<f64>,
    pub w1: Vec<f64>,
    pub b1: f64,
    pub seed: u64,
}

impl ReluNetwork {
    /// All weights i.i.d. `N(0, 1)`, drawn row-major from `seed`.
    pub fn sample(d: usize, m: usize, seed: u64) -> ReluNetwork {
        assert!(d >= 1 && m >= 1);
        let mut rng = RngStream::new(seed, 0).rng();
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let w0 = (0..m).map(|_| (0..d).map(|_| draw()).collect()).collect();
        let b0 = (0..m).map(|_| draw()).collect();
        let w1 = (0..m).map(|_| draw()).collect();
        let b1 = draw();
        ReluNetwork { w0, b0, w1, b1, seed }
    }

    pub fn input_dim(&self) -> usize {
        self.w0[0].len()
    }

    pub fn hidden(&self) -> usize {
        self.w0.len()
    }

    pub fn pre_activation(&self, x: &[f64]) -> Vec<f64> {
        self.w0
            .iter()
            .zip(&self.b0)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let z = self.pre_activation(x);
        z.iter().zip(&self.w1).map(|(z, w)| w * z.max(0.0)).sum::<f64>() + self.b1
    }

    /// Activation pattern as a bit mask; bit `i` is set iff `z_i >= 0`.
    pub fn pattern(&self, x: &[f64]) -> usize {
        self.pre_activation(x)
            .iter()
            .enumerate()
            .filter(|(_, z)| **z >= 0.0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Constraint text for `pattern` over variables `x1..xd`.
    pub fn pattern_constraint(&self, pattern: usize) -> String {
        let atoms: Vec<String> = self
            .w0
            .iter()
            .zip(&self.b0)
            .enumerate()
            .map(|(i, (row, b))| {
                let mut s = String::new();
                for (j, w) in row.iter().enumerate() {
                    if j > 0 {
                        s.push_str(" + ");
                    }
                    s.push_str(&format!("{w:?}*x{}", j + 1));
                }
                s.push_str(&format!(" + {b:?}"));
                let rel = if pattern >> i & 1 == 1 { ">=" } else { "<" };
                format!("{s} {rel} 0")
            })
            .collect();
        atoms.join(" && ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use paisc::Constraint;

    #[test]
    fn pattern_constraint_agrees_with_pattern() {
        let net = ReluNetwork::sample(3, 4, 9);
        let decls: String = (1..=3).map(|i| format!("x{i} -100 100\n")).collect();
        let cs: Vec<Constraint> = (0..16)
            .map(|s| Constraint::parse(&net.pattern_constraint(s), &decls).unwrap())
            .collect();
        let pts = paisc::Distribution::std_normal(3).sample(RngStream::new(1, 1), 500);
        for x in &pts {
            let s = net.pattern(x);
            for (k, c) in cs.iter().enumerate() {
                assert_eq!(c.satisfied(x), k == s);
            }
        }
    }

    #[test]
    fn seeded() {
        assert_eq!(ReluNetwork::sample(5, 5, 3), ReluNetwork::sample(5, 5, 3));
        assert_ne!(ReluNetwork::sample(5, 5, 3), ReluNetwork::sample(5, 5, 4));
        let net = ReluNetwork::sample(2, 3, 0);
        assert_eq!((net.input_dim(), net.hidden()), (2, 3));
        assert!(net.forward(&[0.3, -0.2]).is_finite());
    }
}
