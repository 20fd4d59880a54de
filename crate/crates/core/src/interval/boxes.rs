use super::Interval;
use serde::{Deserialize, Serialize};

/// Axis-aligned box, one interval per constraint variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox(pub Vec<Interval>);

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> IntervalBox {
        IntervalBox(dims)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.0.len() && self.0.iter().zip(x).all(|(i, v)| i.contains(*v))
    }

    pub fn volume(&self) -> f64 {
        self.0.iter().map(Interval::width).product()
    }

    pub fn intersect(&self, o: &IntervalBox) -> Option<IntervalBox> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()
            .map(IntervalBox)
    }

    /// Largest width relative to `reference` widths (dimensions of zero
    /// reference width are measured absolutely).
    pub fn max_normalized_width(&self, reference: &IntervalBox) -> f64 {
        self.widest_normalized(reference).1
    }

    pub fn widest_normalized(&self, reference: &IntervalBox) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, (a, r)) in self.0.iter().zip(&reference.0).enumerate() {
            let rw = r.width();
            let w = if rw > 0.0 { a.width() / rw } else { a.width() };
            if w > best.1 {
                best = (k, w);
            }
        }
        best
    }

    /// Bisects dimension `k` at its midpoint.
    pub fn split(&self, k: usize) -> (IntervalBox, IntervalBox) {
        let m = self.0[k].mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.0[k].hi = m;
        right.0[k].lo = m;
        (left, right)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.0.iter()
    }
}

impl std::ops::Index<usize> for IntervalBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for IntervalBox {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}
