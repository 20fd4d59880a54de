use super::{Contractor, IntervalBox};
use crate::constraint::{Certainty, Constraint};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Inner boxes hold only solutions; outer boxes are undecided.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Paving {
    pub vars: Vec<String>,
    pub accuracy: f64,
    /// True iff every undecided box reached the accuracy before the box
    /// budget ran out.
    pub exhausted: bool,
    pub inner: Vec<IntervalBox>,
    pub outer: Vec<IntervalBox>,
}

impl Paving {
    pub fn inner_volume(&self) -> f64 {
        self.inner.iter().map(IntervalBox::volume).sum()
    }

    pub fn outer_volume(&self) -> f64 {
        self.outer.iter().map(IntervalBox::volume).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty() && self.outer.is_empty()
    }

    /// Whether `x` lies in some inner or outer box.
    pub fn covers(&self, x: &[f64]) -> bool {
        self.inner.iter().chain(&self.outer).any(|b| b.contains(x))
    }
}

/// Branch-and-prune paving of the constraint's domain.
///
/// The frontier is processed first-in first-out. Undecided boxes are
/// bisected along their widest dimension (relative to the domain) until
/// their normalized width is at most `accuracy`. Once emitting another
/// split would exceed `max_boxes`, remaining undecided boxes are kept as
/// outer boxes and `exhausted` is cleared.
pub fn pave(c: &Constraint, accuracy: f64, max_boxes: usize) -> Paving {
    assert!(accuracy > 0.0 && max_boxes >= 1);
    let domain = c.domain();
    let k = Contractor::new(c);
    let mut paving = Paving {
        vars: c.vars().to_vec(),
        accuracy,
        exhausted: true,
        inner: Vec::new(),
        outer: Vec::new(),
    };
    let mut queue = VecDeque::from([domain.clone()]);
    while let Some(b) = queue.pop_front() {
        let Some(b) = k.contract(&b) else { continue };
        match k.classify(&b) {
            Certainty::True => paving.inner.push(b),
            Certainty::False => {}
            Certainty::Unknown => {
                let (dim, w) = b.widest_normalized(domain);
                if w <= accuracy {
                    paving.outer.push(b);
                } else if paving.inner.len() + paving.outer.len() + queue.len() + 2 > max_boxes {
                    paving.exhausted = false;
                    paving.outer.push(b);
                } else {
                    let (l, r) = b.split(dim);
                    queue.push_back(l);
                    queue.push_back(r);
                }
            }
        }
    }
    paving
}
