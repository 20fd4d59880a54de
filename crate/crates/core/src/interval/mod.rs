//! Interval arithmetic, HC4 contraction, paving and feasible-box search.

mod arith;
mod boxes;
mod contract;
mod pave;
mod search;

pub use arith::{Interval, ENTIRE, INFLATION};
pub use boxes::IntervalBox;
pub use contract::{bounding_box, hc4_contract, interval_eval, Contractor, Tape};
pub use pave::{pave, Paving};
pub use search::{dfs_feasible_boxes, DFS_NODE_BUDGET};

/// `w <= accuracy` for the feasible-box search, allowing for the outward
/// inflation of contracted bounds: a box contracted to exactly the accuracy
/// has its center tested instead of being split.
pub(crate) fn within_accuracy(w: f64, accuracy: f64) -> bool {
    w <= accuracy * (1.0 + 1e-6)
}
