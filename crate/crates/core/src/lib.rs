//! Satisfaction-probability estimation for numeric path conditions.
//!
//! Given a conjunction of numeric constraints `C` over real inputs and an
//! input distribution `p(x)`, estimate `P(x ⊨ C)`. The crate provides
//! direct Monte Carlo, stratified sampling over interval pavings and
//! SYMPAIS, an adaptive importance sampler whose Gaussian-mixture proposal
//! follows parallel MCMC chains confined to the solution space.

pub mod constraint;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod interval;
pub mod pimais;
pub mod rng;

pub use constraint::Constraint;
pub use distributions::{Distribution, Univariate};
pub use error::{Error, Result};
pub use interval::{Interval, IntervalBox};
pub use rng::RngStream;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Output order is always index order.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
