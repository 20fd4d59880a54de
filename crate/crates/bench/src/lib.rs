//! Benchmark subjects with ground truth, and multi-method experiment grids.
//!
//! Subjects are the sphere and torus microbenchmarks, ReLU activation
//! patterns of a seeded synthetic network, and random linear conjunctions
//! over truncated Gaussians. Analytic truths are computed on the fly; the
//! rest are read from cached brute-force fixtures (see [`FixtureStore`]).

mod grid;
mod methods;
mod relu;
mod subjects;
mod truth;

pub use grid::{cell_seed, run_grid, summarize, write_csv, CellOutcome, GridConfig, Row, Summary, CSV_HEADER};
pub use methods::{run_method, Method, MethodParams};
pub use relu::ReluNetwork;
pub use subjects::{
    circle, gen_linear, gen_relu_patterns, gen_sphere, gen_torus, resolve, Subject, BUILTINS, DEFAULT_NET_SEED,
    MAX_RELU_UNITS,
};
pub use truth::{
    brute_force, make_truth, noncentral_chi2_cdf, Fixture, FixtureStore, Provenance, Truth, ORACLE_SAMPLES,
    ORACLE_SEED,
};
