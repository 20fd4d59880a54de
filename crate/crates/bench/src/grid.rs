use crate::methods::{run_method, Method, MethodParams};
use crate::subjects::Subject;
use paisc::estimators::rae;
use paisc::interval::Paving;
use paisc::rng::splitmix64;
use paisc::{Error, Result, RngStream};
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

pub const CSV_HEADER: [&str; 10] = [
    "subject",
    "method",
    "budget",
    "repetition",
    "seed",
    "samples_used",
    "mean",
    "variance",
    "rae",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub methods: Vec<Method>,
    pub budgets: Vec<u64>,
    pub repetitions: u32,
    pub base_seed: u64,
    pub params: MethodParams,
    /// Record wall-clock time per cell. Off by default so that output is
    /// reproducible byte for byte.
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellOutcome {
    Estimate {
        samples_used: u64,
        mean: f64,
        variance: f64,
        /// `None` when the subject has no ground truth.
        rae: Option<f64>,
    },
    NotApplicable(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub subject: String,
    pub method: Method,
    pub budget: u64,
    pub repetition: u32,
    pub seed: u64,
    pub outcome: CellOutcome,
    pub wall_ms: Option<f64>,
}

impl Row {
    pub fn rae(&self) -> Option<f64> {
        match self.outcome {
            CellOutcome::Estimate { rae, .. } => rae,
            CellOutcome::NotApplicable(_) => None,
        }
    }

    fn record(&self) -> [String; 10] {
        let (samples, mean, var, rae) = match &self.outcome {
            CellOutcome::Estimate {
                samples_used,
                mean,
                variance,
                rae,
            } => (
                samples_used.to_string(),
                mean.to_string(),
                variance.to_string(),
                rae.map_or("NA".into(), |r| r.to_string()),
            ),
            CellOutcome::NotApplicable(_) => ("0".into(), "NA".into(), "NA".into(), "NA".into()),
        };
        [
            self.subject.clone(),
            self.method.to_string(),
            self.budget.to_string(),
            self.repetition.to_string(),
            self.seed.to_string(),
            samples,
            mean,
            var,
            rae,
            self.wall_ms.map_or(String::new(), |w| format!("{w:.3}")),
        ]
    }
}

/// Seed of grid cell `index`.
pub fn cell_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index))
}

/// Runs every (subject, method, budget, repetition) cell. Cells are
/// numbered in that nesting order and each is seeded from its index, so
/// the rows do not depend on scheduling. A method that cannot handle a
/// subject yields a not-applicable row; any other failure aborts the grid.
pub fn run_grid(subjects: &[Subject], cfg: &GridConfig) -> Result<Vec<Row>> {
    if cfg.methods.is_empty() || cfg.budgets.is_empty() || cfg.repetitions == 0 {
        return Err(Error::Config("grid needs at least one method, budget and repetition".into()));
    }
    let (nm, nb, nr) = (cfg.methods.len(), cfg.budgets.len(), cfg.repetitions as usize);
    let per_subject = nm * nb * nr;
    let pavings: Vec<OnceLock<Result<Paving>>> = subjects.iter().map(|_| OnceLock::new()).collect();
    let rows = paisc::par_map(subjects.len() * per_subject, |idx| {
        let s = &subjects[idx / per_subject];
        let rest = idx % per_subject;
        let method = cfg.methods[rest / (nb * nr)];
        let budget = cfg.budgets[rest / nr % nb];
        let repetition = (rest % nr) as u32;
        let seed = cell_seed(cfg.base_seed, idx as u64);
        let start = Instant::now();
        let paving = if method == Method::Stratified && !s.is_correlated() {
            let pv = pavings[idx / per_subject].get_or_init(|| cfg.params.paving(&s.constraint));
            Some(pv.as_ref().map_err(Clone::clone)?)
        } else {
            None
        };
        let result = run_method(
            method,
            &s.constraint,
            &s.distribution,
            budget,
            RngStream::new(seed, 0),
            &cfg.params,
            paving,
        );
        let outcome = match result {
            Ok(r) => CellOutcome::Estimate {
                samples_used: r.n_samples,
                mean: r.mean,
                variance: r.variance,
                rae: s.truth.as_ref().map(|t| rae(r.mean, t.value)),
            },
            Err(Error::NotApplicable { reason, .. }) => CellOutcome::NotApplicable(reason),
            Err(Error::Config(msg)) => return Err(Error::Config(format!("{} / {method}: {msg}", s.name))),
            Err(e) => return Err(e),
        };
        Ok(Row {
            subject: s.name.clone(),
            method,
            budget,
            repetition,
            seed,
            outcome,
            wall_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        })
    });
    rows.into_iter().collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub subject: String,
    pub method: Method,
    pub budget: u64,
    /// Median RAE over repetitions with a ground truth.
    pub median_rae: Option<f64>,
    pub runs: usize,
    pub not_applicable: bool,
}

pub(crate) fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Median RAE per (subject, method, budget), in first-appearance order.
pub fn summarize(rows: &[Row]) -> Vec<Summary> {
    let mut keys: Vec<(&str, Method, u64)> = Vec::new();
    for r in rows {
        let k = (r.subject.as_str(), r.method, r.budget);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(subject, method, budget)| {
            let cell: Vec<&Row> = rows
                .iter()
                .filter(|r| r.subject == subject && r.method == method && r.budget == budget)
                .collect();
            Summary {
                subject: subject.to_string(),
                method,
                budget,
                median_rae: median(cell.iter().filter_map(|r| r.rae()).collect()),
                runs: cell.len(),
                not_applicable: cell.iter().all(|r| matches!(r.outcome, CellOutcome::NotApplicable(_))),
            }
        })
        .collect()
}
