//! `paisc`: estimate satisfaction probabilities, pave constraints, run
//! benchmark grids and regenerate cached ground truths.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error,
//! 3 seeding failure, 4 method not applicable.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{uniform_on_domain, FileConfig};
use paisc::interval::pave;
use paisc::{Constraint, Error, Result, RngStream};
use paisc_bench::{
    resolve, run_grid, run_method, summarize, write_csv, FixtureStore, GridConfig, Method, MethodParams, Subject,
    BUILTINS, ORACLE_SAMPLES, ORACLE_SEED,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "paisc", version, about = "Satisfaction-probability estimation for numeric path conditions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base random seed [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample budget; bench accepts a comma-separated list [default: 1000000]
    #[arg(long, global = true, value_delimiter = ',')]
    budget: Vec<u64>,
    /// Estimator: dmc, stratified, sympais, sympais-h or sympais-t; bench
    /// accepts a comma-separated list
    #[arg(long, global = true)]
    method: Option<String>,
    /// Print JSON instead of text (estimate)
    #[arg(long, global = true)]
    json: bool,
    /// Write the result to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Builtin subject name(s), comma separated (see `paisc subjects`)
    #[arg(long, global = true)]
    subject: Option<String>,
    /// Constraint text, e.g. "x*x + y*y <= 1"
    #[arg(long, global = true)]
    constraint: Option<String>,
    /// Domain file for --constraint: one `name lo hi` line per variable
    #[arg(long, global = true, value_name = "FILE")]
    domain: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate the satisfaction probability of one constraint
    Estimate,
    /// Pave a constraint into inner and outer boxes (JSON)
    Pave {
        /// Normalized box width at which splitting stops [default: 0.01]
        #[arg(long)]
        accuracy: Option<f64>,
        /// Maximum number of boxes [default: 1024]
        #[arg(long)]
        max_boxes: Option<usize>,
    },
    /// Run a subjects x methods x budgets x repetitions grid (CSV)
    Bench {
        /// Repetitions per cell [default: 20]
        #[arg(long)]
        repetitions: Option<u32>,
        /// Fill the wall_ms column (makes the output non-reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Regenerate cached brute-force ground truths ($PAISC_FIXTURES)
    MakeTruth {
        /// Oracle sample count [default: 100000000]
        #[arg(long)]
        samples: Option<u64>,
    },
    /// List builtin subjects
    Subjects,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SeedingFailed => 3,
        Error::NotApplicable { .. } | Error::CdfIntractable => 4,
        Error::EmptyTruncation { .. } | Error::OutsideSupport | Error::NanInput => 1,
        _ => 2,
    }
}

struct Ctx {
    common: Common,
    file: FileConfig,
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.common.seed.or(self.file.seed).unwrap_or(0)
    }

    fn budgets(&self) -> Vec<u64> {
        if !self.common.budget.is_empty() {
            self.common.budget.clone()
        } else {
            self.file.budget.as_ref().map_or(vec![1_000_000], |b| b.to_vec())
        }
    }

    fn methods(&self, default: &str) -> Result<Vec<Method>> {
        let text = self.common.method.as_deref().or(self.file.method.as_deref()).unwrap_or(default);
        text.split(',').map(|m| m.trim().parse()).collect()
    }

    fn out(&self) -> Option<&Path> {
        self.common.out.as_deref().or(self.file.out.as_deref())
    }

    fn params(&self) -> MethodParams {
        MethodParams {
            pimais: self.file.sympais.clone(),
            pave_accuracy: self.file.paving.accuracy,
            pave_max_boxes: self.file.paving.max_boxes,
        }
    }

    fn custom(&self, text: &str) -> Result<Subject> {
        let decls = match (&self.common.domain, &self.file.domain_file, &self.file.domain) {
            (Some(p), _, _) | (None, Some(p), _) => read(p)?,
            (None, None, Some(d)) => d.clone(),
            (None, None, None) => return Err(Error::Config("--constraint needs --domain".into())),
        };
        let constraint = Constraint::parse(text, &decls)?;
        let distribution = match &self.file.distribution {
            Some(spec) => spec.build(constraint.vars())?,
            None => uniform_on_domain(&constraint)?,
        };
        Ok(Subject {
            name: "custom".into(),
            constraint,
            distribution,
            truth: None,
            relu: None,
        })
    }

    fn subjects(&self) -> Result<Vec<Subject>> {
        let store = FixtureStore::from_env();
        let names = |list: &str| -> Result<Vec<Subject>> {
            let mut out = Vec::new();
            for n in list.split(',') {
                out.extend(resolve(n.trim(), &store)?);
            }
            Ok(out)
        };
        if let Some(t) = &self.common.constraint {
            return Ok(vec![self.custom(t)?]);
        }
        if let Some(s) = &self.common.subject {
            return names(s);
        }
        if let Some(t) = &self.file.constraint {
            return Ok(vec![self.custom(t)?]);
        }
        if let Some(s) = &self.file.subject {
            return names(s);
        }
        Err(Error::Config("no problem given: use --subject or --constraint with --domain".into()))
    }

    fn single_subject(&self) -> Result<Subject> {
        let mut s = self.subjects()?;
        if s.len() != 1 {
            return Err(Error::Config(format!(
                "expected one subject, got {}; use `paisc bench` for suites",
                s.len()
            )));
        }
        Ok(s.remove(0))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match self.out() {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
}

fn estimate(ctx: &Ctx) -> Result<()> {
    let s = ctx.single_subject()?;
    let method = match ctx.methods("sympais")?.as_slice() {
        [m] => *m,
        _ => return Err(Error::Config("estimate takes a single --method".into())),
    };
    let budget = match ctx.budgets().as_slice() {
        [b] => *b,
        _ => return Err(Error::Config("estimate takes a single --budget".into())),
    };
    let seed = ctx.seed();
    let start = Instant::now();
    let r = run_method(
        method,
        &s.constraint,
        &s.distribution,
        budget,
        RngStream::new(seed, 0),
        &ctx.params(),
        None,
    )?;
    let elapsed = start.elapsed();
    let rae = s.truth.as_ref().map(|t| paisc::estimators::rae(r.mean, t.value));
    let csv_out = ctx.out().is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    let text = if csv_out {
        let na = |v: Option<f64>| v.map_or("NA".to_string(), |v| v.to_string());
        format!(
            "method,subject,seed,samples,mean,variance,rae\n{method},{},{seed},{},{},{},{}\n",
            s.name,
            r.n_samples,
            r.mean,
            r.variance,
            na(rae)
        )
    } else if ctx.common.json || ctx.file.json == Some(true) {
        let v = serde_json::json!({
            "subject": s.name,
            "constraint": s.constraint.to_string(),
            "method": method,
            "seed": seed,
            "budget": budget,
            "truth": s.truth.as_ref().map(|t| t.value),
            "rae": rae,
            "report": r,
        });
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    } else {
        let mut t = format!(
            "subject    {}\nmethod     {method}\nseed       {seed}\nmean       {}\nvariance   {}\nstd_error  {}\nsamples    {}\n",
            s.name,
            r.mean,
            r.variance,
            r.std_error(),
            r.n_samples
        );
        if let (Some(truth), Some(rae)) = (&s.truth, rae) {
            t += &format!("truth      {}\nrae        {rae}\n", truth.value);
        }
        t
    };
    ctx.emit(&text)?;
    eprintln!("runtime    {:.1} ms", elapsed.as_secs_f64() * 1e3);
    Ok(())
}

fn pave_cmd(ctx: &Ctx, accuracy: Option<f64>, max_boxes: Option<usize>) -> Result<()> {
    let s = ctx.single_subject()?;
    let accuracy = accuracy.unwrap_or(ctx.file.paving.accuracy);
    let max_boxes = max_boxes.unwrap_or(ctx.file.paving.max_boxes);
    if !(accuracy > 0.0) || max_boxes == 0 {
        return Err(Error::Config("--accuracy and --max-boxes must be positive".into()));
    }
    let p = pave(&s.constraint, accuracy, max_boxes);
    eprintln!(
        "{}: {} inner (volume {}), {} outer (volume {}), exhausted {}",
        s.name,
        p.inner.len(),
        p.inner_volume(),
        p.outer.len(),
        p.outer_volume(),
        p.exhausted
    );
    ctx.emit(&(serde_json::to_string(&p).expect("paving serializes") + "\n"))
}

fn bench(ctx: &Ctx, repetitions: Option<u32>, timing: bool) -> Result<()> {
    let subjects = ctx.subjects()?;
    let cfg = GridConfig {
        methods: ctx.methods("dmc,stratified,sympais,sympais-h")?,
        budgets: ctx.budgets(),
        repetitions: repetitions.or(ctx.file.repetitions).unwrap_or(20),
        base_seed: ctx.seed(),
        params: ctx.params(),
        timing: timing || ctx.file.timing == Some(true),
    };
    let rows = run_grid(&subjects, &cfg)?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv).map_err(|e| Error::Config(e.to_string()))?;
    ctx.emit(&String::from_utf8(csv).expect("csv is utf-8"))?;
    let mut table = format!("{:<28} {:<11} {:>9} {:>5}  median_rae\n", "subject", "method", "budget", "runs");
    for s in summarize(&rows) {
        let m = match (s.not_applicable, s.median_rae) {
            (true, _) => "not applicable".to_string(),
            (false, Some(v)) => format!("{v:.4e}"),
            (false, None) => "no ground truth".to_string(),
        };
        table += &format!("{:<28} {:<11} {:>9} {:>5}  {m}\n", s.subject, s.method, s.budget, s.runs);
    }
    if ctx.out().is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(())
}

fn make_truth(ctx: &Ctx, samples: Option<u64>) -> Result<()> {
    if ctx.common.constraint.is_some() {
        return Err(Error::Config("make-truth works on builtin subjects only".into()));
    }
    let names = ctx
        .common
        .subject
        .as_deref()
        .or(ctx.file.subject.as_deref())
        .ok_or_else(|| Error::Config("make-truth needs --subject".into()))?;
    let store = FixtureStore::from_env();
    let samples = samples.unwrap_or(ORACLE_SAMPLES);
    let seed = ctx.common.seed.or(ctx.file.seed).unwrap_or(ORACLE_SEED);
    for n in names.split(',') {
        let written = paisc_bench::make_truth(n.trim(), &store, samples, seed)?;
        if written.is_empty() {
            println!("{n}: analytic ground truth, nothing to cache");
        }
        for (f, path) in written {
            println!("{}  truth {}  ({} samples, seed {})", path.display(), f.truth, f.oracle_samples, f.oracle_seed);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        common: cli.common,
        file,
    };
    if let Some(n) = ctx.common.threads.or(ctx.file.threads) {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Estimate => estimate(&ctx),
        Cmd::Pave { accuracy, max_boxes } => pave_cmd(&ctx, accuracy, max_boxes),
        Cmd::Bench { repetitions, timing } => bench(&ctx, repetitions, timing),
        Cmd::MakeTruth { samples } => make_truth(&ctx, samples),
        Cmd::Subjects => {
            println!("{BUILTINS}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
