use crate::subjects::Subject;
use paisc::{Distribution, Error, Result, RngStream};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};
use std::path::{Path, PathBuf};

/// Samples per brute-force oracle run.
pub const ORACLE_SAMPLES: u64 = 100_000_000;
pub const ORACLE_SEED: u64 = 20_210_601;
const ORACLE_BATCH: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    BruteForce { oracle: String, samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub value: f64,
    pub provenance: Provenance,
}

/// Cached ground truth, one JSON file per subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub subject: String,
    pub truth: f64,
    pub oracle: String,
    pub oracle_samples: u64,
    pub oracle_seed: u64,
}

impl From<&Fixture> for Truth {
    fn from(f: &Fixture) -> Truth {
        Truth {
            value: f.truth,
            provenance: Provenance::BruteForce {
                oracle: f.oracle.clone(),
                samples: f.oracle_samples,
                seed: f.oracle_seed,
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixtureStore {
    pub dir: PathBuf,
}

impl FixtureStore {
    pub fn new(dir: impl Into<PathBuf>) -> FixtureStore {
        FixtureStore { dir: dir.into() }
    }

    /// `$PAISC_FIXTURES` if set, else the fixtures shipped with this crate.
    pub fn from_env() -> FixtureStore {
        match std::env::var_os("PAISC_FIXTURES") {
            Some(d) => FixtureStore::new(d),
            None => FixtureStore::new(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")),
        }
    }

    fn path(&self, subject: &str) -> PathBuf {
        self.dir.join(format!("{subject}.json"))
    }

    pub fn load(&self, subject: &str) -> Result<Option<Fixture>> {
        let path = self.path(subject);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Config(format!("{}: {e}", path.display()))),
        };
        let f: Fixture =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if f.subject != subject || !(f.truth > 0.0 && f.truth <= 1.0) {
            return Err(Error::Config(format!("{}: malformed fixture", path.display())));
        }
        Ok(Some(f))
    }

    pub fn save(&self, f: &Fixture) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path(&f.subject);
        let mut text = serde_json::to_string_pretty(f).expect("fixture serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// `P(X <= x)` for a noncentral chi-square with `k` degrees of freedom and
/// noncentrality `lambda`, as a Poisson mixture of central chi-squares.
pub fn noncentral_chi2_cdf(x: f64, k: f64, lambda: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let h = lambda / 2.0;
    if h == 0.0 {
        return gamma_lr(k / 2.0, x / 2.0);
    }
    let mut sum = 0.0;
    let mut j = 0u32;
    loop {
        let jf = j as f64;
        let w = (-h + jf * h.ln() - ln_gamma(jf + 1.0)).exp();
        sum += w * gamma_lr((k + 2.0 * jf) / 2.0, x / 2.0);
        if (jf > h && w < 1e-18) || j > 10_000 {
            return sum.min(1.0);
        }
        j += 1;
    }
}

/// Hit counts of `classify` over `samples` draws from `p`. `classify`
/// increments the counters of every class containing the point.
pub(crate) fn count_hits<F>(p: &Distribution, classes: usize, samples: u64, seed: u64, classify: F) -> Vec<u64>
where
    F: Fn(&[f64], &mut [u64]) + Sync,
{
    let root = RngStream::new(seed, 0);
    let batches = samples.div_ceil(ORACLE_BATCH);
    let per_batch = paisc::par_map(batches as usize, |b| {
        let b = b as u64;
        let n = ORACLE_BATCH.min(samples - b * ORACLE_BATCH);
        let mut rng = root.derive(b).rng();
        let mut x = vec![0.0; p.dim()];
        let mut hits = vec![0u64; classes];
        for _ in 0..n {
            p.sample_into(&mut rng, &mut x);
            classify(&x, &mut hits);
        }
        hits
    });
    per_batch.into_iter().fold(vec![0; classes], |mut acc, h| {
        acc.iter_mut().zip(h).for_each(|(a, v)| *a += v);
        acc
    })
}

/// Direct Monte Carlo oracle for subjects sharing one input distribution;
/// all subjects are evaluated on the same draws.
pub fn brute_force(subjects: &[Subject], samples: u64, seed: u64) -> Result<Vec<Fixture>> {
    let Some(first) = subjects.first() else {
        return Ok(Vec::new());
    };
    if subjects.iter().any(|s| s.distribution != first.distribution) {
        return Err(Error::Config("brute-force oracle needs one shared input distribution".into()));
    }
    let relu = subjects
        .iter()
        .map(|s| s.relu.clone())
        .collect::<Option<Vec<_>>>()
        .filter(|v| v.iter().all(|(net, _)| *net == v[0].0));
    let hits = match relu {
        Some(v) => {
            let net = &v[0].0;
            let mut slot = vec![usize::MAX; 1 << net.hidden()];
            for (i, (_, pat)) in v.iter().enumerate() {
                slot[*pat] = i;
            }
            count_hits(&first.distribution, subjects.len(), samples, seed, |x, h| {
                let s = slot[net.pattern(x)];
                if s != usize::MAX {
                    h[s] += 1;
                }
            })
        }
        None => count_hits(&first.distribution, subjects.len(), samples, seed, |x, h| {
            for (i, s) in subjects.iter().enumerate() {
                h[i] += s.constraint.satisfied(x) as u64;
            }
        }),
    };
    Ok(subjects
        .iter()
        .zip(hits)
        .map(|(s, h)| Fixture {
            subject: s.name.clone(),
            truth: h as f64 / samples as f64,
            oracle: "dmc".into(),
            oracle_samples: samples,
            oracle_seed: seed,
        })
        .collect())
}

/// Regenerates cached truths for the subjects behind `name`. Subjects with
/// an analytic truth are skipped. Returns the fixtures written.
pub fn make_truth(name: &str, store: &FixtureStore, samples: u64, seed: u64) -> Result<Vec<(Fixture, PathBuf)>> {
    let subjects: Vec<Subject> = crate::subjects::resolve_untruthed(name)?
        .into_iter()
        .filter(|s| !matches!(s.truth, Some(Truth { provenance: Provenance::Analytic, .. })))
        .collect();
    let mut groups: Vec<Vec<Subject>> = Vec::new();
    for s in subjects {
        match groups.iter_mut().find(|g| g[0].distribution == s.distribution) {
            Some(g) => g.push(s),
            None => groups.push(vec![s]),
        }
    }
    let mut out = Vec::new();
    for g in &groups {
        for f in brute_force(g, samples, seed)? {
            if f.truth == 0.0 {
                return Err(Error::Config(format!(
                    "subject {}: no hits in {samples} oracle samples",
                    f.subject
                )));
            }
            let path = store
                .save(&f)
                .map_err(|e| Error::Config(format!("{}: {e}", store.dir.display())))?;
            out.push((f, path));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_case_matches_closed_form() {
        // chi-square with 2 dof: 1 - exp(-x/2)
        for x in [0.1, 1.0, 3.0] {
            let want = 1.0 - (-x / 2.0f64).exp();
            assert!((noncentral_chi2_cdf(x, 2.0, 0.0) - want).abs() < 1e-14);
        }
        assert_eq!(noncentral_chi2_cdf(0.0, 3.0, 2.0), 0.0);
    }

    #[test]
    fn fixture_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::new(dir.path());
        assert_eq!(store.load("nope").unwrap(), None);
        let f = Fixture {
            subject: "s".into(),
            truth: 0.25,
            oracle: "dmc".into(),
            oracle_samples: 10,
            oracle_seed: 3,
        };
        store.save(&f).unwrap();
        assert_eq!(store.load("s").unwrap(), Some(f));
        std::fs::write(dir.path().join("t.json"), "{}").unwrap();
        assert!(store.load("t").is_err());
    }
}
