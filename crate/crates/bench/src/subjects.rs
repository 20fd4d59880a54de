use crate::relu::ReluNetwork;
use crate::truth::{noncentral_chi2_cdf, FixtureStore, Provenance, Truth};
use paisc::distributions::Factor;
use paisc::{Constraint, Distribution, Error, Result, RngStream, Univariate};
use rand_distr::{Distribution as _, StandardNormal};
use std::sync::Arc;

/// Activation patterns are enumerated exhaustively, so the hidden width is capped.
pub const MAX_RELU_UNITS: usize = 12;
pub const DEFAULT_NET_SEED: u64 = 2021;

pub const BUILTINS: &str = "\
circle                      x^2 + y^2 <= 1, x, y ~ Uniform(-2, 2)
sphere-<d>                  |x - 1|^2 <= 1, x ~ N(0, I_d)
spheres                     sphere-2, sphere-4, sphere-6, sphere-8, sphere-10
torus                       torus R=3 r=1, x, y, z ~ N(0, 0.5)
torus-correlated            torus R=3 r=1, x ~ T2(0, 0.5), y, z ~ N(x, 0.5)
relu                        relu-5-5-2021
relu-<d>-<m>-<seed>         all 2^m activation patterns of a seeded d-input, m-unit ReLU layer
relu-<d>-<m>-<seed>-p<bits> one pattern, bits s_1..s_m (1: z_i >= 0, 0: z_i < 0)
linear-<d>-<k>-<seed>       k random linear atoms over truncated Gaussians on [-2, 2]^d";

#[derive(Clone, Debug)]
pub struct Subject {
    pub name: String,
    pub constraint: Constraint,
    pub distribution: Distribution,
    pub truth: Option<Truth>,
    /// Network and pattern index for activation-pattern subjects.
    pub relu: Option<(Arc<ReluNetwork>, usize)>,
}

impl Subject {
    fn new(name: String, text: &str, decls: &str, distribution: Distribution) -> Result<Subject> {
        Ok(Subject {
            name,
            constraint: Constraint::parse(text, decls)?,
            distribution,
            truth: None,
            relu: None,
        })
    }

    fn analytic(mut self, value: f64) -> Subject {
        self.truth = Some(Truth {
            value,
            provenance: Provenance::Analytic,
        });
        self
    }

    pub fn is_correlated(&self) -> bool {
        self.distribution.as_independent().is_none()
    }
}

fn decls(names: impl Iterator<Item = String>, lo: f64, hi: f64) -> String {
    names.map(|n| format!("{n} {lo} {hi}\n")).collect()
}

pub fn circle() -> Subject {
    let p = Distribution::independent(vec![Univariate::uniform(-2.0, 2.0).unwrap(); 2]).unwrap();
    Subject::new("circle".into(), "x*x + y*y <= 1", "x -2 2\ny -2 2", p)
        .unwrap()
        .analytic(std::f64::consts::PI / 16.0)
}

/// `|x - 1|^2 <= 1` on `[-10, 10]^d` under `N(0, I)`.
pub fn gen_sphere(d: usize) -> Result<Subject> {
    if d == 0 {
        return Err(Error::Config("sphere dimension must be at least 1".into()));
    }
    let text = (1..=d).map(|i| format!("(x{i} - 1)^2")).collect::<Vec<_>>().join(" + ") + " <= 1";
    let decls = decls((1..=d).map(|i| format!("x{i}")), -10.0, 10.0);
    let truth = noncentral_chi2_cdf(1.0, d as f64, d as f64);
    Ok(Subject::new(format!("sphere-{d}"), &text, &decls, Distribution::std_normal(d))?.analytic(truth))
}

pub const TORUS: &str = "(sqrt(x^2 + y^2) - 3)^2 + z^2 <= 1";

pub fn gen_torus(correlated: bool) -> Subject {
    let p = if correlated {
        Distribution::chain(vec![
            Factor {
                dist: Univariate::student_t(2.0, 0.0, 0.5).unwrap(),
                loc_from: None,
            },
            Factor {
                dist: Univariate::gaussian(0.0, 0.5).unwrap(),
                loc_from: Some(0),
            },
            Factor {
                dist: Univariate::gaussian(0.0, 0.5).unwrap(),
                loc_from: Some(0),
            },
        ])
        .unwrap()
    } else {
        Distribution::independent(vec![Univariate::gaussian(0.0, 0.5).unwrap(); 3]).unwrap()
    };
    let name = if correlated { "torus-correlated" } else { "torus" };
    Subject::new(name.into(), TORUS, "x -5 5\ny -5 5\nz -5 5", p).unwrap()
}

fn pattern_name(d: usize, m: usize, seed: u64, pattern: usize) -> String {
    let bits: String = (0..m).map(|i| if pattern >> i & 1 == 1 { '1' } else { '0' }).collect();
    format!("relu-{d}-{m}-{seed}-p{bits}")
}

/// One subject per activation pattern of a seeded network, inputs
/// `N(0, 1)` on `[-100, 100]^d`. Pattern `k` has bit `i` set iff unit `i`
/// is active.
pub fn gen_relu_patterns(d: usize, m: usize, net_seed: u64) -> Result<Vec<Subject>> {
    if d == 0 || m == 0 {
        return Err(Error::Config("ReLU subjects need d >= 1 and m >= 1".into()));
    }
    if m > MAX_RELU_UNITS {
        return Err(Error::Config(format!(
            "refusing m = {m}: 2^m patterns (at most {MAX_RELU_UNITS} hidden units)"
        )));
    }
    let net = Arc::new(ReluNetwork::sample(d, m, net_seed));
    let decls = decls((1..=d).map(|i| format!("x{i}")), -100.0, 100.0);
    (0..1usize << m)
        .map(|k| {
            let mut s = Subject::new(
                pattern_name(d, m, net_seed, k),
                &net.pattern_constraint(k),
                &decls,
                Distribution::std_normal(d),
            )?;
            s.relu = Some((net.clone(), k));
            Ok(s)
        })
        .collect()
}

/// `k` atoms `a . x <= b` with `a ~ N(0, I)` and `b = |a| u`,
/// `u ~ Uniform(-0.5, 1.5)`, over truncated standard normals on `[-2, 2]^d`.
pub fn gen_linear(d: usize, k: usize, seed: u64) -> Result<Subject> {
    if d == 0 || k == 0 {
        return Err(Error::Config("linear subjects need d >= 1 and k >= 1".into()));
    }
    let mut rng = RngStream::new(seed, 0).rng();
    let atoms: Vec<String> = (0..k)
        .map(|_| {
            let a: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u = -0.5 + 2.0 * paisc::distributions::open01(&mut rng);
            let lhs: Vec<String> = a.iter().enumerate().map(|(j, w)| format!("{w:?}*x{}", j + 1)).collect();
            format!("{} <= {:?}", lhs.join(" + "), norm * u)
        })
        .collect();
    let p = Distribution::independent(vec![Univariate::truncated_gaussian(0.0, 1.0, -2.0, 2.0)?; d])?;
    Subject::new(
        format!("linear-{d}-{k}-{seed}"),
        &atoms.join(" && "),
        &decls((1..=d).map(|i| format!("x{i}")), -2.0, 2.0),
        p,
    )
}

fn unknown(name: &str) -> Error {
    Error::Config(format!("unknown subject `{name}`; builtins:\n{BUILTINS}"))
}

fn nums<const N: usize>(name: &str, rest: &str) -> Result<[u64; N]> {
    let parts: Vec<&str> = rest.split('-').collect();
    if parts.len() != N {
        return Err(unknown(name));
    }
    let mut out = [0u64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| unknown(name))?;
    }
    Ok(out)
}

/// Subjects behind a builtin name, without cached truths attached.
pub(crate) fn resolve_untruthed(name: &str) -> Result<Vec<Subject>> {
    Ok(match name {
        "circle" => vec![circle()],
        "spheres" => [2, 4, 6, 8, 10].iter().map(|&d| gen_sphere(d)).collect::<Result<_>>()?,
        "torus" => vec![gen_torus(false)],
        "torus-correlated" => vec![gen_torus(true)],
        "relu" => gen_relu_patterns(5, 5, DEFAULT_NET_SEED)?,
        _ => {
            if let Some(rest) = name.strip_prefix("sphere-") {
                let [d] = nums(name, rest)?;
                vec![gen_sphere(d as usize)?]
            } else if let Some(rest) = name.strip_prefix("linear-") {
                let [d, k, seed] = nums(name, rest)?;
                vec![gen_linear(d as usize, k as usize, seed)?]
            } else if let Some(rest) = name.strip_prefix("relu-") {
                match rest.split_once("-p") {
                    Some((head, bits)) => {
                        let [d, m, seed] = nums(name, head)?;
                        if bits.len() != m as usize || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                            return Err(unknown(name));
                        }
                        let k = bits.bytes().enumerate().fold(0, |acc, (i, b)| acc | ((b - b'0') as usize) << i);
                        vec![gen_relu_patterns(d as usize, m as usize, seed)?.swap_remove(k)]
                    }
                    None => {
                        let [d, m, seed] = nums(name, rest)?;
                        gen_relu_patterns(d as usize, m as usize, seed)?
                    }
                }
            } else {
                return Err(unknown(name));
            }
        }
    })
}

/// Resolves a builtin subject name (see [`BUILTINS`]) and attaches ground
/// truths: analytic where available, otherwise from `store`. Subjects with
/// neither keep `truth = None`.
pub fn resolve(name: &str, store: &FixtureStore) -> Result<Vec<Subject>> {
    let mut subjects = resolve_untruthed(name)?;
    for s in &mut subjects {
        if s.truth.is_none() {
            s.truth = store.load(&s.name)?.as_ref().map(Truth::from);
        }
    }
    Ok(subjects)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        let none = FixtureStore::new("/nonexistent");
        assert_eq!(resolve("spheres", &none).unwrap().len(), 5);
        assert_eq!(resolve("relu-3-2-7", &none).unwrap().len(), 4);
        let one = resolve("relu-3-2-7-p10", &none).unwrap();
        assert_eq!(one[0].name, "relu-3-2-7-p10");
        assert_eq!(one[0].relu.as_ref().unwrap().1, 1);
        assert_eq!(resolve("linear-4-3-1", &none).unwrap()[0].constraint.atoms().len(), 3);
        for bad in ["sphere", "sphere-x", "relu-3-2", "relu-3-2-7-p1", "nope", "sphere-0"] {
            assert!(matches!(resolve(bad, &none), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn relu_guard() {
        assert!(gen_relu_patterns(2, MAX_RELU_UNITS + 1, 0).is_err());
        assert_eq!(gen_relu_patterns(5, 5, 1).unwrap().len(), 32);
    }

    #[test]
    fn torus_points() {
        let t = gen_torus(false);
        assert!(t.constraint.satisfied(&[3.0, 0.0, 0.0]));
        assert!(!t.constraint.satisfied(&[0.0, 0.0, 0.0]));
        assert!(gen_torus(true).is_correlated() && !t.is_correlated());
    }
}
