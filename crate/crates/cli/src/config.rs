//! Experiment configuration file (TOML). Every key is optional; command
//! line flags take precedence over file values.

use paisc::distributions::Factor;
use paisc::pimais::PimaisConfig;
use paisc::{Constraint, Distribution, Error, Result, Univariate};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    /// Builtin subject name(s), comma separated.
    pub subject: Option<String>,
    pub constraint: Option<String>,
    /// Inline domain declarations, one `name lo hi` per line.
    pub domain: Option<String>,
    pub domain_file: Option<PathBuf>,
    pub distribution: Option<DistSpec>,
    pub method: Option<String>,
    pub budget: Option<Budgets>,
    pub repetitions: Option<u32>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub json: Option<bool>,
    pub timing: Option<bool>,
    pub sympais: PimaisConfig,
    pub paving: PavingConfig,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Budgets {
    One(u64),
    Many(Vec<u64>),
}

impl Budgets {
    pub fn to_vec(&self) -> Vec<u64> {
        match self {
            Budgets::One(b) => vec![*b],
            Budgets::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PavingConfig {
    pub accuracy: f64,
    pub max_boxes: usize,
}

impl Default for PavingConfig {
    fn default() -> Self {
        PavingConfig {
            accuracy: 0.01,
            max_boxes: 1024,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Independent { factors: Vec<FactorSpec> },
    Chain { factors: Vec<FactorSpec> },
    MvGaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
pub struct FactorSpec {
    pub var: String,
    /// Variable whose value is added to this factor's location.
    pub loc_from: Option<String>,
    #[serde(flatten)]
    pub dist: Univariate,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

impl DistSpec {
    /// Builds the distribution over `vars`, in declaration order.
    pub fn build(&self, vars: &[String]) -> Result<Distribution> {
        let bad = |m: String| Error::InvalidDistribution(m);
        let check_order = |factors: &[FactorSpec]| -> Result<()> {
            let names: Vec<&str> = factors.iter().map(|f| f.var.as_str()).collect();
            if names != vars.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(bad(format!(
                    "factors must list the variables in declaration order ({}), got ({})",
                    vars.join(", "),
                    names.join(", ")
                )));
            }
            Ok(())
        };
        match self {
            DistSpec::Independent { factors } => {
                check_order(factors)?;
                if let Some(f) = factors.iter().find(|f| f.loc_from.is_some()) {
                    return Err(bad(format!("factor `{}`: loc_from needs kind = \"chain\"", f.var)));
                }
                Distribution::independent(factors.iter().map(|f| f.dist).collect())
            }
            DistSpec::Chain { factors } => {
                check_order(factors)?;
                let fs = factors
                    .iter()
                    .map(|f| {
                        let loc_from = match &f.loc_from {
                            None => None,
                            Some(n) => Some(
                                vars.iter()
                                    .position(|v| v == n)
                                    .ok_or_else(|| bad(format!("factor `{}`: unknown variable `{n}`", f.var)))?,
                            ),
                        };
                        Ok(Factor { dist: f.dist, loc_from })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Distribution::chain(fs)
            }
            DistSpec::MvGaussian { mean, cov } => {
                if mean.len() != vars.len() {
                    return Err(Error::Dimension {
                        expected: vars.len(),
                        got: mean.len(),
                    });
                }
                Distribution::mv_gaussian(mean.clone(), cov.clone())
            }
        }
    }
}

/// Uniform on each variable's domain interval.
pub fn uniform_on_domain(c: &Constraint) -> Result<Distribution> {
    Distribution::independent(
        c.domain()
            .iter()
            .map(|i| Univariate::uniform(i.lo, i.hi))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn chain_by_name() {
        let cfg: FileConfig = toml::from_str(
            r#"
            [distribution]
            kind = "chain"
            factors = [
              { var = "x", family = "student_t", dof = 2, loc = 0, scale = 0.5 },
              { var = "y", family = "gaussian", loc = 0, scale = 0.5, loc_from = "x" },
            ]
            "#,
        )
        .unwrap();
        let d = cfg.distribution.unwrap().build(&vars(&["x", "y"])).unwrap();
        assert_eq!(d.correlation_groups(), vec![vec![0, 1]]);
    }

    #[test]
    fn rejections() {
        let spec = |s: &str| toml::from_str::<FileConfig>(s).unwrap().distribution.unwrap();
        let wrong_order = spec(
            r#"distribution = { kind = "independent", factors = [
                 { var = "y", family = "uniform", lo = 0, hi = 1 },
                 { var = "x", family = "uniform", lo = 0, hi = 1 } ] }"#,
        );
        assert!(wrong_order.build(&vars(&["x", "y"])).is_err());
        let forward_ref = spec(
            r#"distribution = { kind = "chain", factors = [
                 { var = "x", family = "gaussian", loc = 0, scale = 1, loc_from = "y" },
                 { var = "y", family = "gaussian", loc = 0, scale = 1 } ] }"#,
        );
        assert!(forward_ref.build(&vars(&["x", "y"])).is_err());
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        assert!(toml::from_str::<FileConfig>("[sympais]\nn_chain = 3").is_err());
    }

    #[test]
    fn budgets_and_mv_gaussian() {
        let cfg: FileConfig = toml::from_str(
            r#"
            budget = [1000, 2000]
            [distribution]
            kind = "mv_gaussian"
            mean = [-2.0, -2.0]
            cov = [[0.2, 0.1], [0.1, 0.2]]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.budget.unwrap().to_vec(), vec![1000, 2000]);
        assert!(cfg.distribution.unwrap().build(&vars(&["x", "y"])).is_ok());
    }

    #[test]
    fn sympais_section_round_trips() {
        let cfg: FileConfig = toml::from_str("[sympais]\n").unwrap();
        assert_eq!(cfg.sympais, PimaisConfig::default());

        let custom = PimaisConfig {
            n_chains: 7,
            iterations: Some(30),
            kernel: paisc::pimais::Kernel::Hmc,
            seed_strategy: paisc::pimais::SeedStrategy::Single,
            ..PimaisConfig::default()
        };
        let text = format!("[sympais]\n{}", toml::to_string(&custom).unwrap());
        let back: FileConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.sympais, custom);
    }
}
