use paisc::estimators::{dmc_estimate, stratified_estimate, EstimateReport};
use paisc::interval::{pave, Paving};
use paisc::pimais::{pimais_run, Kernel, PimaisConfig};
use paisc::{Constraint, Distribution, Error, Result, RngStream};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "dmc")]
    Dmc,
    #[serde(rename = "stratified")]
    Stratified,
    /// SYMPAIS with the random-walk kernel.
    #[serde(rename = "sympais")]
    Sympais,
    /// SYMPAIS with the HMC kernel.
    #[serde(rename = "sympais-h")]
    SympaisH,
    /// SYMPAIS with the truncated random-walk kernel.
    #[serde(rename = "sympais-t")]
    SympaisT,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Dmc,
        Method::Stratified,
        Method::Sympais,
        Method::SympaisH,
        Method::SympaisT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dmc => "dmc",
            Method::Stratified => "stratified",
            Method::Sympais => "sympais",
            Method::SympaisH => "sympais-h",
            Method::SympaisT => "sympais-t",
        }
    }

    fn kernel(self) -> Option<Kernel> {
        match self {
            Method::Sympais => Some(Kernel::Rwmh),
            Method::SympaisH => Some(Kernel::Hmc),
            Method::SympaisT => Some(Kernel::RwmhTruncated),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
            Error::Config(format!("unknown method `{s}` (expected one of: {})", names.join(", ")))
        })
    }
}

/// Settings shared by all runs of a method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    /// SYMPAIS settings; `budget` and `kernel` are set per run.
    pub pimais: PimaisConfig,
    /// Normalized paving accuracy for the stratified method.
    pub pave_accuracy: f64,
    pub pave_max_boxes: usize,
}

impl Default for MethodParams {
    fn default() -> Self {
        MethodParams {
            pimais: PimaisConfig::default(),
            pave_accuracy: 0.01,
            pave_max_boxes: 1024,
        }
    }
}

impl MethodParams {
    pub fn paving(&self, c: &Constraint) -> Result<Paving> {
        if !(self.pave_accuracy > 0.0) || self.pave_max_boxes == 0 {
            return Err(Error::Config("pave_accuracy and pave_max_boxes must be positive".into()));
        }
        Ok(pave(c, self.pave_accuracy, self.pave_max_boxes))
    }
}

fn not_applicable() -> Error {
    Error::NotApplicable {
        method: "stratified".into(),
        reason: "the input variables are correlated, so box probabilities need a joint CDF with no closed form".into(),
    }
}

/// Runs one estimator. `paving` is reused by the stratified method when
/// given, and computed from `params` otherwise.
pub fn run_method(
    method: Method,
    c: &Constraint,
    p: &Distribution,
    budget: u64,
    stream: RngStream,
    params: &MethodParams,
    paving: Option<&Paving>,
) -> Result<EstimateReport> {
    if c.dim() != p.dim() {
        return Err(Error::Dimension {
            expected: c.dim(),
            got: p.dim(),
        });
    }
    if budget == 0 {
        return Err(Error::Config("budget must be at least 1".into()));
    }
    match method {
        Method::Dmc => Ok(dmc_estimate(c, p, budget, stream)),
        Method::Stratified => {
            if p.as_independent().is_none() {
                return Err(not_applicable());
            }
            let owned;
            let paving = match paving {
                Some(pv) => pv,
                None => {
                    owned = params.paving(c)?;
                    &owned
                }
            };
            stratified_estimate(c, p, paving, budget, stream).map_err(|e| match e {
                Error::CdfIntractable => not_applicable(),
                e => e,
            })
        }
        _ => {
            let cfg = PimaisConfig {
                budget,
                kernel: method.kernel().expect("sympais variant"),
                ..params.pimais.clone()
            };
            pimais_run(c, p, &cfg, stream)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subjects::{circle, gen_torus};

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("qcoral".parse::<Method>().is_err());
    }

    #[test]
    fn stratified_refuses_correlated_inputs() {
        let t = gen_torus(true);
        let r = run_method(
            Method::Stratified,
            &t.constraint,
            &t.distribution,
            1000,
            RngStream::new(0, 0),
            &MethodParams::default(),
            None,
        );
        assert!(matches!(r, Err(Error::NotApplicable { .. })), "{r:?}");
    }

    #[test]
    fn each_method_runs_on_circle() {
        let s = circle();
        let params = MethodParams {
            pimais: PimaisConfig {
                n_chains: 10,
                warmup: 20,
                ..PimaisConfig::default()
            },
            ..MethodParams::default()
        };
        for m in Method::ALL {
            let r = run_method(m, &s.constraint, &s.distribution, 5000, RngStream::new(1, 0), &params, None).unwrap();
            assert!((r.mean - std::f64::consts::PI / 16.0).abs() < 0.05, "{m}: {}", r.mean);
        }
    }
}
