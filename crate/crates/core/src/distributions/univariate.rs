use crate::error::{Error, Result};
use rand::{Rng, RngExt};
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Truncations with less probability mass than this are rejected.
pub const MIN_TRUNCATION_MASS: f64 = 1e-300;

/// A univariate input distribution. `scale` is always a standard deviation
/// (or the Student-t scale), never a variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Univariate {
    Gaussian { loc: f64, scale: f64 },
    StudentT { dof: f64, loc: f64, scale: f64 },
    TruncatedGaussian { loc: f64, scale: f64, lo: f64, hi: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Standardized location-scale family used for CDF work.
#[derive(Clone, Copy)]
enum Std {
    Normal,
    T(f64),
}

impl Std {
    fn cdf(self, z: f64) -> f64 {
        match self {
            Std::Normal => 0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2),
            Std::T(nu) => {
                if z.is_infinite() {
                    return if z > 0.0 { 1.0 } else { 0.0 };
                }
                let tail = 0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + z * z));
                if z < 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
        }
    }

    fn quantile(self, p: f64) -> f64 {
        match self {
            Std::Normal => Normal::standard().inverse_cdf(p),
            Std::T(nu) => StudentsT::new(0.0, 1.0, nu).expect("validated dof").inverse_cdf(p),
        }
    }

    /// Mass of `[a, b]`, computed in the lower tail where CDF values keep
    /// their relative precision.
    fn mass(self, a: f64, b: f64) -> f64 {
        if a > 0.0 {
            self.cdf(-a) - self.cdf(-b)
        } else {
            self.cdf(b) - self.cdf(a)
        }
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    if z.is_infinite() {
        0.0
    } else {
        (-0.5 * z * z - LN_SQRT_2PI).exp()
    }
}

/// Uniform draw on the open interval (0, 1).
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn truncated_ls<R: Rng + ?Sized>(
    fam: Std,
    loc: f64,
    scale: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<f64> {
    let (mut a, mut b) = ((lo - loc) / scale, (hi - loc) / scale);
    // Reflect upper-tail windows into the lower tail for precision.
    let flip = a > 0.0;
    if flip {
        (a, b) = (-b, -a);
    }
    let fa = fam.cdf(a);
    let mass = fam.cdf(b) - fa;
    if !(mass >= MIN_TRUNCATION_MASS) {
        return Err(Error::EmptyTruncation { lo, hi });
    }
    loop {
        let z = fam.quantile(fa + open01(rng) * mass).clamp(a, b);
        if z.is_finite() {
            return Ok(loc + scale * if flip { -z } else { z });
        }
    }
}

impl Univariate {
    pub fn gaussian(loc: f64, scale: f64) -> Result<Univariate> {
        Univariate::Gaussian { loc, scale }.validated()
    }

    pub fn student_t(dof: f64, loc: f64, scale: f64) -> Result<Univariate> {
        Univariate::StudentT { dof, loc, scale }.validated()
    }

    pub fn truncated_gaussian(loc: f64, scale: f64, lo: f64, hi: f64) -> Result<Univariate> {
        Univariate::TruncatedGaussian { loc, scale, lo, hi }.validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Univariate> {
        Univariate::Uniform { lo, hi }.validated()
    }

    pub fn standard_normal() -> Univariate {
        Univariate::Gaussian { loc: 0.0, scale: 1.0 }
    }

    pub fn validated(self) -> Result<Univariate> {
        let bad = |m: &str| Err(Error::InvalidDistribution(format!("{m}: {self:?}")));
        let finite_scale = |loc: f64, scale: f64| loc.is_finite() && scale.is_finite() && scale > 0.0;
        match self {
            Univariate::Gaussian { loc, scale } if !finite_scale(loc, scale) => {
                bad("need finite loc and scale > 0")
            }
            Univariate::StudentT { dof, loc, scale } if !(finite_scale(loc, scale) && dof > 0.0) => {
                bad("need finite loc, scale > 0 and dof > 0")
            }
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => {
                if !finite_scale(loc, scale) || lo.is_nan() || hi.is_nan() || lo >= hi {
                    return bad("need finite loc, scale > 0 and lo < hi");
                }
                if !(Std::Normal.mass((lo - loc) / scale, (hi - loc) / scale) >= MIN_TRUNCATION_MASS) {
                    return bad("truncation window has no mass");
                }
                Ok(self)
            }
            Univariate::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                bad("need finite lo < hi")
            }
            _ => Ok(self),
        }
    }

    /// Closed support `[lo, hi]`, possibly infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Univariate::Gaussian { .. } | Univariate::StudentT { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Univariate::TruncatedGaussian { lo, hi, .. } | Univariate::Uniform { lo, hi } => (lo, hi),
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match *self {
            Univariate::Gaussian { loc, scale } => {
                let z = (x - loc) / scale;
                -0.5 * z * z - LN_SQRT_2PI - scale.ln()
            }
            Univariate::StudentT { dof, loc, scale } => {
                let z = (x - loc) / scale;
                ln_gamma(0.5 * (dof + 1.0))
                    - ln_gamma(0.5 * dof)
                    - 0.5 * (dof * std::f64::consts::PI).ln()
                    - scale.ln()
                    - 0.5 * (dof + 1.0) * (z * z / dof).ln_1p()
            }
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => {
                if !(lo <= x && x <= hi) {
                    return f64::NEG_INFINITY;
                }
                let z = (x - loc) / scale;
                let mass = Std::Normal.mass((lo - loc) / scale, (hi - loc) / scale);
                -0.5 * z * z - LN_SQRT_2PI - scale.ln() - mass.ln()
            }
            Univariate::Uniform { lo, hi } => {
                if lo <= x && x <= hi {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// d/dx log p(x); `None` outside the open support.
    pub fn grad_log_pdf(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.support();
        if !(lo < x && x < hi) {
            return None;
        }
        Some(match *self {
            Univariate::Gaussian { loc, scale } | Univariate::TruncatedGaussian { loc, scale, .. } => {
                -(x - loc) / (scale * scale)
            }
            Univariate::StudentT { dof, loc, scale } => {
                let z = (x - loc) / scale;
                -(dof + 1.0) * z / (scale * (dof + z * z))
            }
            Univariate::Uniform { .. } => 0.0,
        })
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match *self {
            Univariate::Gaussian { loc, scale } => Std::Normal.cdf((t - loc) / scale),
            Univariate::StudentT { dof, loc, scale } => Std::T(dof).cdf((t - loc) / scale),
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => {
                if t <= lo {
                    return 0.0;
                }
                if t >= hi {
                    return 1.0;
                }
                let (a, b) = ((lo - loc) / scale, (hi - loc) / scale);
                let z = (t - loc) / scale;
                (Std::Normal.mass(a, z) / Std::Normal.mass(a, b)).clamp(0.0, 1.0)
            }
            Univariate::Uniform { lo, hi } => ((t - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    /// Probability of `[lo, hi]`, accurate in the tails.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if !(lo < hi) {
            return 0.0;
        }
        match *self {
            Univariate::Gaussian { loc, scale } => {
                Std::Normal.mass((lo - loc) / scale, (hi - loc) / scale)
            }
            Univariate::StudentT { dof, loc, scale } => {
                Std::T(dof).mass((lo - loc) / scale, (hi - loc) / scale)
            }
            Univariate::TruncatedGaussian { loc, scale, lo: tl, hi: th } => {
                let (l, h) = (lo.max(tl), hi.min(th));
                if !(l < h) {
                    return 0.0;
                }
                let s = |v: f64| (v - loc) / scale;
                Std::Normal.mass(s(l), s(h)) / Std::Normal.mass(s(tl), s(th))
            }
            Univariate::Uniform { .. } => (self.cdf(hi) - self.cdf(lo)).max(0.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Univariate::Gaussian { loc, scale } => {
                let z: f64 = StandardNormal.sample(rng);
                loc + scale * z
            }
            Univariate::StudentT { dof, loc, scale } => {
                let z = rand_distr::StudentT::new(dof).expect("validated dof").sample(rng);
                loc + scale * z
            }
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => {
                truncated_ls(Std::Normal, loc, scale, lo, hi, rng).expect("validated truncation")
            }
            Univariate::Uniform { lo, hi } => lo + (hi - lo) * open01(rng),
        }
    }

    /// Inverse-CDF draw from this distribution restricted to `[lo, hi]`.
    pub fn sample_truncated<R: Rng + ?Sized>(&self, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
        if !(lo < hi) {
            return Err(Error::EmptyTruncation { lo, hi });
        }
        match *self {
            Univariate::Gaussian { loc, scale } => truncated_ls(Std::Normal, loc, scale, lo, hi, rng),
            Univariate::StudentT { dof, loc, scale } => {
                truncated_ls(Std::T(dof), loc, scale, lo, hi, rng)
            }
            Univariate::TruncatedGaussian { loc, scale, lo: tl, hi: th } => {
                let (l, h) = (lo.max(tl), hi.min(th));
                if !(l < h) {
                    return Err(Error::EmptyTruncation { lo, hi });
                }
                truncated_ls(Std::Normal, loc, scale, l, h, rng)
            }
            Univariate::Uniform { lo: ul, hi: uh } => {
                let (l, h) = (lo.max(ul), hi.min(uh));
                if !(l < h) || (h - l) / (uh - ul) < MIN_TRUNCATION_MASS {
                    return Err(Error::EmptyTruncation { lo, hi });
                }
                Ok((l + (h - l) * open01(rng)).clamp(l, h))
            }
        }
    }

    pub fn mean(&self) -> Option<f64> {
        match *self {
            Univariate::Gaussian { loc, .. } => Some(loc),
            Univariate::StudentT { dof, loc, .. } => (dof > 1.0).then_some(loc),
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => {
                let (a, b) = ((lo - loc) / scale, (hi - loc) / scale);
                let z = Std::Normal.mass(a, b);
                Some(loc + scale * (std_normal_pdf(a) - std_normal_pdf(b)) / z)
            }
            Univariate::Uniform { lo, hi } => Some(0.5 * (lo + hi)),
        }
    }

    pub fn variance(&self) -> Option<f64> {
        match *self {
            Univariate::Gaussian { scale, .. } => Some(scale * scale),
            Univariate::StudentT { dof, scale, .. } => {
                (dof > 2.0).then(|| scale * scale * dof / (dof - 2.0))
            }
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => {
                let (a, b) = ((lo - loc) / scale, (hi - loc) / scale);
                let z = Std::Normal.mass(a, b);
                let (pa, pb) = (std_normal_pdf(a), std_normal_pdf(b));
                let xa = if a.is_finite() { a * pa } else { 0.0 };
                let xb = if b.is_finite() { b * pb } else { 0.0 };
                let m = (pa - pb) / z;
                Some(scale * scale * (1.0 + (xa - xb) / z - m * m))
            }
            Univariate::Uniform { lo, hi } => Some((hi - lo) * (hi - lo) / 12.0),
        }
    }

    /// The same family translated by `delta` (bounds move with it).
    pub fn shifted(&self, delta: f64) -> Univariate {
        match *self {
            Univariate::Gaussian { loc, scale } => Univariate::Gaussian { loc: loc + delta, scale },
            Univariate::StudentT { dof, loc, scale } => Univariate::StudentT {
                dof,
                loc: loc + delta,
                scale,
            },
            Univariate::TruncatedGaussian { loc, scale, lo, hi } => Univariate::TruncatedGaussian {
                loc: loc + delta,
                scale,
                lo: lo + delta,
                hi: hi + delta,
            },
            Univariate::Uniform { lo, hi } => Univariate::Uniform {
                lo: lo + delta,
                hi: hi + delta,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gaussian_log_pdf_at_mode() {
        let g = Univariate::standard_normal();
        assert!(close(g.log_pdf(0.0), -0.918_938_533_204_672_8, 1e-15));
    }

    #[test]
    fn gradients_at_known_points() {
        let g = Univariate::standard_normal();
        assert_eq!(g.grad_log_pdf(0.0), Some(0.0));
        assert_eq!(g.grad_log_pdf(1.5), Some(-1.5));
        let u = Univariate::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.grad_log_pdf(1.0), None);
    }

    #[test]
    fn cdf_values() {
        let g = Univariate::standard_normal();
        assert_eq!(g.cdf(0.0), 0.5);
        assert!(close(g.cdf(2.0) - g.cdf(0.0), 0.477_249_868_051_820_8, 1e-14));
        let u = Univariate::uniform(0.0, 4.0).unwrap();
        assert_eq!(u.cdf(1.0), 0.25);
        let t = Univariate::student_t(2.0, 0.0, 1.0).unwrap();
        // Closed form for two degrees of freedom: 1/2 + t / (2 sqrt(2 + t^2)).
        for x in [-3.0, -0.5, 0.0, 1.0, 7.0] {
            let exact = 0.5 + x / (2.0 * (2.0f64 + x * x).sqrt());
            assert!(close(t.cdf(x), exact, 1e-12), "{x}");
        }
    }

    #[test]
    fn cdf_limits() {
        for u in [
            Univariate::standard_normal(),
            Univariate::student_t(3.0, 1.0, 2.0).unwrap(),
            Univariate::truncated_gaussian(0.0, 1.0, -1.0, 2.0).unwrap(),
            Univariate::uniform(-1.0, 1.0).unwrap(),
        ] {
            assert!(u.cdf(f64::NEG_INFINITY).abs() <= 1e-12);
            assert!((u.cdf(f64::INFINITY) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn truncated_support_and_mean() {
        let mut r = RngStream::new(1, 0).rng();
        let g = Univariate::standard_normal();
        for _ in 0..1000 {
            assert!(g.sample_truncated(0.0, f64::INFINITY, &mut r).unwrap() >= 0.0);
        }
        let u = Univariate::uniform(0.0, 1.0).unwrap();
        let n = 100_000;
        let m: f64 = (0..n).map(|_| u.sample_truncated(0.2, 0.4, &mut r).unwrap()).sum::<f64>() / n as f64;
        assert!(close(m, 0.3, 1e-3));
    }

    #[test]
    fn far_tail_truncation() {
        let mut r = RngStream::new(2, 0).rng();
        let g = Univariate::standard_normal();
        for _ in 0..100 {
            let x = g.sample_truncated(20.0, 21.0, &mut r).unwrap();
            assert!((20.0..=21.0).contains(&x));
        }
        assert!(matches!(
            g.sample_truncated(40.0, 41.0, &mut r),
            Err(Error::EmptyTruncation { .. })
        ));
    }

    #[test]
    fn analytic_moments() {
        assert_eq!(Univariate::uniform(0.0, 1.0).unwrap().variance(), Some(1.0 / 12.0));
        assert_eq!(Univariate::student_t(2.0, 0.0, 0.5).unwrap().variance(), None);
        let t = Univariate::truncated_gaussian(0.0, 1.0, 0.0, f64::INFINITY).unwrap();
        let m = (2.0 / std::f64::consts::PI).sqrt();
        assert!(close(t.mean().unwrap(), m, 1e-12));
        assert!(close(t.variance().unwrap(), 1.0 - 2.0 / std::f64::consts::PI, 1e-12));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Univariate::gaussian(0.0, 0.0).is_err());
        assert!(Univariate::uniform(1.0, 1.0).is_err());
        assert!(Univariate::student_t(0.0, 0.0, 1.0).is_err());
        assert!(Univariate::truncated_gaussian(0.0, 1.0, 50.0, 60.0).is_err());
    }
}
