use serde::{Deserialize, Serialize};
use std::fmt;

/// Closed real interval `[lo, hi]`.
///
/// Infinite bounds appear only transiently inside arithmetic. An empty
/// result is represented by `None` wherever an operation can produce one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", from = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl From<[f64; 2]> for Interval {
    fn from(a: [f64; 2]) -> Self {
        Interval { lo: a[0], hi: a[1] }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub const ENTIRE: Interval = Interval {
    lo: f64::NEG_INFINITY,
    hi: f64::INFINITY,
};

/// Relative inflation applied to projected bounds during backward
/// propagation, in place of directed rounding.
pub const INFLATION: f64 = 1e-12;

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo <= hi, "malformed interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Builds an interval, returning `None` when `lo > hi` or a bound is NaN.
    pub fn checked(lo: f64, hi: f64) -> Option<Interval> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Interval {
        Interval { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            if self.lo.is_infinite() && self.hi.is_infinite() {
                return 0.0;
            }
            return if self.lo.is_infinite() { self.hi } else { self.lo };
        }
        let m = 0.5 * (self.lo + self.hi);
        m.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        Interval::checked(self.lo.max(o.lo), self.hi.min(o.hi))
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    pub fn inflate(&self) -> Interval {
        let pad = |v: f64| INFLATION * v.abs().max(1.0);
        Interval {
            lo: self.lo - pad(self.lo),
            hi: self.hi + pad(self.hi),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        hull_of(&[self.lo + o.lo, self.hi + o.hi])
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        hull_of(&[self.lo - o.hi, self.hi - o.lo])
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        hull_of(&[
            mul0(self.lo, o.lo),
            mul0(self.lo, o.hi),
            mul0(self.hi, o.lo),
            mul0(self.hi, o.hi),
        ])
    }

    /// Division; a divisor containing zero yields the conservative hull.
    pub fn div(&self, o: &Interval) -> Interval {
        if o.contains_zero() {
            return ENTIRE;
        }
        hull_of(&[
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ])
    }

    /// Square root over the non-negative part; `None` if entirely negative.
    pub fn sqrt(&self) -> Option<Interval> {
        if self.hi < 0.0 {
            return None;
        }
        Some(Interval {
            lo: self.lo.max(0.0).sqrt(),
            hi: self.hi.sqrt(),
        })
    }

    pub fn powi(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::point(1.0);
        }
        let e = n as i32;
        if n % 2 == 1 {
            return Interval {
                lo: self.lo.powi(e),
                hi: self.hi.powi(e),
            };
        }
        let a = self.lo.powi(e);
        let b = self.hi.powi(e);
        if self.contains_zero() {
            Interval { lo: 0.0, hi: a.max(b) }
        } else {
            Interval {
                lo: a.min(b),
                hi: a.max(b),
            }
        }
    }
}

fn mul0(a: f64, b: f64) -> f64 {
    // 0 * inf is taken as 0: the infinite bound is never attained.
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn hull_of(vals: &[f64]) -> Interval {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        if v.is_nan() {
            return ENTIRE;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Interval { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_symmetric_interval() {
        let x = Interval::new(-5.0, 5.0);
        assert_eq!(x.powi(2), Interval::new(0.0, 25.0));
        assert_eq!(x.mul(&x), Interval::new(-25.0, 25.0));
    }

    #[test]
    fn dependency_pessimism_is_sound() {
        let x = Interval::new(0.0, 1.0);
        assert_eq!(x.sub(&x), Interval::new(-1.0, 1.0));
    }

    #[test]
    fn division_by_zero_straddling_is_entire() {
        let x = Interval::new(1.0, 2.0);
        assert_eq!(x.div(&Interval::new(-1.0, 1.0)), ENTIRE);
        assert_eq!(x.div(&Interval::new(2.0, 4.0)), Interval::new(0.25, 1.0));
    }

    #[test]
    fn sqrt_clips_negative_part() {
        assert_eq!(Interval::new(-4.0, 9.0).sqrt(), Some(Interval::new(0.0, 3.0)));
        assert_eq!(Interval::new(-4.0, -1.0).sqrt(), None);
    }

    #[test]
    fn odd_powers_are_monotone() {
        assert_eq!(Interval::new(-2.0, 3.0).powi(3), Interval::new(-8.0, 27.0));
        assert_eq!(Interval::new(-2.0, 3.0).powi(0), Interval::point(1.0));
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        let z = Interval::point(0.0);
        assert_eq!(z.mul(&ENTIRE), Interval::point(0.0));
    }
}
