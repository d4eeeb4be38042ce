use num_bigint::BigInt;
use num_rational::BigRational;

use super::dyadic::{Dyadic, Round};

/// Closed interval `[lo, hi]` with dyadic endpoints and outward rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Interval {
        debug_assert!(lo <= hi, "inverted interval {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_i64(n: i64) -> Interval {
        Interval::point(Dyadic::from_i64(n))
    }

    pub fn from_int(n: &BigInt) -> Interval {
        Interval::point(Dyadic::from_int(n.clone()))
    }

    pub fn zero() -> Interval {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Interval {
        Interval::point(Dyadic::one())
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Interval {
        match Dyadic::from_rational_exact(r) {
            Some(d) => Interval::point(d),
            None => Interval {
                lo: Dyadic::from_rational(r, prec, Round::Down),
                hi: Dyadic::from_rational(r, prec, Round::Up),
            },
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, x: &BigRational) -> bool {
        &self.lo.to_rational() <= x && x <= &self.hi.to_rational()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: Dyadic::min(&self.lo, &other.lo), hi: Dyadic::max(&self.hi, &other.hi) }
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> Dyadic {
        Dyadic::max(&self.lo.abs(), &self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else {
            Dyadic::min(&self.lo.abs(), &self.hi.abs())
        }
    }

    pub fn abs(&self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn shl(&self, k: i64) -> Interval {
        Interval { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    pub fn round(&self, prec: u32) -> Interval {
        Interval { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up) }
    }

    /// Widen symmetrically by `err >= 0`.
    pub fn widen(&self, err: &Dyadic) -> Interval {
        Interval { lo: self.lo.sub(err), hi: self.hi.add(err) }
    }

    pub fn add(&self, other: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add(&other.lo).round(prec, Round::Down),
            hi: self.hi.add(&other.hi).round(prec, Round::Up),
        }
    }

    pub fn sub(&self, other: &Interval, prec: u32) -> Interval {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Interval, prec: u32) -> Interval {
        let p = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = &p[0];
        let mut hi = &p[0];
        for x in &p[1..] {
            if x < lo {
                lo = x;
            }
            if x > hi {
                hi = x;
            }
        }
        Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    /// Quotient; `None` when the divisor contains zero.
    pub fn div(&self, other: &Interval, prec: u32) -> Option<Interval> {
        if other.contains_zero() {
            return None;
        }
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let qd = a.div(b, prec, Round::Down);
            let qu = a.div(b, prec, Round::Up);
            lo = Some(match lo {
                Some(l) if l <= qd => l,
                _ => qd,
            });
            hi = Some(match hi {
                Some(h) if h >= qu => h,
                _ => qu,
            });
        }
        Some(Interval { lo: lo.unwrap(), hi: hi.unwrap() })
    }

    pub fn recip(&self, prec: u32) -> Option<Interval> {
        Interval::one().div(self, prec)
    }

    /// Integer power with the tight treatment of even powers across zero.
    pub fn powi(&self, n: u32, prec: u32) -> Interval {
        if n == 0 {
            return Interval::one();
        }
        if self.lo.is_negative() && self.hi.is_positive() && n % 2 == 0 {
            let m = self.mag().pow(n).round(prec, Round::Up);
            return Interval { lo: Dyadic::zero(), hi: m };
        }
        let a = self.lo.pow(n);
        let b = self.hi.pow(n);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    pub fn lo_rational(&self) -> BigRational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> BigRational {
        self.hi.to_rational()
    }

    /// `floor(x + 1/2)` if it is the same integer across the interval.
    pub fn nearest_integer(&self) -> Option<BigInt> {
        let half = Dyadic::half();
        let a = self.lo.add(&half).floor();
        let b = self.hi.add(&half).floor();
        (a == b).then_some(a)
    }

    /// Largest binary magnitude of either endpoint, for overflow checks.
    pub fn magnitude(&self) -> i64 {
        self.lo.magnitude().max(self.hi.magnitude())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn sign_definite(&self) -> Option<std::cmp::Ordering> {
        if self.lo.is_positive() {
            Some(std::cmp::Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(std::cmp::Ordering::Less)
        } else if self.is_exact_zero() {
            Some(std::cmp::Ordering::Equal)
        } else {
            None
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_f64(), self.hi.to_f64())
    }
}
