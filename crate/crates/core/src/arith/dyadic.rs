use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// An exact binary rational `mant * 2^exp`.
///
/// Values are kept normalized (odd mantissa, or zero with exponent 0) so that
/// structural equality coincides with numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn shr_floor(x: &BigInt, k: u64) -> BigInt {
    // BigInt >> rounds toward negative infinity
    x >> k
}

fn shr_ceil(x: &BigInt, k: u64) -> BigInt {
    -((-x) >> k)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn half() -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: -1 }
    }

    pub fn from_int(n: BigInt) -> Dyadic {
        Dyadic::new(n, 0)
    }

    pub fn from_i64(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0
    }

    /// Binary magnitude `e` with `2^(e-1) <= |x| < 2^e`; `i64::MIN` for zero.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by `2^k` exactly.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn pow(&self, n: u32) -> Dyadic {
        if n == 0 {
            return Dyadic::one();
        }
        Dyadic::new(num_traits::pow(self.mant.clone(), n as usize), self.exp * n as i64)
    }

    /// Round to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let k = bits - prec as u64;
        let m = match dir {
            Round::Down => shr_floor(&self.mant, k),
            Round::Up => shr_ceil(&self.mant, k),
        };
        Dyadic::new(m, self.exp + k as i64)
    }

    /// Quotient `self / other` rounded to `prec` bits. Panics on a zero divisor.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let shift = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let shift = shift.max(0) as u64;
        let num = &self.mant << shift;
        let (q, r) = num.div_mod_floor(&other.mant);
        let q = if dir == Round::Up && !r.is_zero() { q + 1 } else { q };
        Dyadic::new(q, self.exp - other.exp - shift as i64).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shr_ceil(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Exact conversion when the denominator is a power of two.
    pub fn from_rational_exact(r: &BigRational) -> Option<Dyadic> {
        let den = r.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if den.bits() == tz + 1 {
            Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    /// Directed approximation of a rational with `prec` significant bits.
    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Dyadic {
        if let Some(d) = Dyadic::from_rational_exact(r) {
            return d.round(prec, dir);
        }
        let num = Dyadic::from_int(r.numer().clone());
        let den = Dyadic::from_int(r.denom().clone());
        num.div(&den, prec, dir)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 60 {
            (shr_floor(&self.mant, (bits - 60) as u64), self.exp + bits - 60)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        if e > 4000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -4000 {
            return 0.0 * m.signum();
        }
        m * (2f64).powi(e as i32)
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb || sa == Sign::NoSign {
            return sa.cmp(&sb);
        }
        // same nonzero sign: compare magnitudes first
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            let ord = ma.cmp(&mb);
            return if sa == Sign::Minus { ord.reverse() } else { ord };
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn shift_right_floors_negative_values() {
        assert_eq!(BigInt::from(-5) >> 1u32, BigInt::from(-3));
        assert_eq!(shr_ceil(&BigInt::from(-5), 1), BigInt::from(-2));
        assert_eq!(shr_ceil(&BigInt::from(5), 1), BigInt::from(3));
    }

    #[test]
    fn normalized_equality() {
        assert_eq!(d(4, 0), d(1, 2));
        assert_eq!(d(0, 17), Dyadic::zero());
    }

    #[test]
    fn ordering_mixed_exponents() {
        assert!(d(3, -1) < d(2, 0));
        assert!(d(-3, -1) > d(-2, 0));
        assert!(d(-1, 10) < d(1, -10));
        assert_eq!(d(6, -1).cmp(&d(3, 0)), Ordering::Equal);
    }

    #[test]
    fn directed_rounding_brackets() {
        let x = d(0b1011_0111, 0);
        let lo = x.round(4, Round::Down);
        let hi = x.round(4, Round::Up);
        assert!(lo <= x && x <= hi);
        assert_eq!(lo, d(0b1011, 4));
        assert_eq!(hi, d(0b1100, 4));
    }

    #[test]
    fn division_brackets_one_third() {
        let lo = Dyadic::one().div(&d(3, 0), 64, Round::Down);
        let hi = Dyadic::one().div(&d(3, 0), 64, Round::Up);
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert!((hi.sub(&lo)).magnitude() <= -63);
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(d(-3, -1).floor(), BigInt::from(-2));
        assert_eq!(d(-3, -1).ceil(), BigInt::from(-1));
        assert_eq!(d(7, 2).floor(), BigInt::from(28));
    }
}
