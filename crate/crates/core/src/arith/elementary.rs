//! Certified elementary functions on dyadic intervals.
//!
//! Every routine returns an interval guaranteed to contain the exact value:
//! series are summed in outward-rounded interval arithmetic and the
//! truncated tail is added as an explicit error term.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;
use crate::error::{Error, Result};

/// Binary exponent beyond which values are rejected as overflow.
pub const DEFAULT_EXPONENT_CAP: i64 = 1 << 22;

static LN2_CACHE: Mutex<Option<(u32, Interval)>> = Mutex::new(None);

/// Enclosure of ln 2 with at least `prec` bits, from
/// `ln 2 = 2 atanh(1/3)` summed in fixed point.
pub fn ln2(prec: u32) -> Interval {
    {
        let cache = LN2_CACHE.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((p, iv)) = cache.as_ref() {
            if *p >= prec {
                return iv.round(prec);
            }
        }
    }
    let w = prec as u64 + 40;
    let scale = BigInt::one() << w;
    let mut sum = BigInt::zero();
    let mut pow3 = BigInt::from(3);
    let nine = BigInt::from(9);
    let mut k: u64 = 0;
    // stop once 3^(2k+1) exceeds 2^w: the remaining tail is below one unit
    while pow3.bits() <= w + 1 {
        let den = &pow3 * BigInt::from(2 * k + 1);
        sum += &scale / &den;
        pow3 *= &nine;
        k += 1;
    }
    // each floor loses < 1 unit, the tail adds < 1 unit
    let lo = Dyadic::new(sum.clone() << 1u32, -(w as i64));
    let hi = Dyadic::new((sum + BigInt::from(k + 1)) << 1u32, -(w as i64));
    let iv = Interval::new(lo, hi);
    let mut cache = LN2_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    match cache.as_ref() {
        Some((p, _)) if *p >= prec => {}
        _ => *cache = Some((prec, iv.clone())),
    }
    iv.round(prec)
}

fn check_cap(iv: &Interval, cap: i64) -> Result<()> {
    let m = iv.magnitude();
    if m != i64::MIN && m.abs() > cap {
        return Err(Error::Overflow { cap });
    }
    Ok(())
}

/// exp of an exact dyadic.
pub fn exp_point(x: &Dyadic, prec: u32, cap: i64) -> Result<Interval> {
    if x.is_zero() {
        return Ok(Interval::one());
    }
    let xf = x.to_f64();
    if !xf.is_finite() || xf.abs() > cap as f64 * 0.69 {
        return Err(Error::Overflow { cap });
    }
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let s: i64 = 8;
    let wp = prec + 32 + s as u32 + 64 - (k.unsigned_abs().leading_zeros());
    let kl = Interval::from_i64(k).mul(&ln2(wp), wp);
    let r = Interval::point(x.clone()).sub(&kl, wp).shl(-s);

    let mut sum = Interval::one();
    let mut term = Interval::one();
    let mut j: i64 = 1;
    loop {
        term = term.mul(&r, wp).div(&Interval::from_i64(j), wp).expect("nonzero divisor");
        sum = sum.add(&term, wp);
        j += 1;
        if term.mag().magnitude() < -(wp as i64) - 2 || j > 10_000 {
            break;
        }
    }
    // |r| < 1/256, so the tail is below twice the last term
    let tail = term.mag().shl(1);
    let mut acc = sum.widen(&tail);
    for _ in 0..s {
        acc = acc.mul(&acc, wp);
    }
    let out = acc.shl(k).round(prec);
    check_cap(&out, cap)?;
    Ok(out)
}

/// Natural log of a positive exact dyadic.
pub fn log_point(a: &Dyadic, prec: u32) -> Result<Interval> {
    if !a.is_positive() {
        return Err(Error::Domain(format!("log of non-positive value {a}")));
    }
    if *a == Dyadic::one() {
        return Ok(Interval::zero());
    }
    let b = a.mantissa().bits() as i64;
    let mut t = a.exponent() + b;
    // y = a / 2^t lies in [1/2, 1)
    let mut y = Dyadic::new(a.mantissa().clone(), -b);
    if y < Dyadic::new(BigInt::from(181), -8) {
        y = y.shl(1);
        t -= 1;
    }
    let wp = prec + 32 + (64 - t.unsigned_abs().leading_zeros());
    let one = Dyadic::one();
    let z = Interval::point(y.sub(&one))
        .div(&Interval::point(y.add(&one)), wp)
        .expect("y + 1 > 0");
    let z2 = z.mul(&z, wp);
    let mut pow = z.clone();
    let mut sum = Interval::zero();
    let mut k: i64 = 0;
    loop {
        let term = pow.div(&Interval::from_i64(2 * k + 1), wp).expect("nonzero divisor");
        sum = sum.add(&term, wp);
        pow = pow.mul(&z2, wp);
        k += 1;
        if pow.is_exact_zero() || pow.mag().magnitude() < -(wp as i64) - 2 || k > 100_000 {
            break;
        }
    }
    // |z| <= 0.172, the remaining terms sum to less than twice |z|^(2k+1)
    let tail = pow.mag().shl(1);
    let atanh = sum.widen(&tail);
    let mut out = atanh.shl(1);
    if t != 0 {
        out = out.add(&Interval::from_i64(t).mul(&ln2(wp), wp), wp);
    }
    Ok(out.round(prec))
}

pub fn exp(x: &Interval, prec: u32, cap: i64) -> Result<Interval> {
    if x.is_point() {
        return exp_point(&x.lo, prec, cap);
    }
    let lo = exp_point(&x.lo, prec, cap)?;
    let hi = exp_point(&x.hi, prec, cap)?;
    Ok(Interval::new(lo.lo, hi.hi))
}

pub fn log(x: &Interval, prec: u32) -> Result<Interval> {
    if !x.lo.is_positive() {
        return Err(Error::Domain(format!("log argument {x} is not positive")));
    }
    if x.is_point() {
        return log_point(&x.lo, prec);
    }
    let lo = log_point(&x.lo, prec)?;
    let hi = log_point(&x.hi, prec)?;
    Ok(Interval::new(lo.lo, hi.hi))
}

/// Directed `s`-th root of a positive dyadic.
fn nth_root_dir(v: &Dyadic, s: u32, prec: u32, dir: Round) -> Dyadic {
    debug_assert!(v.is_positive());
    let e = v.exponent();
    let si = s as i64;
    let r = e.rem_euclid(si);
    let mut j = e.div_euclid(si);
    let mut inner: BigInt = v.mantissa() << r as u64;
    let want = s as i64 * (prec as i64 + 2);
    let have = inner.bits() as i64;
    if have < want {
        let t = (want - have + si - 1) / si;
        inner <<= (t * si) as u64;
        j -= t;
    }
    let root = inner.nth_root(s);
    let exact = num_traits::pow(root.clone(), s as usize) == inner;
    let root = if dir == Round::Up && !exact { root + 1 } else { root };
    Dyadic::new(root, j).round(prec, dir)
}

const MAX_DIRECT_POWER: u64 = 4096;

/// Directed `a^q` for an exact dyadic `a >= 0` and rational `q`.
pub fn pow_point_dir(a: &Dyadic, q: &BigRational, prec: u32, dir: Round, cap: i64) -> Result<Dyadic> {
    if a.is_negative() {
        return Err(Error::Domain(format!("fractional power of negative value {a}")));
    }
    let p = q.numer();
    if a.is_zero() {
        if p.is_positive() {
            return Ok(Dyadic::zero());
        }
        return Err(Error::Domain("non-positive power of zero".into()));
    }
    let s = q.denom().to_u32().ok_or_else(|| Error::Domain("exponent denominator too large".into()))?;
    let pa = p.abs().to_u64().unwrap_or(u64::MAX);
    if pa > MAX_DIRECT_POWER {
        // large exponents go through exp(q log a)
        let l = log_point(a, prec + 32)?;
        let ql = l.mul(&Interval::from_rational(q, prec + 32), prec + 32);
        let e = exp(&ql, prec, cap)?;
        return Ok(if dir == Round::Down { e.lo } else { e.hi });
    }
    if p.is_negative() {
        let v = pow_point_dir(a, &BigRational::new(-p, q.denom().clone()), prec + 2, dir.flip(), cap)?;
        return Ok(Dyadic::one().div(&v, prec, dir));
    }
    let v = a.pow(pa as u32);
    if s == 1 {
        return Ok(v.round(prec, dir));
    }
    Ok(nth_root_dir(&v, s, prec, dir))
}

/// `x^q` for a rational exponent `q`.
pub fn pow_rational(x: &Interval, q: &BigRational, prec: u32, cap: i64) -> Result<Interval> {
    if q.is_integer() {
        let n = q.numer();
        let k = n.abs().to_u32().ok_or(Error::Overflow { cap })?;
        let v = x.powi(k, prec);
        let out = if n.is_negative() {
            v.recip(prec).ok_or_else(|| Error::Domain(format!("negative power of interval {x} containing zero")))?
        } else {
            v
        };
        check_cap(&out, cap)?;
        return Ok(out);
    }
    if x.lo.is_negative() {
        return Err(Error::Domain(format!("fractional power of possibly negative value {x}")));
    }
    let out = if q.is_positive() {
        Interval::new(
            pow_point_dir(&x.lo, q, prec, Round::Down, cap)?,
            pow_point_dir(&x.hi, q, prec, Round::Up, cap)?,
        )
    } else {
        Interval::new(
            pow_point_dir(&x.hi, q, prec, Round::Down, cap)?,
            pow_point_dir(&x.lo, q, prec, Round::Up, cap)?,
        )
    };
    check_cap(&out, cap)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_to(iv: &Interval, v: f64, tol: f64) -> bool {
        (iv.lo.to_f64() - v).abs() < tol && (iv.hi.to_f64() - v).abs() < tol
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn ln2_is_tight_and_contains() {
        let l = ln2(128);
        assert!(close_to(&l, std::f64::consts::LN_2, 1e-15));
        assert!(l.width().magnitude() < -120);
        // a lower precision request reuses the cache and still contains ln 2
        let l64 = ln2(64);
        assert!(l64.lo <= l.lo && l.hi <= l64.hi);
    }

    #[test]
    fn exp_and_log_agree_with_f64() {
        for &v in &[-3.5f64, -0.25, 0.1, 1.0, 2.0, 10.0, 40.0] {
            let x = Dyadic::from_rational(&BigRational::from_float(v).unwrap(), 64, Round::Down);
            let e = exp_point(&x, 64, DEFAULT_EXPONENT_CAP).unwrap();
            assert!(close_to(&e, v.exp(), v.exp() * 1e-14), "exp({v}) = {e}");
        }
        for &v in &[0.3f64, 0.5, 1.5, 2.0, 7.0, 1e6, 1e-9] {
            let x = Dyadic::from_rational(&BigRational::from_float(v).unwrap(), 64, Round::Down);
            let l = log_point(&x, 64).unwrap();
            assert!(close_to(&l, v.ln(), 1e-13), "log({v}) = {l}");
        }
    }

    #[test]
    fn log_of_one_is_exactly_zero() {
        assert!(log_point(&Dyadic::one(), 64).unwrap().is_exact_zero());
    }

    #[test]
    fn roots_exact_when_possible() {
        let four = Interval::from_i64(4);
        let r = pow_rational(&four, &rat(5, 2), 64, DEFAULT_EXPONENT_CAP).unwrap();
        assert_eq!(r, Interval::from_i64(32));
        let eight = Interval::from_i64(8);
        let r = pow_rational(&eight, &rat(2, 3), 64, DEFAULT_EXPONENT_CAP).unwrap();
        assert_eq!(r, Interval::from_i64(4));
        let r = pow_rational(&four, &rat(-1, 2), 64, DEFAULT_EXPONENT_CAP).unwrap();
        assert_eq!(r, Interval::point(Dyadic::half()));
    }

    #[test]
    fn sqrt2_width() {
        let r = pow_rational(&Interval::from_i64(2), &rat(1, 2), 64, DEFAULT_EXPONENT_CAP).unwrap();
        assert!(close_to(&r, std::f64::consts::SQRT_2, 1e-15));
        assert!(r.width().magnitude() <= -60);
    }

    #[test]
    fn large_exponent_path() {
        let r = pow_rational(&Interval::from_i64(2), &rat(10001, 10000), 64, DEFAULT_EXPONENT_CAP).unwrap();
        assert!(close_to(&r, 2f64.powf(1.0001), 1e-14));
    }

    #[test]
    fn overflow_is_reported() {
        let big = Dyadic::from_i64(1 << 40);
        assert!(matches!(exp_point(&big, 64, DEFAULT_EXPONENT_CAP), Err(Error::Overflow { .. })));
    }
}
