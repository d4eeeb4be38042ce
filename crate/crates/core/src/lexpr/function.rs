use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::diff::nth_derivative;
use super::eval::{eval_exact, eval_interval};
use super::expr::{simplify, Expr};
use super::parse::parse_expr;
use crate::arith::elementary::DEFAULT_EXPONENT_CAP;
use crate::arith::{Dyadic, Interval};
use crate::error::{Error, Result};

/// Certified rational bounds on a real value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "crate::json::rational")]
    pub lo: BigRational,
    #[serde(with = "crate::json::rational")]
    pub hi: BigRational,
    pub precision_bits: u32,
}

impl Enclosure {
    pub fn from_interval(iv: &Interval, precision_bits: u32) -> Enclosure {
        Enclosure { lo: iv.lo_rational(), hi: iv.hi_rational(), precision_bits }
    }

    pub fn exact(v: BigRational, precision_bits: u32) -> Enclosure {
        Enclosure { lo: v.clone(), hi: v, precision_bits }
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            use num_traits::ToPrimitive;
            write!(
                f,
                "[{:.17e}, {:.17e}]",
                self.lo.to_f64().unwrap_or(f64::NAN),
                self.hi.to_f64().unwrap_or(f64::NAN)
            )
        }
    }
}

/// Precision schedule and overflow limit for evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub start_bits: u32,
    pub max_bits: u32,
    pub exponent_cap: i64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { start_bits: 64, max_bits: 4096, exponent_cap: DEFAULT_EXPONENT_CAP }
    }
}

/// Largest start point tried when inferring `x0`.
pub const X0_SEARCH_LIMIT: i64 = 64;
const SAMPLE_DENSE: i64 = 16;
const SAMPLE_GEOMETRIC_MAX_LOG2: u32 = 40;

/// A logarithmico-exponential function with a domain threshold.
///
/// Below `x0` the function is treated as identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LEFunction {
    expr: Expr,
    x0: i64,
    config: EvalConfig,
    /// +1 increasing, -1 decreasing, 0 constant.
    direction: i8,
}

fn int_point(n: &BigInt) -> Interval {
    Interval::from_int(n)
}

impl LEFunction {
    /// Parse, simplify and infer `x0`.
    pub fn parse(text: &str) -> Result<LEFunction> {
        let e = simplify(&parse_expr(text)?);
        LEFunction::new(e)
    }

    pub fn new(expr: Expr) -> Result<LEFunction> {
        LEFunction::with_config(expr, None, EvalConfig::default())
    }

    /// Build with an explicit or inferred `x0`, validating monotonicity.
    pub fn with_config(expr: Expr, x0: Option<i64>, config: EvalConfig) -> Result<LEFunction> {
        let mut f = LEFunction { expr, x0: 0, config, direction: 0 };
        let deriv = nth_derivative(&f.expr, 1);
        match x0 {
            Some(x0) => {
                f.x0 = x0;
                f.direction = f.monotone_from(&deriv, x0).map_err(|e| match e {
                    Error::NonMonotone(m) => Error::NonMonotone(format!("{} on [{x0}, oo): {m}", f.expr)),
                    e => e,
                })?;
            }
            None => {
                let mut last = None;
                for n in 0..=X0_SEARCH_LIMIT {
                    match f.monotone_from(&deriv, n) {
                        Ok(dir) => {
                            f.x0 = n;
                            f.direction = dir;
                            return Ok(f);
                        }
                        Err(e) => last = Some(e),
                    }
                }
                return Err(Error::NonMonotone(format!(
                    "{}: no start point in [0, {X0_SEARCH_LIMIT}] passes validation ({})",
                    f.expr,
                    last.map(|e| e.to_string()).unwrap_or_default()
                )));
            }
        }
        Ok(f)
    }

    /// Build without validation; used for derivatives and auxiliary functions.
    pub fn unchecked(expr: Expr, x0: i64) -> LEFunction {
        LEFunction { expr, x0, config: EvalConfig::default(), direction: 0 }
    }

    pub fn with_eval_config(mut self, config: EvalConfig) -> LEFunction {
        self.config = config;
        self
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn x0(&self) -> i64 {
        self.x0
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    /// +1 if validated increasing, -1 if decreasing, 0 if constant or unvalidated.
    pub fn direction(&self) -> i8 {
        self.direction
    }

    /// Heuristic check: `f` evaluates at `n` and `f'` has one strict sign at
    /// dense points after `n` and at powers of two up to `2^40`.
    fn monotone_from(&self, deriv: &Expr, n: i64) -> Result<i8> {
        self.eval_at_int(&BigInt::from(n), self.config.start_bits)?;
        if !deriv.contains_var() {
            let c = deriv.as_const().cloned().unwrap_or_else(BigRational::zero);
            return Ok(if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            });
        }
        let mut points: Vec<i64> = Vec::new();
        // the derivative may be undefined at the start point itself (sqrt at 0)
        if eval_interval(deriv, &Interval::from_i64(n), self.config.start_bits, self.config.exponent_cap).is_ok() {
            points.push(n);
        }
        points.extend(n + 1..=n + SAMPLE_DENSE);
        for k in 0..=SAMPLE_GEOMETRIC_MAX_LOG2 {
            let p = 1i64 << k;
            if p > n + SAMPLE_DENSE {
                points.push(p);
            }
        }
        let mut sign: Option<Ordering> = None;
        for p in points {
            let x = BigInt::from(p);
            if let Err(e) = self.eval_at_int(&x, self.config.start_bits) {
                if matches!(e, Error::Overflow { .. }) {
                    break;
                }
                return Err(e);
            }
            let s = match self.sign_at(deriv, &x) {
                Ok(s) => s,
                Err(Error::Overflow { .. }) => break,
                Err(e) => return Err(e),
            };
            if s == Ordering::Equal {
                // a flat start point (x^(5/2) at 0) does not break monotonicity
                if p == n {
                    continue;
                }
                return Err(Error::NonMonotone(format!("derivative vanishes at {p}")));
            }
            match sign {
                None => sign = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::NonMonotone(format!("derivative changes sign by {p}")));
                }
                _ => {}
            }
        }
        Ok(match sign {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        })
    }

    fn sign_at(&self, e: &Expr, x: &BigInt) -> Result<Ordering> {
        let mut bits = self.config.start_bits;
        loop {
            match eval_interval(e, &int_point(x), bits, self.config.exponent_cap) {
                Ok(iv) => {
                    if let Some(s) = iv.sign_definite() {
                        return Ok(s);
                    }
                }
                Err(Error::Inconclusive(_)) => {}
                Err(e) => return Err(e),
            }
            if bits >= 1024.min(self.config.max_bits) {
                if eval_exact(e, &BigRational::from_integer(x.clone())).is_some_and(|v| v.is_zero()) {
                    return Ok(Ordering::Equal);
                }
                return Err(Error::NonMonotone(format!("derivative sign undecided at {x}")));
            }
            bits *= 2;
        }
    }

    /// k-th derivative with the same `x0`.
    pub fn differentiate(&self, k: u32) -> LEFunction {
        if k == 0 {
            return self.clone();
        }
        LEFunction { expr: nth_derivative(&self.expr, k), x0: self.x0, config: self.config, direction: 0 }
    }

    fn eval_raw(&self, x: &Interval, bits: u32) -> Result<Interval> {
        eval_interval(&self.expr, x, bits, self.config.exponent_cap)
    }

    /// Interval value at an integer, escalating on inconclusive domain checks.
    fn eval_at_int(&self, n: &BigInt, bits: u32) -> Result<Interval> {
        self.eval_at(&int_point(n), bits)
    }

    fn eval_at(&self, x: &Interval, bits: u32) -> Result<Interval> {
        let mut b = bits;
        loop {
            match self.eval_raw(x, b) {
                Err(Error::Inconclusive(m)) => {
                    if b >= self.config.max_bits {
                        return Err(Error::PrecisionCap { bits: b, what: m });
                    }
                    b = (b * 2).min(self.config.max_bits);
                }
                r => return r,
            }
        }
    }

    /// Certified enclosure of `f(n)` for `n >= x0`.
    pub fn eval_enclosure(&self, n: i64, precision_bits: u32) -> Result<Enclosure> {
        self.eval_enclosure_big(&BigInt::from(n), precision_bits)
    }

    pub fn eval_enclosure_big(&self, n: &BigInt, precision_bits: u32) -> Result<Enclosure> {
        if *n < BigInt::from(self.x0) {
            return Err(Error::BelowDomain { n: i64::try_from(n).unwrap_or(i64::MIN), x0: self.x0 });
        }
        let iv = self.eval_at_int(n, precision_bits.max(16))?;
        Ok(Enclosure::from_interval(&iv, precision_bits))
    }

    /// Enclosure with the zero extension below `x0`.
    pub fn eval_extended(&self, n: &BigInt, precision_bits: u32) -> Result<Interval> {
        if *n < BigInt::from(self.x0) {
            return Ok(Interval::zero());
        }
        self.eval_at_int(n, precision_bits)
    }

    /// Enclosure of `f(x)` at a rational point `x >= x0`.
    pub fn eval_rational(&self, x: &BigRational, precision_bits: u32) -> Result<Interval> {
        self.eval_at(&Interval::from_rational(x, precision_bits + 8), precision_bits)
    }

    /// Nearest integer to `f(n)`, ties rounding up; 0 below `x0`.
    pub fn nint(&self, n: i64) -> Result<BigInt> {
        self.nint_big(&BigInt::from(n))
    }

    pub fn nint_big(&self, n: &BigInt) -> Result<BigInt> {
        if *n < BigInt::from(self.x0) {
            return Ok(BigInt::zero());
        }
        self.nint_rational(&BigRational::from_integer(n.clone()))
    }

    /// Nearest integer to `f(x)` at a rational point.
    pub fn nint_rational(&self, x: &BigRational) -> Result<BigInt> {
        let mut bits = self.config.start_bits;
        let mut tried_exact = false;
        loop {
            let iv = self.eval_rational(x, bits)?;
            if let Some(k) = iv.nearest_integer() {
                return Ok(k);
            }
            if !tried_exact {
                tried_exact = true;
                if let Some(v) = eval_exact(&self.expr, x) {
                    return Ok(round_half_up(&v));
                }
            }
            if bits >= self.config.max_bits {
                return Err(Error::TieUndecidable { point: x.to_string(), bits });
            }
            bits = (bits * 2).min(self.config.max_bits);
        }
    }

    /// Enclosure of the distance from `f(n)` to the nearest integer.
    pub fn circle_norm(&self, n: i64, precision_bits: u32) -> Result<Enclosure> {
        if n < self.x0 {
            return Err(Error::BelowDomain { n, x0: self.x0 });
        }
        if let Some(v) = eval_exact(&self.expr, &BigRational::from_integer(n.into())) {
            return Ok(Enclosure::exact(circle_norm_rational(&v), precision_bits));
        }
        let iv = self.eval_at_int(&BigInt::from(n), precision_bits.max(16))?;
        Ok(circle_norm_interval(&iv, precision_bits))
    }

    /// Enclosure of `f^{-1}(y) = min { x : f(x) >= y }` on `[lo, oo)`.
    pub fn invert_at(&self, y: &BigRational, lo: i64, precision_bits: u32) -> Result<Enclosure> {
        if lo < self.x0 {
            return Err(Error::Precondition(format!("lower end {lo} is below x0 = {}", self.x0)));
        }
        if self.direction < 0 {
            return Err(Error::NonMonotone(format!("{} is decreasing", self.expr)));
        }
        let bits = precision_bits.max(16) + 16;
        let cmp = |x: &Dyadic| -> Result<Option<Ordering>> {
            let v = self.eval_at(&Interval::point(x.clone()), bits)?;
            let y_lo = Dyadic::from_rational(y, bits + 8, crate::arith::Round::Down);
            let y_hi = Dyadic::from_rational(y, bits + 8, crate::arith::Round::Up);
            if v.hi < y_lo {
                Ok(Some(Ordering::Less))
            } else if v.lo > y_hi {
                Ok(Some(Ordering::Greater))
            } else if v.is_point() && v.lo.to_rational() == *y {
                Ok(Some(Ordering::Equal))
            } else {
                Ok(None)
            }
        };
        let mut a = Dyadic::from_i64(lo);
        match cmp(&a)? {
            Some(Ordering::Greater) => {
                return Err(Error::Precondition(format!("y = {y} is below f({lo})")));
            }
            Some(Ordering::Equal) => return Ok(Enclosure::exact(a.to_rational(), precision_bits)),
            _ => {}
        }
        // exponential bracketing
        let mut step = Dyadic::one();
        let mut prev_val = self.eval_at(&Interval::point(a.clone()), bits)?;
        let mut b;
        loop {
            b = a.add(&step);
            let v = self.eval_at(&Interval::point(b.clone()), bits)?;
            if v.hi < prev_val.lo {
                return Err(Error::NonMonotone(format!("decrease detected near {}", b)));
            }
            match cmp(&b)? {
                Some(Ordering::Less) => {
                    a = b.clone();
                    prev_val = v;
                    step = step.shl(1);
                    if step.magnitude() > 200 {
                        return Err(Error::NonConvergence(format!("no bracket for f^-1({y})")));
                    }
                }
                Some(Ordering::Equal) => return Ok(Enclosure::exact(b.to_rational(), precision_bits)),
                _ => break,
            }
        }
        // bisection
        let target = b.magnitude().max(1) - precision_bits as i64;
        let mut undecided = 0;
        while b.sub(&a).magnitude() > target {
            let m = a.add(&b).shl(-1);
            match cmp(&m)? {
                Some(Ordering::Less) => a = m,
                Some(Ordering::Greater) => b = m,
                Some(Ordering::Equal) => return Ok(Enclosure::exact(m.to_rational(), precision_bits)),
                None => {
                    undecided += 1;
                    if undecided > 2 {
                        return Err(Error::PrecisionCap {
                            bits,
                            what: format!("cannot narrow f^-1({y}) below width {}", b.sub(&a)),
                        });
                    }
                    // shrink towards the undecided midpoint from both sides
                    let q = b.sub(&a).shl(-2);
                    let (l, r) = (m.sub(&q), m.add(&q));
                    if cmp(&l)? == Some(Ordering::Less) {
                        a = l;
                    }
                    if cmp(&r)? == Some(Ordering::Greater) {
                        b = r;
                    }
                }
            }
        }
        Ok(Enclosure { lo: a.to_rational(), hi: b.to_rational(), precision_bits })
    }
}

impl fmt::Display for LEFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// `floor(v + 1/2)`.
pub fn round_half_up(v: &BigRational) -> BigInt {
    (v + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

/// Standard ceiling `-floor(-v)`.
pub fn ceil_rational(v: &BigRational) -> BigInt {
    -((-v).floor().to_integer())
}

pub fn circle_norm_rational(v: &BigRational) -> BigRational {
    (v - BigRational::from_integer(round_half_up(v))).abs()
}

fn norm_dyadic(d: &Dyadic) -> Dyadic {
    let k = d.add(&Dyadic::half()).floor();
    d.sub(&Dyadic::from_int(k)).abs()
}

/// Bounds on `||x||` over an interval; the norm is monotone between the
/// integer and half-integer breakpoints.
pub fn circle_norm_interval(iv: &Interval, precision_bits: u32) -> Enclosure {
    let (a, b) = (norm_dyadic(&iv.lo), norm_dyadic(&iv.hi));
    let contains_int = iv.lo.ceil() <= iv.hi.floor();
    let half = Dyadic::half();
    let contains_half = iv.lo.sub(&half).ceil() <= iv.hi.sub(&half).floor();
    let lo = if contains_int { Dyadic::zero() } else { Dyadic::min(&a, &b) };
    let hi = if contains_half { half } else { Dyadic::max(&a, &b) };
    Enclosure { lo: lo.to_rational(), hi: hi.to_rational(), precision_bits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexpr::expr::rat;

    fn f(s: &str) -> LEFunction {
        LEFunction::parse(s).unwrap()
    }

    #[test]
    fn x0_inference() {
        assert_eq!(f("x^(5/2)").x0(), 0);
        assert_eq!(f("log(x)").x0(), 1);
        assert_eq!(f("sqrt(x)*log(x) + x^(-1/3)").x0(), 1);
        assert_eq!(f("log(x - 5)").x0(), 6);
        assert_eq!(f("3").direction(), 0);
    }

    #[test]
    fn non_monotone_rejected() {
        assert!(matches!(LEFunction::parse("(x - 100)^2"), Err(Error::NonMonotone(_))));
    }

    #[test]
    fn nint_examples() {
        assert_eq!(f("sqrt(x)").nint(6).unwrap(), BigInt::from(2));
        assert_eq!(f("x + 1/2").nint(3).unwrap(), BigInt::from(4));
        assert_eq!(f("x^(5/2)").nint(10).unwrap(), BigInt::from(316));
        assert_eq!(f("log(x)").nint(0).unwrap(), BigInt::zero());
    }

    #[test]
    fn tie_needs_exact_path() {
        // 2.25^(1/2) = 1.5 exactly at x = 9/4
        let g = f("x^(1/2) + 1");
        assert_eq!(g.nint_rational(&rat(9, 4)).unwrap(), BigInt::from(3));
    }

    #[test]
    fn tie_undecidable_at_cap() {
        // exp(log(x)/2) equals sqrt(x) but is invisible to the exact path
        let g = LEFunction::parse("exp(log(x)/2) + 1/2").unwrap().with_eval_config(EvalConfig {
            start_bits: 64,
            max_bits: 128,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        });
        assert!(matches!(g.nint(4), Err(Error::TieUndecidable { .. })));
    }

    #[test]
    fn circle_norms() {
        assert!(f("x^(5/2)").circle_norm(4, 64).unwrap().contains(&BigRational::zero()));
        let e = f("sqrt(x)").circle_norm(2, 64).unwrap();
        assert!((e.mid_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(f("x + 1/2").circle_norm(0, 64).unwrap(), Enclosure::exact(rat(1, 2), 64));
    }

    #[test]
    fn inverse_examples() {
        assert!(f("sqrt(x)").invert_at(&rat(3, 1), 0, 64).unwrap().contains(&rat(9, 1)));
        assert!(f("x^(2/3)").invert_at(&rat(4, 1), 0, 64).unwrap().contains(&rat(8, 1)));
        let e = f("x^(3/2)").invert_at(&rat(100, 1), 0, 64).unwrap();
        assert!((e.mid_f64() - 100f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!(f("x").invert_at(&rat(-1, 1), 0, 64).is_err());
    }

    #[test]
    fn below_domain_is_error_for_enclosure() {
        assert!(matches!(f("log(x)").eval_enclosure(0, 64), Err(Error::BelowDomain { .. })));
    }

    #[test]
    fn ceiling_is_standard() {
        assert_eq!(ceil_rational(&rat(3, 2)), BigInt::from(2));
        assert_eq!(ceil_rational(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(ceil_rational(&rat(2, 1)), BigInt::from(2));
    }
}
