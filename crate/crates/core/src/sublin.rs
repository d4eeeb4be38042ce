//! Sub-linear regime: the pseudo-inverse `b(m)` of `⌊f⌉`, the shifted real
//! inverse `g(y) = f^{-1}(y - 1/2) + 1/2`, and the resulting super-linear
//! sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexpr::expr::{add, div, pow, rat, simplify, sub, Expr};
use crate::lexpr::{ceil_rational, round_half_up, Enclosure, GrowthClass, LEFunction};
use crate::sequence::IntSequence;

fn require_increasing(f: &LEFunction) -> Result<()> {
    if f.direction() != 1 {
        return Err(Error::Precondition(format!("{} is not validated as increasing", f.expr())));
    }
    Ok(())
}

/// `b(m) = min { n : ⌊f⌉(n) >= m }` for `m >= 1`.
pub fn b_of(f: &LEFunction, m: i64) -> Result<i64> {
    require_increasing(f)?;
    if m < 1 {
        return Err(Error::InvalidArgument(format!("m must be at least 1 (⌊f⌉ is 0 below x0), got {m}")));
    }
    let target = BigInt::from(m);
    let x0 = f.x0();
    let at = |n: i64| f.value(n);
    if at(x0)? >= target {
        return Ok(x0);
    }
    // a(lo) < m throughout; grow hi until a(hi) >= m
    let (mut lo, mut step) = (x0, 1i64);
    let mut prev = at(x0)?;
    let mut hi = loop {
        let cand = lo.checked_add(step).ok_or_else(|| Error::NotFound(format!("b({m}) beyond the integer range")))?;
        let v = at(cand)?;
        if v < prev {
            return Err(Error::NonMonotone(format!("⌊f⌉ decreases between {lo} and {cand}")));
        }
        if v >= target {
            break cand;
        }
        prev = v;
        lo = cand;
        step = step.checked_mul(2).ok_or_else(|| Error::NotFound(format!("b({m}) beyond the integer range")))?;
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if at(hi)? < target || at(hi - 1)? >= target {
        return Err(Error::NonMonotone(format!("bracket check failed at {hi}")));
    }
    Ok(hi)
}

/// Certified enclosure of `g(m) = f^{-1}(m - 1/2) + 1/2`.
pub fn g_of(f: &LEFunction, m: i64, precision_bits: u32) -> Result<Enclosure> {
    require_increasing(f)?;
    let y = BigRational::from_integer(m.into()) - rat(1, 2);
    let e = f.invert_at(&y, f.x0(), precision_bits)?;
    Ok(Enclosure { lo: e.lo + rat(1, 2), hi: e.hi + rat(1, 2), precision_bits })
}

/// Integer determined by both ends of `g(m)` under `op`, escalating precision.
fn resolve_g(f: &LEFunction, m: i64, op: impl Fn(&BigRational) -> BigInt) -> Result<BigInt> {
    let mut bits = f.config().start_bits;
    loop {
        let e = g_of(f, m, bits)?;
        let (a, b) = (op(&e.lo), op(&e.hi));
        if a == b {
            return Ok(a);
        }
        if bits >= f.config().max_bits {
            return Err(Error::TieUndecidable { point: format!("g({m})"), bits });
        }
        bits = (bits * 2).min(f.config().max_bits);
    }
}

/// `⌊g(m)⌉`.
pub fn g_rounded(f: &LEFunction, m: i64) -> Result<BigInt> {
    resolve_g(f, m, round_half_up)
}

/// `⌈g(m) - 1/2⌉`, the least real solution set bound rounded up.
pub fn g_set_minimum(f: &LEFunction, m: i64) -> Result<BigInt> {
    resolve_g(f, m, |v| ceil_rational(&(v - rat(1, 2))))
}

/// Whether `m - 1/2 >= f(x0)`, i.e. `g(m)` is defined.
fn g_defined(f: &LEFunction, m: i64) -> Result<bool> {
    let y = BigRational::from_integer(m.into()) - rat(1, 2);
    let v = f.eval_enclosure(f.x0(), 128)?;
    Ok(v.hi <= y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "inverse-agreement")]
pub struct InverseAgreementReport {
    /// First `m` in range with `b(m) = ⌊g(m)⌉`.
    pub m0: Option<i64>,
    pub range: [i64; 2],
    /// `m > m0` where the two sides differ.
    pub disagreements: Vec<i64>,
    /// `m` where either side could not be computed, with the reason.
    pub errors: Vec<(i64, String)>,
    pub checked: u64,
}

impl InverseAgreementReport {
    pub fn pass(&self) -> bool {
        self.disagreements.is_empty() && self.errors.is_empty()
    }
}

/// Compare `b(m)` with `⌊g(m)⌉` over `[m_from, m_to]`.
pub fn verify_inverse_agreement(f: &LEFunction, m_from: i64, m_to: i64) -> Result<InverseAgreementReport> {
    require_increasing(f)?;
    let ms: Vec<i64> = if m_from <= m_to { (m_from..=m_to).collect() } else { Vec::new() };
    let outcomes: Vec<(i64, Result<Option<bool>>)> = ms
        .par_iter()
        .map(|&m| {
            let r = (|| {
                if m < 1 || !g_defined(f, m)? {
                    return Ok(None);
                }
                Ok(Some(BigInt::from(b_of(f, m)?) == g_rounded(f, m)?))
            })();
            (m, r)
        })
        .collect();
    let mut rep = InverseAgreementReport {
        m0: None,
        range: [m_from, m_to],
        disagreements: Vec::new(),
        errors: Vec::new(),
        checked: 0,
    };
    for (m, r) in outcomes {
        rep.checked += 1;
        match r {
            Ok(Some(true)) => {
                if rep.m0.is_none() {
                    rep.m0 = Some(m);
                }
            }
            Ok(Some(false)) => {
                if rep.m0.is_some() {
                    rep.disagreements.push(m);
                }
            }
            Ok(None) => {}
            Err(e) => rep.errors.push((m, e.to_string())),
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseGrowthReport {
    pub pass: bool,
    pub points: Vec<i64>,
    /// `g(m)/m`, expected to increase without bound.
    pub linear_ratios: Vec<f64>,
    /// `g(m)/m^{1/eps}`, expected to stay bounded.
    pub power_ratios: Vec<f64>,
    pub message: String,
}

/// Largest tolerated growth of `g(m)/m^{1/eps}` across the samples.
const POWER_RATIO_SLACK: f64 = 4.0;

/// Numeric check that `g` is super-linear and at most of order `m^{1/eps}`.
pub fn inverse_growth_check(f: &LEFunction, epsilon: &BigRational, samples: usize) -> Result<InverseGrowthReport> {
    if !(epsilon.is_positive() && *epsilon < BigRational::one()) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if samples < 3 {
        return Err(Error::InvalidArgument("need at least 3 samples".into()));
    }
    require_increasing(f)?;
    let inv = 1.0 / epsilon.to_f64().unwrap_or(f64::NAN);
    let mut start = 10i64;
    while !g_defined(f, start)? {
        start *= 2;
    }
    let points: Vec<i64> = (0..samples).map(|i| start << i).collect();
    let mut linear = Vec::new();
    let mut power = Vec::new();
    for &m in &points {
        let g = g_of(f, m, 64)?.mid_f64();
        let mf = m as f64;
        linear.push(g / mf);
        power.push(g / mf.powf(inv));
    }
    let increasing = linear.windows(2).all(|w| w[1] > w[0]);
    let unbounded = linear[linear.len() - 1] > 2.0 * linear[0];
    let bounded = power.iter().all(|r| *r <= POWER_RATIO_SLACK * power[0]);
    let pass = increasing && unbounded && bounded;
    let message = if pass {
        "g is super-linear and O(m^(1/eps)) on the samples".to_string()
    } else if !increasing || !unbounded {
        "g(m)/m does not grow: f is not sub-linear".to_string()
    } else {
        format!("g(m)/m^{inv} grows: f is not of order x^{epsilon} from below")
    };
    Ok(InverseGrowthReport { pass, points, linear_ratios: linear, power_ratios: power, message })
}

/// `n -> ⌊g(n)⌉` through numeric inversion; 0 where `g` is undefined.
#[derive(Clone, Debug)]
pub struct InverseShiftSequence {
    f: LEFunction,
}

impl InverseShiftSequence {
    pub fn new(f: LEFunction) -> Result<InverseShiftSequence> {
        require_increasing(&f)?;
        Ok(InverseShiftSequence { f })
    }
}

impl IntSequence for InverseShiftSequence {
    fn value(&self, n: i64) -> Result<BigInt> {
        if !g_defined(&self.f, n)? {
            return Ok(BigInt::zero());
        }
        g_rounded(&self.f, n)
    }
}

/// The shifted inverse, symbolic when `f = c x^r` with rational `c > 0`.
#[derive(Clone, Debug)]
pub enum InverseShift {
    Symbolic(LEFunction),
    Numeric(InverseShiftSequence),
}

impl IntSequence for InverseShift {
    fn value(&self, n: i64) -> Result<BigInt> {
        match self {
            InverseShift::Symbolic(g) => g.value(n),
            InverseShift::Numeric(s) => s.value(n),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub g: InverseShift,
    /// Growth class of `g`; for the numeric path only what was configured.
    pub class: Option<GrowthClass>,
}

/// `(c, r)` when `f = c x^r`.
fn monomial(e: &Expr) -> Option<(BigRational, BigRational)> {
    match simplify(e) {
        Expr::Var => Some((BigRational::one(), BigRational::one())),
        Expr::Pow(b, r) if *b == Expr::Var => Some((BigRational::one(), r)),
        Expr::Mul(c, rest) => {
            let c = c.as_const()?.clone();
            match *rest {
                Expr::Var => Some((c, BigRational::one())),
                Expr::Pow(b, r) if *b == Expr::Var => Some((c, r)),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Growth class of `y -> ((y - 1/2)/c)^e + 1/2` for `e > 1`.
pub fn induced_class(c: &BigRational, e: &BigRational) -> GrowthClass {
    let two = BigRational::from_integer(2.into());
    if *e < two {
        GrowthClass::NearLinear
    } else if e.is_integer() {
        let k = e.to_integer().to_i32().unwrap_or(i32::MAX);
        let alpha = c.to_f64().unwrap_or(f64::NAN).powi(-k);
        GrowthClass::ExactPolynomial { d: k as u32 + 1, alpha_hint: Some(alpha) }
    } else {
        GrowthClass::SuperLinearStrict { d: e.floor().to_integer().to_u32().unwrap_or(u32::MAX) + 1 }
    }
}

/// `g(y) = f^{-1}(y - 1/2) + 1/2` and its growth class.
pub fn reduce_to_superlinear(f: &LEFunction, configured: Option<GrowthClass>) -> Result<Reduction> {
    require_increasing(f)?;
    if let Some((c, r)) = monomial(f.expr()) {
        if !c.is_positive() || r <= BigRational::zero() || r >= BigRational::one() {
            return Err(Error::UnsupportedInverse(format!("{} is not sub-linear and increasing", f.expr())));
        }
        let e = r.recip();
        let half = Expr::Const(rat(1, 2));
        let g = add(pow(div(sub(Expr::Var, half.clone()), Expr::Const(c.clone())), e.clone()), half);
        let g = LEFunction::with_config(g, None, *f.config())?;
        return Ok(Reduction { g: InverseShift::Symbolic(g), class: Some(induced_class(&c, &e)) });
    }
    let class = match configured {
        Some(GrowthClass::SubLinear { .. }) | None => None,
        other => other,
    };
    Ok(Reduction { g: InverseShift::Numeric(InverseShiftSequence::new(f.clone())?), class })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> LEFunction {
        LEFunction::parse(s).unwrap()
    }

    #[test]
    fn b_examples() {
        let s = f("sqrt(x)");
        assert_eq!(b_of(&s, 3).unwrap(), 7);
        assert_eq!(b_of(&s, 10).unwrap(), 91);
        assert!(b_of(&s, 0).is_err());
        let t = f("x^(2/3)");
        let scan = (0..).find(|&n| t.value(n).unwrap() >= BigInt::from(50)).unwrap();
        assert_eq!(b_of(&t, 50).unwrap(), scan);
    }

    #[test]
    fn g_examples() {
        let s = f("sqrt(x)");
        assert!(g_of(&s, 3, 64).unwrap().contains(&rat(27, 4)));
        assert!(g_of(&s, 10, 64).unwrap().contains(&rat(363, 4)));
        let e = g_of(&f("x^(2/3)"), 50, 64).unwrap();
        assert!((e.mid_f64() - (49.5f64.powf(1.5) + 0.5)).abs() < 1e-9);
    }

    #[test]
    fn agreement_reports() {
        let r = verify_inverse_agreement(&f("sqrt(x)"), 2, 200).unwrap();
        assert_eq!(r.m0, Some(2));
        assert!(r.pass());
        let e = verify_inverse_agreement(&f("x^(2/3)"), 5, 4).unwrap();
        assert_eq!(e.m0, None);
        assert_eq!(e.checked, 0);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "inverse-agreement");
        assert_eq!(v["range"], serde_json::json!([2, 200]));
    }

    #[test]
    fn set_minimum_matches_b() {
        let t = f("x^(2/3)");
        for m in [3, 17, 64, 333] {
            assert_eq!(g_set_minimum(&t, m).unwrap(), BigInt::from(b_of(&t, m).unwrap()));
        }
    }

    #[test]
    fn growth_checks() {
        assert!(inverse_growth_check(&f("sqrt(x)"), &rat(1, 2), 8).unwrap().pass);
        assert!(inverse_growth_check(&f("x^(2/3)"), &rat(2, 3), 8).unwrap().pass);
        assert!(!inverse_growth_check(&f("x^(3/2)"), &rat(1, 2), 8).unwrap().pass);
    }

    #[test]
    fn reductions() {
        let r = reduce_to_superlinear(&f("sqrt(x)"), None).unwrap();
        let InverseShift::Symbolic(g) = &r.g else { panic!("expected symbolic inverse") };
        assert_eq!(g.expr(), &parse_g("(x - 1/2)^2 + 1/2"));
        assert!(matches!(r.class, Some(GrowthClass::ExactPolynomial { d: 3, .. })));
        let r = reduce_to_superlinear(&f("x^(2/3)"), None).unwrap();
        assert_eq!(r.class, Some(GrowthClass::NearLinear));
        let r = reduce_to_superlinear(&f("sqrt(x)*log(x)"), None).unwrap();
        assert!(matches!(r.g, InverseShift::Numeric(_)));
        assert!(reduce_to_superlinear(&f("x^(3/2)"), None).is_err());
        let s = f("sqrt(x)");
        let InverseShift::Symbolic(g) = reduce_to_superlinear(&s, None).unwrap().g else { unreachable!() };
        for m in 1..50 {
            assert_eq!(g.value(m).unwrap(), BigInt::from(b_of(&s, m).unwrap()));
        }
    }

    fn parse_g(s: &str) -> Expr {
        simplify(&crate::lexpr::parse_expr(s).unwrap())
    }
}
