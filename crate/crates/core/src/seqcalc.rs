//! Discrete-derivative calculus on integer sequences.
//!
//! `Δ_m a(n) = a(n+m) - a(n)` and the symmetric variant
//! `Δ~_m a(n) = a(n+m) - a(n) - a(m) + a(0) = Δ_n Δ_m a(0)`.
//! Windows are rebased: index 0 is the window start.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{Dyadic, Interval};
use crate::error::{Error, Result};
use crate::json;
use crate::lexpr::{Enclosure, LEFunction};
use crate::sequence::IntSequence;

/// Consecutive values `a(N), ..., a(N + M - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSeqWindow {
    pub start: i64,
    #[serde(with = "json::bigint_vec")]
    pub values: Vec<BigInt>,
}

impl IntSeqWindow {
    pub fn new(start: i64, values: Vec<BigInt>) -> IntSeqWindow {
        IntSeqWindow { start, values }
    }

    pub fn from_i64(start: i64, values: &[i64]) -> IntSeqWindow {
        IntSeqWindow { start, values: values.iter().map(|&v| BigInt::from(v)).collect() }
    }

    /// Window of `a` over `[start, start + len)`.
    pub fn from_fn(start: i64, len: usize, a: impl Fn(i64) -> BigInt) -> IntSeqWindow {
        IntSeqWindow { start, values: (0..len as i64).map(|m| a(start + m)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at rebased index `m`.
    pub fn at(&self, m: i64) -> Option<&BigInt> {
        if m < 0 {
            return None;
        }
        self.values.get(m as usize)
    }

    fn need(&self, index: i64) -> Result<&BigInt> {
        self.at(index).ok_or(Error::WindowTooShort { needed: index.max(0) as usize + 1, have: self.len() })
    }
}

/// `Δ_m` on a window; the result has length `M - m`.
pub fn delta(a: &IntSeqWindow, m: usize) -> Result<IntSeqWindow> {
    if a.len() <= m {
        return Err(Error::WindowTooShort { needed: m + 1, have: a.len() });
    }
    let values = (0..a.len() - m).map(|n| &a.values[n + m] - &a.values[n]).collect();
    Ok(IntSeqWindow::new(a.start, values))
}

/// `Δ~_m` on the rebased window; the result has length `M - m`.
pub fn sym_delta(a: &IntSeqWindow, m: usize) -> Result<IntSeqWindow> {
    if a.len() <= m {
        return Err(Error::BasePointMissing { shift: m as i64, len: a.len() });
    }
    let base = &a.values[m] - &a.values[0];
    let values = (0..a.len() - m).map(|n| &a.values[n + m] - &a.values[n] - &base).collect();
    Ok(IntSeqWindow::new(a.start, values))
}

/// Coefficients of `Δ_{s_1} ... Δ_{s_k}` as a map offset -> coefficient.
pub fn stencil(shifts: &[i64]) -> Vec<(i64, BigInt)> {
    let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
    acc.insert(0, BigInt::one());
    for &s in shifts {
        let mut next: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (o, c) in &acc {
            *next.entry(o + s).or_default() += c;
            *next.entry(*o).or_default() -= c;
        }
        acc = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    acc.into_iter().collect()
}

/// `Δ_{s_1} ... Δ_{s_k} a(n)` for any integer-valued `a`.
pub fn iterated_delta_with(a: impl Fn(i64) -> Result<BigInt>, n: i64, shifts: &[i64]) -> Result<BigInt> {
    let mut sum = BigInt::zero();
    for (o, c) in stencil(shifts) {
        sum += c * a(n + o)?;
    }
    Ok(sum)
}

pub fn iterated_delta(seq: &dyn IntSequence, n: i64, shifts: &[i64]) -> Result<BigInt> {
    iterated_delta_with(|k| seq.value(k), n, shifts)
}

/// `Δ_{s_1} ... Δ_{s_k} h(n)` for a rational-valued `h`.
pub fn iterated_delta_rational(h: impl Fn(i64) -> BigRational, n: i64, shifts: &[i64]) -> BigRational {
    stencil(shifts)
        .into_iter()
        .fold(BigRational::zero(), |acc, (o, c)| acc + BigRational::from_integer(c) * h(n + o))
}

/// `Δ~^r a(n, m, 1, ..., 1)` with `r - 1` trailing ones, i.e.
/// `Δ_n Δ_m Δ_1^{r-1} a(0)` on the rebased window.
pub fn iterated_sym_delta(a: &IntSeqWindow, r: usize, n: i64, m: i64) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if n < 0 || m < 0 {
        return Err(Error::InvalidArgument(format!("shifts must be non-negative, got n = {n}, m = {m}")));
    }
    let top = n + m + (r as i64 - 1);
    if top >= a.len() as i64 {
        return Err(Error::WindowTooShort { needed: top as usize + 1, have: a.len() });
    }
    let mut shifts = vec![n, m];
    shifts.extend(std::iter::repeat(1).take(r - 1));
    iterated_delta_with(|k| a.need(k).cloned(), 0, &shifts)
}

/// `Δ_1^k` over a slice of values.
pub fn forward_differences(values: &[BigInt], k: usize) -> Vec<BigInt> {
    let mut v = values.to_vec();
    for _ in 0..k {
        if v.is_empty() {
            break;
        }
        v = v.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    v
}

/// Dense polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    #[serde(with = "json::rational_vec")]
    pub coeffs: Vec<BigRational>,
}

/// Integer-valued polynomial; coefficients may have factorial denominators.
pub type IntegerPolynomial = Polynomial;

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Polynomial {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Polynomial {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigRational {
        self.eval(&BigRational::from_integer(x.into()))
    }

    fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    fn mul_linear(&self, c: &BigRational) -> Polynomial {
        // self * (x + c)
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i + 1] += a;
            out[i] += a * c;
        }
        Polynomial::new(out)
    }

    fn scale(&self, s: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `x -> p(x + c)`.
    pub fn shift(&self, c: i64) -> Polynomial {
        let c = BigRational::from_integer(c.into());
        self.coeffs.iter().rev().fold(Polynomial::zero(), |acc, a| {
            acc.mul_linear(&c).add(&Polynomial::new(vec![a.clone()]))
        })
    }
}

/// Interpolating polynomial of degree `<= r` in the shifted variable
/// `m = n - N`, if `Δ_1^{r+1}` vanishes on the whole window.
pub fn detect_polynomial(a: &IntSeqWindow, r: usize) -> Result<Option<IntegerPolynomial>> {
    if a.len() < r + 2 {
        return Err(Error::WindowTooShort { needed: r + 2, have: a.len() });
    }
    let mut rows = vec![a.values.clone()];
    for k in 1..=r + 1 {
        rows.push(forward_differences(&rows[k - 1], 1));
    }
    if rows[r + 1].iter().any(|v| !v.is_zero()) {
        return Ok(None);
    }
    // Newton form: p(m) = sum_k Δ^k a(0) * binom(m, k)
    let mut p = Polynomial::zero();
    let mut basis = Polynomial::from_i64(&[1]);
    for (k, row) in rows.iter().enumerate().take(r + 1) {
        p = p.add(&basis.scale(&BigRational::from_integer(row[0].clone())));
        let kk = BigRational::from_integer(BigInt::from(k));
        basis = basis.mul_linear(&-kk.clone()).scale(&(BigRational::one() / (kk + BigRational::one())));
    }
    Ok(Some(p))
}

/// Taylor coefficients as enclosures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealPolynomial {
    pub coeffs: Vec<Enclosure>,
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Enclosures of `f^{(k)}(N)/k!` for `0 <= k < d`.
pub fn taylor_polynomial(f: &LEFunction, n: i64, d: u32, precision_bits: u32) -> Result<RealPolynomial> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if n < f.x0() {
        return Err(Error::BelowDomain { n, x0: f.x0() });
    }
    let coeffs = (0..d)
        .map(|k| {
            let e = f.differentiate(k).eval_enclosure(n, precision_bits)?;
            let kf = BigRational::from_integer(factorial(k));
            Ok(Enclosure { lo: e.lo / &kf, hi: e.hi / &kf, precision_bits })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealPolynomial { coeffs })
}

/// Outcome of a certified Taylor remainder check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderReport {
    pub pass: bool,
    pub n: i64,
    pub d: u32,
    pub y_max: i64,
    /// Largest observed `|R(y)| / bound(y)`.
    pub max_ratio: f64,
    pub max_ratio_at: i64,
    pub checked: usize,
    pub precision_bits: u32,
    /// First `y` at which the bound was certified violated.
    pub violation_at: Option<i64>,
}

enum Verdict {
    Pass(f64),
    Fail,
    Undecided,
}

/// Certify `|f(N+y) - P_{N,d}(y)| <= (y^d/d!) max(|f^{(d)}(N)|, |f^{(d)}(N+y)|)`
/// for `1 <= y <= y_max`. At `y = 0` both sides vanish identically.
pub fn remainder_bound_check(f: &LEFunction, n: i64, d: u32, y_max: i64) -> Result<RemainderReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if y_max < 0 || y_max > n {
        return Err(Error::InvalidArgument(format!("need 0 <= y_max <= N, got y_max = {y_max}, N = {n}")));
    }
    if n < f.x0() {
        return Err(Error::BelowDomain { n, x0: f.x0() });
    }
    let derivs: Vec<LEFunction> = (0..=d).map(|k| f.differentiate(k)).collect();
    let fd = &derivs[d as usize];

    // |f^(d)| must be non-increasing on [N, N + y_max] for the endpoint bound
    let probes: Vec<i64> = (0..=8).map(|i| n + y_max * i / 8).collect();
    let mags = probes
        .iter()
        .map(|&x| Ok(fd.eval_enclosure(x, 128)?.mid_f64().abs()))
        .collect::<Result<Vec<f64>>>()?;
    if mags.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12) + 1e-300) {
        return Err(Error::Precondition(format!("|f^({d})| is not non-increasing on [{n}, {}]", n + y_max)));
    }

    let cap = f.config().max_bits;
    let mut bits = f.config().start_bits.max(64);
    let dfact = Interval::from_int(&factorial(d));
    loop {
        let coeffs = (0..d as usize)
            .map(|k| {
                let v = derivs[k].eval_extended(&BigInt::from(n), bits)?;
                Ok(v.div(&Interval::from_int(&factorial(k as u32)), bits).expect("k! > 0"))
            })
            .collect::<Result<Vec<Interval>>>()?;
        let fd_n = fd.eval_extended(&BigInt::from(n), bits)?;
        let mut max_ratio = 0f64;
        let mut max_at = 0;
        let mut undecided = false;
        let mut violation = None;
        for y in 1..=y_max {
            let yi = Interval::from_i64(y);
            let fy = derivs[0].eval_extended(&BigInt::from(n + y), bits)?;
            let mut p = Interval::zero();
            for c in coeffs.iter().rev() {
                p = p.mul(&yi, bits).add(c, bits);
            }
            let r = fy.sub(&p, bits);
            let fd_y = fd.eval_extended(&BigInt::from(n + y), bits)?;
            let scale = yi.powi(d, bits).div(&dfact, bits).expect("d! > 0");
            let b_lo = scale.lo.mul(&Dyadic::max(&fd_n.mig(), &fd_y.mig()));
            let b_hi = scale.hi.mul(&Dyadic::max(&fd_n.mag(), &fd_y.mag()));
            let verdict = if r.mag() <= b_lo {
                let num = r.mag().to_f64();
                let den = b_lo.to_f64();
                Verdict::Pass(if den > 0.0 { num / den } else { 0.0 })
            } else if r.mig() > b_hi {
                Verdict::Fail
            } else {
                Verdict::Undecided
            };
            match verdict {
                Verdict::Pass(ratio) => {
                    if ratio > max_ratio {
                        max_ratio = ratio;
                        max_at = y;
                    }
                }
                Verdict::Fail => {
                    violation = Some(y);
                    break;
                }
                Verdict::Undecided => {
                    undecided = true;
                    break;
                }
            }
        }
        if violation.is_some() || !undecided {
            return Ok(RemainderReport {
                pass: violation.is_none(),
                n,
                d,
                y_max,
                max_ratio,
                max_ratio_at: max_at,
                checked: y_max.max(0) as usize,
                precision_bits: bits,
                violation_at: violation,
            });
        }
        if bits >= cap {
            return Err(Error::Inconclusive(format!(
                "remainder bound at N = {n} not certified at {bits} bits"
            )));
        }
        bits = (bits * 2).min(cap);
    }
}

/// Result of the randomized error-propagation experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPropagationReport {
    pub pass: bool,
    pub trials: usize,
    pub violations: usize,
    /// Largest `|Δ...Δ h(n)| / (2^r eps)` observed.
    pub max_ratio: f64,
    pub seed: u64,
}

/// Samples `h` with `|h| <= eps` and random shifts, and checks
/// `|Δ_{m_1} ... Δ_{m_r} h(n)| <= 2^r eps` exactly.
pub fn error_propagation_check(eps: &BigRational, r: usize, trials: usize, seed: u64) -> Result<ErrorPropagationReport> {
    if !(1..=8).contains(&r) {
        return Err(Error::InvalidArgument(format!("r must lie in 1..=8, got {r}")));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = eps * BigRational::from_integer(BigInt::one() << r);
    const K: i64 = 1_000_000;
    let mut violations = 0;
    let mut max_ratio = 0f64;
    for _ in 0..trials {
        let shifts: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=10)).collect();
        let n: i64 = rng.gen_range(-20..=20);
        let span: i64 = shifts.iter().sum();
        let extreme = rng.gen_bool(0.5);
        let h: Vec<BigRational> = (0..=span)
            .map(|_| {
                let k = if extreme {
                    if rng.gen_bool(0.5) {
                        K
                    } else {
                        -K
                    }
                } else {
                    rng.gen_range(-K..=K)
                };
                eps * BigRational::new(k.into(), K.into())
            })
            .collect();
        let v = iterated_delta_rational(|i| h[(i - n) as usize].clone(), n, &shifts).abs();
        if v > bound {
            violations += 1;
        }
        let ratio = (v / &bound).to_f64().unwrap_or(f64::NAN);
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    Ok(ErrorPropagationReport { pass: violations == 0, trials, violations, max_ratio, seed })
}

/// Result of the randomized discrete-derivative algebra check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeAlgebraReport {
    pub pass: bool,
    pub trials: usize,
    /// Individual identities checked.
    pub checks: u64,
    pub failures: Vec<String>,
    pub seed: u64,
}

/// Random integer polynomials `p` of degree 1..=6 and shifts `m, n` in
/// 1..=10. Checks exactly, on windows of values, that `Δ_m p` and (for
/// degree >= 2) `Δ~_m p` have degree `r - 1` and leading coefficient
/// `r a_r m`, that `Δ~_m p = 0` for degree 1, and that
/// `Δ~^{r-1} p(n, m) = r! a_r n m`.
pub fn derivative_algebra_check(trials: usize, seed: u64) -> Result<DerivativeAlgebraReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for t in 0..trials {
        let r: usize = rng.gen_range(1..=6);
        let mut coeffs: Vec<i64> = (0..=r).map(|_| rng.gen_range(-20..=20)).collect();
        while coeffs[r] == 0 {
            coeffs[r] = rng.gen_range(-20..=20);
        }
        let m: i64 = rng.gen_range(1..=10);
        let n: i64 = rng.gen_range(1..=10);
        let p = Polynomial::from_i64(&coeffs);
        let a_r = BigRational::from_integer(coeffs[r].into());
        let len = (n + m) as usize + r + 8;
        let w = IntSeqWindow::from_fn(0, len, |x| p.eval_i64(x).to_integer());
        let expect_lead = BigRational::from_integer(BigInt::from(r as i64 * m)) * &a_r;
        let mut fail = |what: &str| failures.push(format!("trial {t}: {what} for p = {coeffs:?}, m = {m}, n = {n}"));

        let dm = delta(&w, m as usize)?;
        checks += 1;
        match detect_polynomial(&dm, r)? {
            Some(q) if q.degree() == Some(r - 1) && q.leading() == expect_lead => {}
            _ => fail("leading coefficient of Δ_m p"),
        }
        let sm = sym_delta(&w, m as usize)?;
        checks += 1;
        if r == 1 {
            if sm.values.iter().any(|v| !v.is_zero()) {
                fail("Δ~_m p vanishing in degree 1");
            }
        } else {
            match detect_polynomial(&sm, r)? {
                Some(q) if q.degree() == Some(r - 1) && q.leading() == expect_lead => {}
                _ => fail("leading coefficient of Δ~_m p"),
            }
            checks += 1;
            let lhs = iterated_sym_delta(&w, r - 1, n, m)?;
            let rhs = factorial(r as u32) * BigInt::from(coeffs[r]) * BigInt::from(n * m);
            if lhs != rhs {
                fail("Δ~^{r-1} p(n, m) = r! a_r n m");
            }
        }
    }
    Ok(DerivativeAlgebraReport { pass: failures.is_empty(), trials, checks, failures, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexpr::expr::rat;

    fn squares(len: usize) -> IntSeqWindow {
        IntSeqWindow::from_fn(0, len, |n| BigInt::from(n * n))
    }

    #[test]
    fn delta_examples() {
        let d = delta(&squares(6), 2).unwrap();
        assert_eq!(d, IntSeqWindow::from_i64(0, &[4, 8, 12, 16]));
        let z = delta(&squares(6), 0).unwrap();
        assert!(z.values.iter().all(|v| v.is_zero()));
        let lin = IntSeqWindow::from_fn(0, 5, |n| BigInt::from(5 * n));
        assert_eq!(delta(&lin, 1).unwrap(), IntSeqWindow::from_i64(0, &[5, 5, 5, 5]));
        assert!(matches!(delta(&lin, 5), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn sym_delta_examples() {
        let s = sym_delta(&squares(10), 3).unwrap();
        assert_eq!(s.values[4], BigInt::from(24));
        let lin = IntSeqWindow::from_fn(0, 10, BigInt::from);
        assert!(sym_delta(&lin, 4).unwrap().values.iter().all(|v| v.is_zero()));
        let c = IntSeqWindow::from_fn(0, 10, |_| BigInt::from(7));
        assert!(sym_delta(&c, 2).unwrap().values.iter().all(|v| v.is_zero()));
        assert!(matches!(sym_delta(&c, 10), Err(Error::BasePointMissing { .. })));
    }

    #[test]
    fn iterated_sym_delta_examples() {
        let cubes = IntSeqWindow::from_fn(0, 12, |n| BigInt::from(n * n * n));
        assert_eq!(iterated_sym_delta(&cubes, 2, 2, 3).unwrap(), BigInt::from(36));
        assert_eq!(iterated_sym_delta(&squares(10), 1, 4, 3).unwrap(), BigInt::from(24));
        assert_eq!(iterated_sym_delta(&cubes, 2, 0, 5).unwrap(), BigInt::zero());
        assert!(matches!(iterated_sym_delta(&cubes, 2, 6, 6), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn stencil_matches_binomials() {
        let s = stencil(&[1, 1, 1]);
        let want: Vec<(i64, BigInt)> = vec![(0, (-1).into()), (1, 3.into()), (2, (-3).into()), (3, 1.into())];
        assert_eq!(s, want);
        assert!(stencil(&[0]).is_empty());
    }

    #[test]
    fn detect_examples() {
        let w = IntSeqWindow::from_i64(1, &[1, 4, 9, 16, 25]);
        let p = detect_polynomial(&w, 2).unwrap().unwrap();
        assert_eq!(p, Polynomial::from_i64(&[1, 2, 1]));
        assert_eq!(p.shift(-1), Polynomial::from_i64(&[0, 0, 1]));
        let w = IntSeqWindow::from_i64(0, &[1, 2, 4, 8, 16]);
        assert_eq!(detect_polynomial(&w, 2).unwrap(), None);
        let w = IntSeqWindow::from_i64(0, &[3, 3, 3]);
        assert_eq!(detect_polynomial(&w, 0).unwrap(), Some(Polynomial::from_i64(&[3])));
        let tri = IntSeqWindow::from_fn(0, 6, |n| BigInt::from(n * (n + 1) / 2));
        let p = detect_polynomial(&tri, 2).unwrap().unwrap();
        assert_eq!(p.coeffs, vec![rat(0, 1), rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn taylor_examples() {
        let f = LEFunction::parse("x^(5/2)").unwrap();
        let t = taylor_polynomial(&f, 4, 3, 64).unwrap();
        assert_eq!(t.coeffs[0], Enclosure::exact(rat(32, 1), 64));
        assert_eq!(t.coeffs[1], Enclosure::exact(rat(20, 1), 64));
        assert_eq!(t.coeffs[2], Enclosure::exact(rat(15, 4), 64));
        let g = LEFunction::parse("x^2").unwrap();
        let t = taylor_polynomial(&g, 7, 3, 64).unwrap();
        let got: Vec<BigRational> = t.coeffs.iter().map(|c| c.lo.clone()).collect();
        assert_eq!(got, vec![rat(49, 1), rat(14, 1), rat(1, 1)]);
    }

    #[test]
    fn remainder_examples() {
        let f = LEFunction::parse("x^(5/2)").unwrap();
        let r = remainder_bound_check(&f, 100, 3, 10).unwrap();
        assert!(r.pass && r.max_ratio <= 1.0, "{r:?}");
        let c = LEFunction::parse("x^3").unwrap();
        let r = remainder_bound_check(&c, 50, 4, 20).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn error_propagation_examples() {
        let eps = rat(1, 10);
        let v = iterated_delta_rational(|_| eps.clone(), 0, &[3]);
        assert!(v.is_zero());
        let alt = |i: i64| if i.rem_euclid(2) == 0 { eps.clone() } else { -eps.clone() };
        let v = iterated_delta_rational(alt, 0, &[1, 1, 1]);
        assert_eq!(v.abs(), rat(8, 10));
        assert!(error_propagation_check(&rat(1, 2), 5, 1000, 7).unwrap().pass);
        assert!(error_propagation_check(&rat(1, 2), 9, 1, 7).is_err());
    }

    #[test]
    fn derivative_algebra_holds() {
        let rep = derivative_algebra_check(200, 7).unwrap();
        assert!(rep.pass, "{:?}", rep.failures);
        assert!(rep.checks >= 400);
    }
}
