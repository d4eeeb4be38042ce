//! Near-linear regime: arithmetic-progression windows of `⌊f⌉` and the
//! multiplication predicates built on them.

use std::collections::HashMap;
use std::sync::Mutex;

use log::{debug, info};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::budget::{SearchBudget, TriState};
use crate::error::{Error, Result};
use crate::lexpr::function::circle_norm_interval;
use crate::lexpr::{ceil_rational, Enclosure, LEFunction};
use crate::sequence::IntSequence;

/// Default floor for condition (1).
pub const DEFAULT_X1: i64 = 100;

/// `λ(N, M, n)`: `a(N+m+1) = a(N+m) + n` for all `0 <= m < M`.
pub fn check_lambda(a: &dyn IntSequence, n0: i64, big_m: i64, step: i64) -> Result<bool> {
    if big_m < 1 {
        return Err(Error::InvalidArgument(format!("M must be at least 1, got {big_m}")));
    }
    let mut prev = a.value(n0)?;
    for m in 0..big_m {
        let next = a.value(n0 + m + 1)?;
        if next != &prev + step {
            return Ok(false);
        }
        prev = next;
    }
    Ok(true)
}

/// [`check_lambda`] for `⌊f⌉`, rejecting base points below `x0`.
pub fn check_lambda_fn(f: &LEFunction, n0: i64, big_m: i64, step: i64) -> Result<bool> {
    if n0 < f.x0() {
        return Err(Error::BelowDomain { n: n0, x0: f.x0() });
    }
    check_lambda(f, n0, big_m, step)
}

/// One certified strict inequality `value < bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub value: Enclosure,
    #[serde(with = "crate::json::rational")]
    pub bound: BigRational,
    /// `None` if the enclosure still straddles the bound at the precision cap.
    pub holds: Option<bool>,
}

/// The four sufficient conditions for `λ(N, M, n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaConditions {
    pub x1: i64,
    pub above_x1: bool,
    /// `||f(N)|| < 1/4`.
    pub near_integer: ConditionCheck,
    /// `|f'(N) - n| < 1/(8M)`.
    pub slope: ConditionCheck,
    /// `f''(N) < 1/(8M^2)`.
    pub curvature: ConditionCheck,
    pub all_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "lambda")]
pub struct LambdaWitness {
    #[serde(rename = "N")]
    pub n0: i64,
    #[serde(rename = "M")]
    pub big_m: i64,
    pub n: i64,
    pub conditions: LambdaConditions,
}

const CONDITION_MAX_BITS: u32 = 1024;

fn certify(eval: impl Fn(u32) -> Result<Enclosure>, bound: &BigRational) -> Result<ConditionCheck> {
    let mut bits = 64;
    loop {
        let value = eval(bits)?;
        let holds = if value.hi < *bound {
            Some(true)
        } else if value.lo >= *bound {
            Some(false)
        } else {
            None
        };
        if holds.is_some() || bits >= CONDITION_MAX_BITS {
            return Ok(ConditionCheck { value, bound: bound.clone(), holds });
        }
        bits *= 2;
    }
}

/// Certified evaluation of the four conditions at `N`.
pub fn lambda_conditions(f: &LEFunction, n0: i64, big_m: i64, step: i64, x1: i64) -> Result<LambdaConditions> {
    let f1 = f.differentiate(1);
    let f2 = f.differentiate(2);
    let m = BigInt::from(big_m);
    let near_integer = certify(
        |b| {
            let iv = f.eval_extended(&BigInt::from(n0), b)?;
            Ok(circle_norm_interval(&iv, b))
        },
        &BigRational::new(1.into(), 4.into()),
    )?;
    let slope = certify(
        |b| {
            let e = f1.eval_enclosure(n0, b)?;
            let s = BigRational::from_integer(step.into());
            let (a, c) = ((&e.lo - &s).abs(), (&e.hi - &s).abs());
            let lo = if e.contains(&s) { BigRational::from_integer(0.into()) } else { a.clone().min(c.clone()) };
            Ok(Enclosure { lo, hi: a.max(c), precision_bits: b })
        },
        &BigRational::new(1.into(), BigInt::from(8) * &m),
    )?;
    let curvature = certify(|b| f2.eval_enclosure(n0, b), &BigRational::new(1.into(), BigInt::from(8) * &m * &m))?;
    let above_x1 = n0 >= x1;
    let all_hold = above_x1 && [&near_integer, &slope, &curvature].iter().all(|c| c.holds == Some(true));
    Ok(LambdaConditions { x1, above_x1, near_integer, slope, curvature, all_hold })
}

/// `f'` as a validated increasing function.
fn slope_function(f: &LEFunction) -> Result<LEFunction> {
    let fp = LEFunction::with_config(f.differentiate(1).expr().clone(), None, *f.config())?;
    if fp.direction() != 1 {
        return Err(Error::Precondition(format!("f' = {} is not increasing", fp.expr())));
    }
    Ok(fp)
}

/// Integer range that must contain every `N >= floor` with `|f'(ξ) - n| <= r`
/// for some `ξ` in `[N, N + pad]`.
fn slope_region(fp: &LEFunction, step: i64, r: &BigRational, pad: i64, floor: i64) -> Result<Option<(i64, i64)>> {
    let floor = floor.max(fp.x0());
    let s = BigRational::from_integer(step.into());
    let (y_lo, y_hi) = (&s - r, &s + r);
    let at_floor = fp.eval_enclosure(floor, 64)?;
    if at_floor.lo > y_hi {
        return Ok(None);
    }
    let lo = if at_floor.hi >= y_lo {
        floor
    } else {
        let e = fp.invert_at(&y_lo, floor, 64)?;
        (e.lo.floor().to_integer().to_i64().unwrap_or(i64::MAX) - pad).max(floor)
    };
    let hi = match fp.invert_at(&y_hi, floor, 64) {
        Ok(e) => ceil_rational(&e.hi).to_i64().unwrap_or(i64::MAX),
        Err(Error::NonConvergence(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some((lo, hi)))
}

fn clip(region: Option<(i64, i64)>, from: i64, to: i64) -> Option<(i64, i64)> {
    let (a, b) = region?;
    let (a, b) = (a.max(from), b.min(to));
    (a <= b).then_some((a, b))
}

/// Every base point in `[from, to]` at which the four conditions are
/// certified. Outside the scanned slope window condition (3) cannot hold.
pub fn lambda_condition_candidates(
    f: &LEFunction,
    big_m: i64,
    step: i64,
    from: i64,
    to: i64,
    x1: i64,
) -> Result<Vec<LambdaWitness>> {
    let fp = slope_function(f)?;
    let r = BigRational::new(1.into(), BigInt::from(8 * big_m));
    let Some((lo, hi)) = clip(slope_region(&fp, step, &r, 0, from.max(x1))?, from, to) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for n0 in lo..=hi {
        match lambda_conditions(f, n0, big_m, step, x1) {
            Ok(c) if c.all_hold => out.push(LambdaWitness { n0, big_m, n: step, conditions: c }),
            Ok(_) => {}
            Err(e) => debug!("skipping N = {n0}: {e}"),
        }
    }
    Ok(out)
}

/// Smallest `N` in range where the four conditions are certified and
/// `λ(N, M, n)` holds exactly.
pub fn find_lambda_witness(f: &LEFunction, big_m: i64, step: i64, from: i64, to: i64) -> Result<Option<LambdaWitness>> {
    find_lambda_witness_with(f, big_m, step, from, to, DEFAULT_X1.max(f.x0()))
}

pub fn find_lambda_witness_with(
    f: &LEFunction,
    big_m: i64,
    step: i64,
    from: i64,
    to: i64,
    x1: i64,
) -> Result<Option<LambdaWitness>> {
    if step < 1 || big_m < 1 {
        return Err(Error::InvalidArgument(format!("need n >= 1 and M >= 1, got n = {step}, M = {big_m}")));
    }
    for w in lambda_condition_candidates(f, big_m, step, from, to, x1)? {
        match check_lambda_fn(f, w.n0, big_m, step) {
            Ok(true) => return Ok(Some(w)),
            Ok(false) => {
                // would contradict sufficiency of the conditions
                log::error!("conditions certified at N = {} but λ fails", w.n0);
            }
            Err(e) => debug!("skipping N = {}: {e}", w.n0),
        }
    }
    Ok(None)
}

/// Smallest `N` in `[from, to]` with `λ(N, M, n)`, conditions or not.
///
/// Complete for increasing `f'`: `λ` forces `f(N+M) - f(N)` within 1 of
/// `Mn`, hence `|f'(ξ) - n| <= 1/M` somewhere in `[N, N+M]`.
pub fn find_lambda_exact(f: &LEFunction, big_m: i64, step: i64, from: i64, to: i64, cap: u64) -> Result<Option<i64>> {
    if step < 1 || big_m < 1 {
        return Err(Error::InvalidArgument(format!("need n >= 1 and M >= 1, got n = {step}, M = {big_m}")));
    }
    let fp = slope_function(f)?;
    let r = BigRational::new(1.into(), big_m.into());
    let from = from.max(f.x0());
    let Some((lo, hi)) = clip(slope_region(&fp, step, &r, big_m, from)?, from, to) else {
        return Ok(None);
    };
    if (hi - lo) as u64 >= cap {
        return Err(Error::InvalidArgument(format!("slope window [{lo}, {hi}] exceeds the candidate cap {cap}")));
    }
    for n0 in lo..=hi {
        if check_lambda(f, n0, big_m, step)? {
            return Ok(Some(n0));
        }
    }
    Ok(None)
}

/// Result of `μ0` or `μ1` with the progression windows that decided it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearOutcome {
    pub value: TriState,
    /// `(n, N, M)` for each progression window used.
    pub windows: Vec<(i64, i64, i64)>,
}

/// Caches progression witnesses per `(n, M)` and the first usable step per `m`.
pub struct NearLinearEngine {
    f: LEFunction,
    budget: SearchBudget,
    /// Largest step tried when looking for a usable pair in `μ1`.
    pub t_max: i64,
    witnesses: Mutex<HashMap<(i64, i64), Option<i64>>>,
    first_step: Mutex<HashMap<i64, Option<i64>>>,
}

impl NearLinearEngine {
    pub fn new(f: LEFunction, budget: SearchBudget) -> Result<NearLinearEngine> {
        budget.validate()?;
        slope_function(&f)?;
        Ok(NearLinearEngine {
            f,
            budget,
            t_max: 100_000,
            witnesses: Mutex::new(HashMap::new()),
            first_step: Mutex::new(HashMap::new()),
        })
    }

    pub fn function(&self) -> &LEFunction {
        &self.f
    }

    /// Smallest `N` in budget with `λ(N, M, n)`.
    pub fn witness(&self, step: i64, big_m: i64) -> Result<Option<i64>> {
        if let Some(v) = self.witnesses.lock().unwrap_or_else(|e| e.into_inner()).get(&(step, big_m)) {
            return Ok(*v);
        }
        let v = find_lambda_exact(&self.f, big_m, step, self.budget.n_from, self.budget.n_to, self.budget.candidate_cap)?;
        self.witnesses.lock().unwrap_or_else(|e| e.into_inner()).insert((step, big_m), v);
        Ok(v)
    }

    /// `μ0(n, m, p)` with window length `M = m + 1`.
    pub fn mu0(&self, step: i64, m: i64, p: i64) -> Result<NearOutcome> {
        if step < 1 || m < 1 {
            return Err(Error::InvalidArgument(format!("need n, m >= 1, got ({step}, {m})")));
        }
        let big_m = m + 1;
        match self.witness(step, big_m)? {
            None => Ok(NearOutcome {
                value: TriState::unknown(format!("no λ window with step {step} in budget")),
                windows: Vec::new(),
            }),
            Some(n0) => {
                let ok = self.f.value(n0 + m)? - self.f.value(n0)? == BigInt::from(p);
                Ok(NearOutcome { value: TriState::from_bool(ok), windows: vec![(step, n0, big_m)] })
            }
        }
    }

    /// Smallest step with a `λ` window of length `m + 1` in budget.
    pub fn first_step(&self, m: i64) -> Result<Option<i64>> {
        if let Some(v) = self.first_step.lock().unwrap_or_else(|e| e.into_inner()).get(&m) {
            return Ok(*v);
        }
        let mut found = None;
        for t in 1..=self.t_max {
            match self.witness(t, m + 1) {
                Ok(Some(_)) => {
                    found = Some(t);
                    break;
                }
                Ok(None) => {
                    // slope windows only move right as t grows
                    if self.witness_region_start(t, m + 1)? > self.budget.n_to {
                        break;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        info!("first usable step for m = {m}: {found:?}");
        self.first_step.lock().unwrap_or_else(|e| e.into_inner()).insert(m, found);
        Ok(found)
    }

    fn witness_region_start(&self, step: i64, big_m: i64) -> Result<i64> {
        let fp = slope_function(&self.f)?;
        let r = BigRational::new(1.into(), big_m.into());
        Ok(slope_region(&fp, step, &r, big_m, self.f.x0())?.map_or(i64::MAX, |(lo, _)| lo))
    }

    /// `μ1(n, m, p)`: difference of two `μ0` instances with steps `t` and `t + n`.
    pub fn mu1(&self, n: i64, m: i64, p: i64) -> Result<NearOutcome> {
        if m < 1 {
            return Err(Error::InvalidArgument(format!("need m >= 1, got {m}")));
        }
        let Some(t_m) = self.first_step(m)? else {
            return Ok(NearOutcome { value: TriState::unknown(format!("no λ window of length {} in budget", m + 1)), windows: Vec::new() });
        };
        let start = t_m.max(t_m - n).max(1);
        for t in start..=self.t_max {
            let (Some(a), Some(b)) = (self.witness(t, m + 1)?, self.witness(t + n, m + 1)?) else {
                if self.witness_region_start(t.max(t + n), m + 1)? > self.budget.n_to {
                    break;
                }
                continue;
            };
            let p1 = self.f.value(a + m)? - self.f.value(a)?;
            let p2 = self.f.value(b + m)? - self.f.value(b)?;
            let ok = p2 - p1 == BigInt::from(p);
            return Ok(NearOutcome { value: TriState::from_bool(ok), windows: vec![(t, a, m + 1), (t + n, b, m + 1)] });
        }
        Ok(NearOutcome { value: TriState::unknown(format!("no pair of steps t, t + {n} with λ windows in budget")), windows: Vec::new() })
    }
}

pub fn mu0(f: &LEFunction, n: i64, m: i64, p: i64, budget: &SearchBudget) -> Result<NearOutcome> {
    NearLinearEngine::new(f.clone(), budget.clone())?.mu0(n, m, p)
}

pub fn mu1(f: &LEFunction, n: i64, m: i64, p: i64, budget: &SearchBudget) -> Result<NearOutcome> {
    NearLinearEngine::new(f.clone(), budget.clone())?.mu1(n, m, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::FnSequence;

    fn f32() -> LEFunction {
        LEFunction::parse("x^(3/2)").unwrap()
    }

    #[test]
    fn lambda_on_linear_sequence() {
        let a = FnSequence(|n: i64| BigInt::from(5 * n));
        assert!(check_lambda(&a, 0, 9, 5).unwrap());
        assert!(!check_lambda(&a, 0, 9, 4).unwrap());
        assert!(check_lambda(&a, 0, 0, 5).is_err());
    }

    #[test]
    fn no_witness_when_slope_is_small() {
        assert!(find_lambda_witness(&f32(), 8, 100, 0, 100).unwrap().is_none());
        assert!(find_lambda_exact(&f32(), 8, 100, 0, 100, 1 << 20).unwrap().is_none());
    }

    #[test]
    fn out_of_range_center_is_absent() {
        let f = LEFunction::parse("x*log(x)").unwrap();
        assert!(find_lambda_witness(&f, 4, 20, 0, 1_000_000).unwrap().is_none());
    }

    #[test]
    fn certified_witness_where_conditions_are_feasible() {
        let w = find_lambda_witness(&f32(), 8, 1000, 0, 1_000_000).unwrap().unwrap();
        assert_eq!(w.n0, 444_431);
        assert!(w.conditions.all_hold);
        assert!(check_lambda_fn(&f32(), w.n0, 8, 1000).unwrap());
        let v = serde_json::to_value(&w).unwrap();
        assert_eq!(v["kind"], "lambda");
        assert_eq!(v["N"], 444_431);
    }

    #[test]
    fn exact_progression_near_center() {
        assert_eq!(find_lambda_exact(&f32(), 8, 100, 0, 1_000_000, 1 << 20).unwrap(), Some(4434));
    }

    #[test]
    fn mu0_examples() {
        let b = SearchBudget::default();
        assert_eq!(mu0(&f32(), 100, 5, 500, &b).unwrap().value, TriState::True);
        assert_eq!(mu0(&f32(), 100, 5, 501, &b).unwrap().value, TriState::False);
        assert!(mu0(&f32(), 100_000, 5, 500_000, &b).unwrap().value.is_unknown());
    }

    #[test]
    fn mu1_examples() {
        let e = NearLinearEngine::new(f32(), SearchBudget::default()).unwrap();
        assert_eq!(e.mu1(7, 5, 35).unwrap().value, TriState::True);
        assert_eq!(e.mu1(7, 5, 36).unwrap().value, TriState::False);
        assert_eq!(e.mu1(-7, 5, -35).unwrap().value, TriState::True);
    }
}
