//! Super-linear regime: polynomial windows of `⌊f⌉`, the multiplication
//! predicate built from them, and the coarse variant for `f ~ alpha x^(d-1)`.

use std::time::Instant;

use log::{debug, info, warn};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Deadline, SearchBudget, TriState};
use crate::error::{Error, Result};
use crate::json;
use crate::lexpr::expr::{mul, Expr};
use crate::lexpr::function::circle_norm_interval;
use crate::lexpr::{Enclosure, LEFunction};
use crate::seqcalc::{detect_polynomial, forward_differences, iterated_delta, iterated_delta_with, IntSeqWindow, Polynomial};
use crate::sequence::IntSequence;

/// A window `[N, N+M)` on which `Δ_1^{d-1}` of the sequence is a nonzero
/// constant `c`. `poly` is in the shifted variable `m = n - N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "pi")]
pub struct PiWitness {
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(with = "json::bigint")]
    pub c: BigInt,
    #[serde(with = "json::rational_vec")]
    pub poly: Vec<BigRational>,
    pub d: u32,
}

impl PiWitness {
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.poly.clone())
    }

    /// Re-check the witness against a sequence.
    pub fn verify(&self, seq: &dyn IntSequence) -> Result<bool> {
        let w = seq.window(self.n, self.m)?;
        Ok(check_pi(&w, self.d)?.is_some_and(|x| x == *self))
    }
}

fn ones(k: usize) -> impl Iterator<Item = i64> {
    std::iter::repeat(1).take(k)
}

/// `π_d` on a window: `Δ_1^{d-1}` is a nonzero constant on `0 <= m <= M - d`.
pub fn check_pi(a: &IntSeqWindow, d: u32) -> Result<Option<PiWitness>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if a.len() < d as usize + 1 {
        return Err(Error::WindowTooShort { needed: d as usize + 1, have: a.len() });
    }
    let diffs = forward_differences(&a.values, d as usize - 1);
    let c = diffs[0].clone();
    if c.is_zero() || diffs.iter().any(|v| *v != c) {
        return Ok(None);
    }
    let poly = detect_polynomial(a, d as usize - 1)?.expect("constant top difference implies a polynomial");
    debug_assert_eq!(poly.degree(), Some(d as usize - 1));
    Ok(Some(PiWitness { n: a.start, m: a.len(), c, poly: poly.coeffs, d }))
}

/// Tuning for [`search_pi_interval_with`].
#[derive(Clone, Debug)]
pub struct PiSearchOptions {
    /// Coefficient pre-filter tolerance; `None` scans exhaustively.
    pub eps: Option<BigRational>,
    /// At most this many base points are examined, starting at `N_from`.
    pub candidate_cap: u64,
    pub chunk: i64,
    pub deadline: Deadline,
}

impl Default for PiSearchOptions {
    fn default() -> Self {
        PiSearchOptions {
            eps: Some(BigRational::new(3.into(), 10.into())),
            candidate_cap: 100_000_000,
            chunk: 4096,
            deadline: Deadline::none(),
        }
    }
}

impl PiSearchOptions {
    pub fn exhaustive() -> PiSearchOptions {
        PiSearchOptions { eps: None, ..PiSearchOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiSearchReport {
    pub witness: Option<PiWitness>,
    /// Base points examined (through the chunk holding the witness).
    pub scanned: u64,
    pub prefilter_passed: u64,
    pub skipped_errors: u64,
    /// True when the whole requested range was covered.
    pub range_exhausted: bool,
    /// True when the wall clock expired first.
    pub timed_out: bool,
}

/// Scaled derivatives `f^{(k)}/k!` used by the pre-filter.
struct Prefilter {
    coeffs: Vec<LEFunction>,
    thresholds: Vec<BigRational>,
}

impl Prefilter {
    fn new(f: &LEFunction, d: u32, m: usize, eps: &BigRational) -> Prefilter {
        let mut coeffs = Vec::new();
        let mut thresholds = Vec::new();
        let mut fact = BigInt::one();
        for k in 0..d {
            if k > 0 {
                fact *= BigInt::from(k);
            }
            let scale = Expr::Const(BigRational::new(BigInt::one(), fact.clone()));
            let e = mul(scale, f.differentiate(k).expr().clone());
            coeffs.push(LEFunction::unchecked(e, f.x0()).with_eval_config(*f.config()));
            let denom = BigInt::from(2 * d as i64) * BigInt::from(m as i64).pow(k);
            thresholds.push(eps / BigRational::from_integer(denom));
        }
        Prefilter { coeffs, thresholds }
    }

    /// False only if some coefficient is certainly farther than its threshold
    /// from an integer. The top coefficient is cheapest and most selective.
    fn admits(&self, n: i64) -> Result<bool> {
        for k in (0..self.coeffs.len()).rev() {
            let th = &self.thresholds[k];
            let mut bits = 64;
            loop {
                let iv = self.coeffs[k].eval_extended(&BigInt::from(n), bits)?;
                let norm = circle_norm_interval(&iv, bits);
                if norm.lo > *th {
                    return Ok(false);
                }
                if norm.hi <= *th || bits >= 1024 {
                    break;
                }
                bits *= 2;
            }
        }
        Ok(true)
    }
}

struct ChunkResult {
    witness: Option<PiWitness>,
    scanned: u64,
    passed: u64,
    errors: u64,
}

fn scan_chunk(f: &LEFunction, d: u32, m: usize, lo: i64, hi: i64, pre: Option<&Prefilter>) -> ChunkResult {
    let mut out = ChunkResult { witness: None, scanned: 0, passed: 0, errors: 0 };
    match pre {
        Some(p) => {
            for n in lo..=hi {
                out.scanned += 1;
                match p.admits(n) {
                    Ok(false) => continue,
                    Ok(true) => {}
                    Err(e) => {
                        debug!("pre-filter error at N = {n}: {e}");
                        out.errors += 1;
                        continue;
                    }
                }
                out.passed += 1;
                match f.window(n, m).and_then(|w| check_pi(&w, d)) {
                    Ok(Some(w)) => {
                        out.witness = Some(w);
                        return out;
                    }
                    Ok(None) => {}
                    Err(e) => {
                        warn!("skipping N = {n}: {e}");
                        out.errors += 1;
                    }
                }
            }
        }
        None => {
            // one pass of values shared by all windows in the chunk
            let values: Vec<Option<BigInt>> = (lo..hi + m as i64).map(|k| f.value(k).ok()).collect();
            for n in lo..=hi {
                out.scanned += 1;
                out.passed += 1;
                let off = (n - lo) as usize;
                let slice = &values[off..off + m];
                if slice.iter().any(|v| v.is_none()) {
                    warn!("skipping N = {n}: rounding failed inside the window");
                    out.errors += 1;
                    continue;
                }
                let w = IntSeqWindow::new(n, slice.iter().map(|v| v.clone().unwrap()).collect());
                if let Ok(Some(wit)) = check_pi(&w, d) {
                    out.witness = Some(wit);
                    return out;
                }
            }
        }
    }
    out
}

/// Smallest `N` in `[N_from, N_to]` with `π_d(N, M)` for `⌊f⌉`.
pub fn search_pi_interval(f: &LEFunction, d: u32, m: usize, n_from: i64, n_to: i64) -> Result<Option<PiWitness>> {
    Ok(search_pi_interval_with(f, d, m, n_from, n_to, &PiSearchOptions::default())?.witness)
}

/// Chunked parallel scan with a deterministic smallest-witness merge.
pub fn search_pi_interval_with(
    f: &LEFunction,
    d: u32,
    m: usize,
    n_from: i64,
    n_to: i64,
    opts: &PiSearchOptions,
) -> Result<PiSearchReport> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("d must be at least 3, got {d}")));
    }
    if m < d as usize + 1 {
        return Err(Error::InvalidArgument(format!("M must be at least d + 1 = {}, got {m}", d + 1)));
    }
    if n_from < f.x0() {
        return Err(Error::BelowDomain { n: n_from, x0: f.x0() });
    }
    let pre = opts.eps.as_ref().map(|e| Prefilter::new(f, d, m, e));
    let end = n_to.min(n_from.saturating_add(opts.candidate_cap.min(i64::MAX as u64) as i64 - 1));
    let chunk = opts.chunk.max(1);
    let batch = (rayon::current_num_threads() * 4).max(1) as i64;
    let mut report = PiSearchReport {
        witness: None,
        scanned: 0,
        prefilter_passed: 0,
        skipped_errors: 0,
        range_exhausted: false,
        timed_out: false,
    };
    let started = Instant::now();
    let mut lo = n_from;
    while lo <= end {
        if opts.deadline.expired() {
            report.timed_out = true;
            return Ok(report);
        }
        let starts: Vec<i64> = (0..batch).map(|i| lo + i * chunk).take_while(|&s| s <= end).collect();
        let results: Vec<ChunkResult> = starts
            .par_iter()
            .map(|&s| scan_chunk(f, d, m, s, (s + chunk - 1).min(end), pre.as_ref()))
            .collect();
        for r in results {
            report.scanned += r.scanned;
            report.prefilter_passed += r.passed;
            report.skipped_errors += r.errors;
            if r.witness.is_some() {
                report.witness = r.witness;
                return Ok(report);
            }
        }
        lo = starts.last().map_or(end, |s| s + chunk);
        let secs = started.elapsed().as_secs_f64().max(1e-9);
        info!(
            "pi scan: N up to {}, {} candidates, {:.0} candidates/sec",
            lo - 1,
            report.scanned,
            report.scanned as f64 / secs
        );
    }
    report.range_exhausted = end == n_to;
    Ok(report)
}

/// Tri-state answer together with the window that decided it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuOutcome {
    pub value: TriState,
    pub witness: Option<PiWitness>,
}

/// Window length used by the multiplication predicate.
pub fn mu_window_len(d: u32, n: i64, m: i64, q: i64) -> usize {
    (n + m + q + d as i64 + 1) as usize
}

/// `Δ_1^{d-3} Δ_n Δ_m a(0) = Δ_1^{d-2} Δ_q a(0)` on a rebased window.
pub fn mu_equation(a: &IntSeqWindow, d: u32, n: i64, m: i64, q: i64) -> Result<bool> {
    let at = |k: i64| {
        a.at(k).cloned().ok_or(Error::WindowTooShort { needed: k as usize + 1, have: a.len() })
    };
    let mut lhs: Vec<i64> = ones(d as usize - 3).collect();
    lhs.extend([n, m]);
    let mut rhs: Vec<i64> = ones(d as usize - 2).collect();
    rhs.push(q);
    Ok(iterated_delta_with(at, 0, &lhs)? == iterated_delta_with(at, 0, &rhs)?)
}

fn mu_args(d: u32, n: i64, m: i64, q: i64) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("d must be at least 3, got {d}")));
    }
    if n < 1 || m < 1 || q < 1 {
        return Err(Error::InvalidArgument(format!("n, m, q must be positive, got ({n}, {m}, {q})")));
    }
    Ok(())
}

/// `μ_d(n, m, q)` over any integer sequence by a plain budgeted scan.
pub fn mu_super_seq(seq: &dyn IntSequence, d: u32, n: i64, m: i64, q: i64, budget: &SearchBudget) -> Result<MuOutcome> {
    mu_args(d, n, m, q)?;
    budget.validate()?;
    let len = mu_window_len(d, n, m, q).max(budget.m.unwrap_or(0));
    let deadline = budget.deadline();
    let end = budget.n_to.min(budget.n_from.saturating_add(budget.candidate_cap as i64 - 1));
    for base in budget.n_from..=end {
        if deadline.expired() {
            return Ok(MuOutcome { value: TriState::unknown("wall clock expired"), witness: None });
        }
        let w = seq.window(base, len)?;
        if let Some(wit) = check_pi(&w, d)? {
            let v = mu_equation(&w, d, n, m, q)?;
            return Ok(MuOutcome { value: TriState::from_bool(v), witness: Some(wit) });
        }
    }
    Ok(MuOutcome {
        value: TriState::unknown(format!("no π_{d} window of length {len} in [{}, {end}]", budget.n_from)),
        witness: None,
    })
}

/// `μ_d(n, m, q)` for `⌊f⌉`, using the pre-filtered window search.
pub fn mu_super(f: &LEFunction, d: u32, n: i64, m: i64, q: i64, budget: &SearchBudget) -> Result<MuOutcome> {
    mu_args(d, n, m, q)?;
    budget.validate()?;
    let len = mu_window_len(d, n, m, q).max(budget.m.unwrap_or(0));
    let opts = PiSearchOptions {
        candidate_cap: budget.candidate_cap,
        deadline: budget.deadline(),
        ..PiSearchOptions::default()
    };
    let from = budget.n_from.max(f.x0());
    let rep = search_pi_interval_with(f, d, len, from, budget.n_to, &opts)?;
    match rep.witness {
        Some(wit) => {
            let w = f.window(wit.n, wit.m)?;
            let v = mu_equation(&w, d, n, m, q)?;
            Ok(MuOutcome { value: TriState::from_bool(v), witness: Some(wit) })
        }
        None => Ok(MuOutcome {
            value: TriState::unknown(format!(
                "no π_{d} window of length {len} after {} candidates",
                rep.scanned
            )),
            witness: None,
        }),
    }
}

/// Enclosure of `lim f^{(d-1)}(N)/(d-1)!` from its values at increasing points.
pub fn estimate_alpha(
    f: &LEFunction,
    d: u32,
    points: &[i64],
    tol: &BigRational,
    alpha_hint: Option<f64>,
) -> Result<Enclosure> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if points.len() < 3 || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("need at least three increasing points".into()));
    }
    let fact = BigRational::from_integer((1..d as i64).fold(BigInt::one(), |a, k| a * BigInt::from(k)));
    let g = f.differentiate(d - 1);
    let vals = points
        .iter()
        .map(|&p| {
            let e = g.eval_enclosure(p, 128)?;
            Ok(Enclosure { lo: e.lo / &fact, hi: e.hi / &fact, precision_bits: 128 })
        })
        .collect::<Result<Vec<_>>>()?;
    let mid = |e: &Enclosure| (&e.lo + &e.hi) / BigRational::from_integer(2.into());
    let last = &vals[vals.len() - 1];
    let prev = &vals[vals.len() - 2];
    let diff = (mid(last) - mid(prev)).abs();
    if diff > *tol {
        return Err(Error::NonConvergence(format!(
            "f^({})/{}! moved by {:.3e} between the last two points",
            d - 1,
            d - 1,
            diff.to_f64().unwrap_or(f64::INFINITY)
        )));
    }
    let alpha = Enclosure { lo: &last.lo - &diff, hi: &last.hi + &diff, precision_bits: 128 };
    if let Some(h) = alpha_hint {
        let hr = BigRational::from_float(h).ok_or_else(|| Error::InvalidArgument(format!("bad alpha hint {h}")))?;
        // hints are f64 approximations, so allow their rounding error
        let slack = hr.abs() * BigRational::new(1.into(), 1_000_000_000_000i64.into());
        if hr < &alpha.lo - &slack || hr > &alpha.hi + &slack {
            return Err(Error::Precondition(format!("alpha hint {h} lies outside the estimate {alpha}")));
        }
    }
    Ok(alpha)
}

/// Parameters of the coarse multiplication predicate.
#[derive(Clone, Debug)]
pub struct CoarseMultContext {
    pub f: LEFunction,
    pub d: u32,
    pub alpha: Enclosure,
    pub big_d: i64,
    pub n_schedule: Vec<i64>,
}

/// Points of the schedule that must all agree.
pub const MU_EXACT_TAIL: usize = 3;

impl CoarseMultContext {
    pub fn new(f: LEFunction, d: u32, alpha: Enclosure, big_d: i64, n_schedule: Vec<i64>) -> Result<CoarseMultContext> {
        if d < 3 {
            return Err(Error::InvalidArgument(format!("d must be at least 3, got {d}")));
        }
        if alpha.lo <= BigRational::zero() && alpha.hi >= BigRational::zero() {
            return Err(Error::Precondition("alpha enclosure contains 0".into()));
        }
        if n_schedule.is_empty() || n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("N schedule must be nonempty and increasing".into()));
        }
        let alpha_lo = if alpha.lo.is_positive() { alpha.lo.clone() } else { -alpha.hi.clone() };
        let fact = BigRational::from_integer((1..d as i64).fold(BigInt::one(), |a, k| a * BigInt::from(k)));
        let scale = (fact * alpha_lo).min(BigRational::one());
        let need = BigRational::from_integer(BigInt::from(100) << d) / scale;
        if BigRational::from_integer(big_d.into()) < need {
            return Err(Error::Precondition(format!(
                "D = {big_d} is below the required {:.1}",
                need.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(CoarseMultContext { f, d, alpha, big_d, n_schedule })
    }

    /// Geometric schedule `10^lo, ..., 10^hi`.
    pub fn decades(lo: u32, hi: u32) -> Vec<i64> {
        (lo..=hi).map(|k| 10i64.pow(k)).collect()
    }
}

/// `F_N(a,b,c) = Δ_1^{d-3} Δ_a Δ_b ⌊f⌉(N) - Δ_1^{d-2} Δ_c ⌊f⌉(N)`.
pub fn coarse_f(ctx: &CoarseMultContext, n: i64, a: i64, b: i64, c: i64) -> Result<BigInt> {
    if a < 0 || b < 0 || c < 0 {
        return Err(Error::InvalidArgument(format!("a, b, c must be non-negative, got ({a}, {b}, {c})")));
    }
    let d = ctx.d as usize;
    let mut lhs: Vec<i64> = ones(d - 3).collect();
    lhs.extend([a, b]);
    let mut rhs: Vec<i64> = ones(d - 2).collect();
    rhs.push(c);
    Ok(iterated_delta(&ctx.f, n, &lhs)? - iterated_delta(&ctx.f, n, &rhs)?)
}

/// Certified check of `|F_N(a,b,c) - (d-1)! alpha (ab - c)| <= 2^d`.
pub fn coarse_bound_holds(ctx: &CoarseMultContext, n: i64, a: i64, b: i64, c: i64) -> Result<(BigInt, bool)> {
    let v = coarse_f(ctx, n, a, b, c)?;
    let fact = BigRational::from_integer((1..ctx.d as i64).fold(BigInt::one(), |x, k| x * BigInt::from(k)));
    let k = fact * BigRational::from_integer(BigInt::from(a * b - c));
    let (e1, e2) = (&k * &ctx.alpha.lo, &k * &ctx.alpha.hi);
    let vr = BigRational::from_integer(v.clone());
    let bound = BigRational::from_integer(BigInt::one() << ctx.d);
    let worst = (&vr - &e1).abs().max((&vr - &e2).abs());
    Ok((v, worst <= bound))
}

/// `μ'(a, b, c)`: `|F_N(Da, b, Dc)| <= 2^d` at the last schedule points.
pub fn mu_exact(ctx: &CoarseMultContext, a: i64, b: i64, c: i64) -> Result<TriState> {
    let tail = &ctx.n_schedule[ctx.n_schedule.len().saturating_sub(MU_EXACT_TAIL)..];
    let bound = BigInt::one() << ctx.d;
    let mut holds = 0;
    for &n in tail {
        let v = coarse_f(ctx, n, ctx.big_d * a, b, ctx.big_d * c)?;
        if v.abs() <= bound {
            holds += 1;
        }
    }
    Ok(if holds == tail.len() {
        TriState::True
    } else if holds == 0 {
        TriState::False
    } else {
        TriState::unknown(format!("bound held at {holds} of {} schedule points", tail.len()))
    })
}

/// Histograms of the fractional parts of `f^{(k)}(N)/k!`, `0 <= k < d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub d: u32,
    pub n_from: i64,
    pub n_to: i64,
    pub bins: usize,
    pub histograms: Vec<Vec<u64>>,
    /// Smallest circle norm of each coordinate.
    pub min_norm: Vec<f64>,
    /// Smallest value over N of the largest coordinate norm.
    pub joint_min: f64,
    pub joint_min_at: i64,
    pub samples: u64,
}

fn frac_f64(f: &LEFunction, n: i64) -> Result<f64> {
    let mut bits = 96;
    loop {
        let iv = f.eval_extended(&BigInt::from(n), bits)?;
        let w = iv.width().to_f64();
        if w < 1e-12 || bits >= 2048 {
            let mid = iv.mid().to_rational();
            let fr = &mid - BigRational::from_integer(mid.floor().to_integer());
            return Ok(fr.to_f64().unwrap_or(0.0));
        }
        bits *= 2;
    }
}

pub fn density_diagnostic(f: &LEFunction, d: u32, n_from: i64, n_to: i64, bins: usize) -> Result<DensityReport> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {bins}")));
    }
    if d < 1 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let from = n_from.max(f.x0());
    let pre = Prefilter::new(f, d, 1, &BigRational::one());
    let rows: Vec<Result<Vec<f64>>> = (from..=n_to)
        .into_par_iter()
        .map(|n| pre.coeffs.iter().map(|c| frac_f64(c, n)).collect())
        .collect();
    let mut rep = DensityReport {
        d,
        n_from: from,
        n_to,
        bins,
        histograms: vec![vec![0; bins]; d as usize],
        min_norm: vec![0.5; d as usize],
        joint_min: 0.5,
        joint_min_at: from,
        samples: 0,
    };
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        rep.samples += 1;
        let mut worst = 0f64;
        for (k, fr) in row.iter().enumerate() {
            let b = ((fr * bins as f64) as usize).min(bins - 1);
            rep.histograms[k][b] += 1;
            let norm = fr.min(1.0 - fr);
            rep.min_norm[k] = rep.min_norm[k].min(norm);
            worst = worst.max(norm);
        }
        if worst < rep.joint_min {
            rep.joint_min = worst;
            rep.joint_min_at = from + i as i64;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexpr::expr::rat;
    use crate::sequence::{FnSequence, PolySequence};

    #[test]
    fn check_pi_examples() {
        let w = IntSeqWindow::from_fn(0, 10, |n| BigInt::from(n * n + n));
        let wit = check_pi(&w, 3).unwrap().unwrap();
        assert_eq!(wit.c, BigInt::from(2));
        assert_eq!(wit.polynomial(), Polynomial::from_i64(&[0, 1, 1]));
        let lin = IntSeqWindow::from_fn(0, 10, BigInt::from);
        assert!(check_pi(&lin, 3).unwrap().is_none());
        let pow2 = IntSeqWindow::from_fn(0, 8, |n| BigInt::from(1) << n);
        assert!(check_pi(&pow2, 3).unwrap().is_none());
    }

    #[test]
    fn witness_json_shape() {
        let w = IntSeqWindow::from_fn(0, 4, |n| BigInt::from(n * n));
        let wit = check_pi(&w, 3).unwrap().unwrap();
        let v: serde_json::Value = serde_json::to_value(&wit).unwrap();
        assert_eq!(v["kind"], "pi");
        assert_eq!(v["N"], 0);
        assert_eq!(v["M"], 4);
        assert_eq!(v["c"], 2);
        assert_eq!(v["poly"], serde_json::json!([0, 0, 1]));
        let back: PiWitness = serde_json::from_value(v).unwrap();
        assert_eq!(back, wit);
    }

    #[test]
    fn search_on_polynomial_function() {
        let f = LEFunction::parse("x^2 + x").unwrap();
        let w = search_pi_interval(&f, 3, 10, 0, 10).unwrap().unwrap();
        assert_eq!(w.n, 0);
        assert!(w.verify(&f).unwrap());
    }

    #[test]
    fn mu_super_synthetic_cubes() {
        let cubes = PolySequence::from_i64(&[0, 0, 0, 1]);
        let b = SearchBudget::range(0, 10);
        assert_eq!(mu_super_seq(&cubes, 4, 2, 3, 6, &b).unwrap().value, TriState::True);
        assert_eq!(mu_super_seq(&cubes, 4, 2, 3, 7, &b).unwrap().value, TriState::False);
        assert!(mu_super_seq(&cubes, 2, 2, 3, 6, &b).is_err());
        let w = IntSeqWindow::from_fn(0, 20, |n| BigInt::from(n * n * n));
        let at = |k: i64| Ok(w.values[k as usize].clone());
        assert_eq!(iterated_delta_with(at, 0, &[1, 2, 3]).unwrap(), BigInt::from(36));
        assert_eq!(iterated_delta_with(at, 0, &[1, 1, 7]).unwrap(), BigInt::from(42));
    }

    #[test]
    fn mu_super_budget_exhaustion_is_unknown() {
        let f = LEFunction::parse("x^(5/2)").unwrap();
        let b = SearchBudget { candidate_cap: 50, ..SearchBudget::range(1000, 2000) };
        assert!(mu_super(&f, 3, 5, 5, 25, &b).unwrap().value.is_unknown());
        let never = FnSequence(|n: i64| BigInt::from(n));
        assert!(mu_super_seq(&never, 3, 1, 1, 1, &SearchBudget::range(0, 5)).unwrap().value.is_unknown());
    }

    #[test]
    fn alpha_estimates() {
        let f = LEFunction::parse("sqrt(2)*x^2").unwrap();
        let a = estimate_alpha(&f, 3, &[1000, 10_000, 100_000], &rat(1, 1000), Some(2f64.sqrt())).unwrap();
        assert!(a.mid_f64() - 2f64.sqrt() < 1e-15);
        let g = LEFunction::parse("x^2 + x*log(x)").unwrap();
        let a = estimate_alpha(&g, 3, &[10_000, 100_000, 1_000_000], &rat(1, 10_000), None).unwrap();
        assert!(a.contains(&rat(1, 1)));
        let h = LEFunction::parse("x^(5/2)").unwrap();
        assert!(matches!(
            estimate_alpha(&h, 3, &[10_000, 100_000, 1_000_000], &rat(1, 10), None),
            Err(Error::NonConvergence(_))
        ));
    }

    fn sqrt2_ctx() -> CoarseMultContext {
        let f = LEFunction::parse("sqrt(2)*x^2").unwrap();
        let alpha = estimate_alpha(&f, 3, &[1000, 10_000, 100_000], &rat(1, 1000), None).unwrap();
        CoarseMultContext::new(f, 3, alpha, 800, CoarseMultContext::decades(6, 8)).unwrap()
    }

    #[test]
    fn coarse_examples() {
        let ctx = sqrt2_ctx();
        let (v, ok) = coarse_bound_holds(&ctx, 1_000_000, 1, 1, 1).unwrap();
        assert!(ok && v.abs() <= BigInt::from(8));
        assert!(coarse_bound_holds(&ctx, 1_000_000, 2, 3, 100).unwrap().1);
        let p = LEFunction::parse("2*x^2").unwrap();
        let pctx = CoarseMultContext { f: p, d: 3, alpha: Enclosure::exact(rat(2, 1), 64), big_d: 800, n_schedule: vec![10] };
        for (a, b, c) in [(1, 1, 1), (2, 3, 4), (0, 5, 9)] {
            assert_eq!(coarse_f(&pctx, 17, a, b, c).unwrap(), BigInt::from(4 * (a * b - c)));
        }
    }

    #[test]
    fn coarse_context_validation() {
        let f = LEFunction::parse("sqrt(2)*x^2").unwrap();
        let alpha = Enclosure::exact(rat(141, 100), 64);
        assert!(CoarseMultContext::new(f.clone(), 3, alpha.clone(), 799, vec![1]).is_err());
        assert!(CoarseMultContext::new(f.clone(), 3, Enclosure::exact(rat(0, 1), 64), 800, vec![1]).is_err());
        assert!(CoarseMultContext::new(f, 3, alpha, 800, vec![1]).is_ok());
    }

    #[test]
    fn mu_exact_examples() {
        let ctx = sqrt2_ctx();
        assert_eq!(mu_exact(&ctx, 3, 4, 12).unwrap(), TriState::True);
        assert_eq!(mu_exact(&ctx, 3, 4, 13).unwrap(), TriState::False);
        assert_eq!(mu_exact(&ctx, 0, 0, 0).unwrap(), TriState::True);
    }

    #[test]
    fn density_examples() {
        let sq = LEFunction::parse("x^2").unwrap();
        let r = density_diagnostic(&sq, 3, 10, 200, 10).unwrap();
        assert_eq!(r.histograms[0][0], r.samples);
        let r = density_diagnostic(&sq, 1, 0, 3, 2).unwrap();
        assert_eq!(r.histograms[0].len(), 2);
        assert!(density_diagnostic(&sq, 1, 0, 3, 1).is_err());
    }
}
