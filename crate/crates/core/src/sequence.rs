use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Result;
use crate::lexpr::LEFunction;
use crate::seqcalc::IntSeqWindow;

/// An integer sequence `n -> a(n)` defined on all of `Z`.
pub trait IntSequence: Send + Sync {
    fn value(&self, n: i64) -> Result<BigInt>;

    /// Values `a(start), ..., a(start + len - 1)`.
    fn window(&self, start: i64, len: usize) -> Result<IntSeqWindow> {
        let values = (0..len as i64).map(|m| self.value(start + m)).collect::<Result<Vec<_>>>()?;
        Ok(IntSeqWindow::new(start, values))
    }
}

impl<S: IntSequence + ?Sized> IntSequence for Arc<S> {
    fn value(&self, n: i64) -> Result<BigInt> {
        (**self).value(n)
    }
}

impl<S: IntSequence + ?Sized> IntSequence for &S {
    fn value(&self, n: i64) -> Result<BigInt> {
        (**self).value(n)
    }
}

const DEFAULT_CACHE_CAPACITY: usize = 1 << 21;

/// `n -> nint(f(n))` with a bounded memo table.
///
/// The memo only stores values already computed, so concurrent fills are
/// idempotent.
pub struct RoundedSequence {
    f: LEFunction,
    cache: Mutex<HashMap<i64, BigInt>>,
    capacity: usize,
}

impl RoundedSequence {
    pub fn new(f: LEFunction) -> RoundedSequence {
        RoundedSequence::with_capacity(f, DEFAULT_CACHE_CAPACITY)
    }

    pub fn with_capacity(f: LEFunction, capacity: usize) -> RoundedSequence {
        RoundedSequence { f, cache: Mutex::new(HashMap::new()), capacity }
    }

    pub fn function(&self) -> &LEFunction {
        &self.f
    }
}

impl IntSequence for RoundedSequence {
    fn value(&self, n: i64) -> Result<BigInt> {
        if n < self.f.x0() {
            return Ok(BigInt::zero());
        }
        if let Some(v) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
            return Ok(v.clone());
        }
        let v = self.f.nint(n)?;
        let mut c = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if c.len() >= self.capacity {
            c.clear();
        }
        c.insert(n, v.clone());
        Ok(v)
    }
}

/// Uncached rounding of `f`; cheaper for one-pass scans.
impl IntSequence for LEFunction {
    fn value(&self, n: i64) -> Result<BigInt> {
        self.nint(n)
    }
}

/// Integer polynomial sequence `sum coeffs[k] n^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySequence {
    pub coeffs: Vec<BigInt>,
}

impl PolySequence {
    pub fn new(coeffs: Vec<BigInt>) -> PolySequence {
        PolySequence { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> PolySequence {
        PolySequence { coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect() }
    }
}

impl IntSequence for PolySequence {
    fn value(&self, n: i64) -> Result<BigInt> {
        let x = BigInt::from(n);
        Ok(self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c))
    }
}

/// Sequence given by a closure.
pub struct FnSequence<F>(pub F);

impl<F: Fn(i64) -> BigInt + Send + Sync> IntSequence for FnSequence<F> {
    fn value(&self, n: i64) -> Result<BigInt> {
        Ok((self.0)(n))
    }
}
