//! Exact rounding oracles built from integer roots only.
//!
//! `⌊s⌉ = ⌊(⌊2s⌋ + 1) / 2⌋`, and `2s` is an integer root of an integer for
//! every fixture below, so no floating point or interval code is involved.
#![allow(dead_code)]

use num_bigint::BigInt;

fn half_up(twice_floor: BigInt) -> BigInt {
    (twice_floor + 1) / 2
}

fn pow(n: i64, k: u32) -> BigInt {
    BigInt::from(n).pow(k)
}

/// `⌊n^(5/2)⌉`
pub fn x5_2(n: i64) -> BigInt {
    half_up((pow(n, 5) * 4u32).sqrt())
}

/// `⌊√2·n²⌉`
pub fn sqrt2x2(n: i64) -> BigInt {
    half_up((pow(n, 4) * 8u32).sqrt())
}

/// `⌊n^(3/2)⌉`
pub fn x3_2(n: i64) -> BigInt {
    half_up((pow(n, 3) * 4u32).sqrt())
}

/// `⌊n^(2/3)⌉`
pub fn x2_3(n: i64) -> BigInt {
    half_up((pow(n, 2) * 8u32).cbrt())
}

/// `⌊√n⌉`
pub fn sqrt(n: i64) -> BigInt {
    half_up((pow(n, 1) * 4u32).sqrt())
}

pub const FIXTURES: [(&str, fn(i64) -> BigInt); 4] =
    [("x^(5/2)", x5_2), ("sqrt(2)*x^2", sqrt2x2), ("x^(3/2)", x3_2), ("x^(2/3)", x2_3)];
