//! Exact binary rationals and outward-rounded interval arithmetic.

pub mod dyadic;
pub mod elementary;
pub mod interval;

pub use dyadic::{Dyadic, Round};
pub use interval::Interval;
