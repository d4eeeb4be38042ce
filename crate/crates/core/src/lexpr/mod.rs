//! Logarithmico-exponential functions: parsing, symbolic differentiation,
//! certified evaluation, correct rounding and inversion.

pub mod diff;
pub mod eval;
pub mod expr;
pub mod function;
pub mod growth;
pub mod parse;

pub use diff::{derivative, nth_derivative};
pub use eval::{eval_exact, eval_interval};
pub use expr::{simplify, Expr};
pub use function::{ceil_rational, circle_norm_rational, round_half_up, Enclosure, EvalConfig, LEFunction};
pub use growth::{classify_growth_check, GrowthClass, GrowthReport};
pub use parse::parse_expr;

/// Parse text into a validated function with inferred `x0`.
pub fn parse_function(text: &str) -> crate::Result<LEFunction> {
    LEFunction::parse(text)
}
