//! First-order formulas over `(Z; <, +, f)` with `f` read as `⌊f⌉`.

mod ast;
mod eval;
mod macros;
mod parse;

pub use ast::{stencil_term, Formula, Term};
pub use eval::{evaluate, evaluate_seq, EvalOptions, Evaluation};
pub use macros::{Macro, MacroTable};
pub use parse::{check_closed, parse_formula, parse_formula_with, parse_term};
