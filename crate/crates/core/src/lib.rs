pub mod arith;
pub mod budget;
pub mod error;
pub mod folang;
pub mod json;
pub mod lexpr;
pub mod nearlin;
pub mod seqcalc;
pub mod sequence;
pub mod sublin;
pub mod superlin;

pub use budget::{SearchBudget, TriState};
pub use error::{Error, Result};
