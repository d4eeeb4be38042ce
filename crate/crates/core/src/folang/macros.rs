use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::ast::{stencil_term, Formula, Term};
use super::parse::{parse_formula_with, parse_term};
use crate::error::{Error, Result};

/// A named formula with positional parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Macro {
    pub params: Vec<String>,
    pub body: Formula,
}

/// Named templates expanded by the parser. Expansion renames every binder.
#[derive(Clone, Debug, Default)]
pub struct MacroTable {
    macros: BTreeMap<String, Macro>,
}

impl MacroTable {
    pub fn empty() -> MacroTable {
        MacroTable::default()
    }

    /// Builtin templates for degree `d`. `mu_exact` is included only when
    /// the scale `D` is given.
    pub fn builtin(d: u32) -> Result<MacroTable> {
        MacroTable::builtin_with(d, None)
    }

    pub fn builtin_with(d: u32, big_d: Option<i64>) -> Result<MacroTable> {
        if d < 3 {
            return Err(Error::InvalidArgument(format!("d must be at least 3, got {d}")));
        }
        let mut t = MacroTable::empty();
        t.define("lambda", &["N", "M", "n"], "A k in [0, M - 1]. f(N + k + 1) = f(N + k) + n")?;
        t.define("pi", &["N", "M"], &pi_text(d))?;
        t.define("mu_super", &["n", "m", "q"], &mu_super_text(d))?;
        t.define("mu0", &["n", "m", "p"], "E N. E M. 0 <= m & m < M & lambda(N, M, n) & f(N + m) = f(N) + p")?;
        t.define(
            "mu1",
            &["n", "m", "p"],
            "E n1. E n2. E p1. E p2. mu0(n1, m, p1) & mu0(n2, m, p2) & n = n2 - n1 & p = p2 - p1",
        )?;
        t.define("mul", &["n", "m", "p"], "mu1(n, m, p)")?;
        t.define("b_def", &["n", "m"], "f(n) >= m & A k in [0, n]. (f(k) >= m -> k >= n)")?;
        t.define("b_def_unbounded", &["n", "m"], "f(n) >= m & A k. (f(k) >= m -> k >= n)")?;
        if let Some(big_d) = big_d {
            if big_d < 1 {
                return Err(Error::InvalidArgument(format!("D must be positive, got {big_d}")));
            }
            t.define("mu_exact", &["a", "b", "c"], &mu_exact_text(d, big_d))?;
        }
        Ok(t)
    }

    /// Add a template; its body may call templates defined earlier.
    pub fn define(&mut self, name: &str, params: &[&str], body: &str) -> Result<()> {
        let body = parse_formula_with(body, self)?;
        let params: Vec<String> = params.iter().map(|p| p.to_string()).collect();
        let stray: Vec<String> = body.free_vars().into_iter().filter(|v| !params.contains(v)).collect();
        if !stray.is_empty() {
            return Err(Error::Scope(format!("macro {name}: unbound variable(s) {}", stray.join(", "))));
        }
        self.macros.insert(name.to_string(), Macro { params, body });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Macro> {
        self.macros.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.macros.keys().map(|s| s.as_str())
    }

    pub fn expand(&self, name: &str, args: &[Term], fresh: &mut dyn FnMut(&str) -> String) -> Result<Formula> {
        let m = self.macros.get(name).ok_or_else(|| Error::InvalidArgument(format!("unknown macro '{name}'")))?;
        if m.params.len() != args.len() {
            return Err(Error::InvalidArgument(format!(
                "macro '{name}' takes {} argument(s), got {}",
                m.params.len(),
                args.len()
            )));
        }
        let map = |v: &str| m.params.iter().position(|p| p == v).map(|i| args[i].clone());
        Ok(m.body.instantiate(&map, fresh))
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn pi_text(d: u32) -> String {
    let stencil: Vec<(Term, BigInt)> = (0..d)
        .map(|i| {
            let sign = if (d - 1 - i) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            (Term::lit(i as i64), sign * binomial(d - 1, i))
        })
        .collect();
    let base = parse_term("N + j").expect("static term");
    format!("E c. !(c = 0) & A j in [0, M - {d}]. {} = c", stencil_term(&base, &stencil))
}

/// Expansion of `Δ_{h_1} ... Δ_{h_k} a(N)` where `ones` of the shifts are 1
/// and the rest are the given terms.
fn delta_stencil(ones: usize, shifts: &[Term]) -> Vec<(Term, BigInt)> {
    let k = ones + shifts.len();
    let mut acc: BTreeMap<(usize, Vec<bool>), BigInt> = BTreeMap::new();
    for mask in 0u32..(1 << k) {
        let picked = mask.count_ones() as usize;
        let sign = if (k - picked) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let n_ones = (0..ones).filter(|i| mask >> i & 1 == 1).count();
        let sym: Vec<bool> = (0..shifts.len()).map(|i| mask >> (ones + i) & 1 == 1).collect();
        *acc.entry((n_ones, sym)).or_insert_with(BigInt::zero) += sign;
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((n_ones, sym), c)| {
            let mut off: Option<Term> = (n_ones > 0).then(|| Term::lit(n_ones as i64));
            for (t, used) in shifts.iter().zip(sym) {
                if used {
                    off = Some(match off {
                        None => t.clone(),
                        Some(o) => Term::add(o, t.clone()),
                    });
                }
            }
            (off.unwrap_or_else(|| Term::lit(0)), c)
        })
        .collect()
}

fn mu_super_text(d: u32) -> String {
    let base = Term::var("N");
    let lhs = delta_stencil(d as usize - 3, &[Term::var("n"), Term::var("m")]);
    let rhs = delta_stencil(d as usize - 2, &[Term::var("q")]);
    format!(
        "E N. E M. n + m + q + {d} < M & pi(N, M) & {} = {}",
        stencil_term(&base, &lhs),
        stencil_term(&base, &rhs)
    )
}

fn mu_exact_text(d: u32, big_d: i64) -> String {
    let base = Term::var("N");
    let scaled = |v: &str| Term::Scale(BigInt::from(big_d), Box::new(Term::var(v)));
    let lhs = delta_stencil(d as usize - 3, &[scaled("a"), Term::var("b")]);
    let rhs = delta_stencil(d as usize - 2, &[scaled("c")]);
    let diff = format!("{} - ({})", stencil_term(&base, &lhs), stencil_term(&base, &rhs));
    let bound = 1i64 << d;
    format!("A N0. E N. N >= N0 & {diff} <= {bound} & -{bound} <= {diff}")
}
