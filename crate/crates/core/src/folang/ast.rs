use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

/// Presburger term extended by `f(t)`, read as `⌊f⌉(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Lit(BigInt),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    /// Multiplication by an integer literal.
    Scale(BigInt, Box<Term>),
    App(Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Lt(Term, Term),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists { var: String, range: Option<(Term, Term)>, body: Box<Formula> },
    Forall { var: String, range: Option<(Term, Term)>, body: Box<Formula> },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn lit(n: i64) -> Term {
        Term::Lit(BigInt::from(n))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn app(a: Term) -> Term {
        Term::App(Box::new(a))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Lit(_) => {}
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Scale(_, a) | Term::App(a) => a.vars(out),
        }
    }

    /// Replace variables by terms.
    pub fn subst(&self, map: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Term::Lit(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.subst(map), b.subst(map)),
            Term::Sub(a, b) => Term::sub(a.subst(map), b.subst(map)),
            Term::Scale(k, a) => Term::Scale(k.clone(), Box::new(a.subst(map))),
            Term::App(a) => Term::app(a.subst(map)),
        }
    }
}

impl Formula {
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(var: &str, range: Option<(Term, Term)>, body: Formula) -> Formula {
        Formula::Exists { var: var.to_string(), range, body: Box::new(body) }
    }

    pub fn forall(var: &str, range: Option<(Term, Term)>, body: Formula) -> Formula {
        Formula::Forall { var: var.to_string(), range, body: Box::new(body) }
    }

    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Lt(a, b) | Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists { var, range, body } | Formula::Forall { var, range, body } => {
                if let Some((lo, hi)) = range {
                    term(lo, bound, out);
                    term(hi, bound, out);
                }
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Capture-avoiding substitution of free variables, renaming every
    /// binder with `fresh`.
    pub fn instantiate(&self, map: &dyn Fn(&str) -> Option<Term>, fresh: &mut dyn FnMut(&str) -> String) -> Formula {
        match self {
            Formula::Lt(a, b) => Formula::Lt(a.subst(map), b.subst(map)),
            Formula::Eq(a, b) => Formula::Eq(a.subst(map), b.subst(map)),
            Formula::Not(a) => Formula::not(a.instantiate(map, fresh)),
            Formula::And(a, b) => Formula::and(a.instantiate(map, fresh), b.instantiate(map, fresh)),
            Formula::Or(a, b) => Formula::or(a.instantiate(map, fresh), b.instantiate(map, fresh)),
            Formula::Implies(a, b) => Formula::implies(a.instantiate(map, fresh), b.instantiate(map, fresh)),
            Formula::Exists { var, range, body } | Formula::Forall { var, range, body } => {
                let range = range.as_ref().map(|(lo, hi)| (lo.subst(map), hi.subst(map)));
                let new = fresh(var);
                let renamed = {
                    let new_t = Term::Var(new.clone());
                    let inner = |v: &str| if v == var { Some(new_t.clone()) } else { map(v) };
                    body.instantiate(&inner, fresh)
                };
                let body = Box::new(renamed);
                if matches!(self, Formula::Exists { .. }) {
                    Formula::Exists { var: new, range, body }
                } else {
                    Formula::Forall { var: new, range, body }
                }
            }
        }
    }
}

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Scale(..) => 2,
        _ => 3,
    }
}

fn write_term(t: &Term, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = term_prec(t);
    let wrap = p < ctx || matches!(t, Term::Lit(k) if k.is_negative() && ctx > 0);
    if wrap {
        write!(f, "(")?;
    }
    match t {
        Term::Var(v) => write!(f, "{v}")?,
        Term::Lit(k) => write!(f, "{k}")?,
        Term::Add(a, b) => {
            write_term(a, 1, f)?;
            write!(f, " + ")?;
            write_term(b, 2, f)?;
        }
        Term::Sub(a, b) => {
            write_term(a, 1, f)?;
            write!(f, " - ")?;
            write_term(b, 2, f)?;
        }
        Term::Scale(k, a) => {
            if k.is_negative() {
                write!(f, "({k})*")?;
            } else {
                write!(f, "{k}*")?;
            }
            write_term(a, 3, f)?;
        }
        Term::App(a) => {
            write!(f, "f(")?;
            write_term(a, 0, f)?;
            write!(f, ")")?;
        }
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, 0, f)
    }
}

fn formula_prec(x: &Formula) -> u8 {
    match x {
        Formula::Exists { .. } | Formula::Forall { .. } => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn write_formula(x: &Formula, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = formula_prec(x) < ctx;
    if wrap {
        write!(f, "(")?;
    }
    match x {
        Formula::Lt(a, b) => write!(f, "{a} < {b}")?,
        Formula::Eq(a, b) => write!(f, "{a} = {b}")?,
        Formula::Not(a) => {
            write!(f, "!")?;
            write_formula(a, 4, f)?;
        }
        Formula::And(a, b) => {
            write_formula(a, 3, f)?;
            write!(f, " & ")?;
            write_formula(b, 4, f)?;
        }
        Formula::Or(a, b) => {
            write_formula(a, 2, f)?;
            write!(f, " | ")?;
            write_formula(b, 3, f)?;
        }
        Formula::Implies(a, b) => {
            write_formula(a, 2, f)?;
            write!(f, " -> ")?;
            write_formula(b, 1, f)?;
        }
        Formula::Exists { var, range, body } | Formula::Forall { var, range, body } => {
            let q = if matches!(x, Formula::Exists { .. }) { "E" } else { "A" };
            write!(f, "{q} {var}")?;
            if let Some((lo, hi)) = range {
                write!(f, " in [{lo}, {hi}]")?;
            }
            write!(f, ". ")?;
            write_formula(body, 0, f)?;
        }
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 0, f)
    }
}

/// `sum_i c_i f(base + offset_i)` for a stencil of literal coefficients.
pub fn stencil_term(base: &Term, stencil: &[(Term, BigInt)]) -> Term {
    let mut acc: Option<Term> = None;
    for (off, c) in stencil {
        let arg = if *off == Term::lit(0) { base.clone() } else { Term::add(base.clone(), off.clone()) };
        let app = Term::app(arg);
        let mag = c.abs();
        let piece = if mag.is_one() { app } else { Term::Scale(mag, Box::new(app)) };
        acc = Some(match (acc, c.is_negative()) {
            (None, false) => piece,
            (None, true) => Term::Scale(-BigInt::one(), Box::new(piece)),
            (Some(a), false) => Term::add(a, piece),
            (Some(a), true) => Term::sub(a, piece),
        });
    }
    acc.unwrap_or_else(|| Term::lit(0))
}
