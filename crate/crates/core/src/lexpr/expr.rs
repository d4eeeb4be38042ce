use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Expression tree over one variable `x`.
///
/// Negation is represented as multiplication by the constant `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Const(BigRational),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, BigRational),
    Exp(Box<Expr>),
    Log(Box<Expr>),
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational `r^q` when it exists.
pub fn rational_pow(r: &BigRational, q: &BigRational) -> Option<BigRational> {
    let p = q.numer().to_i64()?;
    let s = q.denom().to_u32()?;
    if p.unsigned_abs() > 4096 {
        return None;
    }
    if r.is_zero() {
        return (p > 0).then(BigRational::zero);
    }
    let base = if s == 1 {
        r.clone()
    } else {
        if r.is_negative() {
            return None;
        }
        let a = r.numer().nth_root(s);
        let b = r.denom().nth_root(s);
        if num_traits::pow(a.clone(), s as usize) != *r.numer() || num_traits::pow(b.clone(), s as usize) != *r.denom() {
            return None;
        }
        BigRational::new(a, b)
    };
    let v = num_traits::pow(base, p.unsigned_abs() as usize);
    Some(if p < 0 { v.recip() } else { v })
}

impl Expr {
    pub fn constant(r: BigRational) -> Expr {
        Expr::Const(r)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(n.into()))
    }

    pub fn x() -> Expr {
        Expr::Var
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_const_value(&self, v: i64) -> bool {
        matches!(self, Expr::Const(c) if *c == BigRational::from_integer(v.into()))
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
            Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => a.contains_var(),
        }
    }

    /// True when no `exp`/`log` occurs, so values at rational points may be rational.
    pub fn is_algebraic(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_algebraic() && b.is_algebraic()
            }
            Expr::Pow(a, _) => a.is_algebraic(),
            Expr::Exp(_) | Expr::Log(_) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => 1 + a.size() + b.size(),
            Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => 1 + a.size(),
        }
    }

    /// Substitute `e` for the variable.
    pub fn compose(&self, e: &Expr) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var => e.clone(),
            Expr::Add(a, b) => add(a.compose(e), b.compose(e)),
            Expr::Sub(a, b) => sub(a.compose(e), b.compose(e)),
            Expr::Mul(a, b) => mul(a.compose(e), b.compose(e)),
            Expr::Div(a, b) => div(a.compose(e), b.compose(e)),
            Expr::Pow(a, q) => pow(a.compose(e), q.clone()),
            Expr::Exp(a) => exp(a.compose(e)),
            Expr::Log(a) => log(a.compose(e)),
        }
    }
}

// Smart constructors. They fold constants and apply a few safe identities so
// that derivatives stay small and compare structurally.

pub fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if a.is_const_value(0) => b,
        _ if b.is_const_value(0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if b.is_const_value(0) => a,
        _ if a == b => Expr::int(0),
        _ if a.is_const_value(0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub fn neg(a: Expr) -> Expr {
    mul(Expr::int(-1), a)
}

fn split_power(e: &Expr) -> Option<BigRational> {
    match e {
        Expr::Var => Some(BigRational::one()),
        Expr::Pow(b, p) if **b == Expr::Var => Some(p.clone()),
        _ => None,
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_const_value(0) || b.is_const_value(0) {
        return Expr::int(0);
    }
    if a.is_const_value(1) {
        return b;
    }
    if b.is_const_value(1) {
        return a;
    }
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, Expr::Const(y)) => mul(Expr::Const(y), a),
        (Expr::Const(x), Expr::Mul(c, r)) if c.as_const().is_some() => {
            let y = c.as_const().unwrap();
            mul(Expr::Const(&x * y), *r)
        }
        (Expr::Mul(c, r), b) if c.as_const().is_some() => mul(*c, mul(*r, b)),
        (a, Expr::Mul(c, r)) if c.as_const().is_some() && a.as_const().is_none() => mul(*c, mul(a, *r)),
        (a, b) => match (split_power(&a), split_power(&b)) {
            (Some(p), Some(q)) => pow(Expr::Var, p + q),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        },
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    if b.is_const_value(1) {
        return a;
    }
    if a.is_const_value(0) && !b.is_const_value(0) {
        return Expr::int(0);
    }
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => return Expr::Const(x / y),
        (_, Expr::Const(y)) if !y.is_zero() => return mul(Expr::Const(y.recip()), a),
        _ => {}
    }
    if let Some(p) = split_power(&b) {
        return mul(a, pow(Expr::Var, -p));
    }
    Expr::Div(Box::new(a), Box::new(b))
}

pub fn pow(a: Expr, q: BigRational) -> Expr {
    if q.is_zero() {
        return Expr::int(1);
    }
    if q.is_one() {
        return a;
    }
    match a {
        Expr::Const(ref c) => match rational_pow(c, &q) {
            Some(v) => Expr::Const(v),
            None => Expr::Pow(Box::new(a), q),
        },
        Expr::Pow(b, p) if *b == Expr::Var => pow(Expr::Var, p * q),
        a => Expr::Pow(Box::new(a), q),
    }
}

pub fn exp(a: Expr) -> Expr {
    if a.is_const_value(0) {
        return Expr::int(1);
    }
    Expr::Exp(Box::new(a))
}

pub fn log(a: Expr) -> Expr {
    if a.is_const_value(1) {
        return Expr::int(0);
    }
    if let Expr::Exp(inner) = a {
        return *inner;
    }
    Expr::Log(Box::new(a))
}

/// Rebuild through the smart constructors.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var => e.clone(),
        Expr::Add(a, b) => add(simplify(a), simplify(b)),
        Expr::Sub(a, b) => sub(simplify(a), simplify(b)),
        Expr::Mul(a, b) => mul(simplify(a), simplify(b)),
        Expr::Div(a, b) => div(simplify(a), simplify(b)),
        Expr::Pow(a, q) => pow(simplify(a), q.clone()),
        Expr::Exp(a) => exp(simplify(a)),
        Expr::Log(a) => log(simplify(a)),
    }
}

// Printing. The output parses back to the same tree.

fn prec_of(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn wrap(s: String, yes: bool) -> String {
    if yes {
        format!("({s})")
    } else {
        s
    }
}

fn ends_with_digit(s: &str) -> bool {
    s.chars().last().is_some_and(|c| c.is_ascii_digit())
}

fn starts_with_digit(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn render(e: &Expr) -> String {
    match e {
        Expr::Const(c) => {
            if c.is_integer() && !c.is_negative() {
                c.numer().to_string()
            } else {
                format!("({})", fmt_rational(c))
            }
        }
        Expr::Var => "x".to_string(),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let op = if matches!(e, Expr::Add(..)) { "+" } else { "-" };
            let l = render(a);
            let r = wrap(render(b), prec_of(b) <= 1);
            format!("{l} {op} {r}")
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            let is_div = matches!(e, Expr::Div(..));
            let mut l = wrap(render(a), prec_of(a) <= 1);
            let r = wrap(render(b), prec_of(b) <= 2);
            // "2/3" would lex as a single rational literal
            if is_div && ends_with_digit(&l) && starts_with_digit(&r) {
                l = format!("({l})");
            }
            let op = if is_div { "/" } else { "*" };
            format!("{l}{op}{r}")
        }
        Expr::Pow(a, q) => {
            let b = wrap(render(a), prec_of(a) <= 3);
            format!("{b}^({})", fmt_rational(q))
        }
        Expr::Exp(a) => format!("exp({})", render(a)),
        Expr::Log(a) => format!("log({})", render(a)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xp(p: i64, q: i64) -> Expr {
        pow(Expr::Var, rat(p, q))
    }

    #[test]
    fn folding() {
        assert_eq!(add(Expr::int(2), Expr::int(3)), Expr::int(5));
        assert_eq!(mul(Expr::int(2), mul(Expr::Const(rat(3, 2)), Expr::Var)), mul(Expr::int(3), Expr::Var));
        assert_eq!(mul(Expr::Var, xp(1, 2)), xp(3, 2));
        assert_eq!(div(Expr::int(1), Expr::Var), xp(-1, 1));
        assert_eq!(pow(xp(1, 2), rat(4, 1)), xp(2, 1));
        assert_eq!(pow(Expr::int(4), rat(3, 2)), Expr::int(8));
        assert_eq!(log(exp(Expr::Var)), Expr::Var);
    }

    #[test]
    fn constants_move_left() {
        let e = mul(Expr::Var, Expr::int(3));
        assert_eq!(e, Expr::Mul(Box::new(Expr::int(3)), Box::new(Expr::Var)));
    }

    #[test]
    fn printing() {
        assert_eq!(xp(5, 2).to_string(), "x^(5/2)");
        assert_eq!(mul(Expr::Const(rat(-1, 3)), Expr::Var).to_string(), "(-1/3)*x");
        let d = Expr::Div(Box::new(Expr::int(5)), Box::new(Expr::int(2)));
        assert_eq!(d.to_string(), "(5)/2");
        let s = Expr::Sub(Box::new(Expr::Var), Box::new(add(Expr::Var, Expr::int(1))));
        assert_eq!(s.to_string(), "x - (x + 1)");
    }

    #[test]
    fn rational_powers() {
        assert_eq!(rational_pow(&rat(9, 4), &rat(3, 2)), Some(rat(27, 8)));
        assert_eq!(rational_pow(&rat(2, 1), &rat(1, 2)), None);
        assert_eq!(rational_pow(&rat(-8, 1), &rat(1, 3)), None);
        assert_eq!(rational_pow(&rat(2, 1), &rat(-2, 1)), Some(rat(1, 4)));
    }
}
