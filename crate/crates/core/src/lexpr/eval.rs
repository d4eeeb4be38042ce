use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::{rational_pow, Expr};
use crate::arith::{elementary, Interval};
use crate::error::{Error, Result};

/// Exact value at a rational point when every node stays rational.
pub fn eval_exact(e: &Expr, x: &BigRational) -> Option<BigRational> {
    match e {
        Expr::Const(c) => Some(c.clone()),
        Expr::Var => Some(x.clone()),
        Expr::Add(a, b) => Some(eval_exact(a, x)? + eval_exact(b, x)?),
        Expr::Sub(a, b) => Some(eval_exact(a, x)? - eval_exact(b, x)?),
        Expr::Mul(a, b) => Some(eval_exact(a, x)? * eval_exact(b, x)?),
        Expr::Div(a, b) => {
            let d = eval_exact(b, x)?;
            if d.is_zero() {
                return None;
            }
            Some(eval_exact(a, x)? / d)
        }
        Expr::Pow(a, q) => rational_pow(&eval_exact(a, x)?, q),
        Expr::Exp(a) => eval_exact(a, x)?.is_zero().then(BigRational::one),
        Expr::Log(a) => eval_exact(a, x)?.is_one().then(BigRational::zero),
    }
}

fn inconclusive(what: &str, iv: &Interval) -> Error {
    Error::Inconclusive(format!("{what}: argument enclosure {iv} is not sign-definite"))
}

/// Certified enclosure of `e` over the interval `x`.
///
/// Returns `Error::Inconclusive` when an enclosure is too wide to decide a
/// domain condition; a higher precision may succeed.
pub fn eval_interval(e: &Expr, x: &Interval, prec: u32, cap: i64) -> Result<Interval> {
    let out = match e {
        Expr::Const(c) => Interval::from_rational(c, prec),
        Expr::Var => x.clone(),
        Expr::Add(a, b) => eval_interval(a, x, prec, cap)?.add(&eval_interval(b, x, prec, cap)?, prec),
        Expr::Sub(a, b) => eval_interval(a, x, prec, cap)?.sub(&eval_interval(b, x, prec, cap)?, prec),
        Expr::Mul(a, b) => eval_interval(a, x, prec, cap)?.mul(&eval_interval(b, x, prec, cap)?, prec),
        Expr::Div(a, b) => {
            let d = eval_interval(b, x, prec, cap)?;
            if d.is_exact_zero() {
                return Err(Error::Domain("division by zero".into()));
            }
            let n = eval_interval(a, x, prec, cap)?;
            n.div(&d, prec).ok_or_else(|| inconclusive("division", &d))?
        }
        Expr::Pow(a, q) => {
            let v = eval_interval(a, x, prec, cap)?;
            let fractional = !q.is_integer();
            if v.is_exact_zero() && !q.is_positive() {
                return Err(Error::Domain("non-positive power of zero".into()));
            }
            if fractional && v.is_negative() {
                return Err(Error::Domain(format!("fractional power of negative value {v}")));
            }
            if (fractional && v.lo.is_negative()) || (q.is_negative() && v.contains_zero()) {
                return Err(inconclusive("power", &v));
            }
            elementary::pow_rational(&v, q, prec, cap)?
        }
        Expr::Exp(a) => elementary::exp(&eval_interval(a, x, prec, cap)?, prec, cap)?,
        Expr::Log(a) => {
            let v = eval_interval(a, x, prec, cap)?;
            if !v.hi.is_positive() {
                return Err(Error::Domain(format!("log of non-positive value {v}")));
            }
            if !v.lo.is_positive() {
                return Err(inconclusive("log", &v));
            }
            elementary::log(&v, prec)?
        }
    };
    let m = out.magnitude();
    if m != i64::MIN && m > cap {
        return Err(Error::Overflow { cap });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::elementary::DEFAULT_EXPONENT_CAP;
    use crate::lexpr::expr::rat;
    use crate::lexpr::parse::parse_expr;

    fn ev(s: &str, x: i64) -> Result<Interval> {
        eval_interval(&parse_expr(s).unwrap(), &Interval::from_i64(x), 64, DEFAULT_EXPONENT_CAP)
    }

    #[test]
    fn exact_values() {
        let e = parse_expr("x^(5/2) + log(x) - exp(x - 4)").unwrap();
        assert_eq!(eval_exact(&e, &rat(4, 1)), None);
        let e = parse_expr("x^(5/2) + 1/2").unwrap();
        assert_eq!(eval_exact(&e, &rat(4, 1)), Some(rat(65, 2)));
        let e = parse_expr("log(x) + exp(x - 1)").unwrap();
        assert_eq!(eval_exact(&e, &rat(1, 1)), Some(rat(1, 1)));
    }

    #[test]
    fn interval_domain_errors() {
        assert!(matches!(ev("log(x - 3)", 2), Err(Error::Domain(_))));
        assert!(matches!(ev("1/(x - 2)", 2), Err(Error::Domain(_))));
        assert!(matches!(ev("x^(-1/2)", 0), Err(Error::Domain(_))));
        assert!(matches!(ev("exp(exp(x))", 40), Err(Error::Overflow { .. })));
    }

    #[test]
    fn containment_of_composites() {
        let iv = ev("sqrt(x)*log(x) + x^(-1/3)", 8).unwrap();
        let v = 8f64.sqrt() * 8f64.ln() + 0.5;
        assert!(iv.lo.to_f64() <= v + 1e-12 && v - 1e-12 <= iv.hi.to_f64());
    }
}
