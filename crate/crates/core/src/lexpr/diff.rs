use num_rational::BigRational;
use num_traits::One;

use super::expr::{add, div, exp, mul, pow, sub, Expr};

/// Symbolic derivative with respect to `x`, simplified on construction.
pub fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var => Expr::int(1),
        Expr::Add(a, b) => add(derivative(a), derivative(b)),
        Expr::Sub(a, b) => sub(derivative(a), derivative(b)),
        Expr::Mul(a, b) => add(mul(derivative(a), (**b).clone()), mul((**a).clone(), derivative(b))),
        Expr::Div(a, b) => {
            if !b.contains_var() {
                return div(derivative(a), (**b).clone());
            }
            let num = sub(mul(derivative(a), (**b).clone()), mul((**a).clone(), derivative(b)));
            div(num, pow((**b).clone(), BigRational::from_integer(2.into())))
        }
        Expr::Pow(a, q) => {
            let outer = mul(Expr::Const(q.clone()), pow((**a).clone(), q - BigRational::one()));
            mul(outer, derivative(a))
        }
        Expr::Exp(a) => mul(exp((**a).clone()), derivative(a)),
        Expr::Log(a) => div(derivative(a), (**a).clone()),
    }
}

pub fn nth_derivative(e: &Expr, k: u32) -> Expr {
    let mut d = e.clone();
    for _ in 0..k {
        d = derivative(&d);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexpr::expr::simplify;
    use crate::lexpr::parse::parse_expr;

    fn d(s: &str, k: u32) -> Expr {
        nth_derivative(&simplify(&parse_expr(s).unwrap()), k)
    }

    fn p(s: &str) -> Expr {
        simplify(&parse_expr(s).unwrap())
    }

    #[test]
    fn power_rule() {
        assert_eq!(d("x^(5/2)", 1), p("(5/2)*x^(3/2)"));
        assert_eq!(d("x^(5/2)", 3), p("(15/8)*x^(-1/2)"));
        assert_eq!(d("x^(5/2)", 0), p("x^(5/2)"));
    }

    #[test]
    fn log_second_derivative() {
        assert_eq!(d("log(x)", 2), p("-x^(-2)"));
    }

    #[test]
    fn linearity_is_structural() {
        assert_eq!(d("x^3 + log(x)", 1), add(d("x^3", 1), d("log(x)", 1)));
    }

    #[test]
    fn exp_chain() {
        assert_eq!(d("exp(2*x)", 1), p("exp(2*x)*2"));
    }
}
