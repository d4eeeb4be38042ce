//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' exponent)?
//! base   := 'x' | rational | '(' expr ')' | ('exp'|'log'|'sqrt') '(' expr ')'
//! exponent := '(' '-'? rational ')' | '-'? integer
//! ```
//!
//! Rationals are `p`, `p/q` (no spaces) or finite decimals such as `2.25`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::eval::eval_exact;
use super::expr::{rat, Expr};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    X,
    Func(&'static str),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn digits_end(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    i
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, toks: Vec::new() };
        lx.lex()?;
        Ok(lx.toks)
    }

    fn lex(&mut self) -> Result<()> {
        let b = self.src.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if c.is_ascii_digit() {
                let j = digits_end(b, i);
                let int: BigInt = self.src[i..j].parse().unwrap();
                if j < b.len() && b[j] == b'.' {
                    let k = digits_end(b, j + 1);
                    if k == j + 1 {
                        return Err(syntax(j + 1, "expected digits after decimal point"));
                    }
                    let frac: BigInt = self.src[j + 1..k].parse().unwrap();
                    let scale = num_traits::pow(BigInt::from(10), k - j - 1);
                    self.toks.push((Tok::Num(BigRational::new(int * &scale + frac, scale)), start));
                    i = k;
                } else if j + 1 < b.len() && b[j] == b'/' && b[j + 1].is_ascii_digit() {
                    let k = digits_end(b, j + 1);
                    let den: BigInt = self.src[j + 1..k].parse().unwrap();
                    if den.is_zero() {
                        return Err(Error::Domain(format!("zero denominator in literal at offset {start}")));
                    }
                    self.toks.push((Tok::Num(BigRational::new(int, den)), start));
                    i = k;
                } else {
                    self.toks.push((Tok::Num(BigRational::from_integer(int)), start));
                    i = j;
                }
                continue;
            }
            if c.is_ascii_alphabetic() {
                let mut j = i;
                while j < b.len() && b[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                let tok = match &self.src[i..j] {
                    "x" => Tok::X,
                    "exp" => Tok::Func("exp"),
                    "log" => Tok::Func("log"),
                    "sqrt" => Tok::Func("sqrt"),
                    w => return Err(syntax(i, format!("unknown identifier '{w}'"))),
                };
                self.toks.push((tok, start));
                i = j;
                continue;
            }
            match c {
                b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                    self.toks.push((Tok::Op(c as char), start));
                    i += 1;
                }
                _ => {
                    let ch = self.src[i..].chars().next().unwrap();
                    return Err(syntax(i, format!("unexpected character '{ch}'")));
                }
            }
        }
        self.toks.push((Tok::End, self.src.len()));
        Ok(())
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.factor()?;
                    if !rhs.contains_var() && eval_exact(&rhs, &BigRational::zero()).is_some_and(|v| v.is_zero()) {
                        return Err(Error::Domain(format!("division by zero at offset {at}")));
                    }
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let inner = self.factor()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Mul(Box::new(Expr::int(-1)), Box::new(e)),
            });
        }
        let at = self.offset();
        let base = self.base()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let q = self.exponent()?;
        if !q.is_integer() && !base.contains_var() {
            if let Some(v) = eval_exact(&base, &BigRational::zero()) {
                if v.is_negative() {
                    return Err(Error::Domain(format!("fractional power of negative constant at offset {at}")));
                }
            }
        }
        Ok(Expr::Pow(Box::new(base), q))
    }

    fn exponent(&mut self) -> Result<BigRational> {
        let parens = *self.peek() == Tok::Op('(');
        if parens {
            self.bump();
        }
        let negative = *self.peek() == Tok::Op('-');
        if negative {
            self.bump();
        }
        let at = self.offset();
        let q = match self.bump() {
            Tok::Num(q) => q,
            _ => return Err(syntax(at, "expected rational exponent")),
        };
        if !parens && !q.is_integer() {
            return Err(syntax(at, "non-integer exponent must be parenthesized"));
        }
        if parens {
            self.expect(')')?;
        }
        Ok(if negative { -q } else { q })
    }

    fn base(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::X => Ok(Expr::Var),
            Tok::Num(q) => Ok(Expr::Const(q)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Func(name) => {
                self.expect('(')?;
                let arg_at = self.offset();
                let arg = self.expr()?;
                self.expect(')')?;
                match name {
                    "exp" => Ok(Expr::Exp(Box::new(arg))),
                    "log" => {
                        if !arg.contains_var() {
                            if let Some(v) = eval_exact(&arg, &BigRational::zero()) {
                                if !v.is_positive() {
                                    return Err(Error::Domain(format!(
                                        "log of non-positive constant at offset {arg_at}"
                                    )));
                                }
                            }
                        }
                        Ok(Expr::Log(Box::new(arg)))
                    }
                    _ => {
                        if !arg.contains_var() {
                            if let Some(v) = eval_exact(&arg, &BigRational::zero()) {
                                if v.is_negative() {
                                    return Err(Error::Domain(format!(
                                        "square root of negative constant at offset {arg_at}"
                                    )));
                                }
                            }
                        }
                        Ok(Expr::Pow(Box::new(arg), rat(1, 2)))
                    }
                }
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            t => Err(syntax(at, format!("unexpected token {t:?}"))),
        }
    }
}

/// Parse an expression into a raw (unsimplified) tree.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_node() {
        assert_eq!(parse_expr("x^(5/2)").unwrap(), Expr::Pow(Box::new(Expr::Var), rat(5, 2)));
        assert_eq!(parse_expr("x^2").unwrap(), Expr::Pow(Box::new(Expr::Var), rat(2, 1)));
        assert_eq!(parse_expr("x^(-1/3)").unwrap(), Expr::Pow(Box::new(Expr::Var), rat(-1, 3)));
    }

    #[test]
    fn trailing_operator_offset() {
        assert_eq!(parse_expr("x +").unwrap_err(), Error::Syntax { offset: 3, message: "unexpected end of input".into() });
    }

    #[test]
    fn decimals_and_literals() {
        assert_eq!(parse_expr("2.25").unwrap(), Expr::Const(rat(9, 4)));
        assert_eq!(parse_expr("(-5/2)").unwrap(), Expr::Const(rat(-5, 2)));
        assert_eq!(
            parse_expr("x/2").unwrap(),
            Expr::Div(Box::new(Expr::Var), Box::new(Expr::int(2)))
        );
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(parse_expr("log(-2)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("log(0)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("(-8)^(1/3)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("sqrt(1 - 2)"), Err(Error::Domain(_))));
        assert!(matches!(parse_expr("x/(1-1)"), Err(Error::Domain(_))));
        assert!(parse_expr("(-8)^(2)").is_ok());
    }

    #[test]
    fn bad_inputs() {
        for s in ["", "x x", "foo(x)", "x^(x)", "(x", "x^1.5", "2 $ 3"] {
            assert!(matches!(parse_expr(s), Err(Error::Syntax { .. })), "{s}");
        }
    }
}
