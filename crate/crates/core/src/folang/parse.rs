//! Formula grammar
//!
//! ```text
//! formula := or ('->' formula)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary | quant | atom | '(' formula ')'
//! quant   := ('E'|'A') ident ('in' '[' term ',' term ']')? '.' formula
//! atom    := name '(' term (',' term)* ')' | term cmp term
//! cmp     := '<' | '=' | '<=' | '>' | '>=' | '!='
//! term    := prod (('+'|'-') prod)*
//! prod    := factor ('*' factor)*        one side of '*' must be a literal
//! factor  := int | ident | 'f' '(' term ')' | '(' term ')' | '-' factor
//! ```
//!
//! `name(...)` in atom position is a macro call, expanded while parsing.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::ast::{Formula, Term};
use super::macros::MacroTable;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    End,
}

const SYMBOLS: [&str; 19] = ["->", "<=", ">=", "!=", "(", ")", "[", "]", ",", ".", "+", "-", "*", "<", ">", "=", "!", "&", "|"];

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let b = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    'outer: while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            toks.push((Tok::Int(src[i..j].parse().unwrap()), i));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i;
            while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_' || b[j] == b'\'') {
                j += 1;
            }
            toks.push((Tok::Ident(src[i..j].to_string()), i));
            i = j;
            continue;
        }
        for s in SYMBOLS {
            if src[i..].starts_with(s) {
                toks.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        return Err(syntax(i, format!("unexpected character '{}'", &src[i..].chars().next().unwrap())));
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

/// Largest `k` among identifiers of the form `name'k`.
fn max_fresh_suffix(toks: &[(Tok, usize)]) -> u64 {
    toks.iter()
        .filter_map(|(t, _)| match t {
            Tok::Ident(s) => s.rsplit_once('\'').and_then(|(_, k)| k.parse::<u64>().ok()),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

const KEYWORDS: [&str; 4] = ["E", "A", "in", "f"];

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    macros: &'a MacroTable,
    fresh: u64,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> Error {
        match self.peek() {
            Tok::End => syntax(self.offset(), "unexpected end of input"),
            t => syntax(self.offset(), format!("unexpected token {}", show(t))),
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else if matches!(self.peek(), Tok::End) {
            Err(syntax(self.offset(), format!("expected '{s}', found end of input")))
        } else {
            Err(syntax(self.offset(), format!("expected '{s}', found {}", show(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(syntax(self.offset(), format!("expected a variable name, found {}", show(self.peek())))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut acc = self.and()?;
        while self.eat("|") {
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.eat("&") {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("!") {
            return Ok(Formula::not(self.unary()?));
        }
        if let Tok::Ident(q) = self.peek().clone() {
            if (q == "E" || q == "A") && matches!(self.peek_at(1), Tok::Ident(_)) {
                return self.quantifier(q == "E");
            }
        }
        if self.is_sym("(") {
            let save = self.pos;
            let atom_err = match self.atom() {
                Ok(a) => return Ok(a),
                Err(e) => e,
            };
            self.pos = save;
            self.bump();
            let inner = self.formula().and_then(|f| self.expect(")").map(|_| f));
            return match inner {
                Ok(f) => Ok(f),
                Err(e) => Err(farther(e, atom_err)),
            };
        }
        self.atom()
    }

    fn quantifier(&mut self, exists: bool) -> Result<Formula> {
        self.bump();
        let var = self.ident()?;
        let range = if matches!(self.peek(), Tok::Ident(s) if s == "in") {
            self.bump();
            self.expect("[")?;
            let lo = self.term()?;
            self.expect(",")?;
            let hi = self.term()?;
            self.expect("]")?;
            Some((lo, hi))
        } else {
            None
        };
        self.expect(".")?;
        let body = self.formula()?;
        Ok(if exists { Formula::exists(&var, range, body) } else { Formula::forall(&var, range, body) })
    }

    fn atom(&mut self) -> Result<Formula> {
        if let Tok::Ident(name) = self.peek().clone() {
            if name != "f" && matches!(self.peek_at(1), Tok::Sym("(")) {
                return self.macro_call(name);
            }
        }
        let lhs = self.term()?;
        let at = self.offset();
        let op = match self.bump() {
            Tok::Sym(s @ ("<" | "=" | "<=" | ">" | ">=" | "!=")) => s,
            Tok::End => return Err(syntax(at, "unexpected end of input")),
            t => return Err(syntax(at, format!("expected a comparison, found {}", show(&t)))),
        };
        let rhs = self.term()?;
        Ok(match op {
            "<" => Formula::Lt(lhs, rhs),
            "=" => Formula::Eq(lhs, rhs),
            "<=" => Formula::not(Formula::Lt(rhs, lhs)),
            ">" => Formula::Lt(rhs, lhs),
            ">=" => Formula::not(Formula::Lt(lhs, rhs)),
            _ => Formula::not(Formula::Eq(lhs, rhs)),
        })
    }

    fn macro_call(&mut self, name: String) -> Result<Formula> {
        let at = self.offset();
        self.bump();
        self.expect("(")?;
        let mut args = vec![self.term()?];
        while self.eat(",") {
            args.push(self.term()?);
        }
        self.expect(")")?;
        let fresh = &mut self.fresh;
        self.macros
            .expand(&name, &args, &mut |v: &str| {
                *fresh += 1;
                let base = v.split('\'').next().unwrap_or(v);
                format!("{base}'{fresh}")
            })
            .map_err(|e| match e {
                Error::InvalidArgument(m) => syntax(at, m),
                other => other,
            })
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.prod()?;
        loop {
            if self.eat("+") {
                acc = Term::add(acc, self.prod()?);
            } else if self.eat("-") {
                acc = Term::sub(acc, self.prod()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn prod(&mut self) -> Result<Term> {
        let mut acc = self.factor()?;
        while self.is_sym("*") {
            let at = self.offset();
            self.bump();
            let next = self.factor()?;
            acc = match (acc, next) {
                (Term::Lit(k), t) => Term::Scale(k, Box::new(t)),
                (t, Term::Lit(k)) => Term::Scale(k, Box::new(t)),
                _ => return Err(syntax(at, "multiplication needs an integer literal on one side")),
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Term> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(k) => {
                self.bump();
                Ok(Term::Lit(k))
            }
            Tok::Sym("-") => {
                self.bump();
                Ok(match self.factor()? {
                    Term::Lit(k) if !k.is_negative() => Term::Lit(-k),
                    t => Term::Scale(-BigInt::one(), Box::new(t)),
                })
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            Tok::Ident(s) if s == "f" => {
                self.bump();
                self.expect("(")?;
                let t = self.term()?;
                self.expect(")")?;
                Ok(Term::app(t))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Term::Var(s))
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            _ => Err(self.unexpected()),
        }
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(k) => format!("'{k}'"),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::End => "end of input".into(),
    }
}

fn farther(a: Error, b: Error) -> Error {
    let off = |e: &Error| match e {
        Error::Syntax { offset, .. } => *offset,
        _ => usize::MAX,
    };
    if off(&b) > off(&a) {
        b
    } else {
        a
    }
}

/// Parse with the default macro table (`d = 3`).
pub fn parse_formula(text: &str) -> Result<Formula> {
    parse_formula_with(text, &MacroTable::builtin(3)?)
}

pub fn parse_formula_with(text: &str, macros: &MacroTable) -> Result<Formula> {
    let toks = lex(text)?;
    let fresh = max_fresh_suffix(&toks);
    let mut p = Parser { toks, pos: 0, macros, fresh };
    let f = p.formula()?;
    if !matches!(p.peek(), Tok::End) {
        return Err(p.unexpected());
    }
    Ok(f)
}

/// Parse a term on its own.
pub fn parse_term(text: &str) -> Result<Term> {
    let toks = lex(text)?;
    let empty = MacroTable::empty();
    let mut p = Parser { toks, pos: 0, macros: &empty, fresh: 0 };
    let t = p.term()?;
    if !matches!(p.peek(), Tok::End) {
        return Err(p.unexpected());
    }
    Ok(t)
}

/// Reject free variables not listed in `env`.
pub fn check_closed(f: &Formula, env: &[&str]) -> Result<()> {
    let unbound: Vec<String> = f.free_vars().into_iter().filter(|v| !env.contains(&v.as_str())).collect();
    if unbound.is_empty() {
        Ok(())
    } else {
        Err(Error::Scope(format!("unbound variable(s): {}", unbound.join(", "))))
    }
}
