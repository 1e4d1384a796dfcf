//! Recursive-descent parser for the `.pde` input language.
//!
//! Grammar (statements end with `;`, `#` starts a line comment):
//!
//! ```text
//! system   := stmt*
//! stmt     := "vars" name ("," name)* ";"
//!           | "funcs" name "(" name ("," name)* ")" ("," ...)* ";"
//!           | "eq" expr ("=" expr)? ";"
//!           | "ineq" expr ";"
//! expr     := term (("+"|"-") term)*
//! term     := unary (("*"|"/") unary)*
//! unary    := "-" unary | power
//! power    := atom ("^" uint)?
//! atom     := uint | uint "/" uint (as part of term) | name
//!           | "diff" "(" name ("," name ("$" uint)?)+ ")" | "(" expr ")"
//! ```
//!
//! `diff(u,x,x,y)` and `diff(u,x$2,y)` both denote the same derivative.
//! Operator precedence is `^` over unary `-` over `*`/`/` over `+`/`-`.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::traits::One;

use crate::diffpoly::{Derivative, DiffPolynomial, Rational, RationalExpr, SystemSignature};
use crate::error::{Error, Result};
use crate::ranking::Ranking;

/// A parsed textual system: each equation is a differential polynomial,
/// implicitly `= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSource {
    pub signature: SystemSignature,
    pub equations: Vec<DiffPolynomial>,
    pub inequations: Vec<DiffPolynomial>,
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(char),
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Int(n) => write!(f, "`{}`", n),
            Tok::Punct(c) => write!(f, "`{}`", c),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let (l0, c0) = (line, col);
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push((Tok::Ident(s), l0, c0));
        } else if c.is_ascii_digit() {
            let (l0, c0) = (line, col);
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push((Tok::Int(s.parse().unwrap()), l0, c0));
        } else if "+-*/^()=,;$".contains(c) {
            toks.push((Tok::Punct(c), line, col));
            chars.next();
            col += 1;
        } else {
            return Err(Error::Syntax {
                line,
                col,
                expected: "a token".into(),
                found: format!("`{}`", c),
            });
        }
    }
    toks.push((Tok::Eof, line, col));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> Error {
        let (line, col) = self.loc();
        Error::Syntax {
            line,
            col,
            expected: expected.into(),
            found: self.peek().to_string(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.peek() == &Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            Err(self.err(&format!("`{}`", c)))
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.err("an identifier")),
        }
    }

    fn expect_uint(&mut self) -> Result<BigInt> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            _ => Err(self.err("a nonnegative integer")),
        }
    }
}

/// Parse a `.pde` system source.
pub fn parse_system(text: &str) -> Result<SystemSource> {
    let mut lx = lex(text)?;
    let mut indep: Option<Vec<String>> = None;
    let mut dep: Vec<String> = Vec::new();
    let mut equations: Vec<DiffPolynomial> = Vec::new();
    let mut inequations: Vec<DiffPolynomial> = Vec::new();
    let mut options = BTreeMap::new();
    loop {
        match lx.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) => match kw.as_str() {
                "vars" => {
                    lx.next();
                    if indep.is_some() {
                        return Err(lx.err("a single `vars` statement"));
                    }
                    let mut names = vec![lx.expect_ident()?];
                    while lx.peek() == &Tok::Punct(',') {
                        lx.next();
                        names.push(lx.expect_ident()?);
                    }
                    lx.expect_punct(';')?;
                    if has_dup(&names) {
                        return Err(Error::Invalid("duplicate variable name".into()));
                    }
                    indep = Some(names);
                }
                "funcs" => {
                    lx.next();
                    let vars = indep
                        .as_ref()
                        .ok_or_else(|| lx.err("`vars` before `funcs`"))?
                        .clone();
                    loop {
                        let name = lx.expect_ident()?;
                        lx.expect_punct('(')?;
                        let mut args = vec![lx.expect_ident()?];
                        while lx.peek() == &Tok::Punct(',') {
                            lx.next();
                            args.push(lx.expect_ident()?);
                        }
                        lx.expect_punct(')')?;
                        if args != vars {
                            return Err(Error::Invalid(format!(
                                "function `{}` must be declared on all independent variables in order",
                                name
                            )));
                        }
                        dep.push(name);
                        if lx.peek() == &Tok::Punct(',') {
                            lx.next();
                        } else {
                            break;
                        }
                    }
                    lx.expect_punct(';')?;
                    if has_dup(&dep) || dep.iter().any(|d| indep.as_ref().unwrap().contains(d)) {
                        return Err(Error::Invalid("duplicate symbol name".into()));
                    }
                }
                "eq" | "ineq" => {
                    let is_eq = kw == "eq";
                    lx.next();
                    let sig = SystemSignature::new(
                        indep
                            .as_ref()
                            .ok_or_else(|| lx.err("`vars` before equations"))?
                            .clone(),
                        dep.clone(),
                    );
                    let lhs = parse_expr(&mut lx, &sig)?;
                    let expr = if is_eq && lx.peek() == &Tok::Punct('=') {
                        lx.next();
                        let rhs = parse_expr(&mut lx, &sig)?;
                        lhs.sub(&rhs)
                    } else {
                        lhs
                    };
                    lx.expect_punct(';')?;
                    let ranking = Ranking::grlex(sig.n_indep(), sig.n_dep());
                    let p = ranking.canonicalize_equation(&expr.num);
                    if is_eq {
                        equations.push(p);
                    } else {
                        inequations.push(p);
                    }
                }
                "option" => {
                    lx.next();
                    let key = lx.expect_ident()?;
                    let val = match lx.next() {
                        Tok::Ident(s) => s,
                        Tok::Int(n) => n.to_string(),
                        _ => return Err(lx.err("an option value")),
                    };
                    lx.expect_punct(';')?;
                    options.insert(key, val);
                }
                _ => return Err(lx.err("`vars`, `funcs`, `eq`, `ineq` or `option`")),
            },
            _ => return Err(lx.err("a statement keyword")),
        }
    }
    let signature = SystemSignature::new(
        indep.ok_or(Error::Invalid("missing `vars` statement".into()))?,
        dep,
    );
    if equations.is_empty() {
        return Err(Error::Invalid("system contains no equations".into()));
    }
    Ok(SystemSource {
        signature,
        equations,
        inequations,
        options,
    })
}

fn has_dup(names: &[String]) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    names.iter().any(|n| !seen.insert(n))
}

/// Parse a standalone expression over a known signature.
pub fn parse_expr_str(text: &str, sig: &SystemSignature) -> Result<RationalExpr> {
    let mut lx = lex(text)?;
    let e = parse_expr(&mut lx, sig)?;
    match lx.peek() {
        Tok::Eof => Ok(e),
        _ => Err(lx.err("end of expression")),
    }
}

fn parse_expr(lx: &mut Lexer, sig: &SystemSignature) -> Result<RationalExpr> {
    let mut acc = parse_term(lx, sig)?;
    loop {
        match lx.peek() {
            Tok::Punct('+') => {
                lx.next();
                let t = parse_term(lx, sig)?;
                acc = acc.add(&t);
            }
            Tok::Punct('-') => {
                lx.next();
                let t = parse_term(lx, sig)?;
                acc = acc.sub(&t);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(lx: &mut Lexer, sig: &SystemSignature) -> Result<RationalExpr> {
    let mut acc = parse_unary(lx, sig)?;
    loop {
        match lx.peek() {
            Tok::Punct('*') => {
                lx.next();
                let t = parse_unary(lx, sig)?;
                acc = acc.mul(&t);
            }
            Tok::Punct('/') => {
                lx.next();
                let t = parse_unary(lx, sig)?;
                acc = acc.div(&t)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_unary(lx: &mut Lexer, sig: &SystemSignature) -> Result<RationalExpr> {
    if lx.peek() == &Tok::Punct('-') {
        lx.next();
        let e = parse_unary(lx, sig)?;
        Ok(e.neg())
    } else {
        parse_power(lx, sig)
    }
}

fn parse_power(lx: &mut Lexer, sig: &SystemSignature) -> Result<RationalExpr> {
    let base = parse_atom(lx, sig)?;
    if lx.peek() == &Tok::Punct('^') {
        lx.next();
        let n = lx.expect_uint()?;
        let n: u32 = n
            .try_into()
            .map_err(|_| Error::Invalid("exponent too large".into()))?;
        Ok(base.pow(n))
    } else {
        Ok(base)
    }
}

fn parse_atom(lx: &mut Lexer, sig: &SystemSignature) -> Result<RationalExpr> {
    match lx.peek().clone() {
        Tok::Int(n) => {
            lx.next();
            Ok(RationalExpr::from_poly(DiffPolynomial::constant(
                Rational::from(n),
            )))
        }
        Tok::Punct('(') => {
            lx.next();
            let e = parse_expr(lx, sig)?;
            lx.expect_punct(')')?;
            Ok(e)
        }
        Tok::Ident(name) if name == "diff" => {
            lx.next();
            lx.expect_punct('(')?;
            let func = lx.expect_ident()?;
            let dep = match sig.dep_index(&func) {
                Some(d) => d,
                None => {
                    return Err(if sig.indep_index(&func).is_some() {
                        Error::BadArity(func)
                    } else {
                        Error::UnknownSymbol(func)
                    });
                }
            };
            let mut idx = vec![0u32; sig.n_indep()];
            lx.expect_punct(',')?;
            loop {
                let var = lx.expect_ident()?;
                let i = sig
                    .indep_index(&var)
                    .ok_or(Error::UnknownSymbol(var.clone()))?;
                let count: u32 = if lx.peek() == &Tok::Punct('$') {
                    lx.next();
                    lx.expect_uint()?
                        .try_into()
                        .map_err(|_| Error::Invalid("repetition count too large".into()))?
                } else {
                    1
                };
                idx[i] += count;
                if lx.peek() == &Tok::Punct(',') {
                    lx.next();
                } else {
                    break;
                }
            }
            lx.expect_punct(')')?;
            Ok(RationalExpr::from_poly(DiffPolynomial::from_derivative(
                Derivative::new(dep, idx),
            )))
        }
        Tok::Ident(name) => {
            lx.next();
            if let Some(d) = sig.dep_index(&name) {
                Ok(RationalExpr::from_poly(DiffPolynomial::from_derivative(
                    Derivative::base(d, sig.n_indep()),
                )))
            } else if let Some(i) = sig.indep_index(&name) {
                Ok(RationalExpr::from_poly(DiffPolynomial::from_indep(i)))
            } else {
                Err(Error::UnknownSymbol(name))
            }
        }
        _ => Err(lx.err("an expression")),
    }
}

/// Parse a comma-separated assignment list such as `u=2,u_x=1` with
/// floating-point values.
pub fn parse_f64_assignments(text: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected name=value in `{}`", part)))?;
        let v: f64 = eval_number(v.trim())?;
        out.push((k.trim().to_string(), v));
    }
    Ok(out)
}

fn eval_number(s: &str) -> Result<f64> {
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad number `{}`", s)))?;
        let d: f64 = d
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad number `{}`", s)))?;
        return Ok(n / d);
    }
    s.parse()
        .map_err(|_| Error::Invalid(format!("bad number `{}`", s)))
}

/// Parse a comma-separated assignment list with exact rational values,
/// accepting `p` and `p/q` forms.
pub fn parse_rational_assignments(text: &str) -> Result<Vec<(String, Rational)>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected name=value in `{}`", part)))?;
        out.push((k.trim().to_string(), parse_rational(v.trim())?));
    }
    Ok(out)
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let (ns, ds) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, ""),
    };
    let n: BigInt = ns
        .parse()
        .map_err(|_| Error::Invalid(format!("bad rational `{}`", s)))?;
    let d: BigInt = if ds.is_empty() {
        BigInt::one()
    } else {
        ds.parse()
            .map_err(|_| Error::Invalid(format!("bad rational `{}`", s)))?
    };
    if d == BigInt::from(0) {
        return Err(Error::Invalid(format!("zero denominator in `{}`", s)));
    }
    Ok(Rational::new(n, d))
}
