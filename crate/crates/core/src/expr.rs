//! Expression trees for deformation functions f(p).
//!
//! Grammar (LL(1), standard precedence `^` > unary `-` > `*` `/` > `+` `-`):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | atom ('^' uint)?
//! atom   := number | ident | '(' expr ')'
//! ```
//!
//! The identifier `p` is the momentum variable; every other identifier is a
//! named parameter bound later.  Printing an expression and re-parsing it
//! yields a structurally equal tree.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedExpr {
    Num(f64),
    /// The momentum variable `p`.
    Var,
    Param(String),
    Neg(Box<ParsedExpr>),
    Add(Box<ParsedExpr>, Box<ParsedExpr>),
    Sub(Box<ParsedExpr>, Box<ParsedExpr>),
    Mul(Box<ParsedExpr>, Box<ParsedExpr>),
    Div(Box<ParsedExpr>, Box<ParsedExpr>),
    Pow(Box<ParsedExpr>, u32),
}

use ParsedExpr::*;

// ---------------------------------------------------------------------------
// lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool), // value, lexeme-was-plain-digits
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut plain = true;
                if i < bytes.len() && bytes[i] == b'.' {
                    plain = false;
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(Error::Parse {
                            msg: "expected digits after decimal point".into(),
                            offset: i,
                        });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    // exponent only if followed by (signed) digits; otherwise
                    // the 'e' starts an identifier
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        plain = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| Error::Parse {
                    msg: format!("invalid number `{lit}`"),
                    offset: start,
                })?;
                toks.push((Tok::Num(value, plain), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Parse {
                    msg: format!("unexpected character `{c}`"),
                    offset: i,
                })
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ParsedExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ParsedExpr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ParsedExpr> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            let caret_off = self.offset();
            self.bump();
            let off = self.offset();
            match self.bump() {
                Some(Tok::Num(v, plain)) => {
                    if !plain || v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                        return Err(Error::Parse {
                            msg: "exponent must be an unsigned integer".into(),
                            offset: off,
                        });
                    }
                    return Ok(Pow(Box::new(base), v as u32));
                }
                _ => {
                    return Err(Error::Parse {
                        msg: "expected unsigned integer exponent after `^`".into(),
                        offset: caret_off,
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ParsedExpr> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v, _)) => Ok(Num(v)),
            Some(Tok::Ident(name)) => {
                if name == "p" {
                    Ok(Var)
                } else {
                    Ok(Param(name))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse { msg: "expected `)`".into(), offset: off }),
                }
            }
            Some(t) => Err(Error::Parse { msg: format!("unexpected token {t:?}"), offset: off }),
            None => Err(Error::Parse { msg: "unexpected end of input".into(), offset: off }),
        }
    }
}

impl ParsedExpr {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Parse { msg: "empty expression".into(), offset: 0 });
        }
        let toks = lex(text)?;
        let mut parser = Parser { toks: &toks, pos: 0, end: text.len() };
        let e = parser.expr()?;
        if parser.pos != toks.len() {
            return Err(Error::Parse {
                msg: "trailing input after expression".into(),
                offset: parser.offset(),
            });
        }
        Ok(e)
    }

    /// Evaluate with parameters taken from `params`; the variable `p` is `p`.
    pub fn eval(&self, p: f64, params: &BTreeMap<String, f64>) -> Result<f64> {
        Ok(match self {
            Num(v) => *v,
            Var => p,
            Param(name) => *params
                .get(name)
                .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            Neg(e) => -e.eval(p, params)?,
            Add(a, b) => a.eval(p, params)? + b.eval(p, params)?,
            Sub(a, b) => a.eval(p, params)? - b.eval(p, params)?,
            Mul(a, b) => a.eval(p, params)? * b.eval(p, params)?,
            Div(a, b) => a.eval(p, params)? / b.eval(p, params)?,
            Pow(a, k) => a.eval(p, params)?.powi(*k as i32),
        })
    }

    /// Inline all parameters, leaving a tree over `p` alone.
    pub fn substitute(&self, params: &BTreeMap<String, f64>) -> Result<Self> {
        Ok(match self {
            Num(v) => Num(*v),
            Var => Var,
            Param(name) => {
                let v = *params
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?;
                make_const(v)
            }
            Neg(e) => Neg(Box::new(e.substitute(params)?)),
            Add(a, b) => Add(Box::new(a.substitute(params)?), Box::new(b.substitute(params)?)),
            Sub(a, b) => Sub(Box::new(a.substitute(params)?), Box::new(b.substitute(params)?)),
            Mul(a, b) => Mul(Box::new(a.substitute(params)?), Box::new(b.substitute(params)?)),
            Div(a, b) => Div(Box::new(a.substitute(params)?), Box::new(b.substitute(params)?)),
            Pow(a, k) => Pow(Box::new(a.substitute(params)?), *k),
        })
    }

    /// Fast evaluation for a tree with every parameter already inlined.
    pub fn eval_bound(&self, p: f64) -> f64 {
        match self {
            Num(v) => *v,
            Var => p,
            Param(_) => f64::NAN,
            Neg(e) => -e.eval_bound(p),
            Add(a, b) => a.eval_bound(p) + b.eval_bound(p),
            Sub(a, b) => a.eval_bound(p) - b.eval_bound(p),
            Mul(a, b) => a.eval_bound(p) * b.eval_bound(p),
            Div(a, b) => a.eval_bound(p) / b.eval_bound(p),
            Pow(a, k) => a.eval_bound(p).powi(*k as i32),
        }
    }

    /// Symbolic derivative with respect to `p`.
    pub fn derivative(&self) -> Self {
        match self {
            Num(_) | Param(_) => Num(0.0),
            Var => Num(1.0),
            Neg(e) => neg(e.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                pow((**b).clone(), 2),
            ),
            Pow(a, k) => mul(
                mul(make_const(*k as f64), pow((**a).clone(), k - 1)),
                a.derivative(),
            ),
        }
    }

    pub fn depends_on_p(&self) -> bool {
        match self {
            Num(_) | Param(_) => false,
            Var => true,
            Neg(e) => e.depends_on_p(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.depends_on_p() || b.depends_on_p()
            }
            Pow(a, _) => a.depends_on_p(),
        }
    }

    /// Whether the tree is a polynomial in `p` (denominators must be p-free).
    pub fn is_polynomial_in_p(&self) -> bool {
        match self {
            Num(_) | Param(_) | Var => true,
            Neg(e) => e.is_polynomial_in_p(),
            Add(a, b) | Sub(a, b) | Mul(a, b) => {
                a.is_polynomial_in_p() && b.is_polynomial_in_p()
            }
            Div(a, b) => a.is_polynomial_in_p() && !b.depends_on_p(),
            Pow(a, _) => a.is_polynomial_in_p(),
        }
    }

    /// Parameter names appearing in the tree.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Num(_) | Var => {}
            Param(name) => out.push(name.clone()),
            Neg(e) => e.collect_params(out),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Pow(a, _) => a.collect_params(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            Num(_) | Var | Param(_) => 5,
        }
    }
}

// ---------------------------------------------------------------------------
// simplifying constructors (used by `derivative`)

fn const_value(e: &ParsedExpr) -> Option<f64> {
    match e {
        Num(v) => Some(*v),
        Neg(inner) => match &**inner {
            Num(v) => Some(-v),
            _ => None,
        },
        _ => None,
    }
}

fn make_const(v: f64) -> ParsedExpr {
    if v < 0.0 {
        Neg(Box::new(Num(-v)))
    } else {
        // normalize -0.0
        Num(v + 0.0)
    }
}

fn add(a: ParsedExpr, b: ParsedExpr) -> ParsedExpr {
    match (const_value(&a), const_value(&b)) {
        (Some(x), Some(y)) => make_const(x + y),
        (Some(x), None) if x == 0.0 => b,
        (None, Some(y)) if y == 0.0 => a,
        _ => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: ParsedExpr, b: ParsedExpr) -> ParsedExpr {
    match (const_value(&a), const_value(&b)) {
        (Some(x), Some(y)) => make_const(x - y),
        (None, Some(y)) if y == 0.0 => a,
        (Some(x), None) if x == 0.0 => neg(b),
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: ParsedExpr, b: ParsedExpr) -> ParsedExpr {
    match (const_value(&a), const_value(&b)) {
        (Some(x), Some(y)) => make_const(x * y),
        (Some(x), _) if x == 0.0 => Num(0.0),
        (_, Some(y)) if y == 0.0 => Num(0.0),
        (Some(x), None) if x == 1.0 => b,
        (None, Some(y)) if y == 1.0 => a,
        _ => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: ParsedExpr, b: ParsedExpr) -> ParsedExpr {
    match (const_value(&a), const_value(&b)) {
        (Some(x), Some(y)) if y != 0.0 => make_const(x / y),
        (Some(x), None) if x == 0.0 => Num(0.0),
        (None, Some(y)) if y == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: ParsedExpr) -> ParsedExpr {
    match a {
        Neg(inner) => *inner,
        Num(v) if v == 0.0 => Num(0.0),
        other => Neg(Box::new(other)),
    }
}

fn pow(a: ParsedExpr, k: u32) -> ParsedExpr {
    match k {
        0 => Num(1.0),
        1 => a,
        _ => match const_value(&a) {
            Some(x) => make_const(x.powi(k as i32)),
            None => Pow(Box::new(a), k),
        },
    }
}

// ---------------------------------------------------------------------------
// printing

impl fmt::Display for ParsedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // child printed with parens when its precedence is at or below the
        // binding level required by the parent position
        fn child(f: &mut fmt::Formatter<'_>, e: &ParsedExpr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Num(v) => write!(f, "{v}"),
            Var => write!(f, "p"),
            Param(name) => write!(f, "{name}"),
            Neg(e) => {
                write!(f, "-")?;
                child(f, e, 3)
            }
            Add(a, b) => {
                child(f, a, 1)?;
                write!(f, " + ")?;
                child(f, b, 2)
            }
            Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " - ")?;
                child(f, b, 2)
            }
            Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, " * ")?;
                child(f, b, 3)
            }
            Div(a, b) => {
                child(f, a, 2)?;
                write!(f, " / ")?;
                child(f, b, 3)
            }
            Pow(a, k) => {
                child(f, a, 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn evaluates_the_standard_deformation() {
        let e = ParsedExpr::parse("1 + beta*p^2").unwrap();
        let v = e.eval(2.0, &params(&[("beta", 0.1)])).unwrap();
        assert!((v - 1.4).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_standard_deformation() {
        let e = ParsedExpr::parse("1 + beta*p^2").unwrap();
        let d = e.derivative();
        let v = d.eval(3.0, &params(&[("beta", 0.1)])).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
    }

    #[test]
    fn unbound_parameter_is_reported() {
        let e = ParsedExpr::parse("1 + beta*p^2").unwrap();
        match e.eval(1.0, &BTreeMap::new()) {
            Err(Error::UnboundParameter(name)) => assert_eq!(name, "beta"),
            other => panic!("expected unbound parameter, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match ParsedExpr::parse("1 + *p") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match ParsedExpr::parse("1 + (p") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
        match ParsedExpr::parse("p^q") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
        match ParsedExpr::parse("p^2.5") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unary_minus_binds_below_power() {
        // ^ > unary -  =>  -p^2 == -(p^2)
        let e = ParsedExpr::parse("-p^2").unwrap();
        assert!((e.eval(3.0, &BTreeMap::new()).unwrap() + 9.0).abs() < 1e-15);
        let g = ParsedExpr::parse("(-p)^2").unwrap();
        assert!((g.eval(3.0, &BTreeMap::new()).unwrap() - 9.0).abs() < 1e-15);
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "1 + beta*p^2",
            "1 - p / (2 + p^2)",
            "-(p + 1)^2 * alpha",
            "1 + 0.25*p^2 + gamma*p^4",
            "2e-3 * p",
            "p^2 / (1 + p^2) + 1",
            "--p + - p",
        ] {
            let e = ParsedExpr::parse(text).unwrap();
            let printed = e.to_string();
            let reparsed = ParsedExpr::parse(&printed).unwrap();
            assert_eq!(e, reparsed, "round-trip failed for `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn derivative_round_trips_through_printer() {
        let e = ParsedExpr::parse("1 + beta*p^2 + p^4 / (1 + p^2)").unwrap();
        let d = e.derivative();
        let reparsed = ParsedExpr::parse(&d.to_string()).unwrap();
        assert_eq!(d, reparsed);
    }

    #[test]
    fn polynomial_detection() {
        assert!(ParsedExpr::parse("1 + beta*p^2").unwrap().is_polynomial_in_p());
        assert!(ParsedExpr::parse("p^3 / beta").unwrap().is_polynomial_in_p());
        assert!(!ParsedExpr::parse("1 / (1 + p^2)").unwrap().is_polynomial_in_p());
    }

    #[test]
    fn scientific_notation_and_identifier_boundary() {
        let e = ParsedExpr::parse("1e-3 + p").unwrap();
        assert!((e.eval(0.0, &BTreeMap::new()).unwrap() - 1e-3).abs() < 1e-18);
        // `2e` is the number 2 followed by identifier `e`
        let g = ParsedExpr::parse("2e").unwrap_err();
        match g {
            Error::Parse { .. } => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
