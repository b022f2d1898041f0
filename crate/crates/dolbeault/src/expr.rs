//! Expression strings for scalars, algebra elements and forms.
//!
//! Atoms: `z`, `z*`, `w`, `dz`, `dz*`, `dbz`, `dbz*`, `delta`, `delta^-1`,
//! `q`, `s`, `i` and integers. Operators `+ - * /` and `^`, where `^` takes an
//! integer or `(p/2)` exponent and applies to scalars (and to `delta`).
//! A `*` written directly after `z`, `dz` or `dbz` belongs to the name. Two
//! generator atoms written with no space between them (`z*z`) multiply; every
//! other product needs an explicit `*`.
//!
//! Parsing yields a [`FreeExpr`]: a noncommutative polynomial over [`Atom`]s
//! with [`Scalar`] coefficients, not yet reduced by any relations.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

/// Non-scalar atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Z,
    ZStar,
    Dz,
    DzStar,
    Dbz,
    DbzStar,
    Delta,
    DeltaInv,
}

impl Atom {
    pub fn name(self) -> &'static str {
        match self {
            Atom::Z => "z",
            Atom::ZStar => "z*",
            Atom::Dz => "dz",
            Atom::DzStar => "dz*",
            Atom::Dbz => "dbz",
            Atom::DbzStar => "dbz*",
            Atom::Delta => "delta",
            Atom::DeltaInv => "delta^-1",
        }
    }

    pub fn is_form(self) -> bool {
        matches!(self, Atom::Dz | Atom::DzStar | Atom::Dbz | Atom::DbzStar)
    }
}

/// Unreduced noncommutative polynomial over atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeExpr {
    pub terms: BTreeMap<Vec<Atom>, Scalar>,
}

impl FreeExpr {
    pub fn scalar(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        FreeExpr { terms }
    }

    pub fn atom(a: Atom) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![a], Scalar::one());
        FreeExpr { terms }
    }

    /// The scalar value when no atoms occur.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, w: Vec<Atom>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, o: &FreeExpr) -> FreeExpr {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> FreeExpr {
        let mut r = FreeExpr::default();
        for (w, v) in &self.terms {
            r.add_term(w.clone(), v * c);
        }
        r
    }

    pub fn neg(&self) -> FreeExpr {
        self.scale(&-Scalar::one())
    }

    pub fn mul(&self, o: &FreeExpr) -> FreeExpr {
        let mut r = FreeExpr::default();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                r.add_term(w, c1 * c2);
            }
        }
        r
    }
}

impl fmt::Display for FreeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            f.write_str(&format_term(c, w.iter().map(|a| a.name())))?;
        }
        Ok(())
    }
}

/// Render `c * a1 * a2 * ...` so that it parses back to the same term.
pub fn format_term<'a>(c: &Scalar, atoms: impl IntoIterator<Item = &'a str>) -> String {
    let names: Vec<&str> = atoms.into_iter().collect();
    if names.is_empty() {
        let t = c.to_string();
        return if t.contains(' ') { format!("({t})") } else { t };
    }
    let word = names.join(" * ");
    if c.is_one() {
        return word;
    }
    if (-c).is_one() {
        return format!("-{word}");
    }
    let t = c.to_string();
    if t.contains(' ') || has_top_level_slash(&t) {
        format!("({t}) * {word}")
    } else {
        format!("{t} * {word}")
    }
}

fn has_top_level_slash(t: &str) -> bool {
    let mut depth = 0i32;
    for ch in t.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
    /// whitespace directly precedes this token
    spaced: bool,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut spaced = false;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            spaced = true;
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                Tok::Num(text[start..i].parse().expect("digits"))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let mut name = text[start..i].to_string();
                if matches!(name.as_str(), "z" | "dz" | "dbz") && i < bytes.len() && bytes[i] == b'*' {
                    name.push('*');
                    i += 1;
                }
                Tok::Ident(name)
            }
            other => return err(start, format!("unexpected character '{other}'")),
        };
        out.push(Token { tok, offset: start, spaced });
        spaced = false;
    }
    out.push(Token { tok: Tok::End, offset: text.len(), spaced });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

enum Exponent {
    /// exponent `p/2`
    Halves(i64),
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<FreeExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FreeExpr, ParseError> {
        let (mut acc, mut gen_last) = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Star => {
                    self.next();
                    let (rhs, g) = self.unary()?;
                    acc = acc.mul(&rhs);
                    gen_last = g;
                }
                Tok::Slash => {
                    self.next();
                    let at = self.peek().offset;
                    let (rhs, g) = self.unary()?;
                    let Some(d) = rhs.as_scalar() else {
                        return err(at, "division by a non-scalar expression");
                    };
                    let Ok(inv) = d.inv() else {
                        return err(at, "division by zero");
                    };
                    acc = acc.scale(&inv);
                    gen_last = g;
                }
                Tok::Ident(_) | Tok::LParen if gen_last && !t.spaced => {
                    // adjacent generator atoms form a word
                    let (rhs, g) = self.power()?;
                    acc = acc.mul(&rhs);
                    gen_last = g;
                }
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                    return err(t.offset, "juxtaposition is not multiplication; write '*'");
                }
                _ => return Ok(acc),
            }
        }
    }

    /// Returns the value and whether it ended with a bare generator atom.
    fn unary(&mut self) -> Result<(FreeExpr, bool), ParseError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            let (v, g) = self.unary()?;
            return Ok((v.neg(), g));
        }
        self.power()
    }

    fn power(&mut self) -> Result<(FreeExpr, bool), ParseError> {
        let t = self.next();
        let (base, gen, scalar_sym) = match &t.tok {
            Tok::Num(n) => (FreeExpr::scalar(Scalar::from_rational(BigRational::from_integer(n.clone()))), false, None),
            Tok::Ident(name) => match name.as_str() {
                "q" => (FreeExpr::scalar(Scalar::q()), false, Some('q')),
                "s" => (FreeExpr::scalar(Scalar::s()), false, Some('s')),
                "i" => (FreeExpr::scalar(Scalar::i()), false, Some('i')),
                "z" => (FreeExpr::atom(Atom::Z), true, None),
                "z*" => (FreeExpr::atom(Atom::ZStar), true, None),
                // w = q^(-1/2) z*
                "w" => (FreeExpr::atom(Atom::ZStar).scale(&Scalar::s_pow(-1)), true, None),
                "dz" => (FreeExpr::atom(Atom::Dz), true, None),
                "dz*" => (FreeExpr::atom(Atom::DzStar), true, None),
                "dbz" => (FreeExpr::atom(Atom::Dbz), true, None),
                "dbz*" => (FreeExpr::atom(Atom::DbzStar), true, None),
                "delta" => (FreeExpr::atom(Atom::Delta), true, None),
                other => return err(t.offset, format!("unknown symbol '{other}'")),
            },
            Tok::LParen => {
                let v = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return err(close.offset, "expected ')'");
                }
                (v, false, None)
            }
            Tok::End => return err(t.offset, "unexpected end of input"),
            _ => return err(t.offset, "expected an operand"),
        };
        if self.peek().tok != Tok::Caret {
            return Ok((base, gen));
        }
        let caret = self.next();
        let Exponent::Halves(h) = self.exponent()?;
        if base == FreeExpr::atom(Atom::Delta) {
            if h % 2 != 0 {
                return err(caret.offset, "delta takes integer exponents");
            }
            let k = h / 2;
            let a = if k < 0 { Atom::DeltaInv } else { Atom::Delta };
            let mut v = FreeExpr::scalar(Scalar::one());
            for _ in 0..k.unsigned_abs() {
                v = v.mul(&FreeExpr::atom(a));
            }
            return Ok((v, true));
        }
        let Some(b) = base.as_scalar() else {
            return err(caret.offset, "'^' applies to scalars only");
        };
        let value = if h % 2 == 0 {
            b.pow(h / 2)
        } else if scalar_sym == Some('q') {
            Ok(Scalar::s_pow(h))
        } else {
            return err(caret.offset, "half-integer exponents apply to q only");
        };
        match value {
            Ok(v) => Ok((FreeExpr::scalar(v), false)),
            Err(_) => err(caret.offset, "zero raised to a negative power"),
        }
    }

    /// Exponent after `^`, returned in halves.
    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Num(n) => Ok(Exponent::Halves(2 * small(&n, t.offset)?)),
            Tok::Minus => {
                let n = self.next();
                match n.tok {
                    Tok::Num(v) => Ok(Exponent::Halves(-2 * small(&v, n.offset)?)),
                    _ => err(n.offset, "expected an integer exponent"),
                }
            }
            Tok::LParen => {
                let mut sign = 1;
                if self.peek().tok == Tok::Minus {
                    self.next();
                    sign = -1;
                }
                let n = self.next();
                let Tok::Num(p) = n.tok else {
                    return err(n.offset, "expected an integer exponent");
                };
                let p = sign * small(&p, n.offset)?;
                let t2 = self.next();
                match t2.tok {
                    Tok::RParen => Ok(Exponent::Halves(2 * p)),
                    Tok::Slash => {
                        let d = self.next();
                        let Tok::Num(dv) = d.tok else {
                            return err(d.offset, "expected denominator 2");
                        };
                        let dv = small(&dv, d.offset)?;
                        let close = self.next();
                        if close.tok != Tok::RParen {
                            return err(close.offset, "expected ')'");
                        }
                        match dv {
                            1 => Ok(Exponent::Halves(2 * p)),
                            2 => Ok(Exponent::Halves(p)),
                            _ => err(d.offset, "exponent denominator must be 1 or 2"),
                        }
                    }
                    _ => err(t2.offset, "expected ')' or '/'"),
                }
            }
            _ => err(t.offset, "expected an exponent"),
        }
    }
}

fn small(n: &BigInt, offset: usize) -> Result<i64, ParseError> {
    match n.to_i64() {
        Some(v) if v.abs() <= 10_000 => Ok(v),
        _ => err(offset, "exponent too large"),
    }
}

/// Parse an expression over the full atom alphabet.
pub fn parse_free(text: &str) -> Result<FreeExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let v = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return err(t.offset, "unexpected trailing input");
    }
    Ok(v)
}

/// Parse a scalar expression in `s`, `q`, `i` and integers.
pub fn parse_scalar(text: &str) -> Result<Scalar, ParseError> {
    let v = parse_free(text)?;
    match v.as_scalar() {
        Some(s) => Ok(s),
        None => err(0, "expected a scalar expression"),
    }
}

/// Rational number from `a` or `a/b` text (used for group metric tables).
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let s = parse_scalar(text)?;
    match s.as_constant() {
        Some(g) if num_traits::Zero::is_zero(&g.im) => Ok(g.re),
        _ => err(0, "expected a rational number"),
    }
}

impl FreeExpr {
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Scalar::is_zero)
    }

    /// Largest number of atoms in any term.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }
}

impl From<Scalar> for FreeExpr {
    fn from(c: Scalar) -> Self {
        FreeExpr::scalar(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_powers() {
        assert_eq!(parse_scalar("q^(3/2)").unwrap(), Scalar::s_pow(3));
        assert_eq!(parse_scalar("q^(-1/2)").unwrap(), Scalar::s_pow(-1));
        assert_eq!(parse_scalar("s^3").unwrap(), Scalar::s_pow(3));
        assert_eq!(parse_scalar("q^-2").unwrap(), Scalar::s_pow(-4));
    }

    #[test]
    fn generator_words() {
        let e = parse_free("z*z").unwrap();
        assert_eq!(e, FreeExpr::atom(Atom::ZStar).mul(&FreeExpr::atom(Atom::Z)));
        let e = parse_free("z * z*").unwrap();
        assert_eq!(e, FreeExpr::atom(Atom::Z).mul(&FreeExpr::atom(Atom::ZStar)));
        let e = parse_free("q^(1/2) * w").unwrap();
        assert_eq!(e, FreeExpr::atom(Atom::ZStar));
    }

    #[test]
    fn open_paren_after_generator() {
        let e = parse_free("z*(").unwrap_err();
        assert_eq!(e.offset, 3);
    }

    #[test]
    fn explicit_product_required() {
        assert!(parse_free("2 q").is_err());
        assert!(parse_free("2q").is_err());
        assert!(parse_free("q z").is_err());
    }

    #[test]
    fn unknown_symbol() {
        let e = parse_free("x + 1").unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(e.message.contains("unknown symbol"));
    }

    #[test]
    fn caret_on_generator_rejected() {
        assert!(parse_free("z^2").is_err());
        let d = parse_free("delta^-1").unwrap();
        assert_eq!(d, FreeExpr::atom(Atom::DeltaInv));
    }
}
