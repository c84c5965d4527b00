//! Parsing for scalar expressions, monomials, states, and algebra files.
//!
//! Grammar for scalars: `expr := term (('+'|'-') term)*`,
//! `term := factor (('*'|'/') factor)*`, `factor := int | ident | '(' expr ')'
//! | '-' factor | factor '^' uint`, where the only legal identifier is the
//! algebra's field parameter. Monomials are `name(-depth)... |0>` and states
//! are `+`-joined `scalar*monomial` terms (a bare monomial means scalar 1).
//! Every renderer in the crate emits text this module parses back exactly.

use crate::algebra::{AlgebraSpec, FieldDesc};
use crate::pbw::{GeneratorId, PbwMonomial, State};
use crate::scalar::{rat_int, BaseScalar, Poly, Rat};
use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn at(pos: usize, text: &str, msg: impl Into<String>) -> Self {
        let mut line = 1;
        let mut col = 1;
        for (i, ch) in text.char_indices() {
            if i >= pos {
                break;
            }
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn shift_line(mut self, delta: usize) -> Self {
        self.line += delta;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Vacuum,
}

struct Lexer<'t> {
    text: &'t str,
    toks: Vec<(usize, Tok)>,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '|' => {
                if text[i..].starts_with("|0>") {
                    toks.push((i, Tok::Vacuum));
                    i += 3;
                } else {
                    return Err(ParseError::at(i, text, "expected `|0>`"));
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().unwrap();
                toks.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => return Err(ParseError::at(i, text, format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

struct ScalarParser<'t> {
    lx: Lexer<'t>,
    pos: usize,
    field: FieldDesc,
}

impl<'t> ScalarParser<'t> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let pos = self
            .lx
            .toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.lx.text.len());
        ParseError::at(pos, self.lx.text, msg)
    }

    fn expr(&mut self) -> Result<BaseScalar, ParseError> {
        let mut acc = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BaseScalar, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc
                        .try_mul(&self.factor()?)
                        .map_err(|e| self.err(e.to_string()))?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let d = self.factor()?;
                    acc = acc.div(&d).map_err(|e| self.err(e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<BaseScalar, ParseError> {
        let base = match self.bump() {
            Some(Tok::Int(n)) => BaseScalar::from_rat(Rat::from(n)),
            Some(Tok::Minus) => return Ok(self.factor()?.neg()),
            Some(Tok::Ident(name)) => match &self.field.param {
                Some(p) if **p == name => BaseScalar::param(&name),
                _ => return Err(self.err(format!("unknown symbol `{name}`"))),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => e,
                    _ => return Err(self.err("expected `)`")),
                }
            }
            other => return Err(self.err(format!("expected a scalar, found {other:?}"))),
        };
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let k: u32 = n
                        .try_into()
                        .map_err(|_| self.err("exponent out of range"))?;
                    let mut acc = BaseScalar::one();
                    for _ in 0..k {
                        acc = acc.mul(&base);
                    }
                    return Ok(acc);
                }
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }
}

/// Parses a scalar literal in the given field.
pub fn parse_scalar(text: &str, field: &FieldDesc) -> Result<BaseScalar, ParseError> {
    let toks = lex(text)?;
    let mut p = ScalarParser {
        lx: Lexer { text, toks },
        pos: 0,
        field: field.clone(),
    };
    let v = p.expr()?;
    if p.pos != p.lx.toks.len() {
        return Err(p.err("trailing input after scalar"));
    }
    Ok(v)
}

/// Parses a plain rational literal like `-22/5`.
pub fn parse_rational(text: &str) -> Result<Rat, ParseError> {
    let v = parse_scalar(text, &FieldDesc::rational())?;
    v.as_rat().cloned().ok_or(ParseError {
        line: 1,
        col: 1,
        msg: "expected a rational".into(),
    })
}

struct StateParser<'t> {
    text: &'t str,
    toks: Vec<(usize, Tok)>,
}

/// Parses a monomial `a(-3)b(-1)|0>` against the algebra's generator names.
pub fn parse_monomial(text: &str, spec: &AlgebraSpec) -> Result<PbwMonomial, ParseError> {
    let toks = lex(text)?;
    let sp = StateParser { text, toks };
    let (m, next) = sp.monomial(0, spec)?;
    if next != sp.toks.len() {
        return Err(ParseError::at(
            sp.toks.get(next).map(|(p, _)| *p).unwrap_or(text.len()),
            text,
            "trailing input after monomial",
        ));
    }
    Ok(m)
}

impl<'t> StateParser<'t> {
    fn monomial(
        &self,
        mut pos: usize,
        spec: &AlgebraSpec,
    ) -> Result<(PbwMonomial, usize), ParseError> {
        let mut factors = Vec::new();
        loop {
            match self.toks.get(pos) {
                Some((_, Tok::Vacuum)) => {
                    pos += 1;
                    let fs: Vec<(GeneratorId, u32)> = factors;
                    if !fs
                        .windows(2)
                        .all(|w| (w[0].0, -(w[0].1 as i64)) <= (w[1].0, -(w[1].1 as i64)))
                    {
                        return Err(self.err_at(pos.saturating_sub(1), "monomial not canonical"));
                    }
                    return Ok((
                        PbwMonomial::from_canonical(fs, spec.gen_weights()),
                        pos,
                    ));
                }
                Some((p, Tok::Ident(name))) => {
                    let g = spec
                        .gen_by_name(name)
                        .ok_or_else(|| ParseError::at(*p, self.text, format!("unknown generator `{name}`")))?;
                    pos += 1;
                    if !matches!(self.toks.get(pos), Some((_, Tok::LParen))) {
                        return Err(self.err_at(pos, "expected `(`"));
                    }
                    pos += 1;
                    if !matches!(self.toks.get(pos), Some((_, Tok::Minus))) {
                        return Err(self.err_at(pos, "expected a negative depth"));
                    }
                    pos += 1;
                    let depth: u32 = match self.toks.get(pos) {
                        Some((_, Tok::Int(n))) => n
                            .try_into()
                            .map_err(|_| self.err_at(pos, "depth out of range"))?,
                        _ => return Err(self.err_at(pos, "expected an integer depth")),
                    };
                    if depth == 0 {
                        return Err(self.err_at(pos, "depth must be positive"));
                    }
                    pos += 1;
                    if !matches!(self.toks.get(pos), Some((_, Tok::RParen))) {
                        return Err(self.err_at(pos, "expected `)`"));
                    }
                    pos += 1;
                    factors.push((g, depth));
                }
                _ => return Err(self.err_at(pos, "expected a generator name or `|0>`")),
            }
        }
    }

    fn err_at(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        let p = self
            .toks
            .get(pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.text.len());
        ParseError::at(p, self.text, msg)
    }
}

/// Parses a state: `0`, or `+`-separated `scalar*monomial` / bare-monomial
/// terms. The split between scalar and monomial is the last top-level `*`.
pub fn parse_state(text: &str, spec: &AlgebraSpec) -> Result<State<BaseScalar>, ParseError> {
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(State::zero());
    }
    let mut out = State::zero();
    for (piece, offset) in split_top_level_plus(trimmed) {
        let piece_trim = piece.trim();
        if piece_trim.is_empty() {
            return Err(ParseError::at(offset, trimmed, "empty term"));
        }
        let (scal, mono) = match split_last_top_level_star(piece_trim) {
            Some((s, m)) => (Some(s), m),
            None => (None, piece_trim),
        };
        let coeff = match scal {
            None => BaseScalar::one(),
            Some(s) => parse_scalar(s, &spec.field).map_err(|e| ParseError {
                line: e.line,
                col: e.col,
                msg: e.msg,
            })?,
        };
        let m = parse_monomial(mono.trim(), spec)?;
        out.add_monomial(m, coeff);
    }
    Ok(out)
}

/// Splits on `+` at paren depth zero. A `-` at depth zero that begins a term
/// is kept with the term.
fn split_top_level_plus(text: &str) -> Vec<(&str, usize)> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' if depth == 0 => {
                parts.push((&text[start..i], start));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((&text[start..], start));
    parts
}

fn split_last_top_level_star(text: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    let mut split = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '*' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    split.map(|i| (&text[..i], &text[i + 1..]))
}

/// Renders a rational-function-free display form used in file output.
pub fn render_field(field: &FieldDesc) -> String {
    match &field.param {
        None => "Q".to_string(),
        Some(p) => format!("Q({p})"),
    }
}

pub fn poly_const(n: i64) -> Poly {
    Poly::constant(rat_int(n))
}

pub fn big_one() -> BigInt {
    BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Gen, OpeTable};

    fn toy_spec() -> AlgebraSpec {
        AlgebraSpec::new(
            FieldDesc::with_param("c"),
            vec![
                Gen {
                    name: "a".into(),
                    weight: 1,
                },
                Gen {
                    name: "b".into(),
                    weight: 1,
                },
            ],
            OpeTable::new(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_round_trip() {
        let field = FieldDesc::with_param("c");
        let text = "(3*(c-2))/(2*(22+5*c))";
        let v = parse_scalar(text, &field).unwrap();
        let rendered = v.render_factor();
        let back = parse_scalar(&rendered, &field).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn scalar_rejects_unknown_symbol() {
        let field = FieldDesc::with_param("c");
        assert!(parse_scalar("2*l", &field).is_err());
    }

    #[test]
    fn state_round_trip() {
        let spec = toy_spec();
        let text = "a(-3)b(-1)|0> + (c/2)*|0>";
        let s = parse_state(text, &spec).unwrap();
        assert_eq!(s.len(), 2);
        let rendered = spec.render_scalar_state(&s);
        let back = parse_state(&rendered, &spec).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn parse_error_positions() {
        let spec = toy_spec();
        let err = parse_monomial("a(-3)x(-1)|0>", &spec).unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 6);
    }
}
