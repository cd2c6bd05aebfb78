//! Text format for flexible systems. One inclusion per line, `#` comments,
//! whitespace-insensitive:
//!
//! ```text
//! (-1+eps*o) x1 + x2 + (-0.2+eps^2*L) x3 in 2+eps*L
//! ```
//!
//! `eps` is the infinitesimal scale, `w` is shorthand for `eps^-1`, `o` and
//! `L` are the infinitesimal and limited neutrices, `R` the full line and
//! decimals are read as exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero as NumZero};
use thiserror::Error;

use crate::extlinalg::{ExternalMatrix, ExternalVector};
use crate::extnum::{EpsScalar, ExternalScalar, Neutrix};
use crate::poly::Rat;
use crate::solver::{FlexibleSystem, SolverError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("line {line}: right-hand side may not be the full line")]
    FullLineRhs { line: usize },
    #[error("line {line}: bad variable index")]
    InconsistentArity { line: usize },
    #[error(transparent)]
    Validation(#[from] SolverError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(_) => write!(f, "number"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
        }
    }
}

struct Lexer;

impl Lexer {
    /// Tokenizes one logical line; columns are 1-based byte offsets.
    fn lex(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
        let bytes = line.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let col = i + 1;
            match c {
                ' ' | '\t' => {
                    i += 1;
                }
                '#' => break,
                '+' => {
                    toks.push((Tok::Plus, col));
                    i += 1;
                }
                '-' => {
                    toks.push((Tok::Minus, col));
                    i += 1;
                }
                '*' => {
                    toks.push((Tok::Star, col));
                    i += 1;
                }
                '/' => {
                    toks.push((Tok::Slash, col));
                    i += 1;
                }
                '^' => {
                    toks.push((Tok::Caret, col));
                    i += 1;
                }
                '(' => {
                    toks.push((Tok::LParen, col));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, col));
                    i += 1;
                }
                ',' => {
                    toks.push((Tok::Comma, col));
                    i += 1;
                }
                '0'..='9' | '.' => {
                    let start = i;
                    let mut seen_dot = false;
                    while i < bytes.len() {
                        match bytes[i] as char {
                            '0'..='9' => i += 1,
                            '.' if !seen_dot => {
                                seen_dot = true;
                                i += 1;
                            }
                            _ => break,
                        }
                    }
                    let text = &line[start..i];
                    let rat = parse_decimal(text).ok_or_else(|| ParseError::Syntax {
                        line: lineno,
                        col,
                        expected: "number".to_string(),
                    })?;
                    toks.push((Tok::Num(rat), col));
                }
                'a'..='z' | 'A'..='Z' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                        i += 1;
                    }
                    toks.push((Tok::Ident(line[start..i].to_string()), col));
                }
                _ => {
                    return Err(ParseError::Syntax {
                        line: lineno,
                        col,
                        expected: "token".to_string(),
                    })
                }
            }
        }
        Ok(toks)
    }
}

fn parse_decimal(text: &str) -> Option<Rat> {
    if let Some(dot) = text.find('.') {
        let (int_part, frac_part) = (&text[..dot], &text[dot + 1..]);
        if frac_part.is_empty() || frac_part.contains('.') {
            return None;
        }
        let int: BigInt = if int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let frac: BigInt = frac_part.parse().ok()?;
        let den = BigInt::from(10).pow(frac_part.len() as u32);
        Some(Rat::new(int * &den + frac, den))
    } else {
        let n: BigInt = text.parse().ok()?;
        Some(Rat::from(n))
    }
}

/// (terms, constant moved to the right, right-hand value)
type Inclusion = (Vec<(usize, ExternalScalar)>, ExternalScalar, ExternalScalar);

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn new(toks: Vec<(Tok, usize)>, line: usize) -> Self {
        Parser { toks, pos: 0, line }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| self.toks.last().map(|(_, c)| c + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            col: self.col(),
            expected: expected.to_string(),
        })
    }

    fn eat(&mut self, t: &Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(expected)
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// sign := "+" | "-"; returns the sign factor and consumes it if present.
    fn opt_sign(&mut self) -> i32 {
        match self.peek() {
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            _ => 1,
        }
    }

    /// rational := int | decimal | int "/" int
    fn rational(&mut self) -> Result<Rat, ParseError> {
        let Some(Tok::Num(n)) = self.bump() else {
            return self.err("number");
        };
        if self.peek() == Some(&Tok::Slash) {
            // only integer/integer fractions
            if let Some(Tok::Num(d)) = self.toks.get(self.pos + 1).map(|(t, _)| t.clone()) {
                if n.is_integer() && d.is_integer() && !d.is_zero() {
                    self.pos += 2;
                    return Ok(n / d);
                }
            }
        }
        Ok(n)
    }

    /// scale := "eps" ["^" int] | "w"; returns the exponent of eps.
    fn scale(&mut self) -> Result<i64, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) if s == "w" => Ok(-1),
            Some(Tok::Ident(s)) if s == "eps" => {
                if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    let sign = self.opt_sign() as i64;
                    let Some(Tok::Num(n)) = self.bump() else {
                        return self.err("integer exponent");
                    };
                    if !n.is_integer() {
                        return self.err("integer exponent");
                    }
                    let k: i64 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| ParseError::Syntax {
                            line: self.line,
                            col: self.col(),
                            expected: "small integer exponent".to_string(),
                        })?;
                    Ok(sign * k)
                } else {
                    Ok(1)
                }
            }
            _ => self.err("scale"),
        }
    }

    fn neutrix_kind(&mut self, order: i64) -> Result<Neutrix, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) if s == "o" => Ok(Neutrix::scaled_oslash(order)),
            Some(Tok::Ident(s)) if s == "L" => Ok(Neutrix::scaled_pound(order)),
            _ => self.err("neutrix"),
        }
    }

    /// atom := rational ["*" scale] | scale | neutrix | "(" ext ")"
    fn atom(&mut self) -> Result<ExternalScalar, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.ext()?;
                self.eat(&Tok::RParen, ")")?;
                Ok(e)
            }
            Some(Tok::Ident(s)) if s == "R" => {
                self.pos += 1;
                Ok(ExternalScalar::neutricial(Neutrix::FullLine))
            }
            Some(Tok::Ident(s)) if s == "o" || s == "L" => {
                let n = self.neutrix_kind(0)?;
                Ok(ExternalScalar::neutricial(n))
            }
            Some(Tok::Ident(s)) if s == "eps" || s == "w" => {
                let k = self.scale()?;
                if self.peek() == Some(&Tok::Star)
                    && matches!(
                        self.toks.get(self.pos + 1).map(|(t, _)| t),
                        Some(Tok::Ident(s)) if s == "o" || s == "L"
                    )
                {
                    self.pos += 1;
                    let n = self.neutrix_kind(k)?;
                    Ok(ExternalScalar::neutricial(n))
                } else {
                    Ok(ExternalScalar::exact(EpsScalar::monomial(Rat::one(), k)))
                }
            }
            Some(Tok::Num(_)) => {
                let r = self.rational()?;
                if self.peek() == Some(&Tok::Star) && {
                    let next = self.toks.get(self.pos + 1).map(|(t, _)| t);
                    matches!(next, Some(Tok::Ident(s)) if s == "eps" || s == "w")
                } {
                    self.pos += 1;
                    let k = self.scale()?;
                    Ok(ExternalScalar::exact(EpsScalar::monomial(r, k)))
                } else {
                    Ok(ExternalScalar::exact(EpsScalar::from_rat(r)))
                }
            }
            _ => self.err("value"),
        }
    }

    /// ext := signedatom+
    fn ext(&mut self) -> Result<ExternalScalar, ParseError> {
        let mut first = true;
        let mut acc = ExternalScalar::zero();
        loop {
            let explicit_sign = matches!(self.peek(), Some(Tok::Plus) | Some(Tok::Minus));
            if !first && !explicit_sign {
                break;
            }
            let sign = self.opt_sign();
            let a = self.atom()?;
            acc = if sign < 0 { acc.sub(&a) } else { acc.add(&a) };
            first = false;
            if self.at_end() || matches!(self.peek(), Some(Tok::RParen) | Some(Tok::Comma)) {
                break;
            }
            // juxtaposed atoms without sign end the ext (e.g. before "in")
            if !matches!(self.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                break;
            }
        }
        Ok(acc)
    }

    fn peek_var(&self) -> Option<usize> {
        if let Some(Tok::Ident(s)) = self.peek() {
            if let Some(rest) = s.strip_prefix('x') {
                if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                    return rest.parse().ok();
                }
            }
        }
        None
    }

    /// One inclusion: coefficients per variable, an optional constant term,
    /// and the right-hand external value.
    fn inclusion(&mut self) -> Result<Inclusion, ParseError> {
        let mut terms: Vec<(usize, ExternalScalar)> = Vec::new();
        let mut constant = ExternalScalar::zero();
        loop {
            let sign = self.opt_sign();
            // bare variable or coefficient [*] variable
            let coeff = if self.peek_var().is_some() {
                ExternalScalar::exact(EpsScalar::one())
            } else {
                let a = self.atom()?;
                if self.peek() == Some(&Tok::Star) && {
                    let save = self.pos;
                    self.pos += 1;
                    let is_var = self.peek_var().is_some();
                    self.pos = save;
                    is_var
                } {
                    self.pos += 1;
                }
                a
            };
            let coeff = if sign < 0 { coeff.neg() } else { coeff };
            if let Some(idx) = self.peek_var() {
                if idx == 0 {
                    return Err(ParseError::InconsistentArity { line: self.line });
                }
                self.pos += 1;
                terms.push((idx - 1, coeff));
            } else {
                constant = constant.add(&coeff);
            }
            match self.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) => continue,
                Some(Tok::Ident(s)) if s == "in" => {
                    self.pos += 1;
                    break;
                }
                _ => return self.err("'+', '-' or 'in'"),
            }
        }
        let rhs = self.ext()?;
        if !self.at_end() {
            return self.err("end of line");
        }
        Ok((terms, constant, rhs))
    }
}

/// Parses a full system: one inclusion per non-empty line.
pub fn parse_system(text: &str) -> Result<FlexibleSystem, ParseError> {
    let mut parsed = Vec::new();
    let mut n = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = Lexer::lex(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser::new(toks, lineno);
        let (terms, constant, rhs) = p.inclusion()?;
        if rhs.neutrix() == Neutrix::FullLine {
            return Err(ParseError::FullLineRhs { line: lineno });
        }
        for (idx, _) in &terms {
            n = n.max(idx + 1);
        }
        parsed.push((terms, constant, rhs));
    }
    if parsed.is_empty() {
        return Err(ParseError::Syntax {
            line: 1,
            col: 1,
            expected: "at least one inclusion".to_string(),
        });
    }
    let mut rows = Vec::new();
    let mut rhs_entries = Vec::new();
    for (terms, constant, rhs) in parsed {
        let mut row = vec![ExternalScalar::zero(); n];
        for (idx, coeff) in terms {
            row[idx] = row[idx].add(&coeff);
        }
        rows.push(row);
        rhs_entries.push(rhs.sub(&constant));
    }
    let sys = FlexibleSystem::new(
        ExternalMatrix::from_rows(rows),
        ExternalVector::new(rhs_entries),
    )?;
    Ok(sys)
}

/// Parses a single external value, e.g. `2+eps*L`.
pub fn parse_ext(text: &str) -> Result<ExternalScalar, ParseError> {
    let toks = Lexer::lex(text, 1)?;
    let mut p = Parser::new(toks, 1);
    let e = p.ext()?;
    if !p.at_end() {
        return p.err("end of input");
    }
    Ok(e)
}

/// Parses a point `(v1, v2, …)` or `v1, v2, …` of exact scalar coordinates.
pub fn parse_point(text: &str) -> Result<Vec<EpsScalar>, ParseError> {
    let toks = Lexer::lex(text, 1)?;
    let mut p = Parser::new(toks, 1);
    let parens = p.peek() == Some(&Tok::LParen);
    if parens {
        p.pos += 1;
    }
    let mut out = Vec::new();
    loop {
        let e = p.ext()?;
        if e.neutrix() != Neutrix::Zero {
            return p.err("exact coordinate");
        }
        out.push(e.rep().clone());
        if p.peek() == Some(&Tok::Comma) {
            p.pos += 1;
            continue;
        }
        break;
    }
    if parens {
        p.eat(&Tok::RParen, ")")?;
    }
    if !p.at_end() {
        return p.err("end of input");
    }
    Ok(out)
}
