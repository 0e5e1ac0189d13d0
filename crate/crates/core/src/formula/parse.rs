use num_bigint::BigUint;
use thiserror::Error;

use super::ast::{Formula, Term};
use super::print::SymbolEnv;

/// Syntax error with the byte offset of the offending token.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }

    /// Shifts the reported offset, for errors inside a slice of a larger text.
    pub fn offset_by(mut self, base: usize) -> Self {
        self.offset += base;
        self
    }
}

/// Parses a formula; numerals must be written in decimal digits.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, None)
}

/// Parses a formula; bare identifiers in term position resolve through `env`.
pub fn parse_with_env(text: &str, env: &SymbolEnv) -> Result<Formula, ParseError> {
    parse_with(text, Some(env))
}

/// Parses a standalone term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, None)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses a standalone term with symbolic numerals resolved through `env`.
pub fn parse_term_with_env(text: &str, env: &SymbolEnv) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, Some(env))?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

fn parse_with(text: &str, env: Option<&SymbolEnv>) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, env)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Digits(String),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    env: Option<&'a SymbolEnv>,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'~' => {
                toks.push((start, Tok::Tilde));
                i += 1;
            }
            b'&' => {
                toks.push((start, Tok::Amp));
                i += 1;
            }
            b'|' => {
                toks.push((start, Tok::Pipe));
                i += 1;
            }
            b'(' => {
                toks.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((start, Tok::RParen));
                i += 1;
            }
            b'[' => {
                toks.push((start, Tok::LBracket));
                i += 1;
            }
            b']' => {
                toks.push((start, Tok::RBracket));
                i += 1;
            }
            b',' => {
                toks.push((start, Tok::Comma));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((start, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError::new(start, "expected '->'"));
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((start, Tok::DArrow));
                    i += 3;
                } else {
                    return Err(ParseError::new(start, "expected '<->'"));
                }
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push((start, Tok::Digits(text[start..i].to_string())));
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError::new(
                    start,
                    format!("unexpected character {:?}", text[start..].chars().next().unwrap()),
                ))
            }
        }
    }
    Ok(toks)
}

impl<'a> Parser<'a> {
    fn new(text: &str, env: Option<&'a SymbolEnv>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
            env,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err_here("unexpected trailing input")),
        }
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.here(), message)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        if self.eat(&Tok::DArrow) {
            let rhs = self.iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.orx()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn orx(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        loop {
            if self.eat(&Tok::Pipe) {
                let rhs = self.conj()?;
                lhs = Formula::or(lhs, rhs);
            } else if matches!(self.peek(), Some(Tok::Ident(s)) if s == "xor") {
                self.pos += 1;
                let rhs = self.conj()?;
                lhs = Formula::xor(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn day_atom(&self, digits: &str, offset: usize) -> Result<Formula, ParseError> {
        let k: u32 = digits
            .parse()
            .map_err(|_| ParseError::new(offset, "day index out of range"))?;
        if k == 0 {
            return Err(ParseError::new(offset, "day index 0 (days are 1-based)"));
        }
        Ok(Formula::DayAtom(k))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let offset = self.here();
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Digits(d)) => {
                let d = d.clone();
                self.pos += 1;
                self.day_atom(&d, offset)
            }
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                if s == "false" {
                    self.pos += 1;
                    return Ok(Formula::Falsum);
                }
                if s == "xor" {
                    return Err(self.err_here("unexpected 'xor'"));
                }
                // Predicate application: label immediately followed by '['.
                if self.peek2() == Some(&Tok::LBracket) {
                    if s == "P" || s == "K" {
                        self.pos += 2;
                        let t = self.term()?;
                        self.expect(Tok::RBracket, "']'")?;
                        return Ok(Formula::CodePred(s, t));
                    }
                    return Err(ParseError::new(
                        offset,
                        format!("unknown predicate label '{s}'"),
                    ));
                }
                // Indexed day atom Q<k>.
                if let Some(rest) = s.strip_prefix('Q') {
                    if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                        self.pos += 1;
                        return self.day_atom(rest, offset);
                    }
                }
                // Knowledge operator K<agent>.
                if let Some(agent) = s.strip_prefix('K') {
                    if !agent.is_empty() {
                        self.pos += 1;
                        let body = self.unary()?;
                        return Ok(Formula::know(agent, body));
                    }
                    return Err(ParseError::new(offset, "missing agent after 'K'"));
                }
                Err(ParseError::new(offset, format!("unexpected identifier '{s}'")))
            }
            Some(_) => Err(self.err_here("expected a formula")),
            None => Err(self.err_here("unexpected end of input")),
        }
    }

    pub(super) fn term(&mut self) -> Result<Term, ParseError> {
        let lhs = self.term_conj()?;
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "Imp") {
            self.pos += 1;
            let rhs = self.term()?;
            Ok(Term::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn term_conj(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.term_unary()?;
        while matches!(self.peek(), Some(Tok::Ident(s)) if s == "Conj") {
            // Infix use; the call form is recognized in operand position.
            self.pos += 1;
            let rhs = self.term_unary()?;
            lhs = Term::conj(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term_unary(&mut self) -> Result<Term, ParseError> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "Neg") {
            self.pos += 1;
            return Ok(Term::neg(self.term_unary()?));
        }
        self.term_primary()
    }

    fn term_call(&mut self) -> Result<(Term, Term), ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let a = self.term()?;
        self.expect(Tok::Comma, "','")?;
        let b = self.term()?;
        self.expect(Tok::RParen, "')'")?;
        Ok((a, b))
    }

    fn term_primary(&mut self) -> Result<Term, ParseError> {
        let offset = self.here();
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::Digits(d)) => {
                let d = d.clone();
                self.pos += 1;
                let n: BigUint = d.parse().expect("digit string");
                Ok(Term::Numeral(n))
            }
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                match s.as_str() {
                    "x" => {
                        self.pos += 1;
                        Ok(Term::Var)
                    }
                    "D" => {
                        self.pos += 1;
                        let (a, b) = self.term_call()?;
                        Ok(Term::diag(a, b))
                    }
                    "Conj" => {
                        self.pos += 1;
                        let (a, b) = self.term_call()?;
                        Ok(Term::conj(a, b))
                    }
                    "Imp" => {
                        self.pos += 1;
                        let (a, b) = self.term_call()?;
                        Ok(Term::imp(a, b))
                    }
                    _ => match self.env.and_then(|e| e.value_of(&s)) {
                        Some(v) => {
                            self.pos += 1;
                            Ok(Term::Numeral(v.clone()))
                        }
                        None => Err(ParseError::new(
                            offset,
                            format!("unbound numeral symbol '{s}'"),
                        )),
                    },
                }
            }
            Some(_) => Err(self.err_here("expected a term")),
            None => Err(self.err_here("unexpected end of input")),
        }
    }
}
