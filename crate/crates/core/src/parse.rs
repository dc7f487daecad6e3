//! Text syntax for classical formulas, field terms and PPL formulas.
//!
//! ```text
//! prop  ::= atoms B<digits>, constants T F, ! & | -> <->, parentheses
//! term  ::= integers, n/m, q(n,m), x<k>, + - *, parentheses
//! ppl   ::= P(prop) = term | P(prop) < term | P(prop) <= term | P(prop) >= term
//!           combined with ! & | -> <->
//! ```
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->` (right associative), `<->`.
//! `&`, `|` and `<->` associate to the left.

use num::BigInt;

use crate::ppl::{Cmp, PplFormula, Term};
use crate::prop::PropFormula;
use crate::{Error, Rational, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Atom(u32),
    Var(u32),
    Int(BigInt),
    True,
    False,
    Prob,
    Q,
    Not,
    And,
    Or,
    Arrow,
    Iff,
    Eq,
    Lt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Comma,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: String| Error::Parse { offset, message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &src[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with(">=") {
            (Tok::Ge, 2)
        } else if c.is_ascii_digit() {
            let end = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            (Tok::Int(rest[..end].parse().expect("digits")), end)
        } else if c.is_ascii_alphabetic() {
            let end = rest
                .find(|ch: char| !ch.is_ascii_alphanumeric() && ch != '_')
                .unwrap_or(rest.len());
            let word = &rest[..end];
            let indexed = |prefix: char| -> Option<u32> {
                let digits = word.strip_prefix(prefix)?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                digits.parse().ok()
            };
            let tok = match word {
                "T" => Tok::True,
                "F" => Tok::False,
                "P" => Tok::Prob,
                "q" => Tok::Q,
                _ => {
                    if let Some(j) = indexed('B') {
                        Tok::Atom(j)
                    } else if let Some(k) = indexed('x') {
                        Tok::Var(k)
                    } else {
                        return Err(err(start, format!("unknown identifier {word:?}")));
                    }
                }
            };
            (tok, end)
        } else {
            let tok = match c {
                b'!' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                b'=' => Tok::Eq,
                b'<' => Tok::Lt,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b',' => Tok::Comma,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(err(start, format!("unexpected character {ch:?}")));
                }
            };
            (tok, 1)
        };
        out.push((start, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.error("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    // classical formulas

    fn prop(&mut self) -> Result<PropFormula> {
        let mut lhs = self.prop_imp()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.prop_imp()?;
            lhs = PropFormula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_imp(&mut self) -> Result<PropFormula> {
        let lhs = self.prop_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.prop_imp()?;
            return Ok(PropFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn prop_or(&mut self) -> Result<PropFormula> {
        let mut lhs = self.prop_and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.prop_and()?;
            lhs = PropFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_and(&mut self) -> Result<PropFormula> {
        let mut lhs = self.prop_unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.prop_unary()?;
            lhs = PropFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_unary(&mut self) -> Result<PropFormula> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(PropFormula::not(self.prop_unary()?))
            }
            Some(Tok::Atom(j)) => {
                self.pos += 1;
                Ok(PropFormula::atom(j))
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(PropFormula::top())
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(PropFormula::bottom())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.prop()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.error("expected a propositional formula"),
        }
    }

    // terms

    fn term(&mut self) -> Result<Term> {
        let mut lhs = self.term_product()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Term::add(lhs, self.term_product()?);
            } else if self.eat(&Tok::Minus) {
                lhs = Term::sub(lhs, self.term_product()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term_product(&mut self) -> Result<Term> {
        let mut lhs = self.term_unary()?;
        while self.eat(&Tok::Star) {
            lhs = Term::mul(lhs, self.term_unary()?);
        }
        Ok(lhs)
    }

    fn term_unary(&mut self) -> Result<Term> {
        if self.eat(&Tok::Minus) {
            return Ok(Term::neg(self.term_unary()?));
        }
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if self.eat(&Tok::Slash) {
                    let d = self.integer("denominator")?;
                    return self.fraction(n, d);
                }
                Ok(Term::constant(Rational::from_integer(n)))
            }
            Some(Tok::Q) => {
                self.pos += 1;
                self.expect(&Tok::LParen, "'(' after q")?;
                let negative = self.eat(&Tok::Minus);
                let n = self.integer("numerator")?;
                self.expect(&Tok::Comma, "','")?;
                let d = self.integer("denominator")?;
                self.expect(&Tok::RParen, "')'")?;
                self.fraction(if negative { -n } else { n }, d)
            }
            Some(Tok::Var(k)) => {
                self.pos += 1;
                Ok(Term::var(k))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.term()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.error("expected a term"),
        }
    }

    fn integer(&mut self, what: &str) -> Result<BigInt> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.error(format!("expected an integer {what}")),
        }
    }

    fn fraction(&self, n: BigInt, d: BigInt) -> Result<Term> {
        if d == BigInt::from(0) {
            return self.error("zero denominator");
        }
        Ok(Term::constant(Rational::new(n, d)))
    }

    // PPL formulas

    fn ppl(&mut self) -> Result<PplFormula> {
        let mut lhs = self.ppl_imp()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.ppl_imp()?;
            lhs = PplFormula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ppl_imp(&mut self) -> Result<PplFormula> {
        let lhs = self.ppl_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.ppl_imp()?;
            return Ok(PplFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn ppl_or(&mut self) -> Result<PplFormula> {
        let mut lhs = self.ppl_and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.ppl_and()?;
            lhs = PplFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ppl_and(&mut self) -> Result<PplFormula> {
        let mut lhs = self.ppl_unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.ppl_unary()?;
            lhs = PplFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ppl_unary(&mut self) -> Result<PplFormula> {
        if self.eat(&Tok::Not) {
            return Ok(PplFormula::not(self.ppl_unary()?));
        }
        if self.eat(&Tok::LParen) {
            let inner = self.ppl()?;
            self.expect(&Tok::RParen, "')'")?;
            return Ok(inner);
        }
        if !self.eat(&Tok::Prob) {
            return self.error("expected P(...) or a parenthesised PPL formula");
        }
        self.expect(&Tok::LParen, "'(' after P")?;
        let alpha = self.prop()?;
        self.expect(&Tok::RParen, "')'")?;
        let rel = match self.peek() {
            Some(Tok::Eq) => Tok::Eq,
            Some(Tok::Lt) => Tok::Lt,
            Some(Tok::Le) => Tok::Le,
            Some(Tok::Ge) => Tok::Ge,
            _ => return self.error("expected one of = < <= >="),
        };
        self.pos += 1;
        let term = self.term()?;
        match rel {
            Tok::Eq => PplFormula::atom(alpha, Cmp::Eq, term),
            Tok::Lt => PplFormula::atom(alpha, Cmp::Lt, term),
            Tok::Le => PplFormula::le(alpha, term),
            _ => PplFormula::ge(alpha, term),
        }
    }
}

pub fn parse_prop(src: &str) -> Result<PropFormula> {
    let mut p = Parser::new(src)?;
    let f = p.prop()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_ppl(src: &str) -> Result<PplFormula> {
    let mut p = Parser::new(src)?;
    let f = p.ppl()?;
    p.finish()?;
    Ok(f)
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(body, _)| body).trim()
}

/// One classical formula per non-blank line; `#` starts a comment.
pub fn parse_prop_lines(src: &str) -> Result<Vec<PropFormula>> {
    src.lines()
        .map(strip_comment)
        .filter(|l| !l.is_empty())
        .map(parse_prop)
        .collect()
}

/// One PPL formula per non-blank line; `#` starts a comment.
pub fn parse_theory(src: &str) -> Result<Vec<PplFormula>> {
    src.lines()
        .map(strip_comment)
        .filter(|l| !l.is_empty())
        .map(parse_ppl)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let a = PropFormula::atom;
        assert_eq!(
            parse_prop("!B1 & B2 | B3 -> B4 -> B5").unwrap(),
            PropFormula::implies(
                PropFormula::or(PropFormula::and(PropFormula::not(a(1)), a(2)), a(3)),
                PropFormula::implies(a(4), a(5))
            )
        );
        assert_eq!(
            parse_prop("B1 -> B2 <-> B3").unwrap(),
            PropFormula::iff(PropFormula::implies(a(1), a(2)), a(3))
        );
    }

    #[test]
    fn constants_desugar_to_b1() {
        assert_eq!(parse_prop("T").unwrap(), PropFormula::top());
        assert_eq!(parse_prop("F").unwrap(), parse_prop("B1 & !B1").unwrap());
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_prop("B1 & ") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_prop("B1 B2").is_err());
        assert!(parse_prop("Y1").is_err());
        assert!(parse_ppl("P(B1) = x").is_err());
        assert!(parse_ppl("P(B1) = 1/0").is_err());
    }

    #[test]
    fn ppl_term_stops_at_arrow() {
        let f = parse_ppl("P(B1) = x1 - 1 -> P(B2) < 1").unwrap();
        assert_eq!(f.to_string(), "P(B1) = x1 - 1 -> P(B2) < 1");
    }

    #[test]
    fn theory_lines() {
        let src = "# header\nP(B1) = 1   # trailing\n\nP(B2) <= 1/2\n";
        assert_eq!(parse_theory(src).unwrap().len(), 2);
    }
}
