//! Text syntax for polynomials.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := uint ('/' uint)? | 'x' uint | '(' expr ')' | '-' atom
//! ```
//!
//! A `/` is only legal inside a rational literal such as `1/2`; variables run
//! from `x1` to `xm`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::Poly;
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsePolyError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParsePolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParsePolyError {}

const MAX_EXPONENT: u32 = 64;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Poly {
    /// Parses the polynomial text syntax in `nvars` coordinates.
    pub fn parse(text: &str, nvars: usize) -> Result<Poly, ParsePolyError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, nvars };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ParsePolyError {
        ParsePolyError { offset: self.pos, message: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn uint(&mut self) -> Result<BigInt, ParsePolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an unsigned integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }

    fn expr(&mut self) -> Result<Poly, ParsePolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParsePolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParsePolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let k = self.uint()?;
            let k: u32 = k
                .try_into()
                .ok()
                .filter(|&k| k <= MAX_EXPONENT)
                .ok_or(ParsePolyError { offset: at, message: format!("exponent exceeds {MAX_EXPONENT}") })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParsePolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let idx = self.uint()?;
                let idx: usize = idx.try_into().unwrap_or(usize::MAX);
                if idx == 0 || idx > self.nvars {
                    return Err(ParsePolyError {
                        offset: at,
                        message: format!("variable x{idx} outside x1..x{}", self.nvars),
                    });
                }
                Ok(Poly::var(self.nvars, idx - 1).expect("index checked"))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let mut d = BigInt::from(1);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    d = self.uint()?;
                    if d.is_zero() {
                        return Err(ParsePolyError { offset: at, message: "zero denominator".into() });
                    }
                }
                Ok(Poly::constant(self.nvars, Q::new(n, d)))
            }
            Some(c) => Err(self.err(format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::poly::{q, qr};

    #[test]
    fn parses_spec_style_string() {
        let p = Poly::parse("3*x1^2*x2 - 1/2", 2).unwrap();
        assert_eq!(p.coefficient(&[2, 1]), q(3));
        assert_eq!(p.constant_term(), qr(-1, 2));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn parentheses_and_powers() {
        let p = Poly::parse("(1 + x1)^2 - x1^2", 1).unwrap();
        assert_eq!(p, Poly::parse("2*x1 + 1", 1).unwrap());
        let n = Poly::parse("-(x1 - x2)*-2", 2).unwrap();
        assert_eq!(n, Poly::parse("2*x1 - 2*x2", 2).unwrap());
    }

    #[test]
    fn rejects_out_of_range_variable_with_location() {
        let e = Poly::parse("x1 + x3", 2).unwrap_err();
        assert_eq!(e.offset, 6);
    }

    #[test]
    fn rejects_division_by_expression() {
        assert!(Poly::parse("x1/2", 1).is_err());
        assert!(Poly::parse("1/0", 1).is_err());
        assert!(Poly::parse("2 x1", 1).is_err());
        assert!(Poly::parse("", 1).is_err());
        assert!(Poly::parse("sin(x1)", 1).is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "-x1", "1/3*x1*x2^2 - 7", "x2^3 + x1 + 5/2"] {
            let p = Poly::parse(s, 2).unwrap();
            assert_eq!(Poly::parse(&p.to_string(), 2).unwrap(), p);
        }
    }
}
