//! Recursive-descent parser for polynomial literals.
//!
//! Grammar: sums and differences of products, `^` with a nonnegative integer
//! exponent, division by a nonzero rational constant, parentheses, integer
//! literals and identifiers (`[A-Za-z_][A-Za-z0-9_]*`).

use crate::error::AlgError;
use crate::mpoly::MPoly;
use crate::ring::{Ring, Q};
use num::BigInt;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, AlgError> {
        Err(AlgError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        })
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

    fn expr(&mut self) -> Result<MPoly, AlgError> {
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
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, AlgError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = match d.as_constant() {
                        Some(c) if !c.is_zero() => c,
                        _ => return self.err("division by a non-constant or zero"),
                    };
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<MPoly, AlgError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = match e.try_into() {
                Ok(e) => e,
                Err(_) => return self.err("exponent out of range"),
            };
            return Ok(Ring::pow(&base, e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, AlgError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<MPoly, AlgError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => Ok(MPoly::constant(Q::from_integer(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(MPoly::named(name))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_mpoly(src: &str) -> Result<MPoly, AlgError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_roundtrip() {
        for s in ["0", "-x", "3/4*J2^2*J3 - aa + 7", "(x + y)^3 - x^3 - y^3", "-(t - 1)^2/6"] {
            let p = parse_mpoly(s).unwrap();
            let q = parse_mpoly(&p.to_string()).unwrap();
            assert_eq!(p, q, "{s}");
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_mpoly("x +").is_err());
        assert!(parse_mpoly("x / y").is_err());
        assert!(parse_mpoly("x $ y").is_err());
        assert!(parse_mpoly("(x").is_err());
    }
}
