//! Parser for user-supplied polynomial test functions.
//!
//! ```text
//! poly   := term (('+' | '-') term)*
//! term   := coeff ('*' factor)* | factor ('*' factor)*
//! factor := var ('^' nat)?
//! var    := ('y' | 'x') nat
//! coeff  := int ('/' nat)?
//! ```
//!
//! Whitespace is insignificant. A leading `-` is accepted on the first term.
//! Variables are 1-based: `y1` is the first coordinate.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Monomial, Polynomial, Rational};
use crate::error::{Error, Result};

pub fn parse_polynomial(src: &str, var_count: usize) -> Result<Polynomial> {
    let tokens: Vec<(usize, char)> = src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser {
        tokens,
        pos: 0,
        var_count,
        src_len: src.len(),
    };
    let poly = p.poly()?;
    if p.pos < p.tokens.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser {
    tokens: Vec<(usize, char)>,
    pos: usize,
    var_count: usize,
    src_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).map(|t| t.1)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.0).unwrap_or(self.src_len)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.offset(),
            msg: msg.to_string(),
        }
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.var_count);
        let mut sign = Rational::one();
        if self.peek() == Some('-') {
            self.pos += 1;
            sign = -sign;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            out = &out + &t.scale(&sign);
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = Rational::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -Rational::one();
                }
                _ => return Ok(out),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; self.var_count];
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                coeff = self.coeff()?;
            }
            Some('x') | Some('y') => self.factor(&mut exps)?,
            _ => return Err(self.error("expected a coefficient or variable")),
        }
        while self.peek() == Some('*') {
            self.pos += 1;
            self.factor(&mut exps)?;
        }
        Ok(Polynomial::term(coeff, Monomial::from_exponents(exps)))
    }

    fn factor(&mut self, exps: &mut [u32]) -> Result<()> {
        match self.peek() {
            Some('x') | Some('y') => self.pos += 1,
            _ => return Err(self.error("expected a variable 'y<i>' or 'x<i>'")),
        }
        let at = self.offset();
        let idx = self.nat()?;
        let idx: usize = idx
            .try_into()
            .map_err(|_| Error::Parse { pos: at, msg: "variable index too large".into() })?;
        if idx == 0 || idx > self.var_count {
            return Err(Error::Parse {
                pos: at,
                msg: format!("variable index {} outside 1..={}", idx, self.var_count),
            });
        }
        let mut e = 1u32;
        if self.peek() == Some('^') {
            self.pos += 1;
            let at = self.offset();
            e = self
                .nat()?
                .try_into()
                .map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
        }
        exps[idx - 1] += e;
        Ok(())
    }

    fn coeff(&mut self) -> Result<Rational> {
        let numer = self.nat()?;
        if self.peek() == Some('/') {
            self.pos += 1;
            let at = self.offset();
            let den = self.nat()?;
            if den.is_zero() {
                return Err(Error::Parse {
                    pos: at,
                    msg: "zero denominator".into(),
                });
            }
            return Ok(Rational::new(numer, den));
        }
        Ok(Rational::from_integer(numer))
    }

    fn nat(&mut self) -> Result<BigInt> {
        let start = self.pos;
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error("expected a natural number"));
        }
        Ok(digits.parse().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_example() {
        let p = parse_polynomial("y1^2*y2 + 3/2*y1", 2).unwrap();
        assert_eq!(p.to_string(), "y1^2*y2 + 3/2*y1");
    }

    #[test]
    fn whitespace_and_signs() {
        let p = parse_polynomial(" - 2 * x1 ^ 2 +x2-1", 2).unwrap();
        assert_eq!(p.to_string(), "y2 - 2*y1^2 - 1");
        let q = parse_polynomial("y1*y1", 1).unwrap();
        assert_eq!(q, Polynomial::var(1, 0).pow(2));
    }

    #[test]
    fn position_annotated_errors() {
        match parse_polynomial("y1 + y3", 2) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("unexpected {:?}", other),
        }
        match parse_polynomial("y1 + * y2", 2) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {:?}", other),
        }
        assert!(matches!(parse_polynomial("1/0", 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("y1 y2", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("", 2), Err(Error::Parse { pos: 0, .. })));
    }
}
