use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::rings::{PolyQ, RatFunc, Rational};

/// Parses a rational function of `t` such as `-(1+t)`, `1/(1-t)^2` or
/// `3/2*t`. Grammar: sums of products of powers of integers, `t` and
/// parenthesized expressions; `^` takes a nonnegative integer exponent.
pub fn parse_ratfunc(text: &str) -> Result<RatFunc> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    if f.den.is_zero() {
        return Err(Error::Parse(format!("{text:?} divides by zero")));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!(
            "{what} at offset {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<RatFunc> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.product()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = add(&acc, &self.product()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = add(&acc, &self.product()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<RatFunc> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if d.num.is_zero() {
                        return Err(self.error("division by zero"));
                    }
                    acc = acc.mul(&RatFunc::new(d.den, d.num));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let e = self.integer()?;
        let e: u32 = e
            .try_into()
            .map_err(|_| self.error("exponent out of range"))?;
        let mut acc = RatFunc::one();
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            Some(b't') => {
                self.pos += 1;
                Ok(RatFunc::from_ints(&[0, 1], &[1]))
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(RatFunc::new(
                    PolyQ::constant(Rational::from_integer(v)),
                    PolyQ::one(),
                ))
            }
            _ => Err(self.error("expected a number, `t` or `(`")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| self.error("bad integer"))
    }
}

fn add(a: &RatFunc, b: &RatFunc) -> RatFunc {
    if a.den == b.den {
        return RatFunc::new(&a.num + &b.num, a.den.clone());
    }
    RatFunc::new(
        &(&a.num * &b.den) + &(&b.num * &a.den),
        &a.den * &b.den,
    )
}
