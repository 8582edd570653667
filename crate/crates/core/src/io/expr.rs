//! Arithmetic expressions for coordinates and expansion factors.
//!
//! Grammar: numbers, `+ - * / ^`, unary minus, parentheses, the constants
//! `phi`, `sqrt2`, `sqrt3`, `sqrt5`, `pi` and the function `sqrt(..)`.
//! All arithmetic is `f64`; `1/2` is one half.

use crate::error::{Error, Result};

pub fn eval_expr(src: &str) -> Result<f64> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(p.error("value is not finite"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Expression { expr: self.src.to_string(), message: format!("{message} at offset {}", self.pos) }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    // Right-associative; binds tighter than unary minus on its left.
    fn power(&mut self) -> Result<f64> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<f64> {
        self.skip_ws();
        if self.eat('(') {
            let v = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(v);
        }
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                if self.peek().is_some_and(|c| c == 'e' || c == 'E') {
                    self.pos += 1;
                    if self.peek().is_some_and(|c| c == '+' || c == '-') {
                        self.pos += 1;
                    }
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
                self.src[start..self.pos].parse::<f64>().map_err(|_| self.error("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match name {
                    "phi" => Ok((1.0 + 5f64.sqrt()) / 2.0),
                    "sqrt2" => Ok(2f64.sqrt()),
                    "sqrt3" => Ok(3f64.sqrt()),
                    "sqrt5" => Ok(5f64.sqrt()),
                    "pi" => Ok(std::f64::consts::PI),
                    "sqrt" => {
                        if !self.eat('(') {
                            return Err(self.error("expected '(' after sqrt"));
                        }
                        let v = self.expr()?;
                        if !self.eat(')') {
                            return Err(self.error("expected ')'"));
                        }
                        if v < 0.0 {
                            return Err(self.error("square root of a negative number"));
                        }
                        Ok(v.sqrt())
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown name {name:?}")))
                    }
                }
            }
            _ => Err(self.error("expected a number, name or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_arithmetic() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(eval_expr("phi").unwrap(), phi);
        assert_eq!(eval_expr("1/2").unwrap(), 0.5);
        assert_eq!(eval_expr("sqrt3/2").unwrap(), 3f64.sqrt() / 2.0);
        assert_eq!(eval_expr("-2^2").unwrap(), -4.0);
        assert_eq!(eval_expr("2^-1").unwrap(), 0.5);
        assert_eq!(eval_expr("(1+sqrt5)/2").unwrap(), phi);
        assert_eq!(eval_expr(" 3 * (phi - 1) ").unwrap(), 3.0 * (phi - 1.0));
        assert_eq!(eval_expr("sqrt(9)").unwrap(), 3.0);
        assert_eq!(eval_expr("1.5e1").unwrap(), 15.0);
    }

    #[test]
    fn errors() {
        for bad in ["", "1 +", "foo", "(1", "1/0", "sqrt(-1)", "2 3"] {
            assert!(eval_expr(bad).is_err(), "{bad}");
        }
    }
}
