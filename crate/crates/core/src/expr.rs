//! Closed-form integer sequences in one variable `n`, e.g. `"n^2-1"`, `"n*2^n"`, `"const 3"`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let s = src.trim();
        if let Some(rest) = s.strip_prefix("const") {
            let v: BigInt = rest.trim().parse().map_err(|_| Error::Parse(format!("bad constant in {src:?}")))?;
            return Ok(Expr::Num(v));
        }
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in {src:?}")));
        }
        Ok(e)
    }

    /// Evaluates at `n`; division is exact integer division (floored).
    pub fn eval(&self, n: u64) -> Result<BigInt> {
        use num_integer::Integer;
        Ok(match self {
            Expr::Num(v) => v.clone(),
            Expr::Var => BigInt::from(n),
            Expr::Add(a, b) => a.eval(n)? + b.eval(n)?,
            Expr::Sub(a, b) => a.eval(n)? - b.eval(n)?,
            Expr::Mul(a, b) => a.eval(n)? * b.eval(n)?,
            Expr::Div(a, b) => {
                let d = b.eval(n)?;
                if d.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                a.eval(n)?.div_floor(&d)
            }
            Expr::Pow(a, b) => {
                let e = b.eval(n)?;
                if e.is_negative() {
                    return Err(Error::Parse("negative exponent".into()));
                }
                let e = e.to_u32().ok_or_else(|| Error::Parse("exponent too large".into()))?;
                num_traits::pow(a.eval(n)?, e as usize)
            }
            Expr::Neg(a) => -a.eval(n)?,
        })
    }

    pub fn eval_nonneg(&self, n: u64) -> Result<num_bigint::BigUint> {
        let v = self.eval(n)?;
        v.to_biguint().ok_or_else(|| Error::Parse(format!("negative value {v} at n={n}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = chars[start..i].iter().collect();
            out.push(Tok::Num(txt.parse().expect("digits")));
        } else if c == 'n' {
            out.push(Tok::Var);
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Var) | Some(Tok::Num(_)) | Some(Tok::Op('('))) {
                // implicit multiplication such as "2n"
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Var) => {
                self.pos += 1;
                Ok(Expr::Var)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        Expr::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let e = Expr::parse("n^2-1").unwrap();
        assert_eq!(e.eval(3).unwrap(), BigInt::from(8));
        let e = Expr::parse("n*2^n").unwrap();
        assert_eq!(e.eval(4).unwrap(), BigInt::from(64));
        let e = Expr::parse("const 7").unwrap();
        assert_eq!(e.eval(100).unwrap(), BigInt::from(7));
        let e = Expr::parse("(25^n-1)/3").unwrap();
        assert_eq!(e.eval(2).unwrap(), BigInt::from(208));
        let e = Expr::parse("2n+1").unwrap();
        assert_eq!(e.eval(5).unwrap(), BigInt::from(11));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("n$").is_err());
        assert!(Expr::parse("(n").is_err());
    }
}
