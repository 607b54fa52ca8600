//! The θ mini-language.
//!
//! ```text
//! expr    := ['+'|'-'] product (('+'|'-') product)*
//! product := unary (('*'|'/') unary)*
//! unary   := '-' unary | atom
//! atom    := NUMBER ['i'] | 'i' | 'e' | 'pi' | 'sqrt:' UINT
//!          | 'conj(' expr ')' | '(' expr ')'
//! NUMBER  := DIGITS ['.' DIGITS]
//! ```
//!
//! Examples: `sqrt:2`, `sqrt:2 + i*sqrt:3`, `3+2i`, `pi/4 - 0.125i`,
//! `(e + sqrt:5)/3 + i*pi`. Decimal literals are exact rationals, so a
//! θ is known to any requested precision rather than rounded once to a double.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::hp::{HpComplex, HpReal};

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    /// `num / den` times `i` when `imag` is set.
    Rational { num: BigInt, den: BigInt, imag: bool },
    I,
    E,
    Pi,
    Sqrt(u64),
    Neg(Box<Expr>),
    Conj(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, prec: u32) -> Result<HpComplex> {
        Ok(match self {
            Expr::Rational { num, den, imag } => {
                let r = HpReal::from_ratio(num, den, prec)?;
                if *imag {
                    HpComplex::new(HpReal::zero(prec), r)
                } else {
                    HpComplex::new(r, HpReal::zero(prec))
                }
            }
            Expr::I => HpComplex::i(prec),
            Expr::E => HpComplex::new(HpReal::e(prec), HpReal::zero(prec)),
            Expr::Pi => HpComplex::new(HpReal::pi(prec), HpReal::zero(prec)),
            Expr::Sqrt(k) => HpComplex::new(HpReal::sqrt_u64(*k, prec), HpReal::zero(prec)),
            Expr::Neg(a) => a.eval(prec)?.neg(),
            Expr::Conj(a) => a.eval(prec)?.conj(),
            Expr::Add(a, b) => a.eval(prec)?.add(&b.eval(prec)?),
            Expr::Sub(a, b) => a.eval(prec)?.sub(&b.eval(prec)?),
            Expr::Mul(a, b) => a.eval(prec)?.mul(&b.eval(prec)?),
            Expr::Div(a, b) => a.eval(prec)?.div(&b.eval(prec)?)?,
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            Some(b'-') => {
                self.pos += 1;
                Expr::Neg(Box::new(self.product()?))
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn digits(&mut self) -> &'a [u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let int = self.digits();
                let mut text = String::from_utf8_lossy(int).into_owned();
                let mut scale = 0u32;
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    let frac = self.digits();
                    if frac.is_empty() {
                        return Err(self.err("expected digits after '.'"));
                    }
                    text.push_str(&String::from_utf8_lossy(frac));
                    scale = frac.len() as u32;
                }
                let num: BigInt = text.parse().map_err(|_| self.err("bad number"))?;
                let den = BigInt::from(10u32).pow(scale);
                let imag = self.src.get(self.pos) == Some(&b'i');
                if imag {
                    self.pos += 1;
                }
                Ok(Expr::Rational { num, den, imag })
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(")") {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => {
                if self.eat("sqrt:") {
                    let d = self.digits();
                    let k: u64 = std::str::from_utf8(d)
                        .ok()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| self.err("sqrt: expects a non-negative integer"))?;
                    Ok(Expr::Sqrt(k))
                } else if self.eat("conj(") {
                    let e = self.expr()?;
                    if !self.eat(")") {
                        return Err(self.err("expected ')'"));
                    }
                    Ok(Expr::Conj(Box::new(e)))
                } else if self.eat("pi") {
                    Ok(Expr::Pi)
                } else if self.eat("e") {
                    Ok(Expr::E)
                } else if self.eat("i") {
                    Ok(Expr::I)
                } else {
                    Err(self.err("unexpected token"))
                }
            }
        }
    }
}

/// A θ given symbolically, evaluable to any precision.
///
/// Evaluations are memoized per precision; the type is cheap to clone and
/// safe to share between threads.
#[derive(Clone)]
pub struct Theta {
    source: String,
    expr: Arc<Expr>,
    cache: Arc<RwLock<BTreeMap<u32, HpComplex>>>,
}

impl Theta {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let expr = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        // reject expressions that cannot be evaluated at all (division by zero)
        expr.eval(64)?;
        Ok(Theta {
            source: src.trim().to_string(),
            expr: Arc::new(expr),
            cache: Arc::new(RwLock::new(BTreeMap::new())),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Complex conjugate of this θ.
    pub fn conj(&self) -> Self {
        Theta {
            source: format!("conj({})", self.source),
            expr: Arc::new(Expr::Conj(Box::new((*self.expr).clone()))),
            cache: Arc::new(RwLock::new(BTreeMap::new())),
        }
    }

    pub fn eval(&self, prec: u32) -> Result<HpComplex> {
        if let Some(v) = self.cache.read().expect("theta cache poisoned").get(&prec) {
            return Ok(v.clone());
        }
        let v = self.expr.eval(prec)?;
        self.cache.write().expect("theta cache poisoned").insert(prec, v.clone());
        Ok(v)
    }
}

impl fmt::Debug for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theta({:?})", self.source)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Theta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theta::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(s: &str) -> (f64, f64) {
        Theta::parse(s).unwrap().eval(128).unwrap().to_f64()
    }

    #[test]
    fn grammar() {
        let (re, im) = val("sqrt:2 + i*sqrt:3");
        assert!((re - 2f64.sqrt()).abs() < 1e-15 && (im - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(val("3+2i"), (3.0, 2.0));
        assert_eq!(val("-0.5 - 2.5i"), (-0.5, -2.5));
        let (re, im) = val("pi/4 - 0.125i");
        assert!((re - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(im, -0.125);
        let (re, im) = val("conj((e + sqrt:5)/3 + i*pi)");
        assert!((re - (std::f64::consts::E + 5f64.sqrt()) / 3.0).abs() < 1e-15);
        assert!((im + std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(val("2i*3"), (0.0, 6.0));
        assert_eq!(val("i*i"), (-1.0, 0.0));
    }

    #[test]
    fn decimal_literals_are_exact_when_dyadic() {
        let t = Theta::parse("0.375 + 0.5i").unwrap().eval(256).unwrap();
        assert!(t.re.is_exact() && t.im.is_exact());
        let t = Theta::parse("0.1").unwrap().eval(256).unwrap();
        assert!(!t.re.is_exact());
    }

    #[test]
    fn errors() {
        for bad in ["", "sqrt:", "1 +", "foo", "(1", "1/0", "2..3", "sqrt:2 sqrt:3"] {
            assert!(Theta::parse(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn cache_is_consistent_with_fresh_evaluation() {
        let t = Theta::parse("e*pi + i/sqrt:7").unwrap();
        let a = t.eval(300).unwrap();
        let b = t.eval(300).unwrap();
        assert_eq!(a, b);
        let lo = t.eval(150).unwrap();
        assert!(lo.sub(&a).contains_zero());
    }
}
