//! Polynomial expressions such as `1 - 0.5*z1^2 + (2+i)*z1*z2`.
//!
//! Grammar: `+ - * ^ ( )`, real literals, the imaginary unit `i` (also as a
//! literal suffix, `2.5i`), variables `z1 … zn` (`z` alone is `z1`).
//! Exponents are non-negative integer literals.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::multiindex::Truncation;
use crate::scalar::Real;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Complex<f64>),
    /// 0-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Complex<f64>),
    Var(usize),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v: f64 = text.parse().map_err(|_| Error::Parse(format!("bad number '{text}'")))?;
            if k < chars.len() && chars[k] == 'i' && !chars.get(k + 1).is_some_and(|c| c.is_alphanumeric()) {
                k += 1;
                out.push(Tok::Num(Complex::new(0.0, v)));
            } else {
                out.push(Tok::Num(Complex::new(v, 0.0)));
            }
        } else if c == 'i' {
            out.push(Tok::Num(Complex::new(0.0, 1.0)));
            k += 1;
        } else if c == 'z' {
            k += 1;
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let idx = if start == k {
                1
            } else {
                let text: String = chars[start..k].iter().collect();
                text.parse::<usize>().map_err(|_| Error::Parse(format!("bad variable index '{text}'")))?
            };
            if idx == 0 {
                return Err(Error::Parse("variables are numbered from z1".into()));
            }
            out.push(Tok::Var(idx - 1));
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' at offset {k}")));
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
            } else if matches!(self.peek(), Some(Tok::Var(_)) | Some(Tok::Op('('))) {
                // juxtaposition: 2z1, 3(z1+1)
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(c)) if c.im == 0.0 && c.re >= 0.0 && c.re.fract() == 0.0 && c.re <= u32::MAX as f64 => {
                    self.pos += 1;
                    Ok(Expr::Pow(Box::new(base), c.re as u32))
                }
                other => Err(Error::Parse(format!("exponent must be a non-negative integer literal, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(c)) => {
                self.pos += 1;
                Ok(Expr::Num(c))
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Expr::Var(i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let toks = lex(src)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input after token {}", p.pos)));
        }
        Ok(e)
    }

    /// Number of variables referenced (largest index).
    pub fn n_vars(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) => a.n_vars(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.n_vars().max(b.n_vars()),
        }
    }

    /// Upper bound on the total degree (cancellation is not detected).
    pub fn degree_bound(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(_) => 1,
            Expr::Neg(a) => a.degree_bound(),
            Expr::Pow(a, k) => a.degree_bound().saturating_mul(*k as usize),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.degree_bound().max(b.degree_bound()),
            Expr::Mul(a, b) => a.degree_bound().saturating_add(b.degree_bound()),
        }
    }

    /// Exact expansion; fails if the degree bound exceeds the cap.
    pub fn to_series<T: Real>(&self, trunc: Truncation) -> Result<TruncatedSeries<T>> {
        if self.n_vars() > trunc.n {
            return Err(Error::DimensionMismatch(format!("expression uses z{} but n = {}", self.n_vars(), trunc.n)));
        }
        let d = self.degree_bound();
        if d > trunc.degree_cap {
            return Err(Error::DegreeOverflow { degree: d, cap: trunc.degree_cap });
        }
        self.expand(trunc)
    }

    /// Expansion truncated at the cap (no overflow check).
    pub fn to_series_truncated<T: Real>(&self, trunc: Truncation) -> Result<TruncatedSeries<T>> {
        if self.n_vars() > trunc.n {
            return Err(Error::DimensionMismatch(format!("expression uses z{} but n = {}", self.n_vars(), trunc.n)));
        }
        self.expand(trunc)
    }

    fn expand<T: Real>(&self, trunc: Truncation) -> Result<TruncatedSeries<T>> {
        Ok(match self {
            Expr::Num(c) => TruncatedSeries::constant(trunc, Complex::new(T::lit(c.re), T::lit(c.im))),
            Expr::Var(i) => TruncatedSeries::variable(trunc, *i)?,
            Expr::Neg(a) => -&a.expand::<T>(trunc)?,
            Expr::Add(a, b) => a.expand::<T>(trunc)?.add(&b.expand(trunc)?)?,
            Expr::Sub(a, b) => a.expand::<T>(trunc)?.sub(&b.expand(trunc)?)?,
            Expr::Mul(a, b) => a.expand::<T>(trunc)?.mul(&b.expand(trunc)?)?,
            Expr::Pow(a, k) => {
                let base = a.expand::<T>(trunc)?;
                let mut acc = TruncatedSeries::one(trunc);
                for _ in 0..*k {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        })
    }
}

/// Parses `src` into a series over `n` variables (default: those referenced,
/// at least 1) with cap (default: the degree bound).
pub fn parse_series<T: Real>(src: &str, n: Option<usize>, cap: Option<usize>) -> Result<TruncatedSeries<T>> {
    let e = Expr::parse(src)?;
    let n = n.unwrap_or_else(|| e.n_vars().max(1));
    let cap = cap.unwrap_or_else(|| e.degree_bound());
    e.to_series(Truncation::new(n, cap)?)
}
