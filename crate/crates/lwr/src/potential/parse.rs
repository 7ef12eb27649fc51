//! Literal syntax for scalar entries of a potential.
//!
//! Grammar (whitespace ignored, juxtaposition multiplies):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/')? unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'i' | 'z' | '(' expr ')'
//! ```
//!
//! Exponents must be real constants. Fractional powers are only allowed on
//! a single monomial such as `z^0.5` or `3*z^-1.5`.

use num_complex::Complex64;

use super::function::{ScalarFn, Term};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    I,
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut k = 0;
    while k < bytes.len() {
        let ch = bytes[k] as char;
        match ch {
            ' ' | '\t' | '\n' => {
                k += 1;
                continue;
            }
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::Open),
            ')' => out.push(Tok::Close),
            'i' => out.push(Tok::I),
            'z' => out.push(Tok::Z),
            '0'..='9' | '.' => {
                let start = k;
                while k < bytes.len() && (bytes[k].is_ascii_digit() || bytes[k] == b'.') {
                    k += 1;
                }
                // scientific notation: 1e-3, 2.5E+4
                if k < bytes.len() && (bytes[k] == b'e' || bytes[k] == b'E') {
                    let mut j = k + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        k = j;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let text = &src[start..k];
                let x = text.parse::<f64>().map_err(|_| format!("bad number '{text}'"))?;
                out.push(Tok::Num(x));
                continue;
            }
            other => return Err(format!("unexpected character '{other}' at offset {k}")),
        }
        k += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn eat(&mut self, t: Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ScalarFn, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat(Tok::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(Tok::Minus) {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarFn, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(Tok::Star) {
                acc = acc.mul(&self.unary()?);
            } else if self.eat(Tok::Slash) {
                let d = self.unary()?;
                acc = acc.div(&d).ok_or("division by zero or by a non-rational sum")?;
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::I | Tok::Z | Tok::Open)) {
                acc = acc.mul(&self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarFn, String> {
        if self.eat(Tok::Minus) {
            return Ok(self.unary()?.neg());
        }
        if self.eat(Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarFn, String> {
        let base = self.primary()?;
        if !self.eat(Tok::Caret) {
            return Ok(base);
        }
        let e = self.unary()?;
        let e = constant_value(&e).ok_or("exponent must be a constant")?;
        if e.im != 0.0 {
            return Err("exponent must be real".into());
        }
        raise(&base, e.re)
    }

    fn primary(&mut self) -> Result<ScalarFn, String> {
        let t = self.peek().ok_or("unexpected end of input")?;
        self.pos += 1;
        match t {
            Tok::Num(x) => Ok(ScalarFn::constant(Complex64::new(x, 0.0))),
            Tok::I => Ok(ScalarFn::constant(Complex64::new(0.0, 1.0))),
            Tok::Z => Ok(ScalarFn::monomial(Complex64::new(1.0, 0.0), 1.0)),
            Tok::Open => {
                let inner = self.expr()?;
                if !self.eat(Tok::Close) {
                    return Err("missing ')'".into());
                }
                Ok(inner)
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}

fn constant_value(f: &ScalarFn) -> Option<Complex64> {
    match f.terms.as_slice() {
        [] => Some(Complex64::new(0.0, 0.0)),
        [t] if t.exp == 0.0 && t.num.is_constant() && t.den.is_constant() => Some(t.coeff),
        _ => None,
    }
}

fn raise(base: &ScalarFn, e: f64) -> Result<ScalarFn, String> {
    if let [t] = base.terms.as_slice() {
        if t.num.is_constant() && t.den.is_constant() {
            let coeff = if e.fract() == 0.0 { t.coeff.powi(e as i32) } else { t.coeff.powf(e) };
            return Ok(ScalarFn { terms: vec![Term::monomial(coeff, t.exp * e)] });
        }
    }
    if e.fract() != 0.0 || e.abs() > 64.0 {
        return Err("fractional powers apply to monomials only".into());
    }
    let mut acc = ScalarFn::constant(Complex64::new(1.0, 0.0));
    for _ in 0..e.abs() as usize {
        acc = acc.mul(base);
    }
    if e < 0.0 {
        let inv = acc.single_term().ok_or("cannot invert a zero base")?.inverse();
        acc = ScalarFn { terms: vec![inv] };
    }
    Ok(acc)
}

/// Parse one scalar entry.
pub fn parse_scalar(src: &str) -> Result<ScalarFn, String> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { toks, pos: 0 };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input after token {}", p.pos));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Lifted;

    fn at(re: f64, im: f64) -> Lifted {
        Lifted::principal(Complex64::new(re, im))
    }

    fn check(src: &str, z: Lifted, expect: Complex64) {
        let f = parse_scalar(src).unwrap();
        let v = f.eval(&z);
        assert!((v - expect).norm() < 1e-13, "{src}: {v} vs {expect}");
    }

    #[test]
    fn arithmetic() {
        let z = at(0.3, 0.7);
        let w = z.z;
        check("1 + 2*z", z, w * 2.0 + 1.0);
        check("3z^2 - i", z, w * w * 3.0 - Complex64::i());
        check("(z-1)^2/(z*(z+2))", z, (w - 1.0) * (w - 1.0) / (w * (w + 2.0)));
        check("-z^-1.5", z, -w.powf(-1.5));
        check("2.5e-1/z^2", z, 0.25 / (w * w));
        check("(2*z)^0.5", z, (w * 2.0).sqrt());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("z +").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("(z+1)^0.5").is_err());
        assert!(parse_scalar("z^z").is_err());
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn derivative_of_parsed_rational() {
        let f = parse_scalar("1/(z^2*(z-1)^2)").unwrap();
        let z = at(0.4, -0.2);
        let w = z.z;
        let expect = -(w * 4.0 - 2.0) / (w.powi(3) * (w - 1.0).powi(3));
        assert!((f.derivative().eval(&z) - expect).norm() < 1e-11);
    }
}
