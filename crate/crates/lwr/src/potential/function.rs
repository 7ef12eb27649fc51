//! Scalar and matrix meromorphic functions with exact differentiation.
//!
//! A [`Term`] is `c · z^a · P(z)/Q(z)` with real `a` and complex
//! polynomials `P`, `Q`. Terms are closed under products, inverses and
//! differentiation, so gauge actions stay inside the representation.

use std::fmt;

use num_complex::Complex64;

use crate::jet::{Jet, MatJet};
use crate::liealg::{Mat2, Mat2C};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of the domain together with a branch of `log z`, so that
/// fractional powers are continuous along paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lifted {
    pub z: Complex64,
    pub log: Complex64,
}

impl Lifted {
    pub fn new(z: Complex64, log: Complex64) -> Self {
        Lifted { z, log }
    }

    /// Principal branch of the logarithm.
    pub fn principal(z: Complex64) -> Self {
        Lifted { z, log: z.ln() }
    }

    /// Continue the logarithm from `self` to a nearby point `w`.
    pub fn continue_to(&self, w: Complex64) -> Self {
        if self.z == ZERO || w == ZERO {
            return Lifted::new(w, w.ln());
        }
        Lifted::new(w, self.log + (w / self.z).ln())
    }
}

/// Polynomial with ascending complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn one() -> Self {
        Poly(vec![ONE])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Poly::one(), |p, r| p.mul(&Poly(vec![-r, ONE])))
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == ZERO)
    }

    pub fn trimmed(mut self) -> Self {
        let d = self.degree();
        self.0.truncate(d + 1);
        if self.0.is_empty() {
            self.0.push(ZERO);
        }
        self
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).copied().unwrap_or(ZERO);
        Poly((0..n).map(|i| get(self, i) + get(o, i)).collect()).trimmed()
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect()).trimmed()
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![ZERO; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        let mut v = vec![ZERO; k];
        v.extend_from_slice(&self.0);
        Poly(v).trimmed()
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::constant(ZERO);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()).trimmed()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn jet(&self, z: Complex64) -> Jet {
        let x = Jet::variable(z);
        self.0.iter().rev().fold(Jet::constant(ZERO), |acc, c| acc * x + Jet::constant(*c))
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::one(), |p, _| p.mul(self))
    }
}

/// `coeff · z^exp · num(z)/den(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exp: f64,
    pub num: Poly,
    pub den: Poly,
}

impl Term {
    pub fn monomial(coeff: Complex64, exp: f64) -> Self {
        Term { coeff, exp, num: Poly::one(), den: Poly::one() }
    }

    pub fn rational(num: Poly, den: Poly) -> Self {
        Term { coeff: ONE, exp: 0.0, num, den }
    }

    fn is_monomial(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    fn has_integer_exp(&self) -> bool {
        self.exp.fract() == 0.0
    }

    pub fn mul(&self, o: &Term) -> Term {
        Term {
            coeff: self.coeff * o.coeff,
            exp: self.exp + o.exp,
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
        .normalized()
    }

    pub fn inverse(&self) -> Term {
        Term { coeff: self.coeff.inv(), exp: -self.exp, num: self.den.clone(), den: self.num.clone() }.normalized()
    }

    /// Fold constant numerator/denominator factors into the coefficient.
    fn normalized(mut self) -> Term {
        if self.num.is_constant() {
            self.coeff *= self.num.0[0];
            self.num = Poly::one();
        }
        if self.den.is_constant() {
            self.coeff /= self.den.0[0];
            self.den = Poly::one();
        }
        self
    }

    pub fn derivative(&self) -> Term {
        if self.is_monomial() {
            return Term::monomial(self.coeff * self.exp, self.exp - 1.0);
        }
        let (p, q) = (&self.num, &self.den);
        let wronsk = p.derivative().mul(q).add(&p.mul(&q.derivative()).scale(-ONE));
        let den = q.mul(q);
        if self.exp == 0.0 {
            return Term { coeff: self.coeff, exp: 0.0, num: wronsk, den }.normalized();
        }
        let num = p.mul(q).scale(Complex64::new(self.exp, 0.0)).add(&wronsk.shift(1));
        Term { coeff: self.coeff, exp: self.exp - 1.0, num, den }.normalized()
    }

    pub fn value(&self, at: &Lifted) -> Complex64 {
        let mut v = self.coeff;
        if self.exp != 0.0 {
            v *= if self.has_integer_exp() && self.exp.abs() < 64.0 {
                at.z.powi(self.exp as i32)
            } else {
                (at.log * self.exp).exp()
            };
        }
        if !self.num.is_constant() {
            v *= self.num.eval(at.z);
        }
        if !self.den.is_constant() {
            v /= self.den.eval(at.z);
        }
        v
    }

    pub fn jet(&self, at: &Lifted) -> Jet {
        let mut j = Jet::constant(self.coeff);
        if self.exp != 0.0 {
            j = j * Jet::power(at.z, at.log, self.exp);
        }
        if !self.num.is_constant() {
            j = j * self.num.jet(at.z);
        }
        if !self.den.is_constant() {
            j = j / self.den.jet(at.z);
        }
        j
    }

    /// Rewrite an integer-power term as a plain rational function.
    fn as_rational(&self) -> Option<(Poly, Poly)> {
        if !self.has_integer_exp() {
            return None;
        }
        let k = self.exp as i64;
        let num = self.num.scale(self.coeff);
        Some(if k >= 0 { (num.shift(k as usize), self.den.clone()) } else { (num, self.den.shift((-k) as usize)) })
    }
}

/// Finite sum of [`Term`]s.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarFn {
    pub terms: Vec<Term>,
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        ScalarFn::monomial(c, 0.0)
    }

    pub fn monomial(c: Complex64, exp: f64) -> Self {
        ScalarFn { terms: vec![Term::monomial(c, exp)] }.simplified()
    }

    pub fn rational(num: Poly, den: Poly) -> Self {
        ScalarFn { terms: vec![Term::rational(num, den).normalized()] }.simplified()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether evaluation needs a branch of `log z`.
    pub fn has_fractional_powers(&self) -> bool {
        self.terms.iter().any(|t| !t.has_integer_exp())
    }

    /// Merge monomials of equal exponent and drop zero terms.
    pub fn simplified(self) -> Self {
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            if t.coeff == ZERO || t.num.is_zero() {
                continue;
            }
            if t.is_monomial() {
                if let Some(m) = out.iter_mut().find(|m| m.is_monomial() && m.exp == t.exp) {
                    m.coeff += t.coeff;
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| t.coeff != ZERO);
        ScalarFn { terms: out }
    }

    pub fn add(&self, o: &ScalarFn) -> ScalarFn {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        ScalarFn { terms }.simplified()
    }

    pub fn neg(&self) -> ScalarFn {
        self.scale(-ONE)
    }

    pub fn sub(&self, o: &ScalarFn) -> ScalarFn {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: Complex64) -> ScalarFn {
        let terms = self.terms.iter().map(|t| Term { coeff: t.coeff * s, ..t.clone() }).collect();
        ScalarFn { terms }.simplified()
    }

    pub fn mul(&self, o: &ScalarFn) -> ScalarFn {
        let terms = self.terms.iter().flat_map(|a| o.terms.iter().map(move |b| a.mul(b))).collect();
        ScalarFn { terms }.simplified()
    }

    /// Collapse to a single term when possible (integer powers only).
    pub fn single_term(&self) -> Option<Term> {
        match self.terms.len() {
            0 => None,
            1 => Some(self.terms[0].clone()),
            _ => {
                let mut acc: Option<(Poly, Poly)> = None;
                for t in &self.terms {
                    let (n, d) = t.as_rational()?;
                    acc = Some(match acc {
                        None => (n, d),
                        Some((an, ad)) => (an.mul(&d).add(&n.mul(&ad)), ad.mul(&d)),
                    });
                }
                acc.map(|(n, d)| Term::rational(n, d).normalized())
            }
        }
    }

    /// `self / o`; `None` when `o` is zero or not expressible as one term.
    pub fn div(&self, o: &ScalarFn) -> Option<ScalarFn> {
        let inv = o.single_term()?.inverse();
        Some(self.mul(&ScalarFn { terms: vec![inv] }))
    }

    pub fn derivative(&self) -> ScalarFn {
        ScalarFn { terms: self.terms.iter().map(Term::derivative).collect() }.simplified()
    }

    pub fn jet(&self, at: &Lifted) -> Jet {
        self.terms.iter().fold(Jet::constant(ZERO), |acc, t| acc + t.jet(at))
    }

    pub fn eval(&self, at: &Lifted) -> Complex64 {
        self.terms.iter().map(|t| t.value(at)).sum()
    }

    /// Roots of all denominators, i.e. candidate poles away from 0.
    pub fn denominator_roots(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(poly_roots(&t.den));
        }
        out
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*z^{}", t.coeff, t.exp)?;
            if !t.num.is_constant() || !t.den.is_constant() {
                write!(f, "*[{:?}]/[{:?}]", t.num.0, t.den.0)?;
            }
        }
        Ok(())
    }
}

/// Roots of a polynomial by Durand–Kerner iteration (low degrees only).
pub fn poly_roots(p: &Poly) -> Vec<Complex64> {
    let p = p.clone().trimmed();
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.0[n];
    let monic: Vec<Complex64> = p.0.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(ZERO, |acc, c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powi(k as i32)).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = ONE;
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// 2×2 matrix of [`ScalarFn`] entries.
#[derive(Clone, Debug, PartialEq)]
pub struct MatFn {
    pub a: ScalarFn,
    pub b: ScalarFn,
    pub c: ScalarFn,
    pub d: ScalarFn,
}

impl MatFn {
    pub fn new(a: ScalarFn, b: ScalarFn, c: ScalarFn, d: ScalarFn) -> Self {
        MatFn { a, b, c, d }
    }

    pub fn zero() -> Self {
        MatFn::new(ScalarFn::zero(), ScalarFn::zero(), ScalarFn::zero(), ScalarFn::zero())
    }

    pub fn identity() -> Self {
        let one = ScalarFn::constant(ONE);
        MatFn::new(one.clone(), ScalarFn::zero(), ScalarFn::zero(), one)
    }

    pub fn constant(m: &Mat2C) -> Self {
        MatFn::new(ScalarFn::constant(m.a), ScalarFn::constant(m.b), ScalarFn::constant(m.c), ScalarFn::constant(m.d))
    }

    pub fn entries(&self) -> [&ScalarFn; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn map(&self, f: impl Fn(&ScalarFn) -> ScalarFn) -> MatFn {
        MatFn::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }

    pub fn add(&self, o: &MatFn) -> MatFn {
        MatFn::new(self.a.add(&o.a), self.b.add(&o.b), self.c.add(&o.c), self.d.add(&o.d))
    }

    pub fn scale(&self, s: Complex64) -> MatFn {
        self.map(|f| f.scale(s))
    }

    pub fn mul(&self, o: &MatFn) -> MatFn {
        MatFn::new(
            self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        )
    }

    pub fn adjugate(&self) -> MatFn {
        MatFn::new(self.d.clone(), self.b.neg(), self.c.neg(), self.a.clone())
    }

    pub fn derivative(&self) -> MatFn {
        self.map(ScalarFn::derivative)
    }

    pub fn det(&self) -> ScalarFn {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn has_fractional_powers(&self) -> bool {
        self.entries().iter().any(|f| f.has_fractional_powers())
    }

    pub fn jet(&self, at: &Lifted) -> MatJet {
        Mat2::new(self.a.jet(at), self.b.jet(at), self.c.jet(at), self.d.jet(at))
    }

    pub fn eval(&self, at: &Lifted) -> Mat2C {
        Mat2::new(self.a.eval(at), self.b.eval(at), self.c.eval(at), self.d.eval(at))
    }

    pub fn denominator_roots(&self) -> Vec<Complex64> {
        self.entries().iter().flat_map(|f| f.denominator_roots()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn numeric_derivative(f: &ScalarFn, at: &Lifted) -> Complex64 {
        let h = 1e-5;
        let p = at.continue_to(at.z + h);
        let m = at.continue_to(at.z - h);
        (f.eval(&p) - f.eval(&m)) / (2.0 * h)
    }

    #[test]
    fn term_derivative_matches_difference_quotient() {
        let f = ScalarFn {
            terms: vec![
                Term {
                    coeff: cx(0.5, 1.0),
                    exp: 0.5,
                    num: Poly(vec![cx(1.0, 0.0), cx(-2.0, 0.3)]),
                    den: Poly(vec![cx(2.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]),
                },
                Term::monomial(cx(3.0, 0.0), -2.0),
            ],
        };
        let at = Lifted::principal(cx(0.8, 0.6));
        let exact = f.derivative().eval(&at);
        assert!((exact - numeric_derivative(&f, &at)).norm() < 1e-8);
        assert!((exact - f.jet(&at).deriv(1)).norm() < 1e-12);
    }

    #[test]
    fn inverse_and_division() {
        let p = ScalarFn { terms: vec![Term::monomial(ONE, 2.0), Term::monomial(cx(-1.0, 0.0), 0.0)] };
        let q = ScalarFn::monomial(cx(2.0, 0.0), 1.0).div(&p).unwrap();
        let at = Lifted::principal(cx(1.7, -0.2));
        let z = at.z;
        assert!((q.eval(&at) - 2.0 * z / (z * z - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn roots_of_quadratic() {
        let r = poly_roots(&Poly(vec![ONE, -ONE, ONE]));
        for z in r {
            assert!((z * z - z + 1.0).norm() < 1e-13);
            assert!((z.norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn lift_continues_across_the_cut() {
        let mut at = Lifted::principal(cx(1.0, 0.0));
        for k in 1..=16 {
            let t = std::f64::consts::TAU * k as f64 / 16.0;
            at = at.continue_to(Complex64::from_polar(1.0, t));
        }
        assert!((at.log - cx(0.0, std::f64::consts::TAU)).norm() < 1e-12);
    }
}
