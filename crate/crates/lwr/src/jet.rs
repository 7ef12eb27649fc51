//! Truncated Taylor series in `h = z − z₀`.
//!
//! Jets give exact derivatives of the function representation to rounding
//! error, which is what the Hopf, Schwarzian and dressing formulas need.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::liealg::{Mat2, Scalar, Spinor2};

/// Number of stored Taylor coefficients.
pub const LEN: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `f⁽ᵏ⁾(z₀)/k!` for `k < LEN`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [Complex64; LEN]);

pub type MatJet = Mat2<Jet>;
pub type SpinorJet = Spinor2<Jet>;

impl Jet {
    pub fn constant(z: Complex64) -> Self {
        let mut c = [ZERO; LEN];
        c[0] = z;
        Jet(c)
    }

    /// The identity function `z` expanded at `z₀`.
    pub fn variable(z0: Complex64) -> Self {
        let mut c = [ZERO; LEN];
        c[0] = z0;
        c[1] = Complex64::new(1.0, 0.0);
        Jet(c)
    }

    pub fn value(&self) -> Complex64 {
        self.0[0]
    }

    /// `k`-th derivative at `z₀`.
    pub fn deriv(&self, k: usize) -> Complex64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }

    /// Jet of `f′`; the top coefficient is lost.
    pub fn derivative(&self) -> Self {
        let mut c = [ZERO; LEN];
        for k in 0..LEN - 1 {
            c[k] = self.0[k + 1] * (k + 1) as f64;
        }
        Jet(c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Jet(self.0.map(|x| x * s))
    }

    /// `(z₀ + h)^a` with `z₀^a = exp(a·log_z0)` on the supplied branch.
    pub fn power(z0: Complex64, log_z0: Complex64, a: f64) -> Self {
        let mut c = [ZERO; LEN];
        if z0 == ZERO && a.fract() == 0.0 && a >= 0.0 {
            if (a as usize) < LEN {
                c[a as usize] = Complex64::new(1.0, 0.0);
            }
            return Jet(c);
        }
        if a.fract() == 0.0 && a.abs() < 64.0 {
            c[0] = z0.powi(a as i32);
        } else {
            c[0] = (log_z0 * a).exp();
        }
        let inv = z0.inv();
        let mut binom = 1.0;
        for k in 1..LEN {
            binom *= (a - (k as f64 - 1.0)) / k as f64;
            c[k] = if binom == 0.0 { ZERO } else { c[0] * inv.powi(k as i32) * binom };
        }
        Jet(c)
    }

    pub fn sqrt(&self) -> Self {
        let mut s = [ZERO; LEN];
        s[0] = self.0[0].sqrt();
        let two_s0 = s[0] * 2.0;
        for k in 1..LEN {
            let mut acc = self.0[k];
            for i in 1..k {
                acc -= s[i] * s[k - i];
            }
            s[k] = acc / two_s0;
        }
        Jet(s)
    }

    pub fn norm(&self) -> f64 {
        self.0[0].norm()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(c)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0) {
            *x -= y;
        }
        Jet(c)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|x| -x))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [ZERO; LEN];
        for i in 0..LEN {
            if self.0[i] == ZERO {
                continue;
            }
            for j in 0..LEN - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [ZERO; LEN];
        let inv = o.0[0].inv();
        for k in 0..LEN {
            let mut acc = self.0[k];
            for i in 1..=k {
                acc -= o.0[i] * q[k - i];
            }
            q[k] = acc * inv;
        }
        Jet(q)
    }
}

impl Scalar for Jet {
    fn from_complex(z: Complex64) -> Self {
        Jet::constant(z)
    }
}

pub fn mat_value(m: &MatJet) -> Mat2<Complex64> {
    m.map_to(|j| j.value())
}

pub fn mat_derivative(m: &MatJet) -> MatJet {
    m.map(|j| j.derivative())
}

pub fn spinor_value(x: &SpinorJet) -> Spinor2 {
    Spinor2::new(x.u.value(), x.v.value())
}

pub fn spinor_derivative(x: &SpinorJet) -> SpinorJet {
    Spinor2::new(x.u.derivative(), x.v.derivative())
}

impl<T: Scalar> Mat2<T> {
    pub fn map_to<S: Scalar>(&self, f: impl Fn(T) -> S) -> Mat2<S> {
        Mat2::new(f(self.a), f(self.b), f(self.c), f(self.d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_quotient_rules() {
        let z0 = cx(0.7, -0.4);
        let z = Jet::variable(z0);
        // f = z^3/(1+z), f' = (3z^2(1+z) - z^3)/(1+z)^2
        let f = z * z * z / (Jet::constant(cx(1.0, 0.0)) + z);
        let expect = (z0 * z0 * 3.0 * (z0 + 1.0) - z0 * z0 * z0) / ((z0 + 1.0) * (z0 + 1.0));
        assert!((f.deriv(1) - expect).norm() < 1e-14);
    }

    #[test]
    fn power_and_sqrt_agree() {
        let z0 = cx(1.3, 0.9);
        let p = Jet::power(z0, z0.ln(), 0.5);
        let s = Jet::variable(z0).sqrt();
        for k in 0..LEN {
            assert!((p.0[k] - s.0[k]).norm() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn derivative_of_exp_series() {
        let z0 = cx(0.2, 0.1);
        let p = Jet::power(z0, z0.ln(), 3.0);
        assert!((p.deriv(3) - cx(6.0, 0.0)).norm() < 1e-12);
        assert!(p.deriv(4).norm() < 1e-12);
        assert!((p.derivative().deriv(1) - z0 * 6.0).norm() < 1e-12);
    }
}
