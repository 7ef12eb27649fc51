//! 2×2 complex matrix algebra and the matrix models of E³ and H³.
//!
//! `Mat2` is generic over the scalar so the same arithmetic serves plain
//! complex values and truncated Taylor jets (see [`crate::jet`]).

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{LwrError, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Field-like scalar used by [`Mat2`] and [`Spinor2`].
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_complex(z: Complex64) -> Self;
    fn zero() -> Self {
        Self::from_complex(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Self::from_complex(Complex64::new(1.0, 0.0))
    }
}

impl Scalar for Complex64 {
    fn from_complex(z: Complex64) -> Self {
        z
    }
}

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T = Complex64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

pub type Mat2C = Mat2<Complex64>;

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Mat2::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn diag(a: T, d: T) -> Self {
        Mat2::new(a, T::zero(), T::zero(), d)
    }

    pub fn from_complex(m: &Mat2C) -> Self {
        Mat2::new(T::from_complex(m.a), T::from_complex(m.b), T::from_complex(m.c), T::from_complex(m.d))
    }

    /// Matrix with columns `x` and `y`.
    pub fn from_columns(x: Spinor2<T>, y: Spinor2<T>) -> Self {
        Mat2::new(x.u, y.u, x.v, y.v)
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    /// Adjugate `x̂`, so that `x x̂ = det(x) I`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    /// Inverse through the adjugate. Callers guarantee `det ≠ 0`.
    pub fn inverse(&self) -> Self {
        self.adjugate().scale(T::one() / self.det())
    }

    pub fn scale(&self, s: T) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn apply(&self, x: Spinor2<T>) -> Spinor2<T> {
        Spinor2::new(self.a * x.u + self.b * x.v, self.c * x.u + self.d * x.v)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Mat2::new(f(self.a), f(self.b), f(self.c), f(self.d))
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mat2C {
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(re(a), re(b), re(c), re(d))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat2::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues `tr/2 ± √(((a−d)/2)² + bc)`. The discriminant avoids the
    /// cancellation in `(tr/2)² − det` near a double eigenvalue.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let h = self.trace() * 0.5;
        let g = (self.a - self.d) * 0.5;
        let s = (g * g + self.b * self.c).sqrt();
        (h + s, h - s)
    }

    /// Matrix exponential via the Cayley–Hamilton closed form.
    pub fn exp(&self) -> Self {
        let h = self.trace() * 0.5;
        let n = *self - Mat2C::identity().scale(h);
        let s = (-n.det()).sqrt();
        let sinhc = if s.norm() < 1e-4 {
            let s2 = s * s;
            re(1.0) + s2 / 6.0 + s2 * s2 / 120.0
        } else {
            s.sinh() / s
        };
        (Mat2C::identity().scale(s.cosh()) + n.scale(sinhc)).scale(h.exp())
    }

    /// Distance from su2: skew-Hermitian and trace-free.
    pub fn su2_residual(&self) -> f64 {
        (*self + self.adjoint()).norm() + self.trace().norm()
    }

    /// Distance from SU2: unitary with unit determinant.
    pub fn su2_group_residual(&self) -> f64 {
        (*self * self.adjoint() - Mat2C::identity()).norm() + (self.det() - 1.0).norm()
    }

    /// Principal square root of a positive definite Hermitian matrix.
    pub fn hermitian_sqrt(&self) -> Self {
        let s = self.det().re.max(0.0).sqrt();
        let t = (self.trace().re + 2.0 * s).sqrt();
        (*self + Mat2C::identity().scale(re(s))).scale(re(1.0 / t))
    }

    /// Rescale by `1/√det` so the result lies in SL2C.
    pub fn normalize_det(&self) -> Self {
        self.scale(self.det().sqrt().inv())
    }
}

/// The triple `(x̂, ⟨x,y⟩, x×y)`.
pub fn adjugate_inner_cross(x: &Mat2C, y: &Mat2C) -> (Mat2C, Complex64, Mat2C) {
    (x.adjugate(), inner(x, y), cross(x, y))
}

/// Complex bilinear form `⟨x,y⟩ = −½ tr(x ŷ)`; on Hermitian matrices it is
/// the Minkowski inner product and `⟨x,x⟩ = −det x`.
pub fn inner<T: Scalar>(x: &Mat2<T>, y: &Mat2<T>) -> T {
    -(*x * y.adjugate()).trace() * T::from_complex(re(0.5))
}

/// Cross product `x × y = −(i/2)[x,y]` on E³.
pub fn cross(x: &Mat2C, y: &Mat2C) -> Mat2C {
    x.commutator(y).scale(c(0.0, -0.5))
}

/// Column vector `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor2<T = Complex64> {
    pub u: T,
    pub v: T,
}

impl<T: Scalar> Spinor2<T> {
    pub fn new(u: T, v: T) -> Self {
        Spinor2 { u, v }
    }

    /// Row vector `x^⊥ = (−v, u)`, returned as its two entries.
    pub fn perp(&self) -> (T, T) {
        (-self.v, self.u)
    }

    /// Nilpotent matrix `x x^⊥`.
    pub fn outer_perp(&self) -> Mat2<T> {
        let (p, q) = self.perp();
        Mat2::new(self.u * p, self.u * q, self.v * p, self.v * q)
    }

    /// `det(x, y)`, i.e. `x^⊥ y`.
    pub fn det_with(&self, y: &Spinor2<T>) -> T {
        self.u * y.v - self.v * y.u
    }

    pub fn scale(&self, s: T) -> Self {
        Spinor2::new(self.u * s, self.v * s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Spinor2::new(self.u + o.u, self.v + o.v)
    }
}

impl Spinor2 {
    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    /// The Hermitian-orthogonal line `(−v̄, ū)`.
    pub fn hermitian_orthogonal(&self) -> Self {
        Spinor2::new(-self.v.conj(), self.u.conj())
    }
}

/// Default relative tolerance for nilpotency of a linear part.
pub const NILPOTENT_TOL: f64 = 1e-10;

/// Spinor `x` with `x x^⊥ = A` for a nilpotent `A`.
///
/// Branch rule: the square root is taken of the larger off-diagonal entry,
/// `u = √A₁₂` when `|A₁₂| ≥ |A₂₁|`, otherwise `v = √(−A₂₁)`.
pub fn spinor_of_nilpotent(a: &Mat2C) -> Result<Spinor2> {
    let n = a.norm();
    if a.det().norm() > NILPOTENT_TOL * n * n || a.trace().norm() > NILPOTENT_TOL * n {
        return Err(LwrError::NotNilpotent { det: a.det().norm(), trace: a.trace().norm() });
    }
    if n == 0.0 {
        return Ok(Spinor2::new(re(0.0), re(0.0)));
    }
    Ok(if a.b.norm() >= a.c.norm() {
        let u = a.b.sqrt();
        Spinor2::new(u, -a.a / u)
    } else {
        let v = (-a.c).sqrt();
        Spinor2::new(-a.a / v, v)
    })
}

/// Hermitian trace-free matrix modelling a point (or vector) of E³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct E3Point(pub Mat2C);

impl E3Point {
    pub fn new(m: Mat2C) -> Result<Self> {
        let n = m.norm().max(f64::MIN_POSITIVE);
        let herm = (m - m.adjoint()).norm();
        if herm > 1e-12 * n.max(1.0) || m.trace().norm() > 1e-12 * n.max(1.0) {
            return Err(LwrError::NotEuclidean { residual: herm + m.trace().norm() });
        }
        Ok(E3Point(m))
    }

    /// `[[x3, x1 + i x2], [x1 − i x2, −x3]]`.
    pub fn from_coords(x: [f64; 3]) -> Self {
        E3Point(Mat2::new(re(x[2]), c(x[0], x[1]), c(x[0], -x[1]), re(-x[2])))
    }

    pub fn coords(&self) -> [f64; 3] {
        let m = &self.0;
        [0.5 * (m.b.re + m.c.re), 0.5 * (m.b.im - m.c.im), 0.5 * (m.a.re - m.d.re)]
    }

    pub fn length(&self) -> f64 {
        inner(&self.0, &self.0).re.max(0.0).sqrt()
    }
}

/// Hermitian matrix with unit determinant and positive trace: a point of H³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H3Point(pub Mat2C);

impl H3Point {
    pub fn new(m: Mat2C) -> Result<Self> {
        let n = m.norm().max(1.0);
        let herm = (m - m.adjoint()).norm();
        let det = (m.det() - 1.0).norm();
        if herm > 1e-12 * n || det > 1e-10 * n * n || m.trace().re <= 0.0 {
            return Err(LwrError::NotHyperbolic { hermitian: herm, det });
        }
        Ok(H3Point(m))
    }

    /// Poincaré ball coordinates `(x1, x2, x3)/(1 + x0)`.
    pub fn ball(&self) -> [f64; 3] {
        let m = &self.0;
        let x0 = 0.5 * (m.a.re + m.d.re);
        let x3 = 0.5 * (m.a.re - m.d.re);
        let (x1, x2) = (0.5 * (m.b.re + m.c.re), 0.5 * (m.b.im - m.c.im));
        let s = 1.0 / (1.0 + x0);
        [x1 * s, x2 * s, x3 * s]
    }
}

/// Point of the Riemann sphere kept as a projective pair `[u : v]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projective(pub Spinor2);

impl Projective {
    /// `u/v`, or `None` at infinity.
    pub fn value(&self) -> Option<Complex64> {
        let Spinor2 { u, v } = self.0;
        if v.norm() == 0.0 || !(u / v).is_finite() {
            None
        } else {
            Some(u / v)
        }
    }

    /// `v/u`, the coordinate in the chart at infinity.
    pub fn reciprocal(&self) -> Option<Complex64> {
        Projective(Spinor2::new(self.0.v, self.0.u)).value()
    }
}

/// Inverse stereographic projection `St⁻¹(u/v) = I − 2‖ν‖⁻² ν ν*`.
pub fn stereo_inverse(nu: Spinor2) -> Result<E3Point> {
    let n2 = nu.norm_sqr();
    if n2 == 0.0 {
        return Err(LwrError::NotUnit { norm: 0.0 });
    }
    let outer = Mat2::new(nu.u * nu.u.conj(), nu.u * nu.v.conj(), nu.v * nu.u.conj(), nu.v * nu.v.conj());
    Ok(E3Point(Mat2C::identity() - outer.scale(re(2.0 / n2))))
}

/// Stereographic projection of a unit vector `N` to `[u : v]`: the −1
/// eigenline of `N`.
pub fn stereo(n: &E3Point) -> Result<Projective> {
    let len = n.length();
    if (len - 1.0).abs() > 1e-10 {
        return Err(LwrError::NotUnit { norm: len });
    }
    let p = (Mat2C::identity() - n.0).scale(re(0.5));
    let col1 = Spinor2::new(p.a, p.c);
    let col2 = Spinor2::new(p.b, p.d);
    Ok(Projective(if col1.norm_sqr() >= col2.norm_sqr() { col1 } else { col2 }))
}

/// Isometric action `X ↦ V X V*` of SL2C on H³.
pub fn act_h3(v: &Mat2C, x: &H3Point) -> H3Point {
    H3Point(*v * x.0 * v.adjoint())
}

/// Ordered evaluation pair `(λ₀, λ₁)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvaluationPair {
    pub lambda0: Complex64,
    pub lambda1: Complex64,
}

impl EvaluationPair {
    pub fn new(lambda0: Complex64, lambda1: Complex64) -> Result<Self> {
        if lambda0 == lambda1 || !(lambda0 - lambda1).is_finite() {
            return Err(LwrError::BadWeights("evaluation points must be distinct".into()));
        }
        Ok(EvaluationPair { lambda0, lambda1 })
    }

    /// `λ₁ − λ₀`.
    pub fn difference(&self) -> Complex64 {
        self.lambda1 - self.lambda0
    }

    pub fn swapped(&self) -> Self {
        EvaluationPair { lambda0: self.lambda1, lambda1: self.lambda0 }
    }
}
