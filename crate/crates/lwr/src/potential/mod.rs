//! λ-affine potentials `ξ = (Aλ + B)dz`, gauges, spinor fields, the Hopf
//! invariant and the Schwarzian derivative.

mod function;
pub mod parse;

pub use function::{poly_roots, Lifted, MatFn, Poly, ScalarFn, Term};

use num_complex::Complex64;

use crate::error::{LwrError, Result};
use crate::jet::{mat_value, spinor_derivative, spinor_value, Jet, MatJet, SpinorJet, LEN};
use crate::liealg::{re, spinor_of_nilpotent, Mat2, Mat2C, Spinor2, I, NILPOTENT_TOL};
use crate::EvaluationPair;

/// Topology of the domain the potential lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Plane,
    PuncturedPlane,
    PuncturedSphere,
}

/// Distance below which a point counts as sitting on a pole.
const POLE_HIT: f64 = 1e-12;
/// Determinant tolerance of gauges.
const GAUGE_DET_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Potential {
    pub a: MatFn,
    pub b: MatFn,
    pub poles: Vec<Complex64>,
    pub domain: DomainKind,
}

impl Potential {
    pub fn new(a: MatFn, b: MatFn, poles: Vec<Complex64>, domain: DomainKind) -> Self {
        Potential { a, b, poles, domain }
    }

    /// Whether evaluation needs a continuous branch of `log z`.
    pub fn needs_log(&self) -> bool {
        self.a.has_fractional_powers() || self.b.has_fractional_powers()
    }

    pub fn pole_distance(&self, z: Complex64) -> f64 {
        self.poles.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Values of `A` and `B` without pole checks (hot path of the integrator).
    pub fn values(&self, at: &Lifted) -> (Mat2C, Mat2C) {
        (self.a.eval(at), self.b.eval(at))
    }

    pub fn xi(&self, at: &Lifted, lambda: Complex64) -> Mat2C {
        let (a, b) = self.values(at);
        a.scale(lambda) + b
    }

    /// Taylor jets of `A` and `B` at a point.
    pub fn jets(&self, at: &Lifted) -> Result<(MatJet, MatJet)> {
        if self.pole_distance(at.z) < POLE_HIT {
            return Err(LwrError::PoleCollision { z: at.z });
        }
        let (a, b) = (self.a.jet(at), self.b.jet(at));
        let finite = |m: &MatJet| mat_value(m).is_finite();
        if !finite(&a) || !finite(&b) {
            return Err(LwrError::PoleCollision { z: at.z });
        }
        Ok((a, b))
    }

    pub fn xi_jet(&self, at: &Lifted, lambda: Complex64) -> Result<MatJet> {
        let (a, b) = self.jets(at)?;
        Ok(a.scale(Jet::constant(lambda)) + b)
    }

    /// Check the potential's invariants at one point: nilpotent linear part
    /// and trace-free constant part.
    pub fn check_at(&self, at: &Lifted) -> Result<()> {
        let (a, b) = self.values(at);
        let tol = 1e-10 * (1.0 + a.norm() * a.norm());
        if a.det().norm() > tol || a.trace().norm() > tol {
            return Err(LwrError::NotNilpotent { det: a.det().norm(), trace: a.trace().norm() });
        }
        if b.trace().norm() > 1e-10 * (1.0 + b.norm()) {
            return Err(LwrError::NotNilpotent { det: 0.0, trace: b.trace().norm() });
        }
        Ok(())
    }
}

/// λ-independent meromorphic gauge with `det g ≡ 1`.
#[derive(Clone, Debug)]
pub struct Gauge {
    pub g: MatFn,
    pub poles: Vec<Complex64>,
}

impl Gauge {
    /// Rejects `g` unless `|det g − 1| ≤ 1e-10` at probe points.
    pub fn new(g: MatFn, poles: Vec<Complex64>) -> Result<Self> {
        let gauge = Gauge { g, poles };
        for k in 0..8 {
            let z = Complex64::from_polar(0.4 + 0.15 * k as f64, 2.399_963_229_7 * k as f64 + 0.2);
            let at = Lifted::principal(z);
            let Ok(m) = gauge.eval(&at) else { continue };
            let residual = (m.det() - 1.0).norm();
            if residual > GAUGE_DET_TOL {
                return Err(LwrError::BadWeights(format!("gauge has |det g - 1| = {residual:.3e} at z = {z}")));
            }
        }
        Ok(gauge)
    }

    pub fn constant(m: &Mat2C) -> Result<Self> {
        Self::new(MatFn::constant(m), Vec::new())
    }

    pub fn eval(&self, at: &Lifted) -> Result<Mat2C> {
        if self.poles.iter().any(|p| (at.z - p).norm() < POLE_HIT) {
            return Err(LwrError::PoleCollision { z: at.z });
        }
        let m = self.g.eval(at);
        if !m.is_finite() {
            return Err(LwrError::PoleCollision { z: at.z });
        }
        Ok(m)
    }

    /// `|det g − 1|` at a sample point.
    pub fn det_residual(&self, at: &Lifted) -> Result<f64> {
        Ok((self.eval(at)?.det() - 1.0).norm())
    }

    /// Product `g h` (apply `g` first, then `h`).
    pub fn then(&self, h: &Gauge) -> Gauge {
        let mut poles = self.poles.clone();
        poles.extend(h.poles.iter().copied());
        Gauge { g: self.g.mul(&h.g), poles }
    }
}

/// `ξ·g = g⁻¹ξg + g⁻¹dg`.
pub fn gauge_apply(xi: &Potential, g: &Gauge) -> Potential {
    let ginv = g.g.adjugate();
    let a = ginv.mul(&xi.a).mul(&g.g);
    let b = ginv.mul(&xi.b).mul(&g.g).add(&ginv.mul(&g.g.derivative()));
    let mut poles = xi.poles.clone();
    for p in &g.poles {
        if !poles.iter().any(|q| (q - p).norm() < POLE_HIT) {
            poles.push(*p);
        }
    }
    Potential::new(a, b, poles, xi.domain)
}

/// Spinor field of a nilpotent matrix jet, following the branch rule of
/// [`spinor_of_nilpotent`] at the expansion point.
pub fn spinor_jet(a: &MatJet) -> Result<SpinorJet> {
    let v = mat_value(a);
    spinor_of_nilpotent(&v)?;
    let zero = Jet::constant(re(0.0));
    if v.b.norm() == 0.0 && v.c.norm() == 0.0 {
        return Ok(Spinor2::new(zero, zero));
    }
    Ok(if v.b.norm() >= v.c.norm() {
        let u = a.b.sqrt();
        Spinor2::new(u, -a.a / u)
    } else {
        let w = (-a.c).sqrt();
        Spinor2::new(-a.a / w, w)
    })
}

/// Jet of the invariant `q = det(x, Bx + x_z)`.
pub fn q_jet(xi: &Potential, at: &Lifted) -> Result<Jet> {
    let (a, b) = xi.jets(at)?;
    q_of_jets(&a, &b)
}

/// `det(x, Bx + x_z)` from jets of `A` and `B`.
pub fn q_of_jets(a: &MatJet, b: &MatJet) -> Result<Jet> {
    let x = spinor_jet(a)?;
    Ok(x.det_with(&b.apply(x).add(&spinor_derivative(&x))))
}

/// Spinor `x`, its derivative `x_z` and the Hopf coefficient
/// `Q = (λ₁−λ₀)·det(x, Bx + x_z)` at a point.
pub fn spinor_field_and_hopf(
    xi: &Potential,
    ev: &EvaluationPair,
    at: &Lifted,
) -> Result<(Spinor2, Spinor2, Complex64)> {
    let (a, b) = xi.jets(at)?;
    let x = spinor_jet(&a)?;
    let dx = spinor_derivative(&x);
    let q = x.det_with(&b.apply(x).add(&dx)).value();
    Ok((spinor_value(&x), spinor_value(&dx), ev.difference() * q))
}

/// Schwarzian `(g″/2g′)² − (g″/2g′)′` of an explicit function.
pub fn schwarzian(g: &ScalarFn, at: &Lifted) -> Result<Complex64> {
    schwarzian_of_jet(&g.jet(at), at.z)
}

/// Schwarzian from a Taylor jet: `¾(g″/g′)² − ½ g‴/g′`.
pub fn schwarzian_of_jet(j: &Jet, z: Complex64) -> Result<Complex64> {
    let (g0, g1, g2, g3) = (j.deriv(0), j.deriv(1), j.deriv(2), j.deriv(3));
    let scale = g0.norm().max(1.0);
    if g1.norm() < 1e-13 * scale || !g1.is_finite() {
        return Err(LwrError::CriticalPoint { z });
    }
    let r = g2 / g1;
    Ok(r * r * 0.75 - g3 / g1 * 0.5)
}

/// Schwarzian of `u/v`, switching to `v/u` when `v` is the smaller entry
/// (the Schwarzian is invariant under `G ↦ 1/G`).
pub fn schwarzian_of_ratio(u: &Jet, v: &Jet, z: Complex64) -> Result<Complex64> {
    if v.norm() >= u.norm() {
        schwarzian_of_jet(&(*u / *v), z)
    } else {
        schwarzian_of_jet(&(*v / *u), z)
    }
}

/// Local expansion of a frame: given `Φ(z₀)` and the jet `E` of `ξ` at
/// `z₀`, returns the jet of `Φ` solving `Φ′ = Φξ`.
pub fn frame_jet(phi: &Mat2C, xi: &MatJet) -> MatJet {
    let (u, _) = propagate_series(xi, None);
    from_coeffs(&u.map(|m| *phi * m))
}

/// Jets of `Φ` and of its λ-derivative `Φ̇`, where `Φ̇′ = Φ̇ξ + ΦA`.
pub fn frame_jet_with_derivative(phi: &Mat2C, phidot: &Mat2C, xi: &MatJet, a: &MatJet) -> (MatJet, MatJet) {
    let (u, v) = propagate_series(xi, Some(a));
    let v = v.expect("derivative series requested");
    let mut d = [Mat2C::zero(); LEN];
    for k in 0..LEN {
        d[k] = *phidot * u[k] + *phi * v[k];
    }
    (from_coeffs(&u.map(|m| *phi * m)), from_coeffs(&d))
}

fn coeffs(m: &MatJet) -> [Mat2C; LEN] {
    std::array::from_fn(|k| Mat2::new(m.a.0[k], m.b.0[k], m.c.0[k], m.d.0[k]))
}

fn from_coeffs(c: &[Mat2C; LEN]) -> MatJet {
    Mat2::new(
        Jet(std::array::from_fn(|k| c[k].a)),
        Jet(std::array::from_fn(|k| c[k].b)),
        Jet(std::array::from_fn(|k| c[k].c)),
        Jet(std::array::from_fn(|k| c[k].d)),
    )
}

/// Taylor coefficients of `U′ = UE, U(0) = I` and optionally
/// `V′ = VE + UA, V(0) = 0`.
fn propagate_series(e: &MatJet, a: Option<&MatJet>) -> ([Mat2C; LEN], Option<[Mat2C; LEN]>) {
    let e = coeffs(e);
    let a = a.map(coeffs);
    let mut u = [Mat2C::zero(); LEN];
    let mut v = [Mat2C::zero(); LEN];
    u[0] = Mat2C::identity();
    for k in 0..LEN - 1 {
        let mut su = Mat2C::zero();
        let mut sv = Mat2C::zero();
        for j in 0..=k {
            su = su + u[j] * e[k - j];
            if let Some(a) = &a {
                sv = sv + v[j] * e[k - j] + u[j] * a[k - j];
            }
        }
        let inv = re(1.0 / (k + 1) as f64);
        u[k + 1] = su.scale(inv);
        v[k + 1] = sv.scale(inv);
    }
    (u, a.map(|_| v))
}

/// Result of [`fuchsian_normalize`]: `g⁻¹Kg = [[0,1],[qλ+p,0]]`.
#[derive(Clone, Copy, Debug)]
pub struct FuchsianForm {
    pub gauge: Mat2C,
    pub q: Complex64,
    pub p: Complex64,
}

impl FuchsianForm {
    /// Linear and constant parts of the normalized residue.
    pub fn residue(&self) -> (Mat2C, Mat2C) {
        (Mat2::new(re(0.0), re(0.0), self.q, re(0.0)), Mat2::new(re(0.0), re(1.0), self.p, re(0.0)))
    }
}

/// Conjugate a Fuchsian residue `K = Aλ + B` (constant in `z`) into the
/// normal form `[[0,1],[qλ+p,0]]` with the gauge chain `g₁g₂g₃`.
pub fn fuchsian_normalize(a: &Mat2C, b: &Mat2C) -> Result<FuchsianForm> {
    let q = -(a.a * b.d + a.d * b.a - a.b * b.c - a.c * b.b);
    let p = -b.det();
    if q.norm() <= 1e-12 * (1.0 + a.norm() * b.norm()) {
        return Err(LwrError::ZeroWeight);
    }
    let conj = |g: &Mat2C, m: &Mat2C| g.inverse() * *m * *g;
    let mut gauge = Mat2C::identity();
    let (mut a, mut b) = (*a, *b);
    let mut x = spinor_of_nilpotent(&a)?;
    if x.v.norm() <= NILPOTENT_TOL * x.u.norm() {
        let swap = Mat2::new(re(0.0), I, I, re(0.0));
        a = conj(&swap, &a);
        b = conj(&swap, &b);
        gauge = gauge * swap;
        x = spinor_of_nilpotent(&a)?;
    }
    let g1 = Mat2::new(x.v.inv(), x.u, re(0.0), x.v);
    // sign of the root aligned with v so an already normal residue maps to I
    let mut root = (-q).sqrt();
    if (root * x.v.conj()).re < 0.0 {
        root = -root;
    }
    let g2 = Mat2::diag(root, root.inv());
    let g12 = g1 * g2;
    let b2 = conj(&g12, &b);
    let g3 = Mat2::new(re(1.0), re(0.0), -b2.a, re(1.0));
    gauge = gauge * g12 * g3;
    Ok(FuchsianForm { gauge, q, p })
}

/// Schwarz data sampled at a point: `q` and `s` with `S[u/v] = λ₀q + s`.
#[derive(Clone, Copy, Debug)]
pub struct SchwarzSample {
    pub z: Complex64,
    pub q: Complex64,
    pub s: Complex64,
}

#[derive(Clone, Debug)]
pub struct SchwarzData {
    pub samples: Vec<SchwarzSample>,
}

/// Schwarzian of the Gauss map `u/v`, `(u, v) = Φ_λ x`, computed from the
/// frame value at `λ` and exact jets of the potential.
pub fn gauss_schwarzian(xi: &Potential, lambda: Complex64, at: &Lifted, phi: &Mat2C) -> Result<Complex64> {
    let (a, b) = xi.jets(at)?;
    let x = spinor_jet(&a)?;
    let phi_jet = frame_jet(phi, &(a.scale(Jet::constant(lambda)) + b));
    let y = phi_jet.apply(x);
    schwarzian_of_ratio(&y.u, &y.v, at.z)
}

/// `q` and `s = S[u/v]|_{λ₀} − λ₀q` at each sample `(point, Φ_{λ₀})`.
pub fn schwarz_data(xi: &Potential, lambda0: Complex64, samples: &[(Lifted, Mat2C)]) -> Result<SchwarzData> {
    if is_degenerate(xi) {
        return Err(LwrError::Degenerate);
    }
    let samples = samples
        .iter()
        .map(|(at, phi)| {
            let q = q_jet(xi, at)?.value();
            let s = gauss_schwarzian(xi, lambda0, at, phi)? - lambda0 * q;
            Ok(SchwarzSample { z: at.z, q, s })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchwarzData { samples })
}

/// Degeneracy probe: `q` vanishes at eight scattered points.
pub fn is_degenerate(xi: &Potential) -> bool {
    let mut checked = 0;
    let mut scale = 1.0f64;
    let mut values = Vec::new();
    for k in 0..64 {
        if checked == 8 {
            break;
        }
        // golden-angle spiral in the annulus 0.35 ≤ |z| ≤ 1.65
        let r = 0.35 + 1.3 * ((k as f64 * 0.618_033_988_75) % 1.0);
        let z = Complex64::from_polar(r, 2.399_963_229_7 * k as f64 + 0.3);
        if xi.pole_distance(z) < 0.05 {
            continue;
        }
        let at = Lifted::principal(z);
        if let Ok(q) = q_jet(xi, &at) {
            let (a, b) = xi.values(&at);
            scale = scale.max(a.norm() * (b.norm() + 1.0));
            values.push(q.value().norm());
            checked += 1;
        }
    }
    values.iter().all(|q| *q < 1e-12 * scale)
}

/// Constant matrix helper used by generators: `[[0,1],[w,0]]`.
pub fn companion(w: Complex64) -> Mat2C {
    Mat2::new(re(0.0), re(1.0), w, re(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(c: f64, e: f64) -> ScalarFn {
        ScalarFn::monomial(cx(c, 0.0), e)
    }

    fn zero() -> ScalarFn {
        ScalarFn::zero()
    }

    /// Catenoid potential `[[0,1],[qλ+p,0]]dz/z`.
    fn catenoid(p: f64, q: f64) -> Potential {
        Potential::new(
            MatFn::new(zero(), zero(), mono(q, -1.0), zero()),
            MatFn::new(zero(), mono(1.0, -1.0), mono(p, -1.0), zero()),
            vec![cx(0.0, 0.0)],
            DomainKind::PuncturedPlane,
        )
    }

    #[test]
    fn catenoid_spinor_and_hopf() {
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        let at = Lifted::principal(cx(0.7, 0.4));
        let (x, dx, qq) = spinor_field_and_hopf(&catenoid(0.25, 2.0), &ev, &at).unwrap();
        let expect_v = I * 2f64.sqrt() * at.z.powf(-0.5);
        assert!(x.u.norm() < 1e-15);
        assert!((x.v - expect_v).norm() < 1e-14 || (x.v + expect_v).norm() < 1e-14);
        assert!((dx.v / x.v - (-0.5) / at.z).norm() < 1e-13);
        assert!((qq - 2.0 / (at.z * at.z)).norm() < 1e-13);
    }

    #[test]
    fn enneper_hopf() {
        // [[0, r z^n],[λ, 0]] with r = 2, n = 1.
        let xi = Potential::new(
            MatFn::new(zero(), zero(), mono(1.0, 0.0), zero()),
            MatFn::new(zero(), mono(2.0, 1.0), zero(), zero()),
            vec![],
            DomainKind::Plane,
        );
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        let at = Lifted::principal(cx(0.3, -0.8));
        let (_, _, qq) = spinor_field_and_hopf(&xi, &ev, &at).unwrap();
        assert!((qq - at.z * 2.0).norm() < 1e-14);
    }

    #[test]
    fn constant_spinor_without_b_has_zero_hopf() {
        let xi =
            Potential::new(MatFn::constant(&Mat2C::real(0.0, 1.0, 0.0, 0.0)), MatFn::zero(), vec![], DomainKind::Plane);
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        let (_, _, qq) = spinor_field_and_hopf(&xi, &ev, &Lifted::principal(cx(0.2, 0.1))).unwrap();
        assert_eq!(qq, cx(0.0, 0.0));
        assert!(is_degenerate(&xi));
        assert!(!is_degenerate(&catenoid(1.0, 1.0)));
    }

    #[test]
    fn schwarzian_examples() {
        let at = Lifted::principal(cx(0.4, 0.9));
        assert!(schwarzian(&mono(1.0, 1.0), &at).unwrap().norm() < 1e-15);
        let s = schwarzian(&mono(1.0, 2.0), &at).unwrap();
        assert!((s - 0.75 / (at.z * at.z)).norm() < 1e-14);
        assert!(matches!(
            schwarzian(&mono(1.0, 2.0), &Lifted::principal(cx(0.0, 0.0))),
            Err(LwrError::CriticalPoint { .. })
        ));
    }

    #[test]
    fn gauge_identity_and_action() {
        let xi = catenoid(1.0, 1.0);
        let id = gauge_apply(&xi, &Gauge::constant(&Mat2C::identity()).unwrap());
        let at = Lifted::principal(cx(1.3, 0.2));
        assert!(id.xi(&at, cx(0.7, 0.0)).dist(&xi.xi(&at, cx(0.7, 0.0))) < 1e-15);
        assert!(Gauge::constant(&Mat2C::identity().scale(re(2.0))).is_err());
    }

    #[test]
    fn fuchsian_normal_form_is_fixed() {
        let (q, p) = (cx(2.0, 0.0), cx(0.3, 0.0));
        let f = fuchsian_normalize(&Mat2::new(re(0.0), re(0.0), q, re(0.0)), &companion(p)).unwrap();
        assert!(f.gauge.dist(&Mat2C::identity()) < 1e-14, "{:?}", f.gauge);
        assert_eq!((f.q, f.p), (q, p));
    }

    #[test]
    fn fuchsian_zero_weight() {
        let r = fuchsian_normalize(&Mat2C::zero(), &companion(re(1.0)));
        assert!(matches!(r, Err(LwrError::ZeroWeight)));
    }
}
