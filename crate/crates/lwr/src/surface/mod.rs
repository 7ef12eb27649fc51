//! Null curves, immersions into E³ and H³, and pointwise geometry.

pub mod diagnostics;
pub mod mesh;

pub use diagnostics::{node_diagnostics, NodeDiagnostics, Stencil};
pub use mesh::{build_mesh, format_sci, Mesh, VertexInfo};

use num_complex::Complex64;

use crate::error::Result;
use crate::integrator::FrameBundle;
use crate::liealg::{re, E3Point, EvaluationPair, H3Point, Mat2, Mat2C, Projective, Spinor2};
use crate::potential::{spinor_field_and_hopf, Potential};

/// Ambient space of the immersion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    E3,
    H3,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::E3 => "E3",
            Target::H3 => "H3",
        }
    }
}

/// Immersed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Position {
    E3(E3Point),
    H3(H3Point),
}

impl Position {
    pub fn matrix(&self) -> Mat2C {
        match self {
            Position::E3(p) => p.0,
            Position::H3(p) => p.0,
        }
    }

    /// Coordinates written to meshes: E³ basis coefficients or Poincaré ball.
    pub fn coords(&self) -> [f64; 3] {
        match self {
            Position::E3(p) => p.coords(),
            Position::H3(p) => p.ball(),
        }
    }
}

/// `ψ = (λ₁−λ₀)Φ̇Φ⁻¹|_{λ₀}` and `Ψ = Φ_{λ₁}Φ_{λ₀}⁻¹`.
pub fn null_curves(fb: &FrameBundle, ev: &EvaluationPair) -> Result<(Mat2C, Mat2C)> {
    let phi0 = fb.phi_at(ev.lambda0)?;
    let phi1 = fb.phi_at(ev.lambda1)?;
    let inv0 = phi0.inverse();
    let psi = (fb.derivative_at(ev.lambda0)? * inv0).scale(ev.difference());
    Ok((psi, phi1 * inv0))
}

/// Euclidean null curve only (needs no frame at `λ₁`).
pub fn euclidean_null_curve(fb: &FrameBundle, ev: &EvaluationPair) -> Result<Mat2C> {
    let inv0 = fb.phi_at(ev.lambda0)?.inverse();
    Ok((fb.derivative_at(ev.lambda0)? * inv0).scale(ev.difference()))
}

/// Hyperbolic null curve `Ψ` only.
pub fn hyperbolic_null_curve(fb: &FrameBundle, ev: &EvaluationPair) -> Result<Mat2C> {
    Ok(fb.phi_at(ev.lambda1)? * fb.phi_at(ev.lambda0)?.inverse())
}

/// `f = ψ + ψ*` in E³ or `f = Ψ*Ψ` in H³.
pub fn immerse(fb: &FrameBundle, ev: &EvaluationPair, target: Target) -> Result<Position> {
    Ok(match target {
        Target::E3 => {
            let psi = euclidean_null_curve(fb, ev)?;
            Position::E3(E3Point(psi + psi.adjoint()))
        }
        Target::H3 => {
            let big = hyperbolic_null_curve(fb, ev)?;
            Position::H3(H3Point(big.adjoint() * big))
        }
    })
}

/// The spinor image `y = Φ_λ x` at the λ the metric of `target` uses.
pub fn metric_spinor(fb: &FrameBundle, ev: &EvaluationPair, target: Target, x: Spinor2) -> Result<Spinor2> {
    let lambda = match target {
        Target::E3 => ev.lambda0,
        Target::H3 => ev.lambda1,
    };
    Ok(fb.phi_at(lambda)?.apply(x))
}

/// Conformal factor `|λ₁−λ₀|²‖y‖⁴` of `ds² = e |dz|²`.
pub fn metric_density(fb: &FrameBundle, ev: &EvaluationPair, target: Target, x: Spinor2) -> Result<f64> {
    let y = metric_spinor(fb, ev, target, x)?;
    Ok(ev.difference().norm_sqr() * y.norm_sqr() * y.norm_sqr())
}

/// Gauss map (hyperbolic Gauss map in H³) `G = u/v`, `(u, v) = Φ_{λ₀}x`.
pub fn gauss_map(fb: &FrameBundle, ev: &EvaluationPair, x: Spinor2) -> Result<Projective> {
    Ok(Projective(fb.phi_at(ev.lambda0)?.apply(x)))
}

/// `I − 2‖y‖⁻² y y*`.
pub fn reflection(y: Spinor2) -> Mat2C {
    let n = y.norm_sqr();
    let outer = Mat2::new(y.u * y.u.conj(), y.u * y.v.conj(), y.v * y.u.conj(), y.v * y.v.conj());
    Mat2C::identity() - outer.scale(re(2.0 / n))
}

/// Unit normal. In E³ this is `I − 2‖y₀‖⁻²y₀y₀*`; in H³ the normal is
/// `Ψ* n Ψ` with `n = I − 2‖y₁‖⁻²y₁y₁*` the normal translated to `I`.
/// Returns `(N, n)`; in E³ both coincide.
pub fn normal(fb: &FrameBundle, ev: &EvaluationPair, target: Target, x: Spinor2) -> Result<(Mat2C, Mat2C)> {
    let y = metric_spinor(fb, ev, target, x)?;
    let n = reflection(y);
    Ok(match target {
        Target::E3 => (n, n),
        Target::H3 => {
            let big = hyperbolic_null_curve(fb, ev)?;
            (big.adjoint() * n * big, n)
        }
    })
}

/// Pointwise geometry at one frame bundle.
#[derive(Clone, Debug)]
pub struct SurfaceSample {
    pub z: Complex64,
    pub position: Position,
    /// `N` (E³) or the translated normal `n` (H³).
    pub normal: Mat2C,
    /// Full normal `N` at `f` in both targets.
    pub ambient_normal: Mat2C,
    pub metric_density: f64,
    pub hopf: Complex64,
    pub gauss: Projective,
    pub spinor: Spinor2,
}

pub fn sample(xi: &Potential, fb: &FrameBundle, ev: &EvaluationPair, target: Target) -> Result<SurfaceSample> {
    let (x, _, hopf) = spinor_field_and_hopf(xi, ev, &fb.at)?;
    sample_with_spinor(fb, ev, target, x, hopf)
}

/// Like [`sample`], with the spinor `x` of the potential and the Hopf
/// coefficient supplied by the caller (e.g. for a dressed potential).
pub fn sample_with_spinor(
    fb: &FrameBundle,
    ev: &EvaluationPair,
    target: Target,
    x: Spinor2,
    hopf: Complex64,
) -> Result<SurfaceSample> {
    let (ambient_normal, normal) = normal(fb, ev, target, x)?;
    Ok(SurfaceSample {
        z: fb.z(),
        position: immerse(fb, ev, target)?,
        normal,
        ambient_normal,
        metric_density: metric_density(fb, ev, target, x)?,
        hopf,
        gauss: gauss_map(fb, ev, x)?,
        spinor: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate_frame, InitialData, PathSpec, SolverSettings};
    use crate::liealg::{c, inner};
    use crate::potential::{DomainKind, Lifted, MatFn, ScalarFn};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn enneper0() -> Potential {
        let zero = ScalarFn::zero;
        Potential::new(
            MatFn::new(zero(), zero(), ScalarFn::constant(cx(1.0, 0.0)), zero()),
            MatFn::new(zero(), ScalarFn::constant(cx(1.0, 0.0)), zero(), zero()),
            vec![],
            DomainKind::Plane,
        )
    }

    fn frame_at(xi: &Potential, z: Complex64, ev: &EvaluationPair) -> FrameBundle {
        let init = InitialData::constant(
            Lifted::principal(cx(0.0, 0.0)),
            &[ev.lambda0, ev.lambda1],
            Mat2C::identity(),
            &[0, 1],
        );
        integrate_frame(xi, &PathSpec::line(cx(0.0, 0.0), z), &init, &SolverSettings::default()).unwrap()
    }

    #[test]
    fn identity_bundle() {
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        let init =
            InitialData::constant(Lifted::principal(cx(0.0, 0.0)), &[ev.lambda0, ev.lambda1], Mat2C::identity(), &[0]);
        let fb = FrameBundle::from_initial(&init);
        let (psi, big) = null_curves(&fb, &ev).unwrap();
        assert_eq!(psi, Mat2C::zero());
        assert_eq!(big, Mat2C::identity());
        assert_eq!(immerse(&fb, &ev, Target::H3).unwrap().matrix(), Mat2C::identity());
    }

    #[test]
    fn enneper_null_curve_and_metric() {
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        let fb = frame_at(&enneper0(), cx(1.0, 0.0), &ev);
        let (psi, _) = null_curves(&fb, &ev).unwrap();
        let expect = Mat2C::real(0.5, -1.0 / 3.0, 1.0, -0.5);
        assert!(psi.dist(&expect) < 1e-10);
        let s = sample(&enneper0(), &fb, &ev, Target::E3).unwrap();
        assert!((s.metric_density - 4.0).abs() < 1e-9);
        assert!((s.hopf - 1.0).norm() < 1e-14);
        // G = z for r = 1, n = 0
        assert!((s.gauss.value().unwrap() - 1.0).norm() < 1e-10);
        // N is a unit vector orthogonal to f_z = ψ_z = y y^⊥
        let y = fb.phi_at(ev.lambda0).unwrap().apply(s.spinor);
        assert!(inner(&s.normal, &y.outer_perp()).norm() < 1e-12);
        assert!((inner(&s.normal, &s.normal) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn plane_potential_is_flat_plane() {
        let zero = ScalarFn::zero;
        let xi = Potential::new(
            MatFn::new(zero(), ScalarFn::constant(cx(1.0, 0.0)), zero(), zero()),
            MatFn::zero(),
            vec![],
            DomainKind::Plane,
        );
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(1.0, 0.0)).unwrap();
        let z = cx(0.3, 0.8);
        let fb = frame_at(&xi, z, &ev);
        let f = immerse(&fb, &ev, Target::E3).unwrap().matrix();
        assert!(f.dist(&Mat2::new(re(0.0), z, z.conj(), re(0.0))) < 1e-12);
        let s = sample(&xi, &fb, &ev, Target::E3).unwrap();
        assert_eq!(s.hopf, c(0.0, 0.0));
    }

    #[test]
    fn duality_inverts_hyperbolic_null_curve() {
        let ev = EvaluationPair::new(cx(0.0, 0.0), cx(0.7, 0.2)).unwrap();
        let fb = frame_at(&enneper0(), cx(0.4, -0.9), &ev);
        let a = hyperbolic_null_curve(&fb, &ev).unwrap();
        let b = hyperbolic_null_curve(&fb, &ev.swapped()).unwrap();
        assert!((a * b).dist(&Mat2C::identity()) < 1e-12);
    }
}
