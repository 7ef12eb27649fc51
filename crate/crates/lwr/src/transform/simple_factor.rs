//! Simple factors `SF(α, ℓ, m)` and simple factor dressing of frames.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LwrError, Result};
use crate::integrator::{integrate_frame, FrameBundle, InitialData, MonodromySample, PathSpec, SolverSettings};
use crate::jet::{mat_derivative, spinor_value, Jet, MatJet, SpinorJet};
use crate::liealg::{re, EvaluationPair, Mat2, Mat2C, Scalar, Spinor2};
use crate::potential::{frame_jet, is_degenerate, q_of_jets, spinor_jet, Potential};
use crate::surface::Target;

/// Lines closer than this (sine of the Hermitian angle) count as equal.
const LINE_TOL: f64 = 1e-12;

/// `SF(α, ℓ, m)(λ) = T diag(λ−α, 1) T⁻¹` with `T = [ℓ | m]`.
pub fn simple_factor<T: Scalar>(alpha: Complex64, ell: Spinor2<T>, m: Spinor2<T>, lambda: Complex64) -> Mat2<T> {
    let t = Mat2::from_columns(ell, m);
    t * Mat2::diag(T::from_complex(lambda - alpha), T::one()) * t.inverse()
}

/// `λ`-derivative of a simple factor, the projection `T diag(1, 0) T⁻¹`.
pub fn simple_factor_derivative<T: Scalar>(ell: Spinor2<T>, m: Spinor2<T>) -> Mat2<T> {
    let t = Mat2::from_columns(ell, m);
    t * Mat2::diag(T::one(), T::zero()) * t.inverse()
}

/// `SF(α, ℓ, m)⁻¹(λ) = T diag(1/(λ−α), 1) T⁻¹`.
fn inverse_simple_factor<T: Scalar>(alpha: Complex64, ell: Spinor2<T>, m: Spinor2<T>, lambda: Complex64) -> Mat2<T> {
    let t = Mat2::from_columns(ell, m);
    t * Mat2::diag(T::from_complex((lambda - alpha).inv()), T::one()) * t.inverse()
}

/// `λ`-derivative of [`inverse_simple_factor`].
fn inverse_simple_factor_derivative(alpha: Complex64, ell: Spinor2, m: Spinor2, lambda: Complex64) -> Mat2C {
    let t = Mat2::from_columns(ell, m);
    let d = lambda - alpha;
    t * Mat2::diag(-(d * d).inv(), re(0.0)) * t.inverse()
}

/// Sine of the Hermitian angle between two lines.
pub fn line_separation(x: &Spinor2, y: &Spinor2) -> f64 {
    let n = (x.norm_sqr() * y.norm_sqr()).sqrt();
    if n == 0.0 {
        0.0
    } else {
        x.det_with(y).norm() / n
    }
}

/// Pole `α`, eigenline `ℓ` (eigenvalue `λ−α`) and fixed line `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpleFactorSpec {
    pub alpha: Complex64,
    pub ell: Spinor2,
    pub m: Spinor2,
}

impl SimpleFactorSpec {
    /// `m` defaults to the Hermitian-orthogonal line of `ℓ`.
    pub fn new(alpha: Complex64, ell: Spinor2, m: Option<Spinor2>, ev: &EvaluationPair) -> Result<Self> {
        if (alpha - ev.lambda0).norm() < 1e-12 || (alpha - ev.lambda1).norm() < 1e-12 {
            return Err(LwrError::AlphaAtEvaluation { alpha });
        }
        if ell.norm_sqr() == 0.0 {
            return Err(LwrError::BadWeights("simple factor line is zero".into()));
        }
        let m = m.unwrap_or_else(|| ell.hermitian_orthogonal());
        if line_separation(&ell, &m) < LINE_TOL {
            return Err(LwrError::BadWeights("simple factor lines coincide".into()));
        }
        Ok(SimpleFactorSpec { alpha, ell, m })
    }

    pub fn eval(&self, lambda: Complex64) -> Mat2C {
        simple_factor(self.alpha, self.ell, self.m, lambda)
    }

    pub fn derivative(&self) -> Mat2C {
        simple_factor_derivative(self.ell, self.m)
    }
}

/// Normalized constant factor `ĝ_λ = √(det g_{λ*}) g_{λ*}⁻¹ g_λ`, with
/// `λ* = λ₀` in E³ and `λ₁` in H³, so that `ĝ_{λ*} = √(λ*−α)·I`.
#[derive(Clone, Copy, Debug)]
pub struct OuterFactor {
    pub spec: SimpleFactorSpec,
    pub lambda_star: Complex64,
    left: Mat2C,
}

impl OuterFactor {
    pub fn new(spec: SimpleFactorSpec, ev: &EvaluationPair, target: Target) -> Self {
        let lambda_star = match target {
            Target::E3 => ev.lambda0,
            Target::H3 => ev.lambda1,
        };
        let left = spec.eval(lambda_star).inverse().scale((lambda_star - spec.alpha).sqrt());
        OuterFactor { spec, lambda_star, left }
    }

    pub fn eval(&self, lambda: Complex64) -> Mat2C {
        self.left * self.spec.eval(lambda)
    }

    pub fn derivative(&self) -> Mat2C {
        self.left * self.spec.derivative()
    }
}

/// A dressed node: the dressed frames (absent on the singular set) and the
/// separation of the lines `Φ_α⁻¹ℓ` and `w` that vanishes there.
#[derive(Clone, Debug)]
pub struct DressedBundle {
    pub z: Complex64,
    pub bundle: Option<FrameBundle>,
    pub separation: f64,
}

/// The spinor line `w` of `A` and the line `Φ_α⁻¹ℓ`.
fn lines(xi: &Potential, fb: &FrameBundle, spec: &SimpleFactorSpec) -> Result<(Spinor2, Spinor2)> {
    let phi_alpha = fb.phi_at(spec.alpha)?;
    let (a, _) = xi.values(&fb.at);
    let w = crate::liealg::spinor_of_nilpotent(&a)?;
    if w.norm_sqr() == 0.0 {
        return Err(LwrError::DegeneratePotential { z: fb.z() });
    }
    Ok((phi_alpha.inverse().apply(spec.ell), w))
}

/// Dress one bundle: `Φ̂_λ = ĝ_λ Φ_λ h_λ⁻¹` with `h = SF(α, Φ_α⁻¹ℓ, w)`,
/// dropping `λ = α` from the output.
pub fn dress_bundle(xi: &Potential, fb: &FrameBundle, outer: &OuterFactor) -> Result<DressedBundle> {
    let spec = &outer.spec;
    let (x, w) = lines(xi, fb, spec)?;
    let separation = line_separation(&x, &w);
    if separation < LINE_TOL {
        return Ok(DressedBundle { z: fb.z(), bundle: None, separation });
    }
    let keep: Vec<usize> = (0..fb.lambdas.len()).filter(|&k| fb.lambdas[k] != spec.alpha).collect();
    let mut phi = Vec::with_capacity(keep.len());
    let mut lambdas = Vec::with_capacity(keep.len());
    let mut derivatives = Vec::new();
    for (new_k, &k) in keep.iter().enumerate() {
        let lambda = fb.lambdas[k];
        let g = outer.eval(lambda);
        let hinv = inverse_simple_factor(spec.alpha, x, w, lambda);
        lambdas.push(lambda);
        phi.push(g * fb.phi[k] * hinv);
        if let Some((_, d)) = fb.derivatives.iter().find(|(j, _)| *j == k) {
            let hinv_dot = inverse_simple_factor_derivative(spec.alpha, x, w, lambda);
            let v = outer.derivative() * fb.phi[k] * hinv + g * *d * hinv + g * fb.phi[k] * hinv_dot;
            derivatives.push((new_k, v));
        }
    }
    Ok(DressedBundle { z: fb.z(), bundle: Some(FrameBundle { at: fb.at, lambdas, phi, derivatives }), separation })
}

/// Dress every node in parallel. Fails with `DegeneratePotential` when the
/// potential is flat.
pub fn simple_factor_dress(xi: &Potential, bundles: &[FrameBundle], outer: &OuterFactor) -> Result<Vec<DressedBundle>> {
    if is_degenerate(xi) {
        return Err(LwrError::DegeneratePotential { z: bundles.first().map(|b| b.z()).unwrap_or(re(0.0)) });
    }
    bundles.par_iter().map(|fb| dress_bundle(xi, fb, outer)).collect()
}

/// Jets of `Φ_λ` at one node.
fn phi_jet(xi: &Potential, fb: &FrameBundle, lambda: Complex64) -> Result<MatJet> {
    Ok(frame_jet(&fb.phi_at(lambda)?, &xi.xi_jet(&fb.at, lambda)?))
}

/// Jet of `det(ℓ, Φ_α w)`, which vanishes exactly on the singular set.
pub fn singular_function(xi: &Potential, fb: &FrameBundle, spec: &SimpleFactorSpec) -> Result<Jet> {
    let phi = phi_jet(xi, fb, spec.alpha)?;
    let (a, _) = xi.jets(&fb.at)?;
    let w = spinor_jet(&a)?;
    let y = phi.apply(w);
    Ok(Jet::constant(spec.ell.u) * y.v - Jet::constant(spec.ell.v) * y.u)
}

/// Newton search for a zero of [`singular_function`] starting at `fb`,
/// carrying the frame along straight steps. Returns the refined bundle.
pub fn locate_singular_point(
    xi: &Potential,
    fb: &FrameBundle,
    spec: &SimpleFactorSpec,
    settings: &SolverSettings,
) -> Result<FrameBundle> {
    let k = fb.index_of(spec.alpha)?;
    let mut cur = FrameBundle { at: fb.at, lambdas: vec![spec.alpha], phi: vec![fb.phi[k]], derivatives: vec![] };
    for _ in 0..60 {
        let f = singular_function(xi, &cur, spec)?;
        let df = f.deriv(1);
        if df.norm() == 0.0 {
            return Err(LwrError::CriticalPoint { z: cur.z() });
        }
        let step = -f.value() / df;
        if step.norm() <= 1e-14 * cur.z().norm().max(1.0) {
            return Ok(cur);
        }
        cur = integrate_frame(xi, &PathSpec::line(cur.z(), cur.z() + step), &cur.as_initial(), settings)?;
    }
    Err(LwrError::ToleranceFailure { z: cur.z() })
}

/// Spinor `x̂` and Hopf coefficient of the dressed potential at one node,
/// from the exact jets of `Φ̂ = ĝΦh⁻¹` at `λ₀` and `λ₁`.
pub fn dressed_spinor_and_hopf(
    xi: &Potential,
    fb: &FrameBundle,
    outer: &OuterFactor,
    ev: &EvaluationPair,
) -> Result<(Spinor2, Complex64)> {
    let spec = &outer.spec;
    let phi_alpha = phi_jet(xi, fb, spec.alpha)?;
    let ell: SpinorJet = Spinor2::new(Jet::constant(spec.ell.u), Jet::constant(spec.ell.v));
    let x = phi_alpha.inverse().apply(ell);
    let (a, _) = xi.jets(&fb.at)?;
    let w = spinor_jet(&a)?;
    let mut xis = Vec::with_capacity(2);
    for lambda in [ev.lambda0, ev.lambda1] {
        let g: MatJet = Mat2::from_complex(&outer.eval(lambda));
        let hat = g * phi_jet(xi, fb, lambda)? * inverse_simple_factor(spec.alpha, x, w, lambda);
        xis.push(hat.inverse() * mat_derivative(&hat));
    }
    let diff = Jet::constant(ev.difference().inv());
    let a_hat = (xis[1] - xis[0]).scale(diff);
    let b_hat = xis[0] - a_hat.scale(Jet::constant(ev.lambda0));
    let q = q_of_jets(&a_hat, &b_hat)?;
    Ok((spinor_value(&spinor_jet(&a_hat)?), ev.difference() * q.value()))
}

/// Hopf coefficient of the dressed frame at one node.
pub fn dressed_hopf(xi: &Potential, fb: &FrameBundle, outer: &OuterFactor, ev: &EvaluationPair) -> Result<Complex64> {
    Ok(dressed_spinor_and_hopf(xi, fb, outer, ev)?.1)
}

/// Dressed monodromy `ĝ M ĝ⁻¹`, valid when `ℓ` is an eigenline of `M_α`.
pub fn dressed_monodromy(m: &MonodromySample, outer: &OuterFactor) -> Result<MonodromySample> {
    let spec = &outer.spec;
    let m_alpha = m.at(spec.alpha)?;
    eigenline_residual(&m_alpha, &spec.ell)?;
    let keep: Vec<usize> = (0..m.lambdas.len()).filter(|&k| m.lambdas[k] != spec.alpha).collect();
    let mut out = MonodromySample { loop_id: m.loop_id, lambdas: vec![], m: vec![], derivatives: vec![] };
    for (new_k, &k) in keep.iter().enumerate() {
        let lambda = m.lambdas[k];
        let g = outer.eval(lambda);
        let ginv = g.inverse();
        out.lambdas.push(lambda);
        out.m.push(g * m.m[k] * ginv);
        if let Some((_, d)) = m.derivatives.iter().find(|(j, _)| *j == k) {
            let gd = outer.derivative();
            let v = gd * m.m[k] * ginv + g * *d * ginv - g * m.m[k] * ginv * gd * ginv;
            out.derivatives.push((new_k, v));
        }
    }
    Ok(out)
}

/// `‖Mℓ − μℓ‖/‖ℓ‖` relative to `‖M‖`, with `μ` the Rayleigh quotient.
/// Rejects non-eigenlines and non-diagonalizable `M`.
pub fn eigenline_residual(m: &Mat2C, ell: &Spinor2) -> Result<f64> {
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let (e1, e2) = m.eigenvalues();
    if (e1 - e2).norm() < 1e-8 * scale && (*m - Mat2C::identity().scale(e1)).norm() > 1e-8 * scale {
        return Err(LwrError::NotEigenline { residual: f64::INFINITY });
    }
    let y = m.apply(*ell);
    let n2 = ell.norm_sqr();
    let mu = (ell.u.conj() * y.u + ell.v.conj() * y.v) / n2;
    let r = y.add(&ell.scale(-mu));
    let residual = r.norm_sqr().sqrt() / n2.sqrt() / scale;
    if residual > 1e-8 {
        return Err(LwrError::NotEigenline { residual });
    }
    Ok(residual)
}

/// Frames at `λ = α` alone, for cheap singular-set searches.
pub fn alpha_initial(init: &InitialData, alpha: Complex64) -> Result<InitialData> {
    let k = init.lambdas.iter().position(|l| *l == alpha).ok_or(LwrError::MissingEvaluation { lambda: alpha })?;
    Ok(InitialData { z0: init.z0, lambdas: vec![alpha], values: vec![init.values[k]], derivatives: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::c;

    #[test]
    fn inverse_permutes_lines() {
        let (alpha, ell, m) =
            (c(0.3, -0.2), Spinor2::new(c(1.0, 0.5), c(-0.2, 1.0)), Spinor2::new(c(0.1, 0.0), c(2.0, -1.0)));
        for lambda in [c(1.0, 0.0), c(-0.4, 2.0)] {
            let lhs = simple_factor(alpha, ell, m, lambda).inverse();
            let rhs = simple_factor(alpha, m, ell, lambda).scale((lambda - alpha).inv());
            assert!(lhs.dist(&rhs) < 1e-12);
            assert!((simple_factor(alpha, ell, m, lambda).det() - (lambda - alpha)).norm() < 1e-12);
        }
        let g = simple_factor(alpha, ell, m, alpha);
        assert!(g.apply(ell).norm_sqr() < 1e-24);
    }

    #[test]
    fn outer_factor_is_scalar_at_normalization_point() {
        let ev = EvaluationPair::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let spec = SimpleFactorSpec::new(c(-0.75, 0.0), Spinor2::new(c(1.0, 0.0), c(1.0, 0.0)), None, &ev).unwrap();
        for target in [Target::E3, Target::H3] {
            let o = OuterFactor::new(spec, &ev, target);
            let g = o.eval(o.lambda_star);
            assert!(g.dist(&Mat2C::identity().scale((o.lambda_star - spec.alpha).sqrt())) < 1e-12);
            // numerical λ-derivative
            let h = 1e-6;
            let fd = (o.eval(c(0.3 + h, 0.0)) - o.eval(c(0.3 - h, 0.0))).scale(re(0.5 / h));
            assert!(fd.dist(&o.derivative()) < 1e-8);
        }
    }

    #[test]
    fn spec_validation() {
        let ev = EvaluationPair::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let ell = Spinor2::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(SimpleFactorSpec::new(c(1.0, 0.0), ell, None, &ev), Err(LwrError::AlphaAtEvaluation { .. })));
        assert!(SimpleFactorSpec::new(c(2.0, 0.0), ell, Some(ell.scale(c(0.0, 3.0))), &ev).is_err());
    }

    #[test]
    fn eigenline_checks() {
        let m = Mat2C::real(2.0, 0.0, 0.0, 0.5);
        assert!(eigenline_residual(&m, &Spinor2::new(c(1.0, 0.0), c(0.0, 0.0))).is_ok());
        assert!(eigenline_residual(&m, &Spinor2::new(c(1.0, 0.0), c(1.0, 0.0))).is_err());
        let jordan = Mat2C::real(1.0, 1.0, 0.0, 1.0);
        assert!(eigenline_residual(&jordan, &Spinor2::new(c(1.0, 0.0), c(0.0, 0.0))).is_err());
        assert!(eigenline_residual(&Mat2C::identity().scale(re(-1.0)), &Spinor2::new(c(0.3, 0.0), c(1.0, 2.0))).is_ok());
    }
}
