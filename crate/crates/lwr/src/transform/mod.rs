//! Evaluation-point moves, holomorphic and simple factor dressing, closing
//! checks and unitarization.

pub mod closing;
pub mod simple_factor;
pub mod unitarize;

pub use closing::{check_closing, product_residual, ClosingVerdict, LoopVerdict};
pub use simple_factor::{
    dress_bundle, dressed_hopf, dressed_monodromy, dressed_spinor_and_hopf, eigenline_residual, line_separation,
    locate_singular_point, simple_factor, simple_factor_derivative, simple_factor_dress, singular_function,
    DressedBundle, OuterFactor, SimpleFactorSpec,
};
pub use unitarize::{
    factored_phi_algebra, factored_phi_group, trace_phi, unitarize_triple, Classification, TripleMode, TripleWeights,
    Unitarization,
};

use num_complex::Complex64;

use crate::error::{LwrError, Result};
use crate::integrator::FrameBundle;
use crate::liealg::{c, re, EvaluationPair, Mat2C};
use crate::surface::Target;

/// Determinant tolerance of dressing families.
const DET_TOL: f64 = 1e-10;
/// Unitarity tolerance at the evaluation point of a rigid motion.
const UNITARY_TOL: f64 = 1e-8;

/// Swap the evaluation points. The bundle is returned unchanged; both
/// frames and the derivative at the new `λ₀` must be tracked.
pub fn dual_swap(fb: &FrameBundle, ev: &EvaluationPair) -> Result<(FrameBundle, EvaluationPair)> {
    fb.phi_at(ev.lambda0)?;
    fb.derivative_at(ev.lambda1)?;
    Ok((fb.clone(), ev.swapped()))
}

/// Fix `λ₀` and move `λ₁` to `λ₀ + t(λ₁−λ₀)`.
pub fn associated_move(ev: &EvaluationPair, t: Complex64) -> Result<EvaluationPair> {
    if t.norm() == 0.0 {
        return Err(LwrError::ZeroParameter);
    }
    EvaluationPair::new(ev.lambda0, ev.lambda0 + t * ev.difference())
}

/// Values `R_λ` of a holomorphic family on a finite `λ` set, with
/// `λ`-derivatives on some of them.
#[derive(Clone, Debug)]
pub struct DressingFamily {
    pub lambdas: Vec<Complex64>,
    pub values: Vec<Mat2C>,
    pub derivatives: Vec<(usize, Mat2C)>,
}

impl DressingFamily {
    pub fn new(lambdas: Vec<Complex64>, values: Vec<Mat2C>, derivatives: Vec<(usize, Mat2C)>) -> Result<Self> {
        for (lambda, r) in lambdas.iter().zip(&values) {
            let residual = (r.det() - 1.0).norm();
            if residual > DET_TOL {
                return Err(LwrError::BadWeights(format!(
                    "dressing at lambda = {lambda} has |det - 1| = {residual:.3e}"
                )));
            }
        }
        Ok(DressingFamily { lambdas, values, derivatives })
    }

    /// Sample `λ ↦ R_λ` and a derivative function on `lambdas`, with
    /// derivatives at the listed indices.
    pub fn sample(
        lambdas: &[Complex64],
        value: impl Fn(Complex64) -> Mat2C,
        derivative: impl Fn(Complex64) -> Mat2C,
        derivative_at: &[usize],
    ) -> Result<Self> {
        Self::new(
            lambdas.to_vec(),
            lambdas.iter().map(|l| value(*l)).collect(),
            derivative_at.iter().map(|&k| (k, derivative(lambdas[k]))).collect(),
        )
    }

    pub fn identity(lambdas: &[Complex64], derivative_at: &[usize]) -> Self {
        DressingFamily {
            lambdas: lambdas.to_vec(),
            values: vec![Mat2C::identity(); lambdas.len()],
            derivatives: derivative_at.iter().map(|&k| (k, Mat2C::zero())).collect(),
        }
    }

    fn index_of(&self, lambda: Complex64) -> Result<usize> {
        self.lambdas.iter().position(|l| *l == lambda).ok_or(LwrError::MissingEvaluation { lambda })
    }

    pub fn at(&self, lambda: Complex64) -> Result<Mat2C> {
        Ok(self.values[self.index_of(lambda)?])
    }

    pub fn derivative_at(&self, lambda: Complex64) -> Result<Mat2C> {
        let k = self.index_of(lambda)?;
        self.derivatives.iter().find(|(j, _)| *j == k).map(|(_, d)| *d).ok_or(LwrError::MissingEvaluation { lambda })
    }
}

/// `Φ̂_λ = R_λΦ_λ` and `Φ̂̇ = ṘΦ + RΦ̇`.
pub fn holomorphic_dress(fb: &FrameBundle, r: &DressingFamily) -> Result<FrameBundle> {
    let phi = fb.lambdas.iter().zip(&fb.phi).map(|(l, p)| Ok(r.at(*l)? * *p)).collect::<Result<Vec<_>>>()?;
    let derivatives = fb
        .derivatives
        .iter()
        .map(|(k, d)| {
            let l = fb.lambdas[*k];
            Ok((*k, r.derivative_at(l)? * fb.phi[*k] + r.at(l)? * *d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameBundle { at: fb.at, lambdas: fb.lambdas.clone(), phi, derivatives })
}

/// Isometry induced by a unitary dressing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Isometry {
    /// `X ↦ U X U⁻¹ + T`.
    E3 { rotation: Mat2C, translation: Mat2C },
    /// `X ↦ V* X V`.
    H3 { v: Mat2C },
}

impl Isometry {
    pub fn apply(&self, x: &Mat2C) -> Mat2C {
        match self {
            Isometry::E3 { rotation, translation } => *rotation * *x * rotation.inverse() + *translation,
            Isometry::H3 { v } => v.adjoint() * *x * *v,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        match (self, other) {
            (Isometry::E3 { rotation: r1, translation: t1 }, Isometry::E3 { rotation: r2, translation: t2 }) => {
                Ok(Isometry::E3 { rotation: *r1 * *r2, translation: *r1 * *t2 * r1.inverse() + *t1 })
            }
            (Isometry::H3 { v: v1 }, Isometry::H3 { v: v2 }) => Ok(Isometry::H3 { v: *v2 * *v1 }),
            _ => Err(LwrError::BadWeights("cannot compose isometries of different spaces".into())),
        }
    }

    /// Largest discrepancy of the two actions on a fixed probe set.
    pub fn distance(&self, other: &Isometry) -> f64 {
        let probes = [
            Mat2C::zero(),
            Mat2C::identity(),
            Mat2C::real(1.0, 0.0, 0.0, -1.0),
            Mat2C::real(0.0, 1.0, 1.0, 0.0),
            Mat2C::new(re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)),
        ];
        probes.iter().map(|p| self.apply(p).dist(&other.apply(p))).fold(0.0, f64::max)
    }
}

/// The rigid motion by which a dressing with `R` unitary at the relevant
/// evaluation point moves the immersion.
pub fn rigid_motion_of_dressing(r: &DressingFamily, ev: &EvaluationPair, target: Target) -> Result<Isometry> {
    let r0 = r.at(ev.lambda0)?;
    match target {
        Target::E3 => {
            let residual = r0.su2_group_residual();
            if residual > UNITARY_TOL {
                return Err(LwrError::NotUnitaryAtEvaluation { residual });
            }
            let cc = (r.derivative_at(ev.lambda0)? * r0.inverse()).scale(ev.difference());
            Ok(Isometry::E3 { rotation: r0, translation: cc + cc.adjoint() })
        }
        Target::H3 => {
            let residual = r.at(ev.lambda1)?.su2_group_residual();
            if residual > UNITARY_TOL {
                return Err(LwrError::NotUnitaryAtEvaluation { residual });
            }
            Ok(Isometry::H3 { v: r0.inverse() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn associated_move_rules() {
        let ev = EvaluationPair::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(associated_move(&ev, c(1.0, 0.0)).unwrap(), ev);
        assert_eq!(associated_move(&ev, c(0.0, 1.0)).unwrap().lambda1, c(0.0, 1.0));
        assert!(matches!(associated_move(&ev, c(0.0, 0.0)), Err(LwrError::ZeroParameter)));
    }

    #[test]
    fn identity_dressing_is_identity_isometry() {
        let ev = EvaluationPair::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let r = DressingFamily::identity(&[ev.lambda0, ev.lambda1], &[0]);
        let iso = rigid_motion_of_dressing(&r, &ev, Target::E3).unwrap();
        assert_eq!(iso, Isometry::E3 { rotation: Mat2C::identity(), translation: Mat2C::zero() });
    }

    #[test]
    fn diagonal_exponential_is_pure_rotation() {
        let ev = EvaluationPair::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let d = Mat2C::diag(c(0.0, 1.0), c(0.0, -1.0));
        let r = DressingFamily::sample(
            &[ev.lambda0, ev.lambda1],
            |l| d.scale(l - ev.lambda0).exp(),
            |l| d * d.scale(l - ev.lambda0).exp(),
            &[0],
        )
        .unwrap();
        match rigid_motion_of_dressing(&r, &ev, Target::E3).unwrap() {
            Isometry::E3 { translation, .. } => assert!(translation.norm() < 1e-15),
            _ => unreachable!(),
        }
        let bad = DressingFamily::identity(&[ev.lambda0, ev.lambda1], &[]);
        assert!(rigid_motion_of_dressing(&bad, &ev, Target::E3).is_err());
        let hyper = DressingFamily::new(
            vec![ev.lambda0, ev.lambda1],
            vec![Mat2C::identity(), Mat2C::real(2.0, 0.0, 0.0, 0.5)],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            rigid_motion_of_dressing(&hyper, &ev, Target::H3),
            Err(LwrError::NotUnitaryAtEvaluation { .. })
        ));
        assert!(DressingFamily::new(vec![ev.lambda0], vec![Mat2C::identity().scale(re(2.0))], vec![]).is_err());
    }
}
