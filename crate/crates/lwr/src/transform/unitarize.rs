//! Classification and unitarization of `sl2C` and `SL2C` triples.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LwrError, Result};
use crate::liealg::{c, re, Mat2C};

/// Relative tolerance of the relation and reality tests.
const REL_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of the normalized Hermitian form.
const MIN_FORM_EIGENVALUE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleMode {
    /// `A₀ + A₁ + A₂ = 0` in `sl2C`.
    Algebra,
    /// `M₀M₁M₂ = I` in `SL2C`.
    Group,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Reducible,
    Unitarizable,
    NotUnitarizable,
}

/// Eigendata `aₖ` (algebra, `±iaₖ` eigenvalues, `Re aₖ ≥ 0`) or `νₖ`
/// (group, `e^{±2πiνₖ}` eigenvalues, `Re νₖ ∈ [0, ½]`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleWeights {
    pub mode: TripleMode,
    pub values: [Complex64; 3],
}

#[derive(Clone, Debug)]
pub struct Unitarization {
    pub class: Classification,
    pub weights: TripleWeights,
    /// `det[A₁, A₂]` or `1 − Σtₖ² + 2t₀t₁t₂`.
    pub phi: Complex64,
    /// `C` with `C X C⁻¹` in su2 / SU2, when unitarizable.
    pub unitarizer: Option<Mat2C>,
    /// Largest distance to su2 / SU2 after conjugation (relative to `‖X‖`
    /// in algebra mode).
    pub residual: Option<f64>,
}

/// `(a₀+a₁+a₂)(a₀+a₁−a₂)(a₀−a₁+a₂)(−a₀+a₁+a₂)`.
pub fn factored_phi_algebra(a: [Complex64; 3]) -> Complex64 {
    let [a0, a1, a2] = a;
    (a0 + a1 + a2) * (a0 + a1 - a2) * (a0 - a1 + a2) * (-a0 + a1 + a2)
}

/// Trace polynomial `1 − t₀² − t₁² − t₂² + 2t₀t₁t₂`.
pub fn trace_phi(t: [Complex64; 3]) -> Complex64 {
    let [t0, t1, t2] = t;
    re(1.0) - t0 * t0 - t1 * t1 - t2 * t2 + t0 * t1 * t2 * 2.0
}

/// `(e₀e₁e₂−1)(e₀e₁−e₂)(e₀e₂−e₁)(e₁e₂−e₀) / (4e₀²e₁²e₂²)`.
pub fn factored_phi_group(e: [Complex64; 3]) -> Complex64 {
    let [e0, e1, e2] = e;
    let p = e0 * e1 * e2;
    (p - 1.0) * (e0 * e1 - e2) * (e0 * e2 - e1) * (e1 * e2 - e0) / (p * p * 4.0)
}

fn is_real(z: Complex64, scale: f64) -> bool {
    z.im.abs() <= REL_TOL * scale.max(1.0)
}

/// Classify a triple and, when it is irreducible and unitarizable, find a
/// unitarizer from the invariant Hermitian form.
pub fn unitarize_triple(triple: &[Mat2C; 3], mode: TripleMode) -> Result<Unitarization> {
    let scale = triple.iter().map(Mat2C::norm).fold(0.0, f64::max);
    let (phi, weights, real_weights, phi_scale) = match mode {
        TripleMode::Algebra => {
            let residual = (triple[0] + triple[1] + triple[2]).norm();
            if residual > REL_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(LwrError::RelationViolated { residual });
            }
            let dets = triple.map(|a| a.det());
            let values = dets.map(|d| d.sqrt());
            let real = dets.iter().all(|d| is_real(*d, scale * scale) && d.re > 0.0);
            let phi = triple[1].commutator(&triple[2]).det();
            (phi, values, real, scale.powi(4))
        }
        TripleMode::Group => {
            let residual = (triple[0] * triple[1] * triple[2] - Mat2C::identity()).norm();
            if residual > REL_TOL * scale.max(1.0).powi(3) {
                return Err(LwrError::RelationViolated { residual });
            }
            let t = triple.map(|m| m.trace() * 0.5);
            let values = t.map(|t| t.acos() / std::f64::consts::TAU);
            let real = t.iter().all(|t| is_real(*t, 1.0) && t.re.abs() < 1.0);
            (trace_phi(t), values, real, 1.0)
        }
    };
    let weights = TripleWeights { mode, values: weights };
    let tol = REL_TOL * phi_scale.max(1.0);
    let class = if phi.norm() <= tol {
        Classification::Reducible
    } else if real_weights && is_real(phi, phi_scale) && phi.re > 0.0 {
        Classification::Unitarizable
    } else {
        Classification::NotUnitarizable
    };
    let mut out = Unitarization { class, weights, phi, unitarizer: None, residual: None };
    if class == Classification::Unitarizable {
        let c = invariant_form_root(triple, mode)?;
        let cinv = c.inverse();
        let residual = triple
            .iter()
            .map(|x| {
                let y = c * *x * cinv;
                match mode {
                    TripleMode::Algebra => y.su2_residual() / x.norm().max(f64::MIN_POSITIVE),
                    TripleMode::Group => y.su2_group_residual(),
                }
            })
            .fold(0.0, f64::max);
        out.unitarizer = Some(c);
        out.residual = Some(residual);
    }
    Ok(out)
}

/// Hermitian `P = [[p₀+p₃, p₁+ip₂], [p₁−ip₂, p₀−p₃]]`.
fn hermitian(p: [f64; 4]) -> Mat2C {
    Mat2C::new(c(p[0] + p[3], 0.0), c(p[1], p[2]), c(p[1], -p[2]), c(p[0] - p[3], 0.0))
}

/// Solve `X*P + PX = 0` (algebra) or `X*PX = P` (group) for all three `X`
/// in the least-squares sense, normalize `tr P = 2`, and return `√P`
/// rescaled to determinant one.
fn invariant_form_root(triple: &[Mat2C; 3], mode: TripleMode) -> Result<Mat2C> {
    let constraint = |x: &Mat2C, p: &Mat2C| match mode {
        TripleMode::Algebra => x.adjoint() * *p + *p * *x,
        TripleMode::Group => x.adjoint() * *p * *x - *p,
    };
    let mut l = DMatrix::<f64>::zeros(24, 4);
    for j in 0..4 {
        let mut basis = [0.0; 4];
        basis[j] = 1.0;
        let p = hermitian(basis);
        for (k, x) in triple.iter().enumerate() {
            let r = constraint(x, &p);
            for (e, z) in [r.a, r.b, r.c, r.d].iter().enumerate() {
                l[(8 * k + 2 * e, j)] = z.re;
                l[(8 * k + 2 * e + 1, j)] = z.im;
            }
        }
    }
    let svd = l.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| LwrError::NotUnitarizable("singular value decomposition failed".into()))?;
    let k = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k).unwrap_or(3);
    let mut p = [v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)], v_t[(k, 3)]];
    if p[0].abs() < f64::EPSILON {
        return Err(LwrError::NotUnitarizable("invariant form has zero trace".into()));
    }
    let s = p[0];
    p.iter_mut().for_each(|x| *x /= s);
    let min_eig = p[0] - (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
    if min_eig <= MIN_FORM_EIGENVALUE {
        return Err(LwrError::NotUnitarizable(format!(
            "invariant form is not positive definite (min eigenvalue {min_eig:.3e})"
        )));
    }
    Ok(hermitian(p).hermitian_sqrt().normalize_det())
}
