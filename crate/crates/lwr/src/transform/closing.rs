//! Period closing conditions on a set of loop monodromies.

use crate::integrator::MonodromySample;
use crate::liealg::{EvaluationPair, Mat2C};
use crate::surface::Target;

/// Flags and residuals of one loop. Flags are `residual ≤ tol`, nothing
/// else; a missing channel leaves its residual `None` and its flag false.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopVerdict {
    pub loop_id: usize,
    /// `‖M_{λ₀} − I‖` and `‖M_{λ₀} + I‖`.
    pub m0_residual_plus: f64,
    pub m0_residual_minus: f64,
    /// Sign of the closer scalar, `±1`.
    pub m0_sign: f64,
    pub m0_scalar: bool,
    /// `‖X + X*‖ + |tr X|` with `X = (λ₁−λ₀)Ṁ_{λ₀}`.
    pub e3_residual: Option<f64>,
    pub e3_translation_ok: bool,
    /// `‖M M* − I‖ + |det M − 1|` at `λ₁`.
    pub h3_residual: Option<f64>,
    pub h3_unitary_ok: bool,
}

impl LoopVerdict {
    pub fn m0_residual(&self) -> f64 {
        self.m0_residual_plus.min(self.m0_residual_minus)
    }

    pub fn passes(&self, target: Target) -> bool {
        self.m0_scalar
            && match target {
                Target::E3 => self.e3_translation_ok,
                Target::H3 => self.h3_unitary_ok,
            }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosingVerdict {
    pub target: Target,
    pub tol: f64,
    pub loops: Vec<LoopVerdict>,
    pub closed: bool,
}

impl ClosingVerdict {
    /// Largest residual relevant to the target over all loops.
    pub fn max_residual(&self) -> f64 {
        self.loops
            .iter()
            .map(|l| {
                let r = match self.target {
                    Target::E3 => l.e3_residual,
                    Target::H3 => l.h3_residual,
                };
                l.m0_residual().max(r.unwrap_or(f64::INFINITY))
            })
            .fold(0.0, f64::max)
    }
}

/// Check the closing conditions on each loop; the verdict is their
/// conjunction.
pub fn check_closing(samples: &[MonodromySample], ev: &EvaluationPair, target: Target, tol: f64) -> ClosingVerdict {
    let loops: Vec<LoopVerdict> = samples.iter().map(|m| loop_verdict(m, ev, tol)).collect();
    let closed = loops.iter().all(|l| l.passes(target));
    ClosingVerdict { target, tol, loops, closed }
}

fn loop_verdict(m: &MonodromySample, ev: &EvaluationPair, tol: f64) -> LoopVerdict {
    let id = Mat2C::identity();
    let (plus, minus) = match m.at(ev.lambda0) {
        Ok(m0) => ((m0 - id).norm(), (m0 + id).norm()),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    let e3_residual = m.derivative_at(ev.lambda0).ok().map(|d| d.scale(ev.difference()).su2_residual());
    let h3_residual = m.at(ev.lambda1).ok().map(|m1| m1.su2_group_residual());
    LoopVerdict {
        loop_id: m.loop_id,
        m0_residual_plus: plus,
        m0_residual_minus: minus,
        m0_sign: if minus < plus { -1.0 } else { 1.0 },
        m0_scalar: plus.min(minus) <= tol,
        e3_residual,
        e3_translation_ok: e3_residual.is_some_and(|r| r <= tol),
        h3_residual,
        h3_unitary_ok: h3_residual.is_some_and(|r| r <= tol),
    }
}

/// Spot check of the homomorphism property on a product of two loops:
/// `‖M(γδ) − M(γ)M(δ)‖` at every tracked `λ`.
pub fn product_residual(product: &MonodromySample, first: &MonodromySample, second: &MonodromySample) -> f64 {
    let composed = first.compose(second);
    product.m.iter().zip(&composed.m).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
}
