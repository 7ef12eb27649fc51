//! Path integration of the frame equation `dΦ = Φξ` at a finite set of
//! loop parameters, with optional λ-derivative channels.

mod dopri;
pub mod grid;
mod path;

pub use grid::{propagate_grid, Chart, Grid, StructuredGrid};
pub use path::{PathSpec, Segment};

use num_complex::Complex64;

use crate::error::{LwrError, Result};
use crate::liealg::{re, Mat2C};
use crate::potential::{Lifted, Potential};

/// Step-size controller and pole handling settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub pole_clearance: f64,
    pub max_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { rel_tol: 1e-10, abs_tol: 1e-12, pole_clearance: 0.05, max_steps: 200_000 }
    }
}

impl SolverSettings {
    /// Default radius of loops around punctures.
    pub fn loop_radius(&self) -> f64 {
        (2.0 * self.pole_clearance).max(0.1)
    }
}

/// Cauchy data: `Φ_λ(z₀) = C_λ` for each tracked `λ`, and `Φ̇(z₀) = Ċ`
/// for each derivative channel.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub z0: Lifted,
    pub lambdas: Vec<Complex64>,
    pub values: Vec<Mat2C>,
    /// `(index into lambdas, Ċ)`.
    pub derivatives: Vec<(usize, Mat2C)>,
}

impl InitialData {
    /// Same constant `C` at every `λ`, with `Ċ = 0` at the listed indices.
    pub fn constant(z0: Lifted, lambdas: &[Complex64], c: Mat2C, derivative_at: &[usize]) -> Self {
        InitialData {
            z0,
            lambdas: lambdas.to_vec(),
            values: vec![c; lambdas.len()],
            derivatives: derivative_at.iter().map(|&k| (k, Mat2C::zero())).collect(),
        }
    }

    pub fn check(&self) -> Result<()> {
        for (lambda, c) in self.lambdas.iter().zip(&self.values) {
            let residual = (c.det() - 1.0).norm();
            if residual > 1e-12 {
                return Err(LwrError::BadWeights(format!(
                    "initial value at lambda = {lambda} has |det - 1| = {residual:.3e}"
                )));
            }
        }
        for (k, cdot) in &self.derivatives {
            let c = self.values.get(*k).ok_or(LwrError::MissingEvaluation { lambda: re(f64::NAN) })?;
            let residual = (c.inverse() * *cdot).trace().norm();
            if residual > 1e-12 {
                return Err(LwrError::BadWeights(format!("initial derivative has |tr(C^-1 C')| = {residual:.3e}")));
            }
        }
        Ok(())
    }

    fn state(&self) -> Vec<Mat2C> {
        let mut y = self.values.clone();
        y.extend(self.derivatives.iter().map(|(_, d)| *d));
        y
    }
}

/// Frames at one point of the universal cover.
#[derive(Clone, Debug)]
pub struct FrameBundle {
    pub at: Lifted,
    pub lambdas: Vec<Complex64>,
    pub phi: Vec<Mat2C>,
    pub derivatives: Vec<(usize, Mat2C)>,
}

impl FrameBundle {
    pub fn from_initial(init: &InitialData) -> Self {
        FrameBundle {
            at: init.z0,
            lambdas: init.lambdas.clone(),
            phi: init.values.clone(),
            derivatives: init.derivatives.clone(),
        }
    }

    pub fn z(&self) -> Complex64 {
        self.at.z
    }

    pub fn index_of(&self, lambda: Complex64) -> Result<usize> {
        self.lambdas.iter().position(|l| *l == lambda).ok_or(LwrError::MissingEvaluation { lambda })
    }

    pub fn phi_at(&self, lambda: Complex64) -> Result<Mat2C> {
        Ok(self.phi[self.index_of(lambda)?])
    }

    /// `Φ̇` at `λ`.
    pub fn derivative_at(&self, lambda: Complex64) -> Result<Mat2C> {
        let k = self.index_of(lambda)?;
        self.derivatives.iter().find(|(j, _)| *j == k).map(|(_, d)| *d).ok_or(LwrError::MissingEvaluation { lambda })
    }

    /// Continue integrating from this bundle.
    pub fn as_initial(&self) -> InitialData {
        InitialData {
            z0: self.at,
            lambdas: self.lambdas.clone(),
            values: self.phi.clone(),
            derivatives: self.derivatives.clone(),
        }
    }

    /// Largest `|det Φ_λ − 1|`.
    pub fn det_residual(&self) -> f64 {
        self.phi.iter().map(|p| (p.det() - 1.0).norm()).fold(0.0, f64::max)
    }
}

/// Monodromy `M_λ` along a loop and `Ṁ` on the derivative channels.
#[derive(Clone, Debug)]
pub struct MonodromySample {
    pub loop_id: usize,
    pub lambdas: Vec<Complex64>,
    pub m: Vec<Mat2C>,
    pub derivatives: Vec<(usize, Mat2C)>,
}

impl MonodromySample {
    pub fn at(&self, lambda: Complex64) -> Result<Mat2C> {
        self.lambdas.iter().position(|l| *l == lambda).map(|k| self.m[k]).ok_or(LwrError::MissingEvaluation { lambda })
    }

    pub fn derivative_at(&self, lambda: Complex64) -> Result<Mat2C> {
        let k = self.lambdas.iter().position(|l| *l == lambda).ok_or(LwrError::MissingEvaluation { lambda })?;
        self.derivatives.iter().find(|(j, _)| *j == k).map(|(_, d)| *d).ok_or(LwrError::MissingEvaluation { lambda })
    }

    /// Product `self · other`, the monodromy of the loop `other` followed by
    /// `self` under the left-factor convention.
    pub fn compose(&self, other: &MonodromySample) -> MonodromySample {
        let m: Vec<_> = self.m.iter().zip(&other.m).map(|(a, b)| *a * *b).collect();
        let derivatives = self
            .derivatives
            .iter()
            .filter_map(|(k, d)| {
                let od = other.derivatives.iter().find(|(j, _)| j == k)?.1;
                Some((*k, *d * other.m[*k] + self.m[*k] * od))
            })
            .collect();
        MonodromySample { loop_id: self.loop_id, lambdas: self.lambdas.clone(), m, derivatives }
    }
}

/// Integrate along `path` starting from `init`, returning the bundle at the
/// endpoint.
pub fn integrate_frame(
    xi: &Potential,
    path: &PathSpec,
    init: &InitialData,
    settings: &SolverSettings,
) -> Result<FrameBundle> {
    Ok(integrate_recording(xi, path, init, settings, &[])?.0)
}

/// Like [`integrate_frame`], also returning bundles at the given arclength
/// fractions of the path (sorted, in `[0, 1]`).
pub fn integrate_recording(
    xi: &Potential,
    path: &PathSpec,
    init: &InitialData,
    settings: &SolverSettings,
    fractions: &[f64],
) -> Result<(FrameBundle, Vec<FrameBundle>)> {
    if let Some(start) = path.start() {
        let gap = (start - init.z0.z).norm();
        if gap > 1e-12 {
            return Err(LwrError::DisconnectedPath { gap });
        }
    }
    path.validate(&xi.poles, settings.pole_clearance)?;
    let system = dopri::FrameSystem::new(xi, init);
    let total = path.length();
    let mut targets: Vec<(usize, f64)> = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let mut remaining = f.clamp(0.0, 1.0) * total;
        let mut placed = false;
        for (k, seg) in path.segments.iter().enumerate() {
            let len = seg.length();
            if remaining <= len || k + 1 == path.segments.len() {
                let t = if len > 0.0 { (remaining / len).min(1.0) } else { 1.0 };
                targets.push((k, t));
                placed = true;
                break;
            }
            remaining -= len;
        }
        if !placed {
            targets.push((0, 0.0));
        }
    }

    let mut y = init.state();
    let mut at = init.z0;
    let mut recorded = Vec::with_capacity(targets.len());
    let record = |at: &Lifted, y: &[Mat2C]| system.bundle(*at, y);
    let mut next = 0;
    while next < targets.len() && targets[next] == (0, 0.0) {
        recorded.push(record(&at, &y));
        next += 1;
    }
    for (k, seg) in path.segments.iter().enumerate() {
        let mut stops: Vec<f64> = Vec::new();
        let mut j = next;
        while j < targets.len() && targets[j].0 == k {
            stops.push(targets[j].1);
            j += 1;
        }
        let mut t0 = 0.0;
        for &stop in &stops {
            system.advance(seg, t0, stop, &mut at, &mut y, settings)?;
            recorded.push(record(&at, &y));
            t0 = stop;
        }
        next = j;
        system.advance(seg, t0, 1.0, &mut at, &mut y, settings)?;
    }
    Ok((record(&at, &y), recorded))
}

/// Monodromy along a closed loop: `M_λ = Φ_λ^end C_λ⁻¹` and
/// `Ṁ = (Φ̇^end − M Ċ) C⁻¹`.
pub fn monodromy(
    xi: &Potential,
    path: &PathSpec,
    init: &InitialData,
    settings: &SolverSettings,
    loop_id: usize,
) -> Result<MonodromySample> {
    path.is_closed()?;
    let end = integrate_frame(xi, path, init, settings)?;
    let m: Vec<Mat2C> = end.phi.iter().zip(&init.values).map(|(phi, c)| *phi * c.inverse()).collect();
    let derivatives = end
        .derivatives
        .iter()
        .zip(&init.derivatives)
        .map(|((k, d), (_, cdot))| {
            let cinv = init.values[*k].inverse();
            (*k, (*d - m[*k] * *cdot) * cinv)
        })
        .collect();
    Ok(MonodromySample { loop_id, lambdas: init.lambdas.clone(), m, derivatives })
}
