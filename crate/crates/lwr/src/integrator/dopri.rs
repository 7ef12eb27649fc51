//! Dormand–Prince 5(4) stepping with a PI step-size controller.

use num_complex::Complex64;

use super::{FrameBundle, InitialData, Segment, SolverSettings};
use crate::error::{LwrError, Result};
use crate::liealg::{re, Mat2C};
use crate::potential::{Lifted, Potential};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// error weights: b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;
/// Smallest admissible step measured in `z`.
const MIN_DZ: f64 = 1e-13;
/// A step may move `z` by at most this fraction of the distance to the
/// nearest singularity (and to 0 when a log branch is carried).
const REACH: f64 = 0.5;

pub(super) struct FrameSystem<'a> {
    xi: &'a Potential,
    lambdas: Vec<Complex64>,
    derivative_of: Vec<usize>,
    uses_log: bool,
}

impl<'a> FrameSystem<'a> {
    pub fn new(xi: &'a Potential, init: &InitialData) -> Self {
        FrameSystem {
            xi,
            lambdas: init.lambdas.clone(),
            derivative_of: init.derivatives.iter().map(|(k, _)| *k).collect(),
            uses_log: xi.needs_log(),
        }
    }

    pub fn bundle(&self, at: Lifted, y: &[Mat2C]) -> FrameBundle {
        let n = self.lambdas.len();
        FrameBundle {
            at,
            lambdas: self.lambdas.clone(),
            phi: y[..n].to_vec(),
            derivatives: self.derivative_of.iter().copied().zip(y[n..].iter().copied()).collect(),
        }
    }

    fn reach(&self, z: Complex64) -> f64 {
        let mut d = self.xi.pole_distance(z);
        if self.uses_log {
            d = d.min(z.norm());
        }
        REACH * d
    }

    /// Right-hand side `dy/dt` at the lifted point `at` with velocity `dz`.
    fn rhs(&self, at: &Lifted, dz: Complex64, y: &[Mat2C], out: &mut [Mat2C]) {
        let (a, b) = self.xi.values(at);
        let (a, b) = (a.scale(dz), b.scale(dz));
        let n = self.lambdas.len();
        for k in 0..n {
            out[k] = y[k] * (a.scale(self.lambdas[k]) + b);
        }
        for (j, &k) in self.derivative_of.iter().enumerate() {
            out[n + j] = y[n + j] * (a.scale(self.lambdas[k]) + b) + y[k] * a;
        }
    }

    /// Integrate along `seg` from parameter `t0` to `t1`, updating the lifted
    /// point and the state in place.
    pub fn advance(
        &self,
        seg: &Segment,
        t0: f64,
        t1: f64,
        at: &mut Lifted,
        y: &mut Vec<Mat2C>,
        s: &SolverSettings,
    ) -> Result<()> {
        if t1 <= t0 {
            return Ok(());
        }
        let speed = seg.velocity(t0).norm().max(f64::MIN_POSITIVE);
        let dim = y.len();
        let mut k: [Vec<Mat2C>; 7] = std::array::from_fn(|_| vec![Mat2C::zero(); dim]);
        let mut tmp = vec![Mat2C::zero(); dim];
        let mut y5 = vec![Mat2C::zero(); dim];
        let mut t = t0;
        let mut h = ((t1 - t0).min(0.25 * self.reach(at.z) / speed)).max(1e-6 * (t1 - t0));
        let mut err_prev: f64 = 1e-4;
        let mut fsal = false;
        let mut steps = 0usize;

        let lift = |from: &Lifted, t: f64| from.continue_to(seg.point(t));
        while t < t1 {
            steps += 1;
            if steps > s.max_steps {
                return Err(LwrError::ToleranceFailure { z: at.z });
            }
            let cap = self.reach(at.z) / speed;
            if h > cap {
                h = cap;
            }
            let last = t + h >= t1 - 1e-15 * t1.abs().max(1.0);
            if last {
                h = t1 - t;
            }
            if h * speed < MIN_DZ {
                return Err(LwrError::PoleEncounter { z: at.z });
            }
            if !fsal {
                self.rhs(at, seg.velocity(t), y, &mut k[0]);
            }
            let stage = |coef: &[(usize, f64)], k: &[Vec<Mat2C>; 7], tmp: &mut Vec<Mat2C>| {
                for i in 0..dim {
                    let mut acc = y[i];
                    for &(j, c) in coef {
                        acc = acc + k[j][i].scale(re(h * c));
                    }
                    tmp[i] = acc;
                }
            };
            let nodes = [C2, C3, C4, C5, 1.0];
            let coefs: [&[(usize, f64)]; 5] = [
                &[(0, A21)],
                &[(0, A31), (1, A32)],
                &[(0, A41), (1, A42), (2, A43)],
                &[(0, A51), (1, A52), (2, A53), (3, A54)],
                &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)],
            ];
            for (s_idx, (c, coef)) in nodes.iter().zip(coefs).enumerate() {
                stage(coef, &k, &mut tmp);
                let ts = t + c * h;
                let p = lift(at, ts);
                let (head, tail) = k.split_at_mut(s_idx + 1);
                let _ = head;
                self.rhs(&p, seg.velocity(ts), &tmp, &mut tail[0]);
            }
            stage(&[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &k, &mut y5);
            let t_new = t + h;
            let p_new = lift(at, t_new);
            let (head, tail) = k.split_at_mut(6);
            self.rhs(&p_new, seg.velocity(t_new), &y5, &mut tail[0]);
            let _ = head;

            let mut err: f64 = 0.0;
            for i in 0..dim {
                let e = k[0][i].scale(re(E1))
                    + k[2][i].scale(re(E3))
                    + k[3][i].scale(re(E4))
                    + k[4][i].scale(re(E5))
                    + k[5][i].scale(re(E6))
                    + k[6][i].scale(re(E7));
                let e = e.scale(re(h));
                for (ev, (yo, yn)) in entries(&e).iter().zip(entries(&y[i]).iter().zip(entries(&y5[i]))) {
                    let sc = s.abs_tol + s.rel_tol * yo.norm().max(yn.norm());
                    err = err.max(ev.norm() / sc);
                }
            }
            if !err.is_finite() {
                h *= 0.2;
                fsal = false;
                continue;
            }
            if err <= 1.0 {
                t = if last { t1 } else { t_new };
                *at = if last { lift(at, t1) } else { p_new };
                std::mem::swap(y, &mut y5);
                renormalize(y, self.lambdas.len(), &self.derivative_of);
                let fac =
                    if err == 0.0 { 5.0 } else { (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(0.2, 5.0) };
                err_prev = err.max(1e-4);
                h *= fac;
                // first-same-as-last is invalid after renormalization; recompute
                fsal = false;
            } else {
                h *= (SAFETY * err.powf(-ALPHA)).clamp(0.2, 1.0);
                fsal = true;
                if h * speed < MIN_DZ {
                    return Err(LwrError::PoleEncounter { z: at.z });
                }
            }
        }
        Ok(())
    }
}

fn entries(m: &Mat2C) -> [Complex64; 4] {
    [m.a, m.b, m.c, m.d]
}

/// Divide drifting frames by `√det` and project the derivative channels
/// back onto `tr(Φ⁻¹Φ̇) = 0`.
fn renormalize(y: &mut [Mat2C], n: usize, derivative_of: &[usize]) {
    for k in 0..n {
        let det = y[k].det();
        if (det - 1.0).norm() > 1e-12 {
            // det stays near 1, so the principal root is continuous
            let s = det.sqrt().inv();
            y[k] = y[k].scale(s);
            for (j, &idx) in derivative_of.iter().enumerate() {
                if idx == k {
                    let v = y[n + j].scale(s);
                    let tr = (y[k].inverse() * v).trace();
                    y[n + j] = v - y[k].scale(tr * 0.5);
                }
            }
        }
    }
}
