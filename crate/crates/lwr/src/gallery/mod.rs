//! Named constructions, job configuration and the job runner.

pub mod config;
pub mod job;

pub use config::{parse_job, JobConfig, PatchConfig, SurfaceConfig, TransformConfig};
pub use job::{prepare, run_job, run_prepared, JobReport, PreparedJob, Residuals, Suite};

use num_complex::Complex64;

use crate::error::{LwrError, Result};
use crate::integrator::{monodromy, InitialData, MonodromySample, PathSpec, SolverSettings, StructuredGrid};
use crate::liealg::{c, re, EvaluationPair, Mat2C, Spinor2};
use crate::potential::{DomainKind, Lifted, MatFn, Poly, Potential, ScalarFn};
use crate::surface::Target;
use crate::transform::{check_closing, unitarize_triple, Classification, OuterFactor, SimpleFactorSpec, TripleMode};

/// Default grid resolution per patch side.
pub const DEFAULT_RESOLUTION: usize = 64;

/// A structured grid patch; `periodic` patches close up in the angular
/// direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Patch {
    pub grid: StructuredGrid,
    pub periodic: bool,
}

/// Everything needed to integrate and immerse one surface.
#[derive(Clone, Debug)]
pub struct Construction {
    pub name: String,
    pub target: Target,
    pub xi: Potential,
    /// Base point and the `λ`-independent initial value `Φ(z₀) = C`.
    pub z0: Lifted,
    pub initial: Mat2C,
    pub ev: EvaluationPair,
    /// Generating loops based at `z₀`.
    pub loops: Vec<PathSpec>,
    pub patches: Vec<Patch>,
    pub dressing: Option<OuterFactor>,
}

impl Construction {
    /// Loop parameters to track: the evaluation pair, plus `α` when dressed.
    pub fn lambdas(&self) -> Vec<Complex64> {
        let mut l = vec![self.ev.lambda0, self.ev.lambda1];
        if let Some(d) = &self.dressing {
            l.push(d.spec.alpha);
        }
        l
    }

    /// Initial data with derivative channels at both evaluation points.
    pub fn initial_data(&self) -> InitialData {
        InitialData::constant(self.z0, &self.lambdas(), self.initial, &[0, 1])
    }

    /// Monodromy of every generating loop.
    pub fn monodromies(&self, settings: &SolverSettings) -> Result<Vec<MonodromySample>> {
        let init = self.initial_data();
        self.loops.iter().enumerate().map(|(k, l)| monodromy(&self.xi, l, &init, settings, k)).collect()
    }
}

fn mono(coeff: Complex64, exp: f64) -> ScalarFn {
    ScalarFn::monomial(coeff, exp)
}

fn zero() -> ScalarFn {
    ScalarFn::zero()
}

/// Enneper data `ξ = [[0, r zⁿ], [λ, 0]]dz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnneperSpec {
    pub r: f64,
    pub n: u32,
}

impl EnneperSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(LwrError::BadWeights(format!("Enneper r must be positive, got {}", self.r)));
        }
        Ok(())
    }
}

pub fn make_enneper(spec: &EnneperSpec, target: Target, resolution: usize) -> Result<Construction> {
    spec.validate()?;
    let xi = Potential::new(
        MatFn::new(zero(), zero(), ScalarFn::constant(re(1.0)), zero()),
        MatFn::new(zero(), mono(re(spec.r), spec.n as f64), zero(), zero()),
        vec![],
        DomainKind::Plane,
    );
    let ev = match target {
        Target::E3 => EvaluationPair::new(re(0.0), re(1.0))?,
        Target::H3 => EvaluationPair::new(re(1.0), re(0.0))?,
    };
    Ok(Construction {
        name: format!("enneper_r{}_n{}", spec.r, spec.n),
        target,
        xi,
        z0: Lifted::principal(re(0.0)),
        initial: Mat2C::identity(),
        ev,
        loops: vec![],
        patches: vec![Patch {
            grid: StructuredGrid::rect(c(-1.0, -1.0), c(1.0, 1.0), resolution, resolution),
            periodic: false,
        }],
        dressing: None,
    })
}

/// Catenoid data `ξ = K dz/z`, `K = [[0, 1], [qλ + p, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatenoidSpec {
    pub p: f64,
    pub q: f64,
}

impl CatenoidSpec {
    pub fn validate(&self, target: Target) -> Result<()> {
        if !(self.p > 0.0) {
            return Err(LwrError::BadWeights(format!("catenoid p must be positive, got {}", self.p)));
        }
        if self.q == 0.0 || !self.q.is_finite() {
            return Err(LwrError::BadWeights("catenoid q must be a nonzero number".into()));
        }
        if target == Target::H3 && self.p + self.q <= 0.0 {
            return Err(LwrError::BadWeights(format!("H3 catenoid needs p + q > 0, got {}", self.p + self.q)));
        }
        Ok(())
    }

    /// `μ` of the initial value: `√p` in E³, `√(p+q)` in H³.
    pub fn mu(&self, target: Target) -> f64 {
        match target {
            Target::E3 => self.p.sqrt(),
            Target::H3 => (self.p + self.q).sqrt(),
        }
    }

    /// Wrapping number `2√p`.
    pub fn wrapping(&self) -> f64 {
        2.0 * self.p.sqrt()
    }

    pub fn potential(&self) -> Potential {
        let inv = |k: f64| mono(re(k), -1.0);
        Potential::new(
            MatFn::new(zero(), zero(), inv(self.q), zero()),
            MatFn::new(zero(), inv(1.0), inv(self.p), zero()),
            vec![re(0.0)],
            DomainKind::PuncturedPlane,
        )
    }
}

/// `(1/√2)[[1, 1/μ], [−μ, 1]]`.
pub fn catenoid_initial(mu: f64) -> Mat2C {
    Mat2C::real(1.0, 1.0 / mu, -mu, 1.0).scale(re(std::f64::consts::FRAC_1_SQRT_2))
}

pub fn make_catenoid(spec: &CatenoidSpec, target: Target, resolution: usize) -> Result<Construction> {
    spec.validate(target)?;
    Ok(Construction {
        name: format!("catenoid_p{}_q{}", spec.p, spec.q),
        target,
        xi: spec.potential(),
        z0: Lifted::principal(re(1.0)),
        initial: catenoid_initial(spec.mu(target)),
        ev: EvaluationPair::new(re(0.0), re(1.0))?,
        loops: vec![PathSpec::loop_around(re(1.0), re(0.0), 1.0, 1.0)],
        patches: vec![Patch {
            grid: StructuredGrid::periodic_annulus(re(0.0), 0.5, 2.0, 0.0, resolution, resolution),
            periodic: true,
        }],
        dressing: None,
    })
}

/// Intrinsic surface of revolution `ξ = λ x x^⊥ dz`, `x = (a z^α, b z^β)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RevolutionSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
}

impl RevolutionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(LwrError::BadWeights("revolution a and b must be positive".into()));
        }
        if !(self.alpha < self.beta) {
            return Err(LwrError::BadWeights("revolution needs alpha < beta".into()));
        }
        Ok(())
    }

    fn is_entire(&self) -> bool {
        let ok = |e: f64| e >= 0.0 && e.fract() == 0.0;
        ok(2.0 * self.alpha) && ok(2.0 * self.beta) && ok(self.alpha + self.beta)
    }
}

pub fn make_revolution(spec: &RevolutionSpec, target: Target, resolution: usize) -> Result<Construction> {
    spec.validate()?;
    let (a, b, al, be) = (spec.a, spec.b, spec.alpha, spec.beta);
    let entire = spec.is_entire();
    let xi = Potential::new(
        MatFn::new(
            mono(re(-a * b), al + be),
            mono(re(a * a), 2.0 * al),
            mono(re(-b * b), 2.0 * be),
            mono(re(a * b), al + be),
        ),
        MatFn::zero(),
        if entire { vec![] } else { vec![re(0.0)] },
        if entire { DomainKind::Plane } else { DomainKind::PuncturedPlane },
    );
    let e = Complex64::from_polar(1.0, spec.nu);
    let ev = match target {
        Target::E3 => EvaluationPair::new(re(0.0), e)?,
        Target::H3 => EvaluationPair::new(-e, re(0.0))?,
    };
    let (loops, patch) = if entire {
        (
            vec![],
            Patch { grid: StructuredGrid::rect(c(0.0, -1.0), c(2.0, 1.0), resolution, resolution), periodic: false },
        )
    } else {
        (
            vec![PathSpec::loop_around(re(1.0), re(0.0), 1.0, 1.0)],
            Patch {
                grid: StructuredGrid::periodic_annulus(re(0.0), 0.5, 2.0, 0.0, resolution, resolution),
                periodic: true,
            },
        )
    };
    Ok(Construction {
        name: "revolution".into(),
        target,
        xi,
        z0: Lifted::principal(re(1.0)),
        initial: Mat2C::identity(),
        ev,
        loops,
        patches: vec![patch],
        dressing: None,
    })
}

/// Trinoid weights `q₀, q₁, q₂` at `0, 1, ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrinoidSpec {
    pub q: [Complex64; 3],
}

/// Base point of trinoid loops.
pub const TRINOID_BASE: Complex64 = Complex64::new(0.5, -0.3);

impl TrinoidSpec {
    /// `δ = q₀² + q₁² + q₂² − 2q₀q₁ − 2q₀q₂ − 2q₁q₂`.
    pub fn delta(&self) -> Complex64 {
        let [a, b, d] = self.q;
        a * a + b * b + d * d - (a * b + a * d + b * d) * 2.0
    }

    /// Coefficients of the Hopf numerator `q₀ + (q₁−q₀−q₂)z + q₂z²`.
    pub fn numerator(&self) -> Poly {
        let [a, b, d] = self.q;
        Poly(vec![a, b - a - d, d])
    }

    /// The two zeros `u₀, u₁` of the Hopf numerator.
    pub fn hopf_zeros(&self) -> Result<[Complex64; 2]> {
        let [a, b, d] = self.q;
        let scale = self.q.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if d.norm() <= 1e-14 * scale.max(1e-300) {
            return Err(LwrError::BadWeights("trinoid weight q2 must be nonzero".into()));
        }
        let delta = self.delta();
        if delta.norm() <= 1e-12 * scale * scale {
            return Err(LwrError::DegenerateWeights { delta });
        }
        let s = delta.sqrt();
        let m = b - a - d;
        Ok([(-m + s) / (d * 2.0), (-m - s) / (d * 2.0)])
    }

    /// `νₖ = ½ − √(qₖ + ¼)`.
    pub fn nu(&self) -> [Complex64; 3] {
        self.q.map(|q| re(0.5) - (q + 0.25).sqrt())
    }

    /// Refuse weights that cannot close, before any integration.
    pub fn admissible(&self, target: Target) -> Result<()> {
        self.hopf_zeros()?;
        if self.q.iter().any(|q| q.im.abs() > 1e-12 * q.norm().max(1.0)) {
            return Err(LwrError::NotUnitarizable("trinoid weights must be real".into()));
        }
        let q = self.q.map(|q| q.re);
        match target {
            Target::E3 => {
                let a = q.map(f64::abs);
                if !(a[0] < a[1] + a[2] && a[1] < a[0] + a[2] && a[2] < a[0] + a[1]) {
                    return Err(LwrError::NotUnitarizable(
                        "weights violate the strict Euclidean triangle inequalities".into(),
                    ));
                }
            }
            Target::H3 => {
                if q.iter().any(|&x| x < -0.25) {
                    return Err(LwrError::NotUnitarizable("weights below -1/4 give non-real nu".into()));
                }
                let n = self.nu().map(|v| normalize_nu(v.re));
                let ok = n[0] < n[1] + n[2] && n[1] < n[0] + n[2] && n[2] < n[0] + n[1] && n[0] + n[1] + n[2] < 1.0;
                if !ok {
                    return Err(LwrError::NotUnitarizable(
                        "weights violate the strict spherical triangle inequalities".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn potential(&self) -> Result<Potential> {
        let [u0, u1] = self.hopf_zeros()?;
        let q = ScalarFn::rational(self.numerator(), Poly::from_roots(&[re(0.0), re(0.0), re(1.0), re(1.0)]));
        let d = u1 - u0;
        let s = ScalarFn::rational(Poly::constant(d * d * 0.75), Poly::from_roots(&[u0, u0, u1, u1]));
        Ok(Potential::new(
            MatFn::new(zero(), zero(), q, zero()),
            MatFn::new(zero(), ScalarFn::constant(re(1.0)), s, zero()),
            vec![re(0.0), re(1.0), u0, u1],
            DomainKind::PuncturedSphere,
        ))
    }

    /// Loops around `0`, `1` (counter-clockwise) and `∞` (clockwise),
    /// based at [`TRINOID_BASE`], with their radii.
    pub fn loops(&self) -> Result<(Vec<PathSpec>, [f64; 2], f64)> {
        let [u0, u1] = self.hopf_zeros()?;
        let singular = [re(0.0), re(1.0), u0, u1];
        let radius = |p: Complex64| {
            let d = singular.iter().filter(|s| **s != p).map(|s| (s - p).norm()).fold(f64::INFINITY, f64::min);
            0.4f64.min(0.5 * d)
        };
        let (r0, r1) = (radius(re(0.0)), radius(re(1.0)));
        let r_inf = 3.0f64.max(1.5 * u0.norm().max(u1.norm()));
        let loops = vec![
            PathSpec::loop_around(TRINOID_BASE, re(0.0), r0, 1.0),
            PathSpec::loop_around(TRINOID_BASE, re(1.0), r1, 1.0),
            PathSpec::loop_around(TRINOID_BASE, re(0.0), r_inf, -1.0),
        ];
        Ok((loops, [r0, r1], r_inf))
    }
}

/// Fold a real logarithmic eigenvalue into `[0, ½]`.
pub fn normalize_nu(nu: f64) -> f64 {
    let v = nu.rem_euclid(1.0);
    if v > 0.5 {
        1.0 - v
    } else {
        v
    }
}

/// Settings used for trinoid monodromies feeding the unitarizer, which
/// checks its relation to `1e-10`.
pub fn trinoid_settings(base: &SolverSettings) -> SolverSettings {
    SolverSettings { rel_tol: base.rel_tol.min(1e-12), abs_tol: base.abs_tol.min(1e-14), ..*base }
}

pub fn make_trinoid(
    spec: &TrinoidSpec,
    target: Target,
    resolution: usize,
    settings: &SolverSettings,
) -> Result<Construction> {
    spec.admissible(target)?;
    let xi = spec.potential()?;
    let (loops, [r0, r1], r_inf) = spec.loops()?;
    let ev = EvaluationPair::new(re(0.0), re(1.0))?;
    let mut con = Construction {
        name: "trinoid".into(),
        target,
        xi,
        z0: Lifted::principal(TRINOID_BASE),
        initial: Mat2C::identity(),
        ev,
        loops,
        patches: vec![],
        dressing: None,
    };
    let fine = trinoid_settings(settings);
    let ms = con.monodromies(&fine)?;
    let verdict = check_closing(&ms, &ev, target, 1e-6);
    if let Some(bad) = verdict.loops.iter().find(|l| !l.m0_scalar) {
        return Err(LwrError::NotUnitarizable(format!(
            "monodromy at lambda0 is not +-I on loop {} (residual {:.3e})",
            bad.loop_id,
            bad.m0_residual()
        )));
    }
    let (triple, mode) = match target {
        Target::E3 => {
            let t: Vec<Mat2C> = ms
                .iter()
                .zip(&verdict.loops)
                .map(|(m, v)| Ok(m.derivative_at(ev.lambda0)?.scale(ev.difference() * v.m0_sign)))
                .collect::<Result<_>>()?;
            ([t[0], t[1], t[2]], TripleMode::Algebra)
        }
        Target::H3 => {
            let m: Vec<Mat2C> = ms.iter().map(|m| m.at(ev.lambda1)).collect::<Result<_>>()?;
            let id = Mat2C::identity();
            // the loop at ∞ inverts the product of the other two in one order
            let order = if (m[0] * m[1] * m[2] - id).norm() <= (m[1] * m[0] * m[2] - id).norm() {
                [m[0], m[1], m[2]]
            } else {
                [m[1], m[0], m[2]]
            };
            (order, TripleMode::Group)
        }
    };
    let u = unitarize_triple(&triple, mode)?;
    if u.class != Classification::Unitarizable {
        return Err(LwrError::NotUnitarizable(format!("monodromy triple is {:?} (phi = {})", u.class, u.phi)));
    }
    con.initial = u.unitarizer.expect("unitarizable triple has a unitarizer");
    let [u0, u1] = spec.hopf_zeros()?;
    let near = |p: Complex64, r: f64| {
        [u0, u1].iter().map(|u| (u - p).norm() - 2.0 * settings.pole_clearance).fold(r, f64::min)
    };
    let eps = settings.pole_clearance;
    let outer = |p: Complex64, r: f64| near(p, r).max(eps * 2.0);
    let r_in = 2.5f64.max(r_inf - 0.5).max(1.2 * u0.norm().max(u1.norm()));
    con.patches = vec![
        Patch {
            grid: StructuredGrid::periodic_annulus(re(0.0), eps, outer(re(0.0), r0), 0.0, resolution, resolution),
            periodic: true,
        },
        Patch {
            grid: StructuredGrid::periodic_annulus(re(1.0), eps, outer(re(1.0), r1), 0.0, resolution, resolution),
            periodic: true,
        },
        Patch {
            grid: StructuredGrid::periodic_annulus(re(0.0), r_in, 20.0f64.max(4.0 * r_in), 0.0, resolution, resolution),
            periodic: true,
        },
    ];
    Ok(con)
}

/// Simple factor dressing of a catenoid with `α = p(u²−1)/q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedCatenoidSpec {
    pub base: CatenoidSpec,
    pub u: f64,
    pub ell: [f64; 2],
    pub m: Option<Spinor2>,
}

impl DressedCatenoidSpec {
    pub fn alpha(&self) -> f64 {
        self.base.p * (self.u * self.u - 1.0) / self.base.q
    }

    pub fn validate(&self, target: Target) -> Result<()> {
        self.base.validate(target)?;
        if !(self.u > 0.0) || self.u == 1.0 {
            return Err(LwrError::BadWeights("dressed catenoid needs u > 0 and u != 1".into()));
        }
        if target == Target::H3 && (self.u - ((self.base.p + self.base.q) / self.base.p).sqrt()).abs() < 1e-12 {
            return Err(LwrError::BadWeights("dressed H3 catenoid needs u != sqrt((p+q)/p)".into()));
        }
        if self.ell == [0.0, 0.0] {
            return Err(LwrError::BadWeights("dressing line must be nonzero".into()));
        }
        Ok(())
    }

    /// Predicted singular points in the sector `0 ≤ arg z < 2π`: solutions
    /// of `z^{2μ_α} = Z` with `Z` from the line condition `Φ_α w ∈ ℓ`.
    pub fn predicted_singular_points(&self, target: Target) -> Vec<Complex64> {
        let mu = self.base.mu(target);
        let mu_a = self.u * self.base.p.sqrt();
        let [l1, l2] = self.ell;
        let z = (re(mu * l1 * (mu + mu_a) + l2 * (mu - mu_a))) / re(l2 * (mu + mu_a) + mu * l1 * (mu - mu_a));
        let e = 2.0 * mu_a;
        let (r, th) = (z.norm(), z.arg());
        let mut out = Vec::new();
        // z = exp((ln Z + 2πik)/e), kept when its argument lies in [0, 2π)
        for k in -8i32..=8 {
            let arg = (th + std::f64::consts::TAU * k as f64) / e;
            if (0.0..std::f64::consts::TAU).contains(&arg) {
                out.push(Complex64::from_polar(r.powf(1.0 / e), arg));
            }
        }
        out
    }
}

pub fn make_dressed_catenoid(spec: &DressedCatenoidSpec, target: Target, resolution: usize) -> Result<Construction> {
    spec.validate(target)?;
    let mut con = make_catenoid(&spec.base, target, resolution)?;
    let ell = Spinor2::new(re(spec.ell[0]), re(spec.ell[1]));
    let sf = SimpleFactorSpec::new(re(spec.alpha()), ell, spec.m, &con.ev)?;
    con.dressing = Some(OuterFactor::new(sf, &con.ev, target));
    con.name = format!("dressed_catenoid_p{}_q{}_u{}", spec.base.p, spec.base.q, spec.u);
    Ok(con)
}
