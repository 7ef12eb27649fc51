//! The job runner: build, propagate, transform, sample, check and export.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{CustomSurface, JobConfig, PatchConfig, SurfaceConfig, TransformConfig};
use super::{make_catenoid, make_dressed_catenoid, make_enneper, make_revolution, make_trinoid, Construction, Patch};
use crate::error::{LwrError, Result};
use crate::integrator::{propagate_grid, FrameBundle, MonodromySample, PathSpec, SolverSettings, StructuredGrid};
use crate::liealg::{re, EvaluationPair, Mat2C, Projective, Spinor2};
use crate::potential::{Lifted, Potential};
use crate::surface::mesh::{build_mesh, format_sci, Mesh, VertexInfo};
use crate::surface::{
    euclidean_null_curve, hyperbolic_null_curve, node_diagnostics, sample, sample_with_spinor, Stencil, SurfaceSample,
    Target,
};
use crate::transform::{
    associated_move, check_closing, dress_bundle, dressed_monodromy, dressed_spinor_and_hopf, holomorphic_dress,
    locate_singular_point, ClosingVerdict, DressingFamily, OuterFactor, SimpleFactorSpec,
};

/// Separation of the dressing lines below which a node counts as a
/// candidate for a nearby singular point.
const SINGULAR_CANDIDATE: f64 = 0.05;
/// Two located singular points closer than this are the same point.
const SINGULAR_MERGE: f64 = 1e-7;
/// Finite-difference checks skip stencils reaching this close to a located
/// singular point, where the surface runs off to an end.
const SINGULAR_EXCLUSION: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Conformality,
    Closing,
    Hopf,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Conformality, Suite::Closing, Suite::Hopf];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Conformality => "conformality",
            Suite::Closing => "closing",
            Suite::Hopf => "hopf",
        }
    }

    /// A suite name, or `all`.
    pub fn parse(name: &str) -> Option<Vec<Suite>> {
        match name {
            "all" => Some(Suite::ALL.to_vec()),
            _ => Suite::ALL.iter().find(|s| s.name() == name).map(|s| vec![*s]),
        }
    }

    /// Suites named in a job, deduplicated and ordered.
    pub fn from_names(names: &[String]) -> Vec<Suite> {
        let mut out: Vec<Suite> = names.iter().filter_map(|n| Suite::parse(n)).flatten().collect();
        out.sort();
        out.dedup();
        out
    }
}

/// A node-level transformation applied after propagation.
#[derive(Clone, Debug)]
enum NodeOp {
    /// `R_λ = exp((λ−base)X)`.
    Holomorphic {
        x: Mat2C,
        base: Complex64,
    },
    SimpleFactor(OuterFactor),
}

/// Closed form of the Hopf coefficient `q` of the base potential; the Hopf
/// differential is `(λ₁−λ₀)q dz²`.
#[derive(Clone, Copy, Debug)]
enum HopfReference {
    Monomial { coeff: f64, exp: f64 },
    Trinoid { q: [Complex64; 3] },
}

impl HopfReference {
    fn q(&self, at: &Lifted) -> Complex64 {
        match *self {
            HopfReference::Monomial { coeff, exp } => (at.log * exp).exp() * coeff,
            HopfReference::Trinoid { q: [a, b, d] } => {
                let z = at.z;
                (a + (b - a - d) * z + d * z * z) / (z * z * (z - 1.0) * (z - 1.0))
            }
        }
    }
}

/// A construction with its post-propagation transformations resolved.
#[derive(Clone, Debug)]
pub struct PreparedJob {
    pub construction: Construction,
    ops: Vec<NodeOp>,
    hopf_reference: Option<HopfReference>,
    pub settings: SolverSettings,
}

fn custom_construction(c: &CustomSurface, target: Target, resolution: usize) -> Result<Construction> {
    let xi = Potential::new(c.a.clone(), c.b.clone(), c.poles.clone(), c.domain);
    let ev = match target {
        Target::E3 => EvaluationPair::new(re(0.0), re(1.0))?,
        Target::H3 => EvaluationPair::new(re(1.0), re(0.0))?,
    };
    let half = Complex64::new(0.5, 0.5);
    Ok(Construction {
        name: "custom".into(),
        target,
        xi,
        z0: Lifted::principal(c.z0),
        initial: c.initial,
        ev,
        loops: c.loops.iter().map(|(center, r, turns)| PathSpec::loop_around(c.z0, *center, *r, *turns)).collect(),
        patches: vec![Patch {
            grid: StructuredGrid::rect(c.z0 - half, c.z0 + half, resolution, resolution),
            periodic: false,
        }],
        dressing: None,
    })
}

fn patch_of(p: &PatchConfig) -> Patch {
    match *p {
        PatchConfig::Rect { min, max, nx, ny } => {
            Patch { grid: StructuredGrid::rect(min, max, nx, ny), periodic: false }
        }
        PatchConfig::Annulus { center, r0, r1, theta0, theta1, nr, nt, periodic } => {
            if periodic {
                Patch { grid: StructuredGrid::periodic_annulus(center, r0, r1, theta0, nr, nt), periodic: true }
            } else {
                Patch { grid: StructuredGrid::annulus(center, r0, r1, theta0, theta1, nr, nt), periodic: false }
            }
        }
    }
}

/// Build the construction, apply evaluation moves and resolve dressings.
/// Moves act on the evaluation pair before integration; dressings act on
/// the propagated frames in the order given.
pub fn prepare(config: &JobConfig) -> Result<PreparedJob> {
    let (target, res) = (config.target, config.resolution);
    let (mut con, hopf_reference) = match &config.surface {
        SurfaceConfig::Enneper(s) => {
            (make_enneper(s, target, res)?, Some(HopfReference::Monomial { coeff: s.r, exp: s.n as f64 }))
        }
        SurfaceConfig::Catenoid(s) => {
            (make_catenoid(s, target, res)?, Some(HopfReference::Monomial { coeff: s.q, exp: -2.0 }))
        }
        SurfaceConfig::Revolution(s) => (
            make_revolution(s, target, res)?,
            Some(HopfReference::Monomial { coeff: s.a * s.b * (s.beta - s.alpha), exp: s.alpha + s.beta - 1.0 }),
        ),
        SurfaceConfig::Trinoid(s) => {
            (make_trinoid(s, target, res, &config.solver)?, Some(HopfReference::Trinoid { q: s.q }))
        }
        SurfaceConfig::DressedCatenoid(s) => {
            (make_dressed_catenoid(s, target, res)?, Some(HopfReference::Monomial { coeff: s.base.q, exp: -2.0 }))
        }
        SurfaceConfig::Custom(c) => (custom_construction(c, target, res)?, None),
    };
    if let Some(p) = &config.patches {
        con.patches = p.iter().map(patch_of).collect();
    }
    if let Some((l0, l1)) = config.evaluation {
        con.ev = EvaluationPair::new(l0, l1).map_err(|e| LwrError::config("/evaluation", e.to_string()))?;
    }
    // (alpha, ell, m) of the simple factor, with its position among the ops
    let mut sf: Option<(usize, Complex64, Spinor2, Option<Spinor2>)> =
        con.dressing.take().map(|d| (0, d.spec.alpha, d.spec.ell, Some(d.spec.m)));
    let mut ops: Vec<Option<NodeOp>> = if sf.is_some() { vec![None] } else { vec![] };
    for (k, t) in config.transforms.iter().enumerate() {
        let pointer = format!("/transforms/{k}");
        match t {
            TransformConfig::Dual => con.ev = con.ev.swapped(),
            TransformConfig::Associated { t } => {
                con.ev = associated_move(&con.ev, *t)
                    .map_err(|e| LwrError::config(format!("{pointer}/t"), e.to_string()))?;
            }
            TransformConfig::Holomorphic { x } => ops.push(Some(NodeOp::Holomorphic { x: *x, base: con.ev.lambda0 })),
            TransformConfig::SimpleFactor { alpha, ell, m } => {
                if sf.is_some() {
                    return Err(LwrError::config(pointer, "at most one simple factor dressing per job"));
                }
                if ell.norm_sqr() == 0.0 {
                    return Err(LwrError::config(format!("{pointer}/ell"), "line must be nonzero"));
                }
                sf = Some((ops.len(), *alpha, *ell, *m));
                ops.push(None);
            }
        }
    }
    if let Some((pos, alpha, ell, m)) = sf {
        let spec = SimpleFactorSpec::new(alpha, ell, m, &con.ev)?;
        let outer = OuterFactor::new(spec, &con.ev, target);
        ops[pos] = Some(NodeOp::SimpleFactor(outer.clone()));
        con.dressing = Some(outer);
    }
    let ops = ops.into_iter().map(|o| o.expect("every op slot is filled")).collect();
    Ok(PreparedJob { construction: con, ops, hopf_reference, settings: config.solver })
}

/// `exp((λ−base)X)` on `lambdas`, with derivatives at `derivative_at`.
fn holomorphic_family(
    x: &Mat2C,
    base: Complex64,
    lambdas: &[Complex64],
    derivative_at: &[usize],
) -> Result<DressingFamily> {
    DressingFamily::sample(lambdas, |l| x.scale(l - base).exp(), |l| *x * x.scale(l - base).exp(), derivative_at)
}

fn conjugate_monodromy(m: &MonodromySample, r: &DressingFamily) -> Result<MonodromySample> {
    let mut out = m.clone();
    for (k, l) in m.lambdas.iter().enumerate() {
        let g = r.at(*l)?;
        out.m[k] = g * m.m[k] * g.inverse();
    }
    for (k, d) in out.derivatives.iter_mut() {
        let l = m.lambdas[*k];
        let (g, gd) = (r.at(l)?, r.derivative_at(l)?);
        let ginv = g.inverse();
        let mk = m.m[*k];
        *d = gd * mk * ginv + g * *d * ginv - g * mk * ginv * gd * ginv;
    }
    Ok(out)
}

/// The outcome at one grid node.
#[derive(Clone, Debug)]
pub struct NodeResult {
    pub z: Complex64,
    /// `None` on the singular set of a dressing.
    pub sample: Option<SurfaceSample>,
    /// `ψ` (E³) or `Ψ` (H³).
    pub null_curve: Option<Mat2C>,
    /// Line separation of a simple factor dressing.
    pub separation: Option<f64>,
}

impl PreparedJob {
    pub fn has_simple_factor(&self) -> bool {
        self.ops.iter().any(|o| matches!(o, NodeOp::SimpleFactor(_)))
    }

    /// Monodromies of the generating loops after all dressings.
    pub fn monodromies(&self) -> Result<Vec<MonodromySample>> {
        let raw = self.construction.monodromies(&self.settings)?;
        raw.iter()
            .map(|m| {
                let mut cur = m.clone();
                for op in &self.ops {
                    cur = match op {
                        NodeOp::Holomorphic { x, base } => {
                            let idx: Vec<usize> = cur.derivatives.iter().map(|(k, _)| *k).collect();
                            conjugate_monodromy(&cur, &holomorphic_family(x, *base, &cur.lambdas, &idx)?)?
                        }
                        NodeOp::SimpleFactor(outer) => dressed_monodromy(&cur, outer)?,
                    };
                }
                Ok(cur)
            })
            .collect()
    }

    /// Closing verdict of all generating loops; trivially closed without
    /// loops.
    pub fn closing(&self, tol: f64) -> Result<ClosingVerdict> {
        let con = &self.construction;
        Ok(check_closing(&self.monodromies()?, &con.ev, con.target, tol))
    }

    /// Propagate the frames of one patch.
    pub fn propagate(&self, patch: &Patch) -> Result<Vec<FrameBundle>> {
        let con = &self.construction;
        let grid = patch.grid.to_grid(con.z0.z, None);
        propagate_grid(&con.xi, &grid, &con.initial_data(), &self.settings)
    }

    /// Apply the ops preceding the simple factor, returning the bundle the
    /// simple factor acts on.
    fn before_simple_factor(&self, fb: &FrameBundle) -> Result<(FrameBundle, Option<&OuterFactor>)> {
        let mut cur = fb.clone();
        for op in &self.ops {
            match op {
                NodeOp::Holomorphic { x, base } => cur = self.holomorphic(&cur, x, *base)?,
                NodeOp::SimpleFactor(outer) => return Ok((cur, Some(outer))),
            }
        }
        Ok((cur, None))
    }

    fn holomorphic(&self, fb: &FrameBundle, x: &Mat2C, base: Complex64) -> Result<FrameBundle> {
        let idx: Vec<usize> = fb.derivatives.iter().map(|(k, _)| *k).collect();
        holomorphic_dress(fb, &holomorphic_family(x, base, &fb.lambdas, &idx)?)
    }

    fn node_inner(&self, fb: &FrameBundle) -> Result<NodeResult> {
        let con = &self.construction;
        let (ev, target) = (&con.ev, con.target);
        let mut cur = fb.clone();
        let mut spin = None;
        let mut separation = None;
        for op in &self.ops {
            match op {
                NodeOp::Holomorphic { x, base } => cur = self.holomorphic(&cur, x, *base)?,
                NodeOp::SimpleFactor(outer) => {
                    let d = dress_bundle(&con.xi, &cur, outer)?;
                    separation = Some(d.separation);
                    match d.bundle {
                        Some(b) => {
                            spin = Some(dressed_spinor_and_hopf(&con.xi, &cur, outer, ev)?);
                            cur = b;
                        }
                        None => return Ok(NodeResult { z: fb.z(), sample: None, null_curve: None, separation }),
                    }
                }
            }
        }
        let s = match spin {
            Some((x, q)) => sample_with_spinor(&cur, ev, target, x, q)?,
            None => sample(&con.xi, &cur, ev, target)?,
        };
        let null_curve = match target {
            Target::E3 => euclidean_null_curve(&cur, ev)?,
            Target::H3 => hyperbolic_null_curve(&cur, ev)?,
        };
        Ok(NodeResult { z: fb.z(), sample: Some(s), null_curve: Some(null_curve), separation })
    }

    /// Evaluate one propagated node. Failures on dressed surfaces mark the
    /// node singular; elsewhere they are errors.
    pub fn node(&self, fb: &FrameBundle) -> Result<NodeResult> {
        match self.node_inner(fb) {
            Ok(r) => Ok(r),
            Err(_) if self.has_simple_factor() => {
                Ok(NodeResult { z: fb.z(), sample: None, null_curve: None, separation: None })
            }
            Err(e) => Err(e),
        }
    }

    fn hopf_expected(&self, at: &Lifted) -> Option<Complex64> {
        self.hopf_reference.map(|h| h.q(at) * self.construction.ev.difference())
    }
}

/// Maxima of the pointwise checks over one job.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    /// `|⟨f_z,f_z⟩| / ⟨f_z,f_z̄⟩`.
    pub conformality: f64,
    /// `|det ψ_z| / ‖ψ_z‖²` (E³) or the same for `Ψ_zΨ⁻¹` (H³).
    pub nullity: f64,
    /// `|H_est − H|` with `H = 0` (E³) or `1` (H³).
    pub mean_curvature: f64,
    /// Finite-difference Hopf against the sampled Hopf, relative to
    /// `max(|Q|, ds²)`.
    pub hopf_fd: f64,
    /// Sampled Hopf against its closed form, relative to `max(1, |Q|)`.
    pub hopf_exact: Option<f64>,
    /// Interior nodes that entered the finite-difference maxima.
    pub interior_nodes: usize,
    /// Interior nodes left out for lying near a located singular point.
    pub excluded_nodes: usize,
}

/// Everything a job produced.
#[derive(Clone, Debug)]
pub struct JobReport {
    pub name: String,
    pub target: Target,
    pub ev: EvaluationPair,
    pub mesh: Mesh,
    pub nodes: usize,
    pub singular_nodes: Vec<Complex64>,
    pub singular_points: Vec<Complex64>,
    pub closing: Option<ClosingVerdict>,
    pub residuals: Residuals,
    pub checks: Vec<(Suite, bool)>,
}

impl JobReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    /// `key=value` summary lines in a fixed order.
    pub fn summary(&self) -> Vec<String> {
        let mut out = vec![
            format!("surface={}", self.name),
            format!("target={}", self.target.name()),
            format!("lambda0={}", fmt_c(self.ev.lambda0)),
            format!("lambda1={}", fmt_c(self.ev.lambda1)),
            format!("vertices={}", self.mesh.vertices.len()),
            format!("triangles={}", self.mesh.triangles.len()),
        ];
        let r = &self.residuals;
        out.push(format!("interior_nodes={}", r.interior_nodes));
        out.push(format!("excluded_nodes={}", r.excluded_nodes));
        out.push(format!("conformality_max={}", format_sci(r.conformality)));
        out.push(format!("nullity_max={}", format_sci(r.nullity)));
        out.push(format!("mean_curvature_dev_max={}", format_sci(r.mean_curvature)));
        out.push(format!("hopf_fd_max={}", format_sci(r.hopf_fd)));
        if let Some(h) = r.hopf_exact {
            out.push(format!("hopf_exact_max={}", format_sci(h)));
        }
        if let Some(c) = &self.closing {
            out.push(format!("closing_loops={}", c.loops.len()));
            for l in &c.loops {
                out.push(format!(
                    "closing_loop_{}={} m0_residual={} sign={}",
                    l.loop_id,
                    if l.passes(c.target) { "pass" } else { "fail" },
                    format_sci(l.m0_residual()),
                    l.m0_sign
                ));
            }
            out.push(format!("closing_residual_max={}", format_sci(c.max_residual())));
            out.push(format!("closed={}", c.closed));
        }
        out.push(format!("singular_nodes={}", self.singular_nodes.len()));
        for z in &self.singular_points {
            out.push(format!("singular_point={}", fmt_c(*z)));
        }
        for (s, ok) in &self.checks {
            out.push(format!("check_{}={}", s.name(), if *ok { "pass" } else { "fail" }));
        }
        out
    }

    /// Write the mesh files named in `config`, relative to `base`.
    pub fn write_outputs(&self, config: &JobConfig, base: &Path) -> Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        for (name, is_obj) in [(&config.obj, true), (&config.csv, false)] {
            if let Some(name) = name {
                let path = base.join(name);
                if let Some(dir) = path.parent() {
                    std::fs::create_dir_all(dir)?;
                }
                if is_obj {
                    self.mesh.write_obj(&path)?;
                } else {
                    self.mesh.write_csv(&path)?;
                }
                written.push(path);
            }
        }
        Ok(written)
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{},{}", format_sci(z.re), format_sci(z.im))
}

fn nan_info(z: Complex64) -> VertexInfo {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    VertexInfo { z, metric_density: f64::NAN, hopf: nan, gauss: Projective(Spinor2::new(nan, nan)), h_est: None }
}

struct PatchOutcome {
    mesh: Mesh,
    residuals: Residuals,
    singular_nodes: Vec<Complex64>,
    singular_points: Vec<Complex64>,
}

fn run_patch(job: &PreparedJob, patch: &Patch, closed: bool) -> Result<PatchOutcome> {
    let con = &job.construction;
    let grid = &patch.grid;
    let bundles = job.propagate(patch)?;
    let nodes: Vec<NodeResult> = bundles.par_iter().map(|fb| job.node(fb)).collect::<Result<_>>()?;
    let regular: Vec<bool> = nodes
        .iter()
        .map(|n| n.sample.as_ref().is_some_and(|s| s.position.coords().iter().all(|c| c.is_finite())))
        .collect();
    let zero = Mat2C::zero();
    let positions: Vec<Mat2C> = nodes.iter().map(|n| n.sample.as_ref().map_or(zero, |s| s.position.matrix())).collect();
    let normals: Vec<Mat2C> = nodes.iter().map(|n| n.sample.as_ref().map_or(zero, |s| s.ambient_normal)).collect();
    let nulls: Vec<Mat2C> = nodes.iter().map(|n| n.null_curve.unwrap_or(zero)).collect();
    // local minima of the line separation seed the singular point search
    let sep = |i: usize, j: usize| nodes[grid.index(i, j)].separation;
    let mut candidates = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let Some(s) = sep(i, j) else { continue };
            if s >= SINGULAR_CANDIDATE {
                continue;
            }
            let mut nb = vec![];
            if i > 0 {
                nb.push((i - 1, j));
            }
            if i + 1 < grid.nx {
                nb.push((i + 1, j));
            }
            if j > 0 {
                nb.push((i, j - 1));
            }
            if j + 1 < grid.ny {
                nb.push((i, j + 1));
            }
            if nb.iter().all(|&(a, b)| sep(a, b).map_or(true, |t| s <= t)) {
                candidates.push(bundles[grid.index(i, j)].clone());
            }
        }
    }
    let singular_points = locate_all(job, &candidates);
    let near_singular = |z: Complex64| singular_points.iter().any(|p| (z - p).norm() < SINGULAR_EXCLUSION);
    let h_target = match con.target {
        Target::E3 => 0.0,
        Target::H3 => 1.0,
    };
    let stencil_regular =
        |i: usize, j: usize| (i - 3..=i + 3).all(|a| (j - 3..=j + 3).all(|b| regular[grid.index(a, b)]));
    let null_st = Stencil { grid, values: &nulls };
    let stencil_nodes: Vec<(usize, usize)> = (0..grid.ny)
        .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
        .filter(|&(i, j)| null_st.is_interior(i, j) && stencil_regular(i, j))
        .collect();
    let (excluded, interior): (Vec<(usize, usize)>, Vec<(usize, usize)>) = stencil_nodes
        .into_iter()
        .partition(|&(i, j)| (i - 3..=i + 3).any(|a| (j - 3..=j + 3).any(|b| near_singular(grid.z(a, b)))));
    struct Fd {
        k: usize,
        conf: f64,
        null: f64,
        h: f64,
        hopf: f64,
    }
    let fd: Vec<Fd> = interior
        .par_iter()
        .map(|&(i, j)| {
            let k = grid.index(i, j);
            let d = node_diagnostics(grid, &positions, &normals, i, j)?;
            let (pw, _, _) = null_st.derivatives(i, j)?;
            let pw = match con.target {
                Target::E3 => pw,
                Target::H3 => pw * nulls[k].inverse(),
            };
            let s = nodes[k].sample.as_ref().expect("regular node");
            let scale = s.hopf.norm().max(s.metric_density);
            Ok(Fd {
                k,
                conf: d.conformality,
                null: pw.det().norm() / pw.norm().powi(2).max(f64::MIN_POSITIVE),
                h: (d.h_est - h_target).abs(),
                hopf: (d.hopf - s.hopf).norm() / scale,
            })
        })
        .collect::<Result<_>>()?;
    let mut residuals = Residuals { interior_nodes: fd.len(), excluded_nodes: excluded.len(), ..Default::default() };
    let mut h_est = vec![None; nodes.len()];
    for f in &fd {
        residuals.conformality = residuals.conformality.max(f.conf);
        residuals.nullity = residuals.nullity.max(f.null);
        residuals.mean_curvature = residuals.mean_curvature.max(f.h);
        residuals.hopf_fd = residuals.hopf_fd.max(f.hopf);
        h_est[f.k] = Some(f.h + h_target);
    }
    if job.hopf_reference.is_some() {
        let mut worst: f64 = 0.0;
        for (n, fb) in nodes.iter().zip(&bundles) {
            if let (Some(s), Some(q)) = (&n.sample, job.hopf_expected(&fb.at)) {
                worst = worst.max((s.hopf - q).norm() / q.norm().max(1.0));
            }
        }
        residuals.hopf_exact = Some(worst);
    }
    let mut vertices = Vec::with_capacity(nodes.len());
    let mut info = Vec::with_capacity(nodes.len());
    for (k, n) in nodes.iter().enumerate() {
        match (&n.sample, regular[k]) {
            (Some(s), true) => {
                vertices.push(s.position.coords());
                info.push(VertexInfo {
                    z: n.z,
                    metric_density: s.metric_density,
                    hopf: s.hopf,
                    gauss: s.gauss,
                    h_est: h_est[k],
                });
            }
            _ => {
                vertices.push([0.0; 3]);
                info.push(nan_info(n.z));
            }
        }
    }
    let skip: Vec<bool> = regular.iter().map(|r| !r).collect();
    let mesh = build_mesh(grid, vertices, info, patch.periodic && closed, &skip);
    let singular_nodes = nodes.iter().zip(&regular).filter(|(_, r)| !**r).map(|(n, _)| n.z).collect();
    Ok(PatchOutcome { mesh, residuals, singular_nodes, singular_points })
}

/// Run a job: build, propagate every patch, evaluate the requested
/// suites. Nothing is written to disk.
pub fn run_job(config: &JobConfig, suites: &[Suite]) -> Result<JobReport> {
    let job = prepare(config)?;
    run_prepared(&job, config, suites)
}

pub fn run_prepared(job: &PreparedJob, config: &JobConfig, suites: &[Suite]) -> Result<JobReport> {
    let con = &job.construction;
    let closing = if con.loops.is_empty() { None } else { Some(job.closing(config.tolerances.closing)?) };
    let closed = closing.as_ref().map_or(true, |c| c.closed);
    let mut mesh = Mesh::default();
    let mut residuals = Residuals::default();
    let mut singular_nodes = Vec::new();
    let mut singular_points = Vec::new();
    let mut hopf_exact: Option<f64> = None;
    for patch in &con.patches {
        let out = run_patch(job, patch, closed)?;
        mesh.append(&out.mesh);
        let r = out.residuals;
        residuals.conformality = residuals.conformality.max(r.conformality);
        residuals.nullity = residuals.nullity.max(r.nullity);
        residuals.mean_curvature = residuals.mean_curvature.max(r.mean_curvature);
        residuals.hopf_fd = residuals.hopf_fd.max(r.hopf_fd);
        residuals.interior_nodes += r.interior_nodes;
        residuals.excluded_nodes += r.excluded_nodes;
        hopf_exact = match (hopf_exact, r.hopf_exact) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        singular_nodes.extend(out.singular_nodes);
        singular_points.extend(out.singular_points);
    }
    residuals.hopf_exact = hopf_exact;
    let singular_points = merge_points(singular_points);
    let tol = &config.tolerances;
    let checks = suites
        .iter()
        .map(|s| {
            let ok = match s {
                Suite::Conformality => {
                    residuals.interior_nodes > 0
                        && residuals.conformality < tol.conformality
                        && residuals.nullity < tol.conformality
                        && residuals.mean_curvature < tol.mean_curvature
                }
                Suite::Closing => closed,
                Suite::Hopf => {
                    residuals.hopf_exact.map_or(true, |h| h <= tol.hopf) && residuals.hopf_fd < tol.mean_curvature
                }
            };
            (*s, ok)
        })
        .collect();
    Ok(JobReport {
        name: con.name.clone(),
        target: con.target,
        ev: con.ev,
        nodes: mesh.vertices.len(),
        mesh,
        singular_nodes,
        singular_points,
        closing,
        residuals,
        checks,
    })
}

/// Refine singular point candidates by Newton's method, merging repeats.
fn locate_all(job: &PreparedJob, candidates: &[FrameBundle]) -> Vec<Complex64> {
    let xi = &job.construction.xi;
    let found: Vec<Complex64> = candidates
        .par_iter()
        .filter_map(|fb| {
            let (pre, outer) = job.before_simple_factor(fb).ok()?;
            let outer = outer?;
            locate_singular_point(xi, &pre, &outer.spec, &job.settings).ok().map(|b| b.z())
        })
        .collect();
    merge_points(found)
}

/// Drop repeats and sort lexicographically.
fn merge_points(found: Vec<Complex64>) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for z in found {
        if out.iter().all(|w| (w - z).norm() > SINGULAR_MERGE) {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}
