//! JSON job configuration. Errors carry the JSON pointer of the field.

use num_complex::Complex64;
use serde_json::Value;

use super::{CatenoidSpec, DressedCatenoidSpec, EnneperSpec, RevolutionSpec, TrinoidSpec, DEFAULT_RESOLUTION};
use crate::error::{LwrError, Result};
use crate::integrator::SolverSettings;
use crate::liealg::{Mat2C, Spinor2};
use crate::potential::parse::parse_scalar;
use crate::potential::{DomainKind, MatFn, ScalarFn};
use crate::surface::Target;

#[derive(Clone, Debug)]
pub enum SurfaceConfig {
    Enneper(EnneperSpec),
    Catenoid(CatenoidSpec),
    Revolution(RevolutionSpec),
    Trinoid(TrinoidSpec),
    DressedCatenoid(DressedCatenoidSpec),
    Custom(CustomSurface),
}

/// A potential given by formulas in `z`.
#[derive(Clone, Debug)]
pub struct CustomSurface {
    pub a: MatFn,
    pub b: MatFn,
    pub poles: Vec<Complex64>,
    pub domain: DomainKind,
    pub z0: Complex64,
    pub initial: Mat2C,
    /// `(center, radius, turns)` of each generating loop.
    pub loops: Vec<(Complex64, f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PatchConfig {
    Rect { min: Complex64, max: Complex64, nx: usize, ny: usize },
    Annulus { center: Complex64, r0: f64, r1: f64, theta0: f64, theta1: f64, nr: usize, nt: usize, periodic: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformConfig {
    Dual,
    Associated {
        t: Complex64,
    },
    /// `R_λ = exp((λ−λ₀)X)`.
    Holomorphic {
        x: Mat2C,
    },
    SimpleFactor {
        alpha: Complex64,
        ell: Spinor2,
        m: Option<Spinor2>,
    },
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub target: Target,
    pub surface: SurfaceConfig,
    pub evaluation: Option<(Complex64, Complex64)>,
    pub resolution: usize,
    pub patches: Option<Vec<PatchConfig>>,
    pub solver: SolverSettings,
    pub transforms: Vec<TransformConfig>,
    pub suites: Vec<String>,
    pub tolerances: Tolerances,
    pub obj: Option<String>,
    pub csv: Option<String>,
}

/// Pass thresholds of the check suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub conformality: f64,
    pub mean_curvature: f64,
    pub closing: f64,
    pub hopf: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { conformality: 1e-6, mean_curvature: 1e-3, closing: 1e-6, hopf: 1e-8 }
    }
}

/// Field access relative to a JSON pointer.
struct Node<'a> {
    value: &'a Value,
    pointer: String,
}

impl<'a> Node<'a> {
    fn child_pointer(&self, key: &str) -> String {
        format!("{}/{}", self.pointer, key.replace('~', "~0").replace('/', "~1"))
    }

    fn get(&self, key: &str) -> Option<Node<'a>> {
        self.value.get(key).map(|v| Node { value: v, pointer: self.child_pointer(key) })
    }

    fn req(&self, key: &str) -> Result<Node<'a>> {
        self.get(key).ok_or_else(|| LwrError::config(self.child_pointer(key), "missing required field"))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(LwrError::config(self.pointer.clone(), msg))
    }

    fn index(&self, k: usize) -> Result<Node<'a>> {
        match self.value.as_array().and_then(|a| a.get(k)) {
            Some(v) => Ok(Node { value: v, pointer: format!("{}/{k}", self.pointer) }),
            None => Err(LwrError::config(format!("{}/{k}", self.pointer), "missing array element")),
        }
    }

    fn items(&self) -> Result<Vec<Node<'a>>> {
        match self.value.as_array() {
            Some(a) => {
                Ok((0..a.len()).map(|k| Node { value: &a[k], pointer: format!("{}/{k}", self.pointer) }).collect())
            }
            None => self.err("expected an array"),
        }
    }

    fn f64(&self) -> Result<f64> {
        match self.value.as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => self.err("expected a finite number"),
        }
    }

    fn usize(&self) -> Result<usize> {
        match self.value.as_u64() {
            Some(x) => Ok(x as usize),
            None => self.err("expected a non-negative integer"),
        }
    }

    fn str(&self) -> Result<&'a str> {
        match self.value.as_str() {
            Some(s) => Ok(s),
            None => self.err("expected a string"),
        }
    }

    /// `[re, im]`, or a plain real number.
    fn complex(&self) -> Result<Complex64> {
        if self.value.is_number() {
            return Ok(Complex64::new(self.f64()?, 0.0));
        }
        match self.value.as_array() {
            Some(a) if a.len() == 2 => Ok(Complex64::new(self.index(0)?.f64()?, self.index(1)?.f64()?)),
            _ => self.err("expected a complex number [re, im]"),
        }
    }

    /// `[[a, b], [c, d]]` of complex entries.
    fn matrix(&self) -> Result<Mat2C> {
        let row = |k: usize| -> Result<(Complex64, Complex64)> {
            let r = self.index(k)?;
            Ok((r.index(0)?.complex()?, r.index(1)?.complex()?))
        };
        let ((a, b), (c, d)) = (row(0)?, row(1)?);
        Ok(Mat2C::new(a, b, c, d))
    }

    fn spinor(&self) -> Result<Spinor2> {
        Ok(Spinor2::new(self.index(0)?.complex()?, self.index(1)?.complex()?))
    }

    fn formula(&self) -> Result<ScalarFn> {
        let s = self.str()?;
        parse_scalar(s).or_else(|e| self.err(format!("cannot parse formula {s:?}: {e}")))
    }

    fn formula_matrix(&self) -> Result<MatFn> {
        let f = |i: usize, j: usize| self.index(i)?.index(j)?.formula();
        Ok(MatFn::new(f(0, 0)?, f(0, 1)?, f(1, 0)?, f(1, 1)?))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map(|n| n.f64()).unwrap_or(Ok(default))
    }
}

/// Parse a job from JSON text.
pub fn parse_job(text: &str) -> Result<JobConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| LwrError::config("", format!("invalid JSON: {e}")))?;
    let root = Node { value: &value, pointer: String::new() };
    if !value.is_object() {
        return root.err("job must be a JSON object");
    }
    let target = match root.req("target")?.str()? {
        "E3" => Target::E3,
        "H3" => Target::H3,
        other => return root.req("target")?.err(format!("unknown target {other:?}, expected \"E3\" or \"H3\"")),
    };
    let surface = parse_surface(&root.req("surface")?)?;
    let evaluation = match root.get("evaluation") {
        Some(e) => Some((e.req("lambda0")?.complex()?, e.req("lambda1")?.complex()?)),
        None => None,
    };
    let (resolution, patches) = match root.get("grid") {
        Some(g) => {
            let resolution = g.get("resolution").map(|n| n.usize()).unwrap_or(Ok(DEFAULT_RESOLUTION))?;
            if resolution < 5 {
                return g.req("resolution")?.err("resolution must be at least 5");
            }
            let patches = match g.get("patches") {
                Some(p) => Some(p.items()?.iter().map(parse_patch).collect::<Result<Vec<_>>>()?),
                None => None,
            };
            (resolution, patches)
        }
        None => (DEFAULT_RESOLUTION, None),
    };
    let mut solver = SolverSettings::default();
    if let Some(s) = root.get("solver") {
        solver.rel_tol = s.f64_or("rel_tol", solver.rel_tol)?;
        solver.abs_tol = s.f64_or("abs_tol", solver.abs_tol)?;
        solver.pole_clearance = s.f64_or("pole_clearance", solver.pole_clearance)?;
        if let Some(n) = s.get("max_steps") {
            solver.max_steps = n.usize()?;
        }
        if !(solver.rel_tol > 0.0 && solver.abs_tol > 0.0 && solver.pole_clearance > 0.0) {
            return s.err("solver tolerances and clearance must be positive");
        }
    }
    let transforms = match root.get("transforms") {
        Some(t) => t.items()?.iter().map(parse_transform).collect::<Result<Vec<_>>>()?,
        None => vec![],
    };
    let mut tolerances = Tolerances::default();
    let mut suites = Vec::new();
    if let Some(ch) = root.get("checks") {
        if let Some(s) = ch.get("suites") {
            for item in s.items()? {
                let name = item.str()?;
                if !["conformality", "closing", "hopf", "all"].contains(&name) {
                    return item.err(format!("unknown check suite {name:?}"));
                }
                suites.push(name.to_string());
            }
        }
        if let Some(t) = ch.get("tolerance") {
            tolerances.conformality = t.f64_or("conformality", tolerances.conformality)?;
            tolerances.mean_curvature = t.f64_or("mean_curvature", tolerances.mean_curvature)?;
            tolerances.closing = t.f64_or("closing", tolerances.closing)?;
            tolerances.hopf = t.f64_or("hopf", tolerances.hopf)?;
        }
    }
    let (obj, csv) = match root.get("output") {
        Some(o) => (
            o.get("obj").map(|n| n.str().map(String::from)).transpose()?,
            o.get("csv").map(|n| n.str().map(String::from)).transpose()?,
        ),
        None => (None, None),
    };
    Ok(JobConfig { target, surface, evaluation, resolution, patches, solver, transforms, suites, tolerances, obj, csv })
}

fn parse_surface(s: &Node) -> Result<SurfaceConfig> {
    let kind = s.req("kind")?;
    Ok(match kind.str()? {
        "enneper" => {
            let n = s.get("n").map(|n| n.usize()).unwrap_or(Ok(0))?;
            SurfaceConfig::Enneper(EnneperSpec { r: s.f64_or("r", 1.0)?, n: n as u32 })
        }
        "catenoid" => SurfaceConfig::Catenoid(parse_catenoid(s)?),
        "revolution" => SurfaceConfig::Revolution(RevolutionSpec {
            a: s.f64_or("a", 1.0)?,
            b: s.f64_or("b", 1.0)?,
            alpha: s.req("alpha")?.f64()?,
            beta: s.req("beta")?.f64()?,
            nu: s.f64_or("nu", 0.0)?,
        }),
        "trinoid" => {
            let w = s.req("weights")?;
            let items = w.items()?;
            if items.len() != 3 {
                return w.err("expected three weights");
            }
            SurfaceConfig::Trinoid(TrinoidSpec { q: [items[0].complex()?, items[1].complex()?, items[2].complex()?] })
        }
        "dressed_catenoid" => SurfaceConfig::DressedCatenoid(DressedCatenoidSpec {
            base: parse_catenoid(s)?,
            u: s.req("u")?.f64()?,
            ell: {
                let l = s.req("ell")?;
                [l.index(0)?.f64()?, l.index(1)?.f64()?]
            },
            m: s.get("m").map(|m| m.spinor()).transpose()?,
        }),
        "custom" => {
            let domain = match s.get("domain").map(|d| d.str()).transpose()?.unwrap_or("plane") {
                "plane" => DomainKind::Plane,
                "punctured_plane" => DomainKind::PuncturedPlane,
                "punctured_sphere" => DomainKind::PuncturedSphere,
                other => return s.req("domain")?.err(format!("unknown domain {other:?}")),
            };
            let poles = match s.get("poles") {
                Some(p) => p.items()?.iter().map(|n| n.complex()).collect::<Result<Vec<_>>>()?,
                None => vec![],
            };
            let loops = match s.get("loops") {
                Some(l) => l
                    .items()?
                    .iter()
                    .map(|n| Ok((n.req("center")?.complex()?, n.req("radius")?.f64()?, n.f64_or("turns", 1.0)?)))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![],
            };
            let initial = match s.get("initial") {
                Some(m) => {
                    let c = m.matrix()?;
                    if (c.det() - 1.0).norm() > 1e-12 {
                        return m.err("initial value must have determinant one");
                    }
                    c
                }
                None => Mat2C::identity(),
            };
            SurfaceConfig::Custom(CustomSurface {
                a: s.req("a")?.formula_matrix()?,
                b: s.req("b")?.formula_matrix()?,
                poles,
                domain,
                z0: s.get("z0").map(|n| n.complex()).transpose()?.unwrap_or_default(),
                initial,
                loops,
            })
        }
        other => return kind.err(format!("unknown surface kind {other:?}")),
    })
}

fn parse_catenoid(s: &Node) -> Result<CatenoidSpec> {
    Ok(CatenoidSpec { p: s.req("p")?.f64()?, q: s.req("q")?.f64()? })
}

fn parse_patch(p: &Node) -> Result<PatchConfig> {
    let kind = p.req("kind")?;
    Ok(match kind.str()? {
        "rect" => PatchConfig::Rect {
            min: p.req("min")?.complex()?,
            max: p.req("max")?.complex()?,
            nx: p.req("nx")?.usize()?,
            ny: p.req("ny")?.usize()?,
        },
        "annulus" => {
            let periodic = p.get("periodic").map(|n| n.value.as_bool()).unwrap_or(Some(false));
            let Some(periodic) = periodic else { return p.req("periodic")?.err("expected a boolean") };
            let theta0 = p.f64_or("theta0", 0.0)?;
            PatchConfig::Annulus {
                center: p.get("center").map(|n| n.complex()).transpose()?.unwrap_or_default(),
                r0: p.req("r0")?.f64()?,
                r1: p.req("r1")?.f64()?,
                theta0,
                theta1: p.f64_or("theta1", theta0 + std::f64::consts::TAU)?,
                nr: p.req("nr")?.usize()?,
                nt: p.req("nt")?.usize()?,
                periodic,
            }
        }
        other => return kind.err(format!("unknown patch kind {other:?}")),
    })
}

fn parse_transform(t: &Node) -> Result<TransformConfig> {
    let kind = t.req("kind")?;
    Ok(match kind.str()? {
        "dual" => TransformConfig::Dual,
        "associated" => TransformConfig::Associated { t: t.req("t")?.complex()? },
        "holomorphic" => {
            let x = t.req("x")?;
            let m = x.matrix()?;
            if m.trace().norm() > 1e-12 {
                return x.err("generator must be trace-free");
            }
            TransformConfig::Holomorphic { x: m }
        }
        "simple_factor" => TransformConfig::SimpleFactor {
            alpha: t.req("alpha")?.complex()?,
            ell: t.req("ell")?.spinor()?,
            m: t.get("m").map(|m| m.spinor()).transpose()?,
        },
        other => return kind.err(format!("unknown transform kind {other:?}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_target_names_pointer() {
        match parse_job(r#"{"surface": {"kind": "enneper"}}"#) {
            Err(LwrError::Config { pointer, .. }) => assert_eq!(pointer, "/target"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_pointer() {
        let e = parse_job(r#"{"target":"E3","surface":{"kind":"trinoid","weights":[0.1,[0.1],0.1]}}"#).unwrap_err();
        match e {
            LwrError::Config { pointer, .. } => assert_eq!(pointer, "/surface/weights/1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_job() {
        let job = parse_job(
            r#"{
              "target": "H3",
              "surface": {"kind": "custom", "a": [["0","0"],["1","0"]], "b": [["0","z^2"],["0","0"]]},
              "evaluation": {"lambda0": [1, 0], "lambda1": 0},
              "grid": {"resolution": 16, "patches": [{"kind": "rect", "min": [-1,-1], "max": [1,1], "nx": 8, "ny": 8}]},
              "solver": {"rel_tol": 1e-9},
              "transforms": [{"kind": "dual"}, {"kind": "associated", "t": [0, 1]}],
              "checks": {"suites": ["conformality"]},
              "output": {"obj": "out/x.obj"}
            }"#,
        )
        .unwrap();
        assert_eq!(job.target, Target::H3);
        assert_eq!(job.resolution, 16);
        assert_eq!(job.transforms.len(), 2);
        assert_eq!(job.solver.rel_tol, 1e-9);
        assert_eq!(job.obj.as_deref(), Some("out/x.obj"));
        assert!(job.csv.is_none());
    }
}
