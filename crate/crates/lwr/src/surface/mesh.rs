//! Triangle meshes with per-vertex diagnostics, OBJ and CSV writers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::Result;
use crate::integrator::StructuredGrid;
use crate::liealg::Projective;

/// Diagnostics carried by each vertex.
#[derive(Clone, Copy, Debug)]
pub struct VertexInfo {
    pub z: Complex64,
    pub metric_density: f64,
    pub hopf: Complex64,
    pub gauss: Projective,
    /// `None` where no interior stencil exists.
    pub h_est: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based triangle indices.
    pub triangles: Vec<[usize; 3]>,
    pub info: Vec<VertexInfo>,
}

impl Mesh {
    /// Append another mesh, shifting its indices.
    pub fn append(&mut self, other: &Mesh) {
        let off = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.info.extend_from_slice(&other.info);
        self.triangles.extend(other.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::with_capacity(48 * self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.9} {:.9} {:.9}", v[0], v[1], v[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("z_re,z_im,ds2,Q_re,Q_im,G_re,G_im,H_est\n");
        for info in &self.info {
            let (g_re, g_im) = match info.gauss.value() {
                Some(g) => (format_sci(g.re), format_sci(g.im)),
                None => ("inf".to_string(), "inf".to_string()),
            };
            let h = info.h_est.map(format_sci).unwrap_or_else(|| "nan".to_string());
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                format_sci(info.z.re),
                format_sci(info.z.im),
                format_sci(info.metric_density),
                format_sci(info.hopf.re),
                format_sci(info.hopf.im),
                g_re,
                g_im,
                h
            );
        }
        s
    }

    pub fn write_obj(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_obj())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_csv())
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}

/// C-style `%.12e`: at least two exponent digits and an explicit sign.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mant}e{sign}{digits:0>2}")
}

/// Mesh a structured grid. Quads are split along the shorter diagonal;
/// `wrap` joins the last angular row to the first; quads touching a
/// `skip` vertex are dropped.
pub fn build_mesh(
    grid: &StructuredGrid,
    vertices: Vec<[f64; 3]>,
    info: Vec<VertexInfo>,
    wrap: bool,
    skip: &[bool],
) -> Mesh {
    let mut triangles = Vec::new();
    let rows = if wrap { grid.ny } else { grid.ny.saturating_sub(1) };
    let dist2 = |a: usize, b: usize| {
        let (p, q) = (vertices[a], vertices[b]);
        (0..3).map(|k| (p[k] - q[k]).powi(2)).sum::<f64>()
    };
    for j in 0..rows {
        let jn = (j + 1) % grid.ny;
        for i in 0..grid.nx.saturating_sub(1) {
            let a = grid.index(i, j);
            let b = grid.index(i + 1, j);
            let c = grid.index(i + 1, jn);
            let d = grid.index(i, jn);
            if [a, b, c, d].iter().any(|&k| skip.get(k).copied().unwrap_or(false)) {
                continue;
            }
            if dist2(a, c) <= dist2(b, d) {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    Mesh { vertices, triangles, info }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::Spinor2;

    fn info(z: Complex64) -> VertexInfo {
        VertexInfo {
            z,
            metric_density: 1.0,
            hopf: Complex64::new(0.0, 0.0),
            gauss: Projective(Spinor2::new(z, Complex64::new(1.0, 0.0))),
            h_est: None,
        }
    }

    #[test]
    fn sci_format_matches_c() {
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(-1234.5), "-1.234500000000e+03");
        assert_eq!(format_sci(6.25e-123), "6.250000000000e-123");
        assert_eq!(format_sci(1e-5), "1.000000000000e-05");
    }

    #[test]
    fn one_quad() {
        let g = StructuredGrid::rect(Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), 2, 2);
        let verts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.5]];
        let infos = (0..4).map(|k| info(g.z(k % 2, k / 2))).collect();
        let m = build_mesh(&g, verts, infos, false, &[]);
        assert_eq!(m.triangles.len(), 2);
        let obj = m.to_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2);
        assert!(obj.starts_with("v 0.000000000 0.000000000 0.000000000\n"));
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(1).unwrap().ends_with(",nan"));
    }

    #[test]
    fn infinite_gauss_value_is_written_as_inf() {
        let mut i = info(Complex64::new(0.0, 0.0));
        i.gauss = Projective(Spinor2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        let m = Mesh { vertices: vec![[0.0; 3]], triangles: vec![], info: vec![i] };
        assert!(m.to_csv().contains(",inf,inf,"));
    }
}
