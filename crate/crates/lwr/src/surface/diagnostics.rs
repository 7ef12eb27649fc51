//! Finite-difference geometry on structured grids.
//!
//! Central differences at spacings `h`, `2h` and `3h` are combined by
//! Richardson extrapolation, giving sixth-order stencils. Derivatives are taken in
//! the chart coordinate `w` and converted to `z` where needed.

use num_complex::Complex64;

use crate::error::{LwrError, Result};
use crate::integrator::StructuredGrid;
use crate::liealg::{inner, re, Mat2C};

/// Node values of a matrix-valued field on a structured grid.
pub struct Stencil<'a> {
    pub grid: &'a StructuredGrid,
    pub values: &'a [Mat2C],
}

impl Stencil<'_> {
    fn at(&self, i: isize, j: isize) -> Mat2C {
        self.values[self.grid.index(i as usize, j as usize)]
    }

    /// Cancel the `h²` and `h⁴` error terms of three even expansions.
    fn richardson(d: impl Fn(isize) -> Mat2C) -> Mat2C {
        d(1).scale(re(1.5)) - d(2).scale(re(0.6)) + d(3).scale(re(0.1))
    }

    fn first(&self, i: isize, j: isize, di: isize, dj: isize, h: f64) -> Mat2C {
        let d = |k: isize| {
            (self.at(i + k * di, j + k * dj) - self.at(i - k * di, j - k * dj)).scale(re(1.0 / (2.0 * k as f64 * h)))
        };
        Self::richardson(d)
    }

    fn second(&self, i: isize, j: isize, di: isize, dj: isize, h: f64) -> Mat2C {
        let c = self.at(i, j).scale(re(2.0));
        let d = |k: isize| {
            let kh = k as f64 * h;
            (self.at(i + k * di, j + k * dj) + self.at(i - k * di, j - k * dj) - c).scale(re(1.0 / (kh * kh)))
        };
        Self::richardson(d)
    }

    fn mixed(&self, i: isize, j: isize) -> Mat2C {
        let (hx, hy) = (self.grid.hx, self.grid.hy);
        let d = |k: isize| {
            (self.at(i + k, j + k) - self.at(i + k, j - k) - self.at(i - k, j + k) + self.at(i - k, j - k))
                .scale(re(1.0 / (4.0 * k as f64 * k as f64 * hx * hy)))
        };
        Self::richardson(d)
    }

    /// `(f_w, f_ww, f_ww̄)` at node `(i, j)`.
    pub fn derivatives(&self, i: usize, j: usize) -> Result<(Mat2C, Mat2C, Mat2C)> {
        if !self.is_interior(i, j) {
            return Err(LwrError::BoundaryNode);
        }
        let (i, j) = (i as isize, j as isize);
        let (hx, hy) = (self.grid.hx, self.grid.hy);
        let fx = self.first(i, j, 1, 0, hx);
        let fy = self.first(i, j, 0, 1, hy);
        let fxx = self.second(i, j, 1, 0, hx);
        let fyy = self.second(i, j, 0, 1, hy);
        let fxy = self.mixed(i, j);
        let half = re(0.5);
        let iu = Complex64::new(0.0, 1.0);
        let fw = (fx - fy.scale(iu)).scale(half);
        let fww = (fxx - fyy - fxy.scale(iu * 2.0)).scale(re(0.25));
        let fwwbar = (fxx + fyy).scale(re(0.25));
        Ok((fw, fww, fwwbar))
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i >= 3 && j >= 3 && i + 3 < self.grid.nx && j + 3 < self.grid.ny
    }
}

/// Finite-difference geometry at one node, in the `z` coordinate.
#[derive(Clone, Copy, Debug)]
pub struct NodeDiagnostics {
    /// `|⟨f_z, f_z⟩| / ⟨f_z, f_z̄⟩`.
    pub conformality: f64,
    /// `⟨f_zz̄, N⟩ / ⟨f_z, f_z̄⟩`.
    pub h_est: f64,
    /// `2⟨f_z, f_z̄⟩`.
    pub metric: f64,
    /// `⟨f_zz, N⟩`.
    pub hopf: Complex64,
}

/// Diagnostics at node `(i, j)` from immersed positions and unit normals.
pub fn node_diagnostics(
    grid: &StructuredGrid,
    positions: &[Mat2C],
    normals: &[Mat2C],
    i: usize,
    j: usize,
) -> Result<NodeDiagnostics> {
    let st = Stencil { grid, values: positions };
    let (fw, fww, fwwbar) = st.derivatives(i, j)?;
    let n = normals[grid.index(i, j)];
    let g = inner(&fw, &fw.adjoint()).re;
    let jac = grid.chart.dz_dw(grid.w(i, j));
    Ok(NodeDiagnostics {
        conformality: inner(&fw, &fw).norm() / g,
        h_est: inner(&fwwbar, &n).re / g,
        metric: 2.0 * g / jac.norm_sqr(),
        hopf: inner(&fww, &n) / (jac * jac),
    })
}
