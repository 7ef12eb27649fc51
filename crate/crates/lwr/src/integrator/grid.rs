//! Domain grids with a spanning tree, and frame propagation along it.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{integrate_frame, FrameBundle, InitialData, PathSpec, Segment, SolverSettings};
use crate::error::Result;
use crate::potential::Potential;

/// Nodes joined by tree edges; node `k` is reached from `parent[k]` along
/// the stored segment. The root is reached from the initial point along
/// `connection`.
#[derive(Clone, Debug)]
pub struct Grid {
    pub nodes: Vec<Complex64>,
    pub root: usize,
    pub parent: Vec<Option<(usize, Segment)>>,
    pub connection: PathSpec,
}

impl Grid {
    pub fn single(z: Complex64) -> Self {
        Grid { nodes: vec![z], root: 0, parent: vec![None], connection: PathSpec::empty() }
    }

    /// Tree depth of every node; the root has depth 0.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut depth = vec![usize::MAX; n];
        depth[self.root] = 0;
        let mut children = vec![Vec::new(); n];
        for (k, p) in self.parent.iter().enumerate() {
            if let Some((q, _)) = p {
                children[*q].push(k);
            }
        }
        let mut out = vec![vec![self.root]];
        let mut queue = VecDeque::from([self.root]);
        while let Some(k) = queue.pop_front() {
            for &c in &children[k] {
                depth[c] = depth[k] + 1;
                if out.len() <= depth[c] {
                    out.push(Vec::new());
                }
                out[depth[c]].push(c);
                queue.push_back(c);
            }
        }
        for level in &mut out {
            level.sort_unstable();
        }
        out
    }
}

/// Coordinate chart of a structured grid: `z = w` or `z = center + e^w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    Rect,
    LogPolar { center: Complex64 },
}

impl Chart {
    pub fn z(&self, w: Complex64) -> Complex64 {
        match *self {
            Chart::Rect => w,
            Chart::LogPolar { center } => center + w.exp(),
        }
    }

    /// `dz/dw`.
    pub fn dz_dw(&self, w: Complex64) -> Complex64 {
        match *self {
            Chart::Rect => Complex64::new(1.0, 0.0),
            Chart::LogPolar { .. } => w.exp(),
        }
    }
}

/// Uniform `nx × ny` lattice `w = w0 + h(i + j·i)` mapped through a chart.
/// In the log-polar chart `i` runs radially and `j` angularly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructuredGrid {
    pub chart: Chart,
    pub w0: Complex64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl StructuredGrid {
    pub fn rect(z_min: Complex64, z_max: Complex64, nx: usize, ny: usize) -> Self {
        let hx = (z_max.re - z_min.re) / (nx.max(2) - 1) as f64;
        let hy = (z_max.im - z_min.im) / (ny.max(2) - 1) as f64;
        StructuredGrid { chart: Chart::Rect, w0: z_min, hx, hy, nx, ny }
    }

    /// Annular sector `r0 ≤ |z − c| ≤ r1`, `θ0 ≤ arg ≤ θ1`, both ends included.
    pub fn annulus(center: Complex64, r0: f64, r1: f64, theta0: f64, theta1: f64, nr: usize, nt: usize) -> Self {
        let hx = (r1.ln() - r0.ln()) / (nr.max(2) - 1) as f64;
        let hy = (theta1 - theta0) / (nt.max(2) - 1) as f64;
        StructuredGrid {
            chart: Chart::LogPolar { center },
            w0: Complex64::new(r0.ln(), theta0),
            hx,
            hy,
            nx: nr,
            ny: nt,
        }
    }

    /// Full turn `θ0 ≤ arg < θ0 + 2π` with `nt` angular samples (no seam
    /// duplicate).
    pub fn periodic_annulus(center: Complex64, r0: f64, r1: f64, theta0: f64, nr: usize, nt: usize) -> Self {
        let mut g = Self::annulus(center, r0, r1, theta0, theta0 + std::f64::consts::TAU, nr, nt + 1);
        g.ny = nt;
        g
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn w(&self, i: usize, j: usize) -> Complex64 {
        self.w0 + Complex64::new(self.hx * i as f64, self.hy * j as f64)
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        self.chart.z(self.w(i, j))
    }

    /// Segment from node `(i, j)` to an adjacent node.
    fn edge(&self, from: (usize, usize), to: (usize, usize)) -> Segment {
        let (a, b) = (self.z(from.0, from.1), self.z(to.0, to.1));
        match self.chart {
            Chart::LogPolar { center } if from.0 == to.0 => {
                let (wa, wb) = (self.w(from.0, from.1), self.w(to.0, to.1));
                Segment::Arc { center, radius: wa.re.exp(), theta0: wa.im, theta1: wb.im }
            }
            _ => Segment::Line { from: a, to: b },
        }
    }

    /// Breadth-first spanning tree rooted at the node nearest to `start`,
    /// reached from `start` along `connection` (a straight line if `None`).
    pub fn to_grid(&self, start: Complex64, connection: Option<PathSpec>) -> Grid {
        let nodes: Vec<Complex64> =
            (0..self.ny).flat_map(|j| (0..self.nx).map(move |i| (i, j))).map(|(i, j)| self.z(i, j)).collect();
        let root = nodes
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - start).norm().total_cmp(&(b.1 - start).norm()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut parent = vec![None; nodes.len()];
        let mut seen = vec![false; nodes.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([(root % self.nx, root / self.nx)]);
        while let Some((i, j)) = queue.pop_front() {
            let mut nb = Vec::with_capacity(4);
            if i + 1 < self.nx {
                nb.push((i + 1, j));
            }
            if i > 0 {
                nb.push((i - 1, j));
            }
            if j + 1 < self.ny {
                nb.push((i, j + 1));
            }
            if j > 0 {
                nb.push((i, j - 1));
            }
            for n in nb {
                let k = self.index(n.0, n.1);
                if !seen[k] {
                    seen[k] = true;
                    parent[k] = Some((self.index(i, j), self.edge((i, j), n)));
                    queue.push_back(n);
                }
            }
        }
        let connection = connection.unwrap_or_else(|| {
            if (nodes[root] - start).norm() == 0.0 {
                PathSpec::empty()
            } else {
                PathSpec::line(start, nodes[root])
            }
        });
        Grid { nodes, root, parent, connection }
    }
}

/// Propagate frames from the initial data to every node, level by level.
/// Each edge integration is independent, so results do not depend on the
/// thread schedule.
pub fn propagate_grid(
    xi: &Potential,
    grid: &Grid,
    init: &InitialData,
    settings: &SolverSettings,
) -> Result<Vec<FrameBundle>> {
    let root = if grid.connection.is_empty() {
        FrameBundle::from_initial(init)
    } else {
        integrate_frame(xi, &grid.connection, init, settings)?
    };
    let mut out: Vec<Option<FrameBundle>> = vec![None; grid.nodes.len()];
    out[grid.root] = Some(root);
    for level in grid.levels().into_iter().skip(1) {
        let computed: Vec<(usize, Result<FrameBundle>)> = level
            .par_iter()
            .map(|&k| {
                let (p, seg) = grid.parent[k].expect("non-root node has a parent");
                let from = out[p].as_ref().expect("parent level computed first");
                let path = PathSpec { segments: vec![seg] };
                (k, integrate_frame(xi, &path, &from.as_initial(), settings))
            })
            .collect();
        for (k, r) in computed {
            out[k] = Some(r?);
        }
    }
    Ok(out.into_iter().map(|b| b.expect("grid is connected")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{Mat2C, I};
    use crate::potential::{DomainKind, Lifted, MatFn, ScalarFn};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn enneper1() -> Potential {
        let z0 = ScalarFn::zero;
        Potential::new(
            MatFn::new(z0(), z0(), ScalarFn::constant(cx(1.0, 0.0)), z0()),
            MatFn::new(z0(), ScalarFn::monomial(cx(1.0, 0.0), 1.0), z0(), z0()),
            vec![],
            DomainKind::Plane,
        )
    }

    #[test]
    fn single_node_is_initial_bundle() {
        let init = InitialData::constant(Lifted::principal(cx(0.0, 0.0)), &[cx(0.0, 0.0)], Mat2C::identity(), &[0]);
        let out = propagate_grid(&enneper1(), &Grid::single(cx(0.0, 0.0)), &init, &SolverSettings::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].phi[0], Mat2C::identity());
    }

    #[test]
    fn rect_grid_tree_matches_direct_paths() {
        let g = StructuredGrid::rect(cx(-0.5, -0.5), cx(0.5, 0.5), 5, 4);
        let grid = g.to_grid(cx(0.0, 0.0), None);
        assert_eq!(grid.levels().iter().map(Vec::len).sum::<usize>(), 20);
        let lambdas = [cx(0.0, 0.0), cx(0.5, 0.5)];
        let init = InitialData::constant(Lifted::principal(cx(0.0, 0.0)), &lambdas, Mat2C::identity(), &[0]);
        let s = SolverSettings::default();
        let out = propagate_grid(&enneper1(), &grid, &init, &s).unwrap();
        for (k, fb) in out.iter().enumerate() {
            let direct = integrate_frame(&enneper1(), &PathSpec::line(cx(0.0, 0.0), grid.nodes[k]), &init, &s).unwrap();
            for (a, b) in fb.phi.iter().zip(&direct.phi) {
                assert!(a.dist(b) < 1e-8);
            }
        }
    }

    #[test]
    fn annulus_edges_are_arcs() {
        let g = StructuredGrid::periodic_annulus(cx(0.0, 0.0), 0.5, 2.0, 0.0, 4, 8);
        assert_eq!(g.len(), 32);
        assert!((g.z(0, 2) - 0.5 * I).norm() < 1e-15);
        assert!((g.z(3, 0) - cx(2.0, 0.0)).norm() < 1e-14);
        let grid = g.to_grid(cx(1.0, 0.0), None);
        for (k, p) in grid.parent.iter().enumerate() {
            if let Some((q, seg)) = p {
                assert!((seg.start() - grid.nodes[*q]).norm() < 1e-14);
                assert!((seg.end() - grid.nodes[k]).norm() < 1e-14);
            }
        }
    }
}
