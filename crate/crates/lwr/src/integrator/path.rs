use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{LwrError, Result};

/// Endpoint mismatch tolerated between consecutive segments.
const JOIN_TOL: f64 = 1e-12;

/// A line segment or a circular arc, parametrized over `t ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    Arc { center: Complex64, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc { center, radius, theta0, theta1 } => {
                center + Complex64::from_polar(radius, theta0 + (theta1 - theta0) * t)
            }
        }
    }

    /// `dz/dt`.
    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { center, theta0, theta1, .. } => {
                (self.point(t) - center) * Complex64::new(0.0, theta1 - theta0)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { to, .. } => to,
            _ => self.point(1.0),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, theta0, theta1 } => {
                Segment::Arc { center, radius, theta0: theta1, theta1: theta0 }
            }
        }
    }

    /// Smallest distance from the segment to `p`.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let t = if len2 == 0.0 { 0.0 } else { ((p - from) * d.conj()).re / len2 };
                (self.point(t.clamp(0.0, 1.0)) - p).norm()
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                let rel = p - center;
                let ends = (self.start() - p).norm().min((self.end() - p).norm());
                if rel.norm() == 0.0 {
                    return radius;
                }
                // is the direction of p inside the swept angle?
                let (lo, hi) = if theta0 <= theta1 { (theta0, theta1) } else { (theta1, theta0) };
                let phi = rel.arg();
                let k = ((lo - phi) / TAU).ceil();
                let inside = phi + k * TAU <= hi;
                if inside {
                    (rel.norm() - radius).abs()
                } else {
                    ends
                }
            }
        }
    }
}

/// Ordered chain of segments with shared endpoints.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathSpec {
    pub segments: Vec<Segment>,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for w in segments.windows(2) {
            let gap = (w[0].end() - w[1].start()).norm();
            if gap > JOIN_TOL {
                return Err(LwrError::DisconnectedPath { gap });
            }
        }
        Ok(PathSpec { segments })
    }

    pub fn empty() -> Self {
        PathSpec { segments: Vec::new() }
    }

    pub fn line(from: Complex64, to: Complex64) -> Self {
        PathSpec { segments: vec![Segment::Line { from, to }] }
    }

    /// Straight segments through the listed points.
    pub fn polyline(points: &[Complex64]) -> Self {
        let segments = points.windows(2).map(|w| Segment::Line { from: w[0], to: w[1] }).collect();
        PathSpec { segments }
    }

    /// Loop based at `z0` going once around `center` on a circle of the
    /// given radius: out along the ray, around, and back. `turns` may be
    /// negative for clockwise loops.
    pub fn loop_around(z0: Complex64, center: Complex64, radius: f64, turns: f64) -> Self {
        let dir = z0 - center;
        let theta = dir.arg();
        let foot = center + Complex64::from_polar(radius, theta);
        let mut segments = Vec::new();
        if (foot - z0).norm() > 0.0 {
            segments.push(Segment::Line { from: z0, to: foot });
        }
        segments.push(Segment::Arc { center, radius, theta0: theta, theta1: theta + TAU * turns });
        if (foot - z0).norm() > 0.0 {
            segments.push(Segment::Line { from: foot, to: z0 });
        }
        PathSpec { segments }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start(&self) -> Option<Complex64> {
        self.segments.first().map(Segment::start)
    }

    pub fn end(&self) -> Option<Complex64> {
        self.segments.last().map(Segment::end)
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn then(&self, other: &PathSpec) -> Result<PathSpec> {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().copied());
        PathSpec::new(segments)
    }

    pub fn reversed(&self) -> PathSpec {
        PathSpec { segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    /// Check contiguity and the clearance to every pole.
    pub fn validate(&self, poles: &[Complex64], clearance: f64) -> Result<()> {
        PathSpec::new(self.segments.clone())?;
        for seg in &self.segments {
            for &pole in poles {
                let distance = seg.distance_to(pole);
                if distance < clearance * (1.0 - 1e-9) {
                    return Err(LwrError::ClearanceViolation { pole, distance });
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> Result<()> {
        match (self.start(), self.end()) {
            (Some(a), Some(b)) if (a - b).norm() > JOIN_TOL => Err(LwrError::NotClosed { gap: (a - b).norm() }),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arc_geometry() {
        let a = Segment::Arc { center: cx(1.0, 0.0), radius: 0.5, theta0: 0.0, theta1: TAU };
        assert!((a.start() - a.end()).norm() < 1e-15);
        assert!((a.length() - 0.5 * TAU).abs() < 1e-15);
        assert!((a.distance_to(cx(1.0, 0.0)) - 0.5).abs() < 1e-15);
        let half = Segment::Arc { center: cx(0.0, 0.0), radius: 1.0, theta0: 0.0, theta1: 3.0 };
        // p = -i lies outside the swept angle, nearest point is an endpoint
        let d = half.distance_to(cx(0.0, -1.0));
        assert!((d - (cx(1.0, 0.0) - cx(0.0, -1.0)).norm()).abs() < 1e-15);
    }

    #[test]
    fn loops_are_closed_and_checked() {
        let l = PathSpec::loop_around(cx(0.5, -0.3), cx(0.0, 0.0), 0.2, 1.0);
        assert!(l.is_closed().is_ok());
        assert!(l.validate(&[cx(0.0, 0.0)], 0.05).is_ok());
        assert!(matches!(l.validate(&[cx(0.0, 0.0)], 0.3), Err(LwrError::ClearanceViolation { .. })));
        let gap = PathSpec::new(vec![
            Segment::Line { from: cx(0.0, 0.0), to: cx(1.0, 0.0) },
            Segment::Line { from: cx(1.0, 0.1), to: cx(2.0, 0.0) },
        ]);
        assert!(matches!(gap, Err(LwrError::DisconnectedPath { .. })));
    }
}
