//! Chart regions: rectangles and disks bounded by piecewise smooth curves.

use crate::ambient::Rect;
use crate::curve::ChartCurve;
use crate::error::{Error, Result};

/// Samples per boundary curve in the membership polygon.
const BOUNDARY_SAMPLES: usize = 512;
pub const CLOSURE_TOL: f64 = 1e-10;

/// A disk bounded by curves traversed with the region on their left.
/// Junction `i` joins the end of curve `i` to the start of curve `i + 1`
/// (cyclically); the junctions listed in `vertices` are corners.
#[derive(Debug, Clone)]
pub struct DiskRegion {
    pub curves: Vec<ChartCurve>,
    pub vertices: Vec<usize>,
    polygon: Vec<[f64; 2]>,
    bbox: Rect,
}

impl DiskRegion {
    /// Every junction is treated as a vertex.
    pub fn new(curves: Vec<ChartCurve>) -> Result<Self> {
        let n = curves.len();
        Self::with_vertices(curves, (0..n).collect())
    }

    pub fn with_vertices(curves: Vec<ChartCurve>, vertices: Vec<usize>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::InvalidParameter("disk needs at least one boundary curve".into()));
        }
        let n = curves.len();
        if let Some(&bad) = vertices.iter().find(|&&j| j >= n) {
            return Err(Error::InvalidParameter(format!("vertex {bad} out of range for {n} boundary curves")));
        }
        for i in 0..n {
            let a = curves[i].end()?;
            let b = curves[(i + 1) % n].start()?;
            let gap = (a[0] - b[0]).hypot(a[1] - b[1]);
            if gap > CLOSURE_TOL {
                return Err(Error::Validation(format!("boundary does not close at junction {i}: gap {gap:e}")));
            }
        }
        let mut polygon = Vec::with_capacity(n * BOUNDARY_SAMPLES);
        for c in &curves {
            for k in 0..BOUNDARY_SAMPLES {
                polygon.push(c.point(k as f64 / BOUNDARY_SAMPLES as f64)?);
            }
        }
        let (mut u0, mut u1, mut v0, mut v1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &polygon {
            u0 = u0.min(p[0]);
            u1 = u1.max(p[0]);
            v0 = v0.min(p[1]);
            v1 = v1.max(p[1]);
        }
        let bbox = Rect::new(u0, u1, v0, v1)?;
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        let disk = DiskRegion { curves, vertices, polygon, bbox };
        if disk.signed_area() <= 0.0 {
            return Err(Error::Validation("boundary must be positively oriented (region on the left)".into()));
        }
        Ok(disk)
    }

    /// Axis-aligned rectangle as a four-vertex disk.
    pub fn rectangle(r: Rect) -> Result<Self> {
        let c = [[r.u0, r.v0], [r.u1, r.v0], [r.u1, r.v1], [r.u0, r.v1]];
        Self::new((0..4).map(|i| ChartCurve::segment(c[i], c[(i + 1) % 4])).collect())
    }

    pub fn bbox(&self) -> Rect {
        self.bbox
    }

    pub fn polygon(&self) -> &[[f64; 2]] {
        &self.polygon
    }

    fn signed_area(&self) -> f64 {
        let n = self.polygon.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.polygon[i], self.polygon[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            / 2.0
    }

    /// Winding-number membership against the sampled boundary.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        if !self.bbox.contains(u, v) {
            return false;
        }
        let mut wn = 0i32;
        let n = self.polygon.len();
        for i in 0..n {
            let (a, b) = (self.polygon[i], self.polygon[(i + 1) % n]);
            let cross = (b[0] - a[0]) * (v - a[1]) - (u - a[0]) * (b[1] - a[1]);
            if a[1] <= v {
                if b[1] > v && cross > 0.0 {
                    wn += 1;
                }
            } else if b[1] <= v && cross < 0.0 {
                wn -= 1;
            }
        }
        wn != 0
    }

    /// Chart distance from `(u, v)` to the sampled boundary.
    pub fn boundary_distance(&self, u: f64, v: f64) -> f64 {
        let n = self.polygon.len();
        (0..n)
            .map(|i| segment_distance([u, v], self.polygon[i], self.polygon[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Vertex location of junction `j`.
    pub fn junction_point(&self, j: usize) -> Result<[f64; 2]> {
        self.curves[j].end()
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Where a scan or audit runs.
#[derive(Debug, Clone)]
pub enum Region {
    Rect(Rect),
    Disk(DiskRegion),
}

impl Region {
    pub fn bbox(&self) -> Rect {
        match self {
            Region::Rect(r) => *r,
            Region::Disk(d) => d.bbox(),
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        match self {
            Region::Rect(r) => r.contains(u, v),
            Region::Disk(d) => d.contains(u, v),
        }
    }

    pub fn boundary_distance(&self, u: f64, v: f64) -> f64 {
        match self {
            Region::Rect(r) => (u - r.u0).min(r.u1 - u).min(v - r.v0).min(r.v1 - v),
            Region::Disk(d) => d.boundary_distance(u, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_membership_and_orientation() {
        let d = DiskRegion::rectangle(Rect::new(0.0, 2.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(d.contains(1.0, 0.5));
        assert!(!d.contains(2.5, 0.5));
        assert!(!d.contains(1.0, -0.1));
        assert!((d.boundary_distance(1.0, 0.5) - 0.5).abs() < 1e-12);
        assert_eq!(d.vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn clockwise_boundary_rejected() {
        let c = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let curves = (0..4).map(|i| ChartCurve::segment(c[i], c[(i + 1) % 4])).collect();
        assert!(matches!(DiskRegion::new(curves), Err(Error::Validation(_))));
    }

    #[test]
    fn open_boundary_rejected() {
        let curves = vec![ChartCurve::segment([0.0, 0.0], [1.0, 0.0]), ChartCurve::segment([1.0, 0.0], [0.0, 1.0])];
        assert!(DiskRegion::new(curves).is_err());
    }
}
