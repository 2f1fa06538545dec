//! Points, fibers and the collections built from them.

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Point2 = nalgebra::Point2<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type UnitVec3 = nalgebra::Unit<Vec3>;

/// One eyebrow hair: an ordered polyline grown from its root (index 0) to its tip.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    points: Vec<Point3>,
}

impl Fiber {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGeometry("fiber needs at least one point".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidGeometry(format!("fiber point {i} is not finite")));
        }
        Ok(Self { points })
    }

    pub fn from_root(root: Point3) -> Self {
        Self { points: vec![root] }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn root(&self) -> Point3 {
        self.points[0]
    }

    pub fn tip(&self) -> Point3 {
        self.points[self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a fiber holds at least its root.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arc_length(&self) -> f64 {
        arc_length(&self.points)
    }

    pub fn resample(&self, n: usize) -> Result<Fiber> {
        resample_fiber(self, n)
    }
}

/// Sum of consecutive segment lengths; zero for a single point.
pub fn arc_length(points: &[Point3]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Resamples `fiber` to `n` points evenly spaced in arc length.
///
/// The first and last points are copied exactly.
pub fn resample_fiber(fiber: &Fiber, n: usize) -> Result<Fiber> {
    let pts = fiber.points();
    if pts.len() < 2 {
        return Err(Error::TooShort { points: pts.len() });
    }
    if n < 2 {
        return Err(Error::ConfigInvalid(format!("resample count must be >= 2, got {n}")));
    }
    let mut cumulative = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in pts.windows(2) {
        acc += (w[1] - w[0]).norm();
        cumulative.push(acc);
    }
    let total = acc;
    let last = pts.len() - 1;

    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0usize;
    for k in 1..n - 1 {
        let target = total * k as f64 / (n - 1) as f64;
        while seg + 1 < last && cumulative[seg + 1] < target {
            seg += 1;
        }
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let t = if seg_len > 0.0 { ((target - cumulative[seg]) / seg_len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(pts[seg] + (pts[seg + 1] - pts[seg]) * t);
    }
    out.push(pts[last]);
    Ok(Fiber { points: out })
}

/// A reconstructed (or ground-truth) eyebrow.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSet {
    pub fibers: Vec<Fiber>,
    /// Growth step the fibers were synthesized with.
    pub step: f64,
}

impl FiberSet {
    pub fn new(fibers: Vec<Fiber>, step: f64) -> Self {
        Self { fibers, step }
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn roots(&self) -> RootSet {
        RootSet::new(self.fibers.iter().map(Fiber::root).collect())
    }
}

/// Fiber roots attached to the brow-bone surface.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Point3>,
}

impl RootSet {
    pub fn new(roots: Vec<Point3>) -> Self {
        Self { roots }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.roots.iter()
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut b = Aabb { min: first, max: first };
        for p in it {
            b.min = b.min.inf(p);
            b.max = b.max.sup(p);
        }
        Some(b)
    }

    pub fn expanded(&self, by: f64) -> Self {
        let d = Vec3::repeat(by);
        Aabb { min: self.min - d, max: self.max + d }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn center(&self) -> Point3 {
        nalgebra::center(&self.min, &self.max)
    }
}

/// Angle between two unit vectors in radians, stable near 0 and π.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &Point3, a: &Point3, b: &Point3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}

/// Minimum distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_segment_distance(p0: &Point3, p1: &Point3, q0: &Point3, q1: &Point3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}
