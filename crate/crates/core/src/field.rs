//! Orientation fields: functions mapping a 3D point to a unit growing direction.

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3, UnitVec3, Vec3};

/// Norm below which an interpolated direction is treated as cancelled out.
const VANISHING_NORM: f64 = 1e-12;

pub trait OrientationField: Send + Sync {
    /// Whether `p` lies inside the domain where [`OrientationField::query`] succeeds.
    fn contains(&self, p: &Point3) -> bool;

    fn query(&self, p: &Point3) -> Result<UnitVec3>;
}

fn out_of_domain(p: &Point3) -> Error {
    Error::OutOfDomain { x: p.x, y: p.y, z: p.z }
}

fn unit(v: Vec3) -> Result<UnitVec3> {
    if v.norm() > VANISHING_NORM && v.iter().all(|c| c.is_finite()) {
        Ok(UnitVec3::new_normalize(v))
    } else {
        Err(Error::DegenerateField)
    }
}

/// Same direction everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField {
    pub direction: UnitVec3,
}

impl ConstantField {
    pub fn new(direction: Vec3) -> Result<Self> {
        Ok(Self { direction: unit(direction)? })
    }
}

impl OrientationField for ConstantField {
    fn contains(&self, _p: &Point3) -> bool {
        true
    }

    fn query(&self, _p: &Point3) -> Result<UnitVec3> {
        Ok(self.direction)
    }
}

/// Circles around an axis, optionally lifted along the axis (a helix when `lift != 0`).
///
/// `d = normalize(axis × r̂ + lift · axis)` with `r̂` the unit radial offset from the axis.
/// Points on the axis are outside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcField {
    pub center: Point3,
    pub axis: UnitVec3,
    pub lift: f64,
}

impl ArcField {
    pub fn new(center: Point3, axis: Vec3, lift: f64) -> Result<Self> {
        Ok(Self { center, axis: unit(axis)?, lift })
    }

    fn radial(&self, p: &Point3) -> Vec3 {
        let r = p - self.center;
        r - self.axis.into_inner() * r.dot(&self.axis)
    }
}

impl OrientationField for ArcField {
    fn contains(&self, p: &Point3) -> bool {
        self.radial(p).norm() > 1e-9
    }

    fn query(&self, p: &Point3) -> Result<UnitVec3> {
        let radial = self.radial(p);
        let len = radial.norm();
        if len <= 1e-9 {
            return Err(out_of_domain(p));
        }
        let tangent = self.axis.cross(&(radial / len));
        unit(tangent + self.axis.into_inner() * self.lift)
    }
}

/// A uniform drift with a superimposed rotation about `axis` through `center`:
/// `d = normalize(base + twist · axis × (p − center))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwirlField {
    pub center: Point3,
    pub axis: UnitVec3,
    pub base: Vec3,
    pub twist: f64,
}

impl SwirlField {
    pub fn new(center: Point3, axis: Vec3, base: Vec3, twist: f64) -> Result<Self> {
        Ok(Self { center, axis: unit(axis)?, base, twist })
    }
}

impl OrientationField for SwirlField {
    fn contains(&self, _p: &Point3) -> bool {
        true
    }

    fn query(&self, p: &Point3) -> Result<UnitVec3> {
        unit(self.base + self.axis.cross(&(p - self.center)) * self.twist)
    }
}

/// Direction vectors sampled at the nodes of a regular lattice spanning an
/// axis-aligned box.
///
/// Node `(i, j, k)` sits at `min + (i, j, k) ⊙ (max − min) / (dims − 1)`; storage
/// is x-fastest. Queries interpolate trilinearly and renormalize; if the
/// interpolated vector cancels out, the nearest node's vector is used.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGridField {
    dims: [usize; 3],
    min: [f32; 3],
    max: [f32; 3],
    vectors: Vec<[f32; 3]>,
}

impl VoxelGridField {
    pub fn new(dims: [usize; 3], min: [f32; 3], max: [f32; 3], vectors: Vec<[f32; 3]>) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::ConfigInvalid(format!("voxel grid needs >= 2 nodes per axis, got {dims:?}")));
        }
        let count = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if count != Some(vectors.len()) {
            return Err(Error::ConfigInvalid(format!(
                "voxel grid {dims:?} needs {} vectors, got {}",
                count.map_or_else(|| "overflowing".to_string(), |c| c.to_string()),
                vectors.len()
            )));
        }
        for a in 0..3 {
            if !(min[a].is_finite() && max[a].is_finite() && min[a] < max[a]) {
                return Err(Error::ConfigInvalid(format!("bad bounding box on axis {a}: [{}, {}]", min[a], max[a])));
            }
        }
        if vectors.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::ConfigInvalid("voxel grid holds non-finite vectors".into()));
        }
        Ok(Self { dims, min, max, vectors })
    }

    /// Samples `field` at every node of the lattice, storing `f32` directions.
    /// Nodes where `field` fails store the zero vector.
    pub fn sample(field: &dyn OrientationField, dims: [usize; 3], min: [f32; 3], max: [f32; 3]) -> Result<Self> {
        let mut vectors = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let p = node_position(dims, min, max, [i, j, k]);
                    let v = field.query(&p).map(|d| d.into_inner()).unwrap_or_else(|_| Vec3::zeros());
                    vectors.push([v.x as f32, v.y as f32, v.z as f32]);
                }
            }
        }
        Self::new(dims, min, max, vectors)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn min(&self) -> [f32; 3] {
        self.min
    }

    pub fn max(&self) -> [f32; 3] {
        self.max
    }

    pub fn vectors(&self) -> &[[f32; 3]] {
        &self.vectors
    }

    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: Point3::new(self.min[0] as f64, self.min[1] as f64, self.min[2] as f64),
            max: Point3::new(self.max[0] as f64, self.max[1] as f64, self.max[2] as f64),
        }
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let v = self.vectors[i + self.dims[0] * (j + self.dims[1] * k)];
        Vec3::new(v[0] as f64, v[1] as f64, v[2] as f64)
    }

    pub fn node_position(&self, i: usize, j: usize, k: usize) -> Point3 {
        node_position(self.dims, self.min, self.max, [i, j, k])
    }

    /// Continuous lattice coordinates of `p`.
    fn lattice(&self, p: &Point3) -> [f64; 3] {
        let mut out = [0.0; 3];
        for a in 0..3 {
            let lo = self.min[a] as f64;
            let hi = self.max[a] as f64;
            out[a] = (p[a] - lo) / (hi - lo) * (self.dims[a] - 1) as f64;
        }
        out
    }
}

fn node_position(dims: [usize; 3], min: [f32; 3], max: [f32; 3], idx: [usize; 3]) -> Point3 {
    let mut p = Point3::origin();
    for a in 0..3 {
        let lo = min[a] as f64;
        let hi = max[a] as f64;
        p[a] = lo + (hi - lo) * idx[a] as f64 / (dims[a] - 1) as f64;
    }
    p
}

impl OrientationField for VoxelGridField {
    fn contains(&self, p: &Point3) -> bool {
        self.bounds().contains(p)
    }

    fn query(&self, p: &Point3) -> Result<UnitVec3> {
        if !self.contains(p) {
            return Err(out_of_domain(p));
        }
        let f = self.lattice(p);
        let mut base = [0usize; 3];
        let mut t = [0.0f64; 3];
        for a in 0..3 {
            let cell = (f[a].floor() as usize).min(self.dims[a] - 2);
            base[a] = cell;
            t[a] = (f[a] - cell as f64).clamp(0.0, 1.0);
        }
        let mut acc = Vec3::zeros();
        for corner in 0..8 {
            let o = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let mut w = 1.0;
            for a in 0..3 {
                w *= if o[a] == 1 { t[a] } else { 1.0 - t[a] };
            }
            if w != 0.0 {
                acc += self.node(base[0] + o[0], base[1] + o[1], base[2] + o[2]) * w;
            }
        }
        if acc.norm() > VANISHING_NORM {
            return Ok(UnitVec3::new_normalize(acc));
        }
        let nearest = [0, 1, 2].map(|a| (f[a].round() as usize).min(self.dims[a] - 1));
        unit(self.node(nearest[0], nearest[1], nearest[2]))
    }
}
