use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, FiberSet, Point3};

/// Sparse occupancy on the global lattice whose voxel `(i, j, k)` is centered
/// at `((i + ½) / res, (j + ½) / res, (k + ½) / res)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelVolume {
    res: f64,
    /// Occupied voxels, sorted and unique.
    voxels: Vec<[i32; 3]>,
}

impl VoxelVolume {
    pub fn new(res: f64, mut voxels: Vec<[i32; 3]>) -> Result<Self> {
        check_res(res)?;
        voxels.sort_unstable();
        voxels.dedup();
        Ok(Self { res, voxels })
    }

    /// Voxels whose centers lie in the closed box `[min, max]`.
    pub fn from_box(min: Point3, max: Point3, res: f64) -> Result<Self> {
        check_res(res)?;
        let lo = |v: f64| (v * res - 0.5).ceil() as i32;
        let hi = |v: f64| (v * res - 0.5).floor() as i32;
        let mut voxels = Vec::new();
        for i in lo(min.x)..=hi(max.x) {
            for j in lo(min.y)..=hi(max.y) {
                for k in lo(min.z)..=hi(max.z) {
                    voxels.push([i, j, k]);
                }
            }
        }
        Self::new(res, voxels)
    }

    pub fn res(&self) -> f64 {
        self.res
    }

    pub fn voxels(&self) -> &[[i32; 3]] {
        &self.voxels
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }

    pub fn voxel_volume(&self) -> f64 {
        self.res.powi(-3)
    }

    pub fn volume(&self) -> f64 {
        self.len() as f64 * self.voxel_volume()
    }

    pub fn center(&self, v: [i32; 3]) -> Point3 {
        Point3::new((v[0] as f64 + 0.5) / self.res, (v[1] as f64 + 0.5) / self.res, (v[2] as f64 + 0.5) / self.res)
    }
}

fn check_res(res: f64) -> Result<()> {
    if res > 0.0 && res.is_finite() {
        Ok(())
    } else {
        Err(Error::ConfigInvalid(format!("grid resolution must be > 0, got {res}")))
    }
}

fn capsule_voxels(a: &Point3, b: &Point3, radius: f64, res: f64, out: &mut Vec<[i32; 3]>) {
    let lo = |u: f64, v: f64| ((u.min(v) - radius) * res - 0.5).ceil() as i32;
    let hi = |u: f64, v: f64| ((u.max(v) + radius) * res - 0.5).floor() as i32;
    for i in lo(a.x, b.x)..=hi(a.x, b.x) {
        let x = (i as f64 + 0.5) / res;
        for j in lo(a.y, b.y)..=hi(a.y, b.y) {
            let y = (j as f64 + 0.5) / res;
            for k in lo(a.z, b.z)..=hi(a.z, b.z) {
                let c = Point3::new(x, y, (k as f64 + 0.5) / res);
                if point_segment_distance(&c, a, b) <= radius {
                    out.push([i, j, k]);
                }
            }
        }
    }
}

/// Voxels whose centers lie within `radius` of some fiber segment (a
/// single-point fiber contributes a ball).
pub fn fibers_to_mesh(fs: &FiberSet, radius: f64, grid_res: f64) -> Result<VoxelVolume> {
    if fs.is_empty() {
        return Err(Error::EmptySet { what: "fiber set" });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::ConfigInvalid(format!("radius must be > 0, got {radius}")));
    }
    check_res(grid_res)?;
    let parts: Vec<Vec<[i32; 3]>> = fs
        .fibers
        .par_iter()
        .map(|f| {
            let mut out = Vec::new();
            let p = f.points();
            if p.len() == 1 {
                capsule_voxels(&p[0], &p[0], radius, grid_res, &mut out);
            }
            for w in p.windows(2) {
                capsule_voxels(&w[0], &w[1], radius, grid_res, &mut out);
            }
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    VoxelVolume::new(grid_res, parts.concat())
}

/// `|A ∩ B| / |A ∪ B|`.
pub fn iou(a: &VoxelVolume, b: &VoxelVolume) -> Result<f64> {
    if a.res != b.res {
        return Err(Error::DimensionMismatch { left: format!("res {}", a.res), right: format!("res {}", b.res) });
    }
    if a.is_empty() && b.is_empty() {
        return Err(Error::BothEmpty);
    }
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.voxels.len() && j < b.voxels.len() {
        match a.voxels[i].cmp(&b.voxels[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}
