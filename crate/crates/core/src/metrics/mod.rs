//! Reconstruction metrics: root-cloud density errors (NDE, DCD), mean length
//! error, fiber direction distance (FDO) and voxel IoU.

mod voxel;

pub use voxel::{fibers_to_mesh, iou, VoxelVolume};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{Fiber, FiberSet, Point3, UnitVec3, Vec3};

/// Neighbor radii used for NDE and DCD.
pub const DEFAULT_PHIS: [f64; 3] = [0.04, 0.02, 0.01];
pub const DEFAULT_RADIUS: f64 = 0.004;
pub const DEFAULT_GRID_RES: f64 = 256.0;

/// Number of points of `cloud` other than `r` itself within `phi` of `r`.
///
/// "Itself" means bit-identical coordinates: duplicates of `r` are not counted.
pub fn den(r: &Point3, cloud: &[Point3], phi: f64) -> usize {
    cloud.iter().filter(|q| *q != r && (*q - r).norm() <= phi).count()
}

fn densities(cloud: &[Point3], phi: f64) -> Vec<usize> {
    cloud.par_iter().map(|r| den(r, cloud, phi)).collect()
}

/// Index of the point of `cloud` nearest to `p`; ties go to the lowest index.
fn nearest(p: &Point3, cloud: &[Point3]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, q) in cloud.iter().enumerate() {
        let d = (q - p).norm();
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn check_nonempty(pred: &[Point3], gt: &[Point3]) -> Result<()> {
    if pred.is_empty() {
        return Err(Error::EmptySet { what: "prediction" });
    }
    if gt.is_empty() {
        return Err(Error::EmptySet { what: "ground truth" });
    }
    Ok(())
}

/// Mean of `term(den_a(x), den_b(x*), |x - x*|)` over `x ∈ a` with `x*` nearest in `b`.
fn directed<F>(a: &[Point3], da: &[usize], b: &[Point3], db: &[usize], term: F) -> f64
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    let terms: Vec<f64> = a
        .par_iter()
        .zip(da)
        .map(|(x, &dx)| {
            let (j, d) = nearest(x, b);
            term(dx as f64, db[j] as f64, d)
        })
        .collect();
    terms.iter().sum::<f64>() / a.len() as f64
}

fn symmetric<F>(pred: &[Point3], gt: &[Point3], phi: f64, term: F) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64 + Sync + Copy,
{
    check_nonempty(pred, gt)?;
    if !(phi > 0.0) {
        return Err(Error::ConfigInvalid(format!("phi must be > 0, got {phi}")));
    }
    let dp = densities(pred, phi);
    let dg = densities(gt, phi);
    let forward = directed(pred, &dp, gt, &dg, term);
    let backward = directed(gt, &dg, pred, &dp, term);
    Ok((forward + backward) / 2.0)
}

/// Nearest density error.
pub fn nde(pred: &[Point3], gt: &[Point3], phi: f64) -> Result<f64> {
    symmetric(pred, gt, phi, |a, b, _| (a - b).abs())
}

/// Density-aware chamfer distance.
pub fn dcd(pred: &[Point3], gt: &[Point3], phi: f64) -> Result<f64> {
    symmetric(pred, gt, phi, |a, b, d| (a - b + 1.0).abs() * d)
}

/// Mean length error: `s̄ · Σ|l - l*| / (number of fibers)` over all eyebrows.
pub fn mle(pred_levels: &[Vec<usize>], gt_levels: &[Vec<usize>], step: f64) -> Result<f64> {
    if pred_levels.len() != gt_levels.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} eyebrows", pred_levels.len(), gt_levels.len())));
    }
    if !(step > 0.0) {
        return Err(Error::ConfigInvalid(format!("step must be > 0, got {step}")));
    }
    let mut total = 0u64;
    let mut count = 0usize;
    for (i, (p, g)) in pred_levels.iter().zip(gt_levels).enumerate() {
        if p.len() != g.len() {
            return Err(Error::ShapeMismatch(format!("eyebrow {i}: {} vs {} fibers", p.len(), g.len())));
        }
        total += p.iter().zip(g).map(|(&a, &b)| a.abs_diff(b) as u64).sum::<u64>();
        count += p.len();
    }
    if count == 0 {
        return Err(Error::EmptySet { what: "length levels" });
    }
    Ok(step * total as f64 / count as f64)
}

/// Length of a fiber in whole growth steps.
pub fn length_level(fiber: &Fiber, step: f64) -> usize {
    (fiber.arc_length() / step).round() as usize
}

/// Forward-difference directions of `f` resampled to `n` points; the last
/// direction repeats the one before it.
pub fn fiber_directions(f: &Fiber, n: usize) -> Result<Vec<UnitVec3>> {
    let r = f.resample(n)?;
    let p = r.points();
    let mut dirs = Vec::with_capacity(n);
    let mut last: Option<UnitVec3> = None;
    for w in p.windows(2) {
        // a zero-length resampled segment only happens for a fiber of zero length
        let d = UnitVec3::try_new(w[1] - w[0], 0.0).or(last).ok_or_else(|| {
            Error::InvalidGeometry("fiber has zero length".into())
        })?;
        dirs.push(d);
        last = Some(d);
    }
    dirs.push(dirs[dirs.len() - 1]);
    Ok(dirs)
}

/// Directions used by FDO. A point fiber or one of zero length has no growth
/// direction and scores as `n` zero vectors.
fn fdo_directions(f: &Fiber, n: usize) -> Vec<Vec3> {
    if f.len() < 2 || f.arc_length() == 0.0 {
        return vec![Vec3::zeros(); n];
    }
    match fiber_directions(f, n) {
        Ok(d) => d.into_iter().map(|u| u.into_inner()).collect(),
        Err(_) => vec![Vec3::zeros(); n],
    }
}

fn fiber_set_directions(fs: &FiberSet, n: usize) -> Vec<Vec<Vec3>> {
    fs.fibers.par_iter().map(|f| fdo_directions(f, n)).collect()
}

fn directed_fdo(a_roots: &[Point3], a_dirs: &[Vec<Vec3>], b_roots: &[Point3], b_dirs: &[Vec<Vec3>]) -> f64 {
    let terms: Vec<f64> = a_roots
        .par_iter()
        .zip(a_dirs)
        .map(|(r, da)| {
            let (j, _) = nearest(r, b_roots);
            da.iter().zip(&b_dirs[j]).map(|(x, y)| (x - y).norm()).sum()
        })
        .collect();
    terms.iter().sum::<f64>() / a_roots.len() as f64
}

/// Fiber direction distance between root-matched fibers, summed over the `n`
/// per-point directions and averaged over fibers in both directions.
pub fn fdo(pred: &FiberSet, gt: &FiberSet, n: usize) -> Result<f64> {
    let pr = pred.roots().roots;
    let gr = gt.roots().roots;
    check_nonempty(&pr, &gr)?;
    if n < 2 {
        return Err(Error::ConfigInvalid(format!("fdo point count must be >= 2, got {n}")));
    }
    let pd = fiber_set_directions(pred, n);
    let gd = fiber_set_directions(gt, n);
    Ok((directed_fdo(&pr, &pd, &gr, &gd) + directed_fdo(&gr, &gd, &pr, &pd)) / 2.0)
}

/// Length levels of `pred` and of the gt fiber whose root is nearest to each pred root.
pub fn paired_levels(pred: &FiberSet, gt: &FiberSet) -> Result<(Vec<usize>, Vec<usize>)> {
    let gr = gt.roots().roots;
    check_nonempty(&pred.roots().roots, &gr)?;
    let step = gt.step;
    let p = pred.fibers.iter().map(|f| length_level(f, step)).collect();
    let g = pred.fibers.iter().map(|f| length_level(&gt.fibers[nearest(&f.root(), &gr).0], step)).collect();
    Ok((p, g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub phis: Vec<f64>,
    pub fdo_n: usize,
    pub radius: f64,
    pub grid_res: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { phis: DEFAULT_PHIS.to_vec(), fdo_n: crate::FIBER_POINT_COUNT, radius: DEFAULT_RADIUS, grid_res: DEFAULT_GRID_RES }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// `(phi, nde, dcd)` per neighbor radius.
    pub root_metrics: Vec<(f64, f64, f64)>,
    pub mle: f64,
    pub fdo: f64,
    pub iou: f64,
    pub config: EvalConfig,
    pub step: f64,
}

/// Every metric of `pred` against `gt`.
pub fn evaluate(pred: &FiberSet, gt: &FiberSet, cfg: &EvalConfig) -> Result<MetricsReport> {
    let pr = pred.roots().roots;
    let gr = gt.roots().roots;
    check_nonempty(&pr, &gr)?;
    let mut root_metrics = Vec::with_capacity(cfg.phis.len());
    for &phi in &cfg.phis {
        root_metrics.push((phi, nde(&pr, &gr, phi)?, dcd(&pr, &gr, phi)?));
    }
    let (pl, gl) = paired_levels(pred, gt)?;
    let mle = mle(&[pl], &[gl], gt.step)?;
    let fdo = fdo(pred, gt, cfg.fdo_n)?;
    let a = fibers_to_mesh(pred, cfg.radius, cfg.grid_res)?;
    let b = fibers_to_mesh(gt, cfg.radius, cfg.grid_res)?;
    let iou = iou(&a, &b)?;
    Ok(MetricsReport { root_metrics, mle, fdo, iou, config: cfg.clone(), step: gt.step })
}
