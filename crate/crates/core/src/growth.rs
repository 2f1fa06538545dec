//! Fiber synthesis: step from each root through an orientation field until an
//! ending policy says stop.
//!
//! For fiber `i` with prefix `{p_0 .. p_j}`:
//!
//! ```text
//! d_j = smooth(d_{j-1}, D(p_j))       direction at the tip
//! L(prefix) == Stop  -> fiber ends at p_j
//! p_{j+1} = p_j + s̄ · d_j
//! ```
//!
//! Growth also ends when the tip leaves the field domain or the prefix reaches
//! `max_steps + 1` points.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::OrientationField;
use crate::geom::{angle_between, arc_length, Fiber, FiberSet, Point3, RootSet, UnitVec3};
use crate::mesh::{Solid, TriMesh};

/// Directions closer than this to antiparallel keep the previous direction.
const ANTIPARALLEL_DEG: f64 = 179.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConfig {
    /// Step length `s̄`.
    pub step: f64,
    /// Smoothing threshold in degrees.
    pub theta_deg: f64,
    /// Hard cap on the number of steps per fiber.
    pub max_steps: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self { step: crate::DEFAULT_STEP, theta_deg: 30.0, max_steps: 200 }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::ConfigInvalid(format!("step must be > 0, got {}", self.step)));
        }
        if !(self.theta_deg > 0.0 && self.theta_deg < 180.0) {
            return Err(Error::ConfigInvalid(format!("theta must be in (0, 180) degrees, got {}", self.theta_deg)));
        }
        if self.max_steps < 1 {
            return Err(Error::ConfigInvalid("max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Stop,
    Continue,
}

/// Ending function: decides whether a fiber stops at the tip of `prefix`.
pub trait EndingPolicy: Send + Sync {
    /// `fiber` is the index of the root this fiber grows from.
    fn decide(&self, fiber: usize, prefix: &[Point3]) -> Decision;

    /// Checks the policy can serve `root_count` fibers.
    fn check(&self, _root_count: usize) -> Result<()> {
        Ok(())
    }
}

/// Stops once the prefix arc length reaches `target_len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanLength {
    pub target_len: f64,
}

/// Mean fiber length of the reference eyebrow data, in head units.
pub const MEAN_FIBER_LENGTH: f64 = 0.0714;

pub fn mean_length_ender(target_len: f64) -> Result<MeanLength> {
    if !(target_len > 0.0 && target_len.is_finite()) {
        return Err(Error::ConfigInvalid(format!("target length must be > 0, got {target_len}")));
    }
    Ok(MeanLength { target_len })
}

impl EndingPolicy for MeanLength {
    fn decide(&self, _fiber: usize, prefix: &[Point3]) -> Decision {
        if arc_length(prefix) >= self.target_len {
            Decision::Stop
        } else {
            Decision::Continue
        }
    }
}

/// Stops after `n` steps (`n + 1` points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSteps {
    pub n: usize,
}

impl EndingPolicy for MaxSteps {
    fn decide(&self, _fiber: usize, prefix: &[Point3]) -> Decision {
        if prefix.len() > self.n {
            Decision::Stop
        } else {
            Decision::Continue
        }
    }
}

/// Per-root step counts: fiber `i` stops with `table[i] + 1` points.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthTable {
    pub steps: Vec<usize>,
}

pub fn length_table_ender(steps: Vec<usize>) -> LengthTable {
    LengthTable { steps }
}

impl EndingPolicy for LengthTable {
    fn decide(&self, fiber: usize, prefix: &[Point3]) -> Decision {
        match self.steps.get(fiber) {
            Some(&n) if prefix.len() <= n => Decision::Continue,
            _ => Decision::Stop,
        }
    }

    fn check(&self, root_count: usize) -> Result<()> {
        if self.steps.len() < root_count {
            return Err(Error::MissingRoot { index: self.steps.len() });
        }
        Ok(())
    }
}

/// Stops as soon as the tip leaves a closed mesh.
#[derive(Debug, Clone)]
pub struct MeshCut {
    solid: Solid,
}

pub fn mesh_cut_ender(mesh: TriMesh) -> Result<MeshCut> {
    Ok(MeshCut { solid: Solid::new(mesh)? })
}

impl MeshCut {
    pub fn solid(&self) -> &Solid {
        &self.solid
    }
}

impl EndingPolicy for MeshCut {
    fn decide(&self, _fiber: usize, prefix: &[Point3]) -> Decision {
        match prefix.last() {
            Some(tip) if self.solid.contains(tip) => Decision::Continue,
            _ => Decision::Stop,
        }
    }
}

impl<E: EndingPolicy + ?Sized> EndingPolicy for Box<E> {
    fn decide(&self, fiber: usize, prefix: &[Point3]) -> Decision {
        (**self).decide(fiber, prefix)
    }

    fn check(&self, root_count: usize) -> Result<()> {
        (**self).check(root_count)
    }
}

/// Replaces `cur` by the bisector of `prev` and `cur` when they differ by more
/// than `theta_deg`; nearly antiparallel pairs keep `prev`.
pub fn smooth_direction(prev: &UnitVec3, cur: &UnitVec3, theta_deg: f64) -> UnitVec3 {
    let angle = angle_between(prev, cur).to_degrees();
    if angle <= theta_deg {
        *cur
    } else if angle >= ANTIPARALLEL_DEG {
        *prev
    } else {
        UnitVec3::new_normalize(prev.into_inner() + cur.into_inner())
    }
}

/// Grows the fiber of root `index`.
pub fn grow_fiber<F, E>(index: usize, root: Point3, field: &F, ender: &E, cfg: &GrowthConfig) -> Result<Fiber>
where
    F: OrientationField + ?Sized,
    E: EndingPolicy + ?Sized,
{
    if !field.contains(&root) {
        return Err(Error::RootOutOfDomain { index });
    }
    let mut points = vec![root];
    let mut prev: Option<UnitVec3> = None;
    while points.len() <= cfg.max_steps {
        let tip = points[points.len() - 1];
        let Ok(raw) = field.query(&tip) else { break };
        let dir = match prev {
            Some(p) => smooth_direction(&p, &raw, cfg.theta_deg),
            None => raw,
        };
        if ender.decide(index, &points) == Decision::Stop {
            break;
        }
        points.push(tip + dir.into_inner() * cfg.step);
        prev = Some(dir);
    }
    Fiber::new(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthOutcome {
    pub fibers: FiberSet,
    /// Roots that could not be grown, with the reason. Their fibers are absent from `fibers`.
    pub failures: Vec<(usize, Error)>,
}

/// Grows every root (in parallel across fibers), keeping root order.
/// Fails only when no root could be grown.
pub fn grow_all<F, E>(roots: &RootSet, field: &F, ender: &E, cfg: &GrowthConfig) -> Result<GrowthOutcome>
where
    F: OrientationField + ?Sized,
    E: EndingPolicy + ?Sized,
{
    cfg.validate()?;
    if roots.is_empty() {
        return Err(Error::EmptyRoots);
    }
    ender.check(roots.len())?;
    let results: Vec<Result<Fiber>> =
        roots.roots.par_iter().enumerate().map(|(i, r)| grow_fiber(i, *r, field, ender, cfg)).collect();
    collect_outcome(results, cfg.step)
}

/// Single-threaded [`grow_all`].
pub fn grow_all_sequential<F, E>(roots: &RootSet, field: &F, ender: &E, cfg: &GrowthConfig) -> Result<GrowthOutcome>
where
    F: OrientationField + ?Sized,
    E: EndingPolicy + ?Sized,
{
    cfg.validate()?;
    if roots.is_empty() {
        return Err(Error::EmptyRoots);
    }
    ender.check(roots.len())?;
    let results: Vec<Result<Fiber>> = roots.roots.iter().enumerate().map(|(i, r)| grow_fiber(i, *r, field, ender, cfg)).collect();
    collect_outcome(results, cfg.step)
}

fn collect_outcome(results: Vec<Result<Fiber>>, step: f64) -> Result<GrowthOutcome> {
    let mut fibers = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(f) => fibers.push(f),
            Err(e) => failures.push((i, e)),
        }
    }
    if fibers.is_empty() {
        return Err(failures.into_iter().next().map(|(_, e)| e).unwrap_or(Error::EmptyRoots));
    }
    Ok(GrowthOutcome { fibers: FiberSet::new(fibers, step), failures })
}
