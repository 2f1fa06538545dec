use crate::camera::Camera;
use crate::error::{Error, Result};
use crate::geom::{Point2, Point3, RootSet};
use crate::mesh::TriMesh;

use super::grid::PointGrid;

/// Brow-region surface samples together with their image projections.
#[derive(Debug, Clone)]
pub struct ProjectedSamples {
    pub world: Vec<Point3>,
    pub image: Vec<Point2>,
    grid: PointGrid,
}

impl ProjectedSamples {
    /// Samples `count` points on the mesh region and keeps those the camera can project.
    pub fn new(camera: &Camera, mesh: &TriMesh, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::ConfigInvalid("sample count must be >= 1".into()));
        }
        let samples = mesh.sample_surface(count, true, seed)?;
        let mut world = Vec::with_capacity(samples.len());
        let mut image = Vec::with_capacity(samples.len());
        for s in samples {
            if !camera.sees(&s) {
                continue;
            }
            if let Ok(uv) = camera.project(&s) {
                world.push(s);
                image.push(uv);
            }
        }
        if world.is_empty() {
            return Err(Error::AllSamplesBehindCamera);
        }
        Ok(Self::from_parts(world, image))
    }

    pub fn from_parts(world: Vec<Point3>, image: Vec<Point2>) -> Self {
        let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &image {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(1e-12);
        // roughly four samples per bucket
        let cell = (4.0 * area / image.len() as f64).sqrt();
        let grid = PointGrid::new(&image, cell);
        Self { world, image, grid }
    }

    /// Index of the sample whose projection is closest to `uv` (lowest index on ties).
    pub fn nearest(&self, uv: &Point2) -> usize {
        self.grid.nearest(&self.image, uv).expect("non-empty sample set")
    }
}

/// Lifts 2D roots to the 3D surface sample whose projection lies nearest.
pub fn lift_roots(roots2d: &[Point2], camera: &Camera, mesh: &TriMesh, sample_count: usize, seed: u64) -> Result<RootSet> {
    let samples = ProjectedSamples::new(camera, mesh, sample_count, seed)?;
    Ok(lift_with_samples(roots2d, &samples))
}

pub fn lift_with_samples(roots2d: &[Point2], samples: &ProjectedSamples) -> RootSet {
    RootSet::new(roots2d.iter().map(|r| samples.world[samples.nearest(r)]).collect())
}
