//! Root localization: density maps to 2D root centers, and 2D roots to 3D
//! points on the brow-bone surface.

mod dbscan;
mod gaussian;
mod grid;
mod kmeans;
mod lift;

pub use dbscan::{dbscan, ClusterLabeling, Label};
pub use gaussian::{adaptive_sigmas, density_from_roots, density_mse, threshold_candidates, DensityGenConfig};
pub use kmeans::{kmeans, kmeans_best_of, kmeans_weighted, KMeansFit};
pub use lift::{lift_roots, lift_with_samples, ProjectedSamples};

use crate::density::DensityMap;
use crate::error::{Error, Result};
use crate::geom::Point2;

/// How cluster centers are placed once DBSCAN has fixed their number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenterMode {
    /// One K-Means run over all non-noise candidates with `k` = cluster count.
    #[default]
    GlobalKMeans,
    /// Centroid of each DBSCAN cluster's members.
    PerCluster,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    /// Candidate threshold as a fraction of the map maximum.
    pub tau_rel: f64,
    pub eps: f64,
    pub min_pts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Seeded K-Means runs; the lowest objective wins.
    pub restarts: usize,
    pub mode: CenterMode,
    /// Weight candidates by their density value when placing centers.
    pub weighted: bool,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self { tau_rel: 0.5, eps: 3.0, min_pts: 4, seed: 0, max_iter: 300, restarts: 10, mode: CenterMode::GlobalKMeans, weighted: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootExtraction {
    pub roots: Vec<Point2>,
    pub cluster_count: usize,
    pub candidate_count: usize,
    pub noise_count: usize,
}

/// Threshold, count clusters with DBSCAN, then place that many centers.
pub fn extract_roots_2d(map: &DensityMap, cfg: &ExtractConfig) -> Result<RootExtraction> {
    if !(cfg.tau_rel > 0.0 && cfg.tau_rel <= 1.0) {
        return Err(Error::ConfigInvalid(format!("tau_rel must be in (0, 1], got {}", cfg.tau_rel)));
    }
    if !(cfg.eps > 0.0) || cfg.min_pts < 1 {
        return Err(Error::ConfigInvalid(format!("need eps > 0 and min_pts >= 1, got {} and {}", cfg.eps, cfg.min_pts)));
    }
    let peak = map.max();
    if peak <= 0.0 {
        return Ok(RootExtraction { roots: Vec::new(), cluster_count: 0, candidate_count: 0, noise_count: 0 });
    }
    let candidates = threshold_candidates(map, cfg.tau_rel * peak as f64);
    let labels = dbscan(&candidates, cfg.eps, cfg.min_pts);
    let k = labels.cluster_count;
    let mut out = RootExtraction {
        roots: Vec::new(),
        cluster_count: k,
        candidate_count: candidates.len(),
        noise_count: labels.noise_count(),
    };
    if k == 0 {
        return Ok(out);
    }
    let weight_of = |p: &Point2| if cfg.weighted { map.get(p.x as usize, p.y as usize) as f64 } else { 1.0 };
    out.roots = match cfg.mode {
        CenterMode::GlobalKMeans => {
            let members: Vec<Point2> =
                candidates.iter().zip(&labels.labels).filter(|(_, l)| **l != Label::Noise).map(|(p, _)| *p).collect();
            let weights: Vec<f64> = members.iter().map(weight_of).collect();
            kmeans_best_of(&members, Some(&weights), k, cfg.seed, cfg.max_iter, cfg.restarts.max(1))?.centers
        }
        CenterMode::PerCluster => {
            let mut centers: Vec<Point2> = labels
                .members()
                .iter()
                .map(|idx| {
                    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
                    for &i in idx {
                        let w = weight_of(&candidates[i]);
                        sx += w * candidates[i].x;
                        sy += w * candidates[i].y;
                        sw += w;
                    }
                    Point2::new(sx / sw, sy / sw)
                })
                .collect();
            centers.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
            centers
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_map_has_no_roots() {
        let m = DensityMap::zeros(50, 40).unwrap();
        let r = extract_roots_2d(&m, &ExtractConfig::default()).unwrap();
        assert!(r.roots.is_empty());
        assert_eq!(r.cluster_count, 0);
    }

    #[test]
    fn two_far_roots_round_trip() {
        let gt = [Point2::new(40.3, 50.7), Point2::new(160.2, 45.1)];
        let m = density_from_roots(&gt, 220, 100, &DensityGenConfig::default()).unwrap();
        for mode in [CenterMode::GlobalKMeans, CenterMode::PerCluster] {
            let r = extract_roots_2d(&m, &ExtractConfig { mode, ..Default::default() }).unwrap();
            assert_eq!(r.roots.len(), 2);
            for (a, b) in r.roots.iter().zip(&gt) {
                assert!((a - b).norm() < 1.0, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn one_root_round_trip() {
        let gt = [Point2::new(33.4, 21.9)];
        let m = density_from_roots(&gt, 70, 50, &DensityGenConfig::default()).unwrap();
        let r = extract_roots_2d(&m, &ExtractConfig::default()).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - gt[0]).norm() < 1.0);
    }
}
