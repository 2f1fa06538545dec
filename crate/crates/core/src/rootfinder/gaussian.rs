//! Ground-truth density maps from 2D roots with geometry-adaptive Gaussian kernels.

use std::f64::consts::PI;

use crate::density::DensityMap;
use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityGenConfig {
    /// Neighbors averaged for the adaptive window.
    pub knn_k: usize,
    /// `σ = beta × mean distance to the knn_k nearest roots`.
    pub beta: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Kernel support radius in multiples of σ.
    pub truncation_radius: f64,
}

impl Default for DensityGenConfig {
    fn default() -> Self {
        Self { knn_k: 3, beta: 0.3, sigma_min: 1.0, sigma_max: 10.0, truncation_radius: 3.0 }
    }
}

impl DensityGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.knn_k < 1 {
            return Err(Error::ConfigInvalid("knn_k must be >= 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::ConfigInvalid(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max && self.sigma_max.is_finite()) {
            return Err(Error::ConfigInvalid(format!(
                "need 0 < sigma_min <= sigma_max, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return Err(Error::ConfigInvalid("truncation_radius must be > 0".into()));
        }
        Ok(())
    }
}

/// Per-root kernel widths: `clamp(beta × mean k-NN distance, sigma_min, sigma_max)`,
/// `sigma_min` for a lone root. Fewer than `knn_k` neighbors average what exists.
pub fn adaptive_sigmas(roots: &[Point2], cfg: &DensityGenConfig) -> Vec<f64> {
    if roots.len() < 2 {
        return vec![cfg.sigma_min; roots.len()];
    }
    let k = cfg.knn_k.min(roots.len() - 1);
    let mut dists = Vec::with_capacity(roots.len() - 1);
    roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            dists.clear();
            dists.extend(roots.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| (q - r).norm()));
            dists.select_nth_unstable_by(k - 1, f64::total_cmp);
            let mean = dists[..k].iter().sum::<f64>() / k as f64;
            (cfg.beta * mean).clamp(cfg.sigma_min, cfg.sigma_max)
        })
        .collect()
}

/// Sum of unit-mass Gaussians (evaluated at pixel centers, truncated at
/// `truncation_radius × σ`) placed at each root.
pub fn density_from_roots(roots: &[Point2], width: usize, height: usize, cfg: &DensityGenConfig) -> Result<DensityMap> {
    cfg.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::ConfigInvalid(format!("density map size {width}x{height} must be positive")));
    }
    let sigmas = adaptive_sigmas(roots, cfg);
    let mut acc = vec![0.0f64; width * height];
    for (r, &sigma) in roots.iter().zip(&sigmas) {
        let support = cfg.truncation_radius * sigma;
        let norm = 1.0 / (2.0 * PI * sigma * sigma);
        let inv = 1.0 / (2.0 * sigma * sigma);
        let x0 = ((r.x - support - 0.5).floor().max(0.0)) as usize;
        let y0 = ((r.y - support - 0.5).floor().max(0.0)) as usize;
        let x1 = ((r.x + support).ceil().max(0.0) as usize).min(width);
        let y1 = ((r.y + support).ceil().max(0.0) as usize).min(height);
        for y in y0..y1 {
            let dy = y as f64 + 0.5 - r.y;
            for x in x0..x1 {
                let dx = x as f64 + 0.5 - r.x;
                let d2 = dx * dx + dy * dy;
                if d2 <= support * support {
                    acc[y * width + x] += norm * (-d2 * inv).exp();
                }
            }
        }
    }
    DensityMap::new(width, height, acc.into_iter().map(|v| v as f32).collect())
}

/// Pixel-wise mean squared difference.
pub fn density_mse(a: &DensityMap, b: &DensityMap) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", a.width(), a.height()),
            right: format!("{}x{}", b.width(), b.height()),
        });
    }
    let sum: f64 = a.values().iter().zip(b.values()).map(|(&x, &y)| (x as f64 - y as f64).powi(2)).sum();
    Ok(sum / a.values().len() as f64)
}

/// Pixel centers whose value is at least `tau`, in row-major order.
pub fn threshold_candidates(map: &DensityMap, tau: f64) -> Vec<Point2> {
    let mut out = Vec::new();
    for y in 0..map.height() {
        for x in 0..map.width() {
            if map.get(x, y) as f64 >= tau {
                out.push(Point2::new(x as f64 + 0.5, y as f64 + 0.5));
            }
        }
    }
    out
}
