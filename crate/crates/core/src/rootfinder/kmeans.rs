//! K-Means with greedy k-means++ seeding and Lloyd refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// Centers sorted by `(u, v)`.
    pub centers: Vec<Point2>,
    /// Weighted sum of squared distances to the assigned center after each Lloyd step.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

/// Centers of `k` clusters, sorted by `(u, v)`.
pub fn kmeans(points: &[Point2], k: usize, seed: u64, max_iter: usize) -> Result<Vec<Point2>> {
    kmeans_weighted(points, None, k, seed, max_iter).map(|f| f.centers)
}

/// K-Means where each point may carry a non-negative weight (uniform when `None`).
pub fn kmeans_weighted(points: &[Point2], weights: Option<&[f64]>, k: usize, seed: u64, max_iter: usize) -> Result<KMeansFit> {
    if k == 0 {
        return Err(Error::ConfigInvalid("k must be >= 1".into()));
    }
    if k > points.len() {
        return Err(Error::KTooLarge { k, points: points.len() });
    }
    let uniform;
    let w: &[f64] = match weights {
        Some(w) => {
            if w.len() != points.len() {
                return Err(Error::DimensionMismatch { left: format!("{} points", points.len()), right: format!("{} weights", w.len()) });
            }
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::ConfigInvalid("weights must be finite, non-negative and not all zero".into()));
            }
            w
        }
        None => {
            uniform = vec![1.0; points.len()];
            &uniform
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seed_plus_plus(points, w, k, &mut rng);
    let mut assignment = vec![usize::MAX; points.len()];
    let mut history = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let c = nearest_center(&centers, p).0;
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        let mut sums = vec![(0.0, 0.0, 0.0); k];
        for (i, p) in points.iter().enumerate() {
            let s = &mut sums[assignment[i]];
            s.0 += w[i] * p.x;
            s.1 += w[i] * p.y;
            s.2 += w[i];
        }
        for (c, s) in centers.iter_mut().zip(&sums) {
            // an empty (or zero-weight) cluster keeps its previous center
            if s.2 > 0.0 {
                *c = Point2::new(s.0 / s.2, s.1 / s.2);
            }
        }
        history.push(points.iter().zip(&assignment).zip(w).map(|((p, &a), wi)| wi * (p - centers[a]).norm_squared()).sum());
        if !changed {
            break;
        }
    }
    centers.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(KMeansFit { centers, objective_history: history, iterations })
}

/// Best of `restarts` seeded runs by final objective; ties keep the earliest run.
/// Run `r` uses seed `seed + r`, so one restart equals [`kmeans_weighted`].
pub fn kmeans_best_of(points: &[Point2], weights: Option<&[f64]>, k: usize, seed: u64, max_iter: usize, restarts: usize) -> Result<KMeansFit> {
    let mut best = kmeans_weighted(points, weights, k, seed, max_iter)?;
    for r in 1..restarts as u64 {
        let fit = kmeans_weighted(points, weights, k, seed.wrapping_add(r), max_iter)?;
        if final_objective(&fit) < final_objective(&best) {
            best = fit;
        }
    }
    Ok(best)
}

fn final_objective(fit: &KMeansFit) -> f64 {
    fit.objective_history.last().copied().unwrap_or(f64::INFINITY)
}

fn nearest_center(centers: &[Point2], p: &Point2) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, q) in centers.iter().enumerate() {
        let d = (p - q).norm_squared();
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Greedy k-means++: each new center is the best of `2 + ⌊ln k⌋` candidates
/// drawn with probability proportional to `weight × D²`.
fn seed_plus_plus(points: &[Point2], w: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point2> {
    let trials = 2 + (k as f64).ln().floor() as usize;
    let first = sample_index(w, w.iter().sum(), rng);
    let mut centers = vec![points[first]];
    let mut d2: Vec<f64> = points.iter().map(|p| (p - points[first]).norm_squared()).collect();
    let mut scratch = vec![0.0; points.len()];
    while centers.len() < k {
        let mass: Vec<f64> = d2.iter().zip(w).map(|(d, wi)| d * wi).collect();
        let total: f64 = mass.iter().sum();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for _ in 0..trials {
            let cand = if total > 0.0 { sample_index(&mass, total, rng) } else { rng.random_range(0..points.len()) };
            let mut potential = 0.0;
            for (i, p) in points.iter().enumerate() {
                scratch[i] = d2[i].min((p - points[cand]).norm_squared());
                potential += w[i] * scratch[i];
            }
            if best.as_ref().is_none_or(|b| potential < b.0) {
                best = Some((potential, cand, scratch.clone()));
            }
        }
        let (_, cand, next) = best.expect("at least two trials");
        centers.push(points[cand]);
        d2 = next;
    }
    centers
}

fn sample_index(mass: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut x = rng.random::<f64>() * total;
    for (i, &m) in mass.iter().enumerate() {
        if x < m {
            return i;
        }
        x -= m;
    }
    mass.iter().rposition(|&m| m > 0.0).unwrap_or(mass.len() - 1)
}
