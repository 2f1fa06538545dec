//! DBSCAN over 2D points.
//!
//! A point is a core point when at least `min_pts` points (itself included) lie
//! within `eps`. Clusters are grown from unvisited core points taken in index
//! order, so labels are deterministic for a given input order.

use crate::geom::Point2;

use super::grid::PointGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Noise,
    Cluster(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabeling {
    pub labels: Vec<Label>,
    pub cluster_count: usize,
}

impl ClusterLabeling {
    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Noise).count()
    }

    /// Member indices of each cluster, by cluster id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (i, l) in self.labels.iter().enumerate() {
            if let Label::Cluster(c) = l {
                out[*c].push(i);
            }
        }
        out
    }
}

pub fn dbscan(points: &[Point2], eps: f64, min_pts: usize) -> ClusterLabeling {
    let n = points.len();
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let grid = PointGrid::new(points, eps);
    let mut neighbors = Vec::new();
    let mut queue = Vec::new();
    let mut cluster = 0;

    for i in 0..n {
        if labels[i].is_some() {
            continue;
        }
        grid.within(points, &points[i], eps, &mut neighbors);
        if neighbors.len() < min_pts {
            labels[i] = Some(Label::Noise);
            continue;
        }
        labels[i] = Some(Label::Cluster(cluster));
        queue.clear();
        queue.extend(neighbors.iter().copied().filter(|&j| j != i));
        while let Some(j) = queue.pop() {
            if matches!(labels[j], Some(Label::Cluster(_))) {
                continue;
            }
            // unvisited, or noise that turns out to be a border point of this cluster
            labels[j] = Some(Label::Cluster(cluster));
            grid.within(points, &points[j], eps, &mut neighbors);
            if neighbors.len() >= min_pts {
                queue.extend(neighbors.iter().copied().filter(|&m| !matches!(labels[m], Some(Label::Cluster(_)))));
            }
        }
        cluster += 1;
    }

    ClusterLabeling { labels: labels.into_iter().map(|l| l.unwrap_or(Label::Noise)).collect(), cluster_count: cluster }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Core points from the ε-graph, clusters as connected components of core
    /// points (numbered by their lowest core index), border points joined to the
    /// first-numbered cluster owning one of their core neighbors.
    fn oracle(points: &[Point2], eps: f64, min_pts: usize) -> ClusterLabeling {
        let n = points.len();
        let adj: Vec<Vec<usize>> =
            (0..n).map(|i| (0..n).filter(|&j| (points[i] - points[j]).norm() <= eps).collect()).collect();
        let core: Vec<bool> = adj.iter().map(|a| a.len() >= min_pts).collect();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if !core[s] || comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if core[v] && comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        let labels = (0..n)
            .map(|i| {
                if core[i] {
                    Label::Cluster(comp[i])
                } else {
                    adj[i].iter().filter(|&&j| core[j]).map(|&j| comp[j]).min().map_or(Label::Noise, Label::Cluster)
                }
            })
            .collect();
        ClusterLabeling { labels, cluster_count: count }
    }

    #[test]
    fn two_blobs() {
        let mut pts = Vec::new();
        for i in 0..10 {
            pts.push(Point2::new(10.0 + (i % 5) as f64 * 0.5, 10.0 + (i / 5) as f64 * 0.5));
            pts.push(Point2::new(40.0 + (i % 5) as f64 * 0.5, 10.0 + (i / 5) as f64 * 0.5));
        }
        let l = dbscan(&pts, 3.0, 3);
        assert_eq!(l.cluster_count, 2);
        assert_eq!(l.noise_count(), 0);
    }

    #[test]
    fn isolated_point_is_noise() {
        let l = dbscan(&[Point2::new(1.0, 1.0)], 3.0, 2);
        assert_eq!(l.cluster_count, 0);
        assert_eq!(l.labels, vec![Label::Noise]);
    }

    #[test]
    fn matches_reachability_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..300 {
            let n = rng.random_range(1..=20);
            let pts: Vec<Point2> = (0..n).map(|_| Point2::new(rng.random_range(0.0..20.0), rng.random_range(0.0..20.0))).collect();
            let eps = rng.random_range(1.0..5.0);
            let min_pts = rng.random_range(1..5);
            assert_eq!(dbscan(&pts, eps, min_pts), oracle(&pts, eps, min_pts), "trial {trial}");
        }
    }

    #[test]
    fn count_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut pts: Vec<Point2> = (0..60).map(|_| Point2::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0))).collect();
            let c0 = dbscan(&pts, 4.0, 3).cluster_count;
            for i in (1..pts.len()).rev() {
                let j = rng.random_range(0..=i);
                pts.swap(i, j);
            }
            assert_eq!(dbscan(&pts, 4.0, 3).cluster_count, c0);
        }
    }
}
