//! Uniform bucket grid over 2D points for radius and nearest-neighbor queries.

use std::collections::HashMap;

use crate::geom::Point2;

#[derive(Debug, Clone)]
pub(crate) struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
    lo: (i64, i64),
    hi: (i64, i64),
}

impl PointGrid {
    pub(crate) fn new(points: &[Point2], cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        let mut lo = (i64::MAX, i64::MAX);
        let mut hi = (i64::MIN, i64::MIN);
        for (i, p) in points.iter().enumerate() {
            let key = Self::key_of(cell, p);
            lo = (lo.0.min(key.0), lo.1.min(key.1));
            hi = (hi.0.max(key.0), hi.1.max(key.1));
            buckets.entry(key).or_default().push(i as u32);
        }
        Self { cell, buckets, lo, hi }
    }

    fn key_of(cell: f64, p: &Point2) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Indices of points within `radius` (inclusive) of `q`, appended to `out`
    /// in ascending index order.
    pub(crate) fn within(&self, points: &[Point2], q: &Point2, radius: f64, out: &mut Vec<usize>) {
        out.clear();
        let r2 = radius * radius;
        let reach = (radius / self.cell).ceil() as i64;
        let (cx, cy) = Self::key_of(self.cell, q);
        for gy in cy - reach..=cy + reach {
            for gx in cx - reach..=cx + reach {
                if let Some(bucket) = self.buckets.get(&(gx, gy)) {
                    for &i in bucket {
                        if (points[i as usize] - q).norm_squared() <= r2 {
                            out.push(i as usize);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
    }

    /// Nearest point to `q`; ties go to the lowest index.
    pub(crate) fn nearest(&self, points: &[Point2], q: &Point2) -> Option<usize> {
        if self.buckets.is_empty() {
            return None;
        }
        let (cx, cy) = Self::key_of(self.cell, q);
        let max_ring = [cx - self.lo.0, self.hi.0 - cx, cy - self.lo.1, self.hi.1 - cy]
            .into_iter()
            .map(i64::abs)
            .max()
            .unwrap_or(0)
            + 1;
        // past this many rings a linear scan touches fewer points than the grid walk
        let side = max_ring.saturating_mul(2).saturating_add(1);
        if side.saturating_mul(side) > 4 * points.len() as i64 + 64 {
            let ring_cap = ((points.len() as f64).sqrt() as i64).max(2);
            if let Some(i) = self.nearest_within_rings(points, q, ring_cap, false) {
                return Some(i);
            }
            return brute_nearest(points, q);
        }
        self.nearest_within_rings(points, q, max_ring, true)
    }

    /// Ring search over at most `max_ring` rings. Unless `exhaustive` (the rings
    /// cover every bucket), gives up with `None` when the answer is not yet certain.
    fn nearest_within_rings(&self, points: &[Point2], q: &Point2, max_ring: i64, exhaustive: bool) -> Option<usize> {
        let (cx, cy) = Self::key_of(self.cell, q);
        let mut best: Option<(f64, usize)> = None;
        for ring in 0..=max_ring {
            for gy in cy - ring..=cy + ring {
                for gx in cx - ring..=cx + ring {
                    if (gx - cx).abs() != ring && (gy - cy).abs() != ring {
                        continue;
                    }
                    let Some(bucket) = self.buckets.get(&(gx, gy)) else { continue };
                    for &i in bucket {
                        let d2 = (points[i as usize] - q).norm_squared();
                        let i = i as usize;
                        match best {
                            Some((bd, bi)) if d2 > bd || (d2 == bd && i > bi) => {}
                            _ => best = Some((d2, i)),
                        }
                    }
                }
            }
            if let Some((bd, _)) = best {
                // anything in ring + 1 is at least ring * cell away
                let bound = ring as f64 * self.cell;
                if bd.sqrt() < bound {
                    return best.map(|(_, i)| i);
                }
            }
        }
        if exhaustive {
            best.map(|(_, i)| i)
        } else {
            None
        }
    }
}

fn brute_nearest(points: &[Point2], q: &Point2) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, p) in points.iter().enumerate() {
        let d2 = (p - q).norm_squared();
        if best.is_none_or(|(bd, _)| d2 < bd) {
            best = Some((d2, i));
        }
    }
    best.map(|(_, i)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Point2> = (0..500).map(|_| Point2::new(rng.random_range(0.0..100.0), rng.random_range(0.0..40.0))).collect();
        let grid = PointGrid::new(&pts, 3.0);
        let mut out = Vec::new();
        for _ in 0..200 {
            let q = Point2::new(rng.random_range(-20.0..120.0), rng.random_range(-20.0..60.0));
            let brute = (0..pts.len())
                .min_by(|&a, &b| (pts[a] - q).norm_squared().total_cmp(&(pts[b] - q).norm_squared()).then(a.cmp(&b)))
                .unwrap();
            assert_eq!(grid.nearest(&pts, &q), Some(brute));
            grid.within(&pts, &q, 7.5, &mut out);
            let expect: Vec<usize> = (0..pts.len()).filter(|&i| (pts[i] - q).norm() <= 7.5).collect();
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn ties_pick_lowest_index() {
        let pts = vec![Point2::new(2.0, 0.0), Point2::new(0.0, 2.0), Point2::new(-2.0, 0.0)];
        let grid = PointGrid::new(&pts, 0.5);
        assert_eq!(grid.nearest(&pts, &Point2::origin()), Some(0));
    }
}
