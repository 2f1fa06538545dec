//! Triangle meshes: validation, area-weighted surface sampling, tube sweeping
//! and point containment for closed meshes.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3, Vec3};

/// Triangles whose doubled area falls below this fraction of their squared
/// longest edge are treated as degenerate.
const DEGENERATE_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    /// Per-vertex brow-bone region flag.
    region: Vec<bool>,
}

impl TriMesh {
    /// Builds a mesh with every vertex in the region, dropping degenerate triangles.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        Self::with_region(vertices, triangles, vec![true; n]).map(|(m, _)| m)
    }

    /// Builds a mesh with an explicit region mask. Returns the mesh and the
    /// number of degenerate triangles dropped.
    pub fn with_region(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>, region: Vec<bool>) -> Result<(Self, usize)> {
        if region.len() != vertices.len() {
            return Err(Error::DimensionMismatch {
                left: format!("{} vertices", vertices.len()),
                right: format!("{} mask entries", region.len()),
            });
        }
        if let Some(i) = vertices.iter().position(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidGeometry(format!("vertex {i} is not finite")));
        }
        let mut kept = Vec::with_capacity(triangles.len());
        let mut dropped = 0;
        for (t, tri) in triangles.into_iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidGeometry(format!("triangle {t} references vertex {bad} of {}", vertices.len())));
            }
            if is_degenerate(&vertices, &tri) {
                dropped += 1;
            } else {
                kept.push(tri);
            }
        }
        Ok((Self { vertices, triangles: kept, region }, dropped))
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn region(&self) -> &[bool] {
        &self.region
    }

    pub fn corners(&self, t: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// A triangle belongs to the region when all three of its vertices do.
    pub fn in_region(&self, t: usize) -> bool {
        self.triangles[t].iter().all(|&v| self.region[v])
    }

    pub fn bounds(&self) -> Option<Aabb> {
        Aabb::from_points(&self.vertices)
    }

    /// Number of undirected edges not shared by exactly two triangles.
    pub fn boundary_edge_count(&self) -> usize {
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges.values().filter(|&&c| c != 2).count()
    }

    pub fn is_watertight(&self) -> bool {
        !self.triangles.is_empty() && self.boundary_edge_count() == 0
    }

    /// Concatenates meshes, offsetting indices.
    pub fn merge(parts: &[TriMesh]) -> TriMesh {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut region = Vec::new();
        for m in parts {
            let off = vertices.len();
            vertices.extend_from_slice(&m.vertices);
            region.extend_from_slice(&m.region);
            triangles.extend(m.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        }
        TriMesh { vertices, triangles, region }
    }

    /// Area-weighted uniform samples on the surface (or on the region only).
    /// Deterministic for a fixed seed.
    pub fn sample_surface(&self, count: usize, region_only: bool, seed: u64) -> Result<Vec<Point3>> {
        Ok(self.sample_surface_with_triangles(count, region_only, seed)?.into_iter().map(|(p, _)| p).collect())
    }

    /// Like [`TriMesh::sample_surface`], also reporting the source triangle of each sample.
    pub fn sample_surface_with_triangles(&self, count: usize, region_only: bool, seed: u64) -> Result<Vec<(Point3, usize)>> {
        let mut tris = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for t in 0..self.triangles.len() {
            if region_only && !self.in_region(t) {
                continue;
            }
            total += self.triangle_area(t);
            tris.push(t);
            cumulative.push(total);
        }
        if tris.is_empty() || total <= 0.0 {
            return Err(Error::EmptyRegion);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let x = rng.random::<f64>() * total;
            let slot = cumulative.partition_point(|&c| c <= x).min(tris.len() - 1);
            let t = tris[slot];
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let s = r1.sqrt();
            let [a, b, c] = self.corners(t);
            let p = a.coords * (1.0 - s) + b.coords * (s * (1.0 - r2)) + c.coords * (s * r2);
            out.push((Point3::from(p), t));
        }
        Ok(out)
    }
}

fn is_degenerate(vertices: &[Point3], tri: &[usize; 3]) -> bool {
    let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    let doubled = (b - a).cross(&(c - a)).norm();
    let longest = (b - a).norm_squared().max((c - b).norm_squared()).max((a - c).norm_squared());
    doubled <= DEGENERATE_RATIO * longest || longest == 0.0
}

/// Barycentric coordinates of the point of triangle `abc` closest to `p`'s
/// projection onto its plane, and that projection's distance to the plane.
pub fn barycentric(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> ([f64; 3], f64) {
    let n = (b - a).cross(&(c - a));
    let area2 = n.norm_squared();
    let nu = n / area2.sqrt();
    let plane_dist = (p - a).dot(&nu);
    let q = p - nu * plane_dist;
    let wa = (b - q).cross(&(c - q)).dot(&n) / area2;
    let wb = (c - q).cross(&(a - q)).dot(&n) / area2;
    ([wa, wb, 1.0 - wa - wb], plane_dist.abs())
}

/// Whether `p` lies on triangle `abc` within `tol`.
pub fn on_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3, tol: f64) -> bool {
    let (w, d) = barycentric(p, a, b, c);
    d <= tol && w.iter().all(|&x| x >= -tol)
}

/// Closed prism tube swept along a polyline with `sides`-gon cross-sections and flat caps.
///
/// Ring `i` surrounds `points[i]`; vertices are emitted ring by ring, `sides`
/// per ring. Frames are parallel-transported from the first segment.
pub fn tube_mesh(points: &[Point3], radius: f64, sides: usize) -> Result<TriMesh> {
    if points.len() < 2 {
        return Err(Error::TooShort { points: points.len() });
    }
    if sides < 3 || !(radius > 0.0) {
        return Err(Error::ConfigInvalid(format!("tube needs sides >= 3 and radius > 0 (got {sides}, {radius})")));
    }
    let seg_dirs: Vec<Vec3> = points
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d.norm() > 0.0 { d.normalize() } else { Vec3::zeros() }
        })
        .collect();
    let mut tangents = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        let prev = if i > 0 { seg_dirs[i - 1] } else { Vec3::zeros() };
        let next = if i < seg_dirs.len() { seg_dirs[i] } else { Vec3::zeros() };
        let t = prev + next;
        let t = if t.norm() > 1e-12 { t.normalize() } else if next.norm() > 0.0 { next } else { prev };
        if t.norm() == 0.0 {
            return Err(Error::InvalidGeometry("tube polyline has zero length".into()));
        }
        tangents.push(t);
    }
    let seed = if tangents[0].x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let mut normal = (seed - tangents[0] * seed.dot(&tangents[0])).normalize();

    let mut vertices = Vec::with_capacity(points.len() * sides);
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            let t = tangents[i];
            let projected = normal - t * normal.dot(&t);
            normal = if projected.norm() > 1e-9 { projected.normalize() } else { normal };
        }
        let binormal = tangents[i].cross(&normal);
        for s in 0..sides {
            let ang = std::f64::consts::TAU * s as f64 / sides as f64;
            vertices.push(p + (normal * ang.cos() + binormal * ang.sin()) * radius);
        }
    }

    let mut triangles = Vec::new();
    for i in 0..points.len() - 1 {
        let (r0, r1) = (i * sides, (i + 1) * sides);
        for s in 0..sides {
            let s1 = (s + 1) % sides;
            triangles.push([r0 + s, r1 + s, r1 + s1]);
            triangles.push([r0 + s, r1 + s1, r0 + s1]);
        }
    }
    let last = (points.len() - 1) * sides;
    for s in 1..sides - 1 {
        triangles.push([0, s + 1, s]);
        triangles.push([last, last + s, last + s + 1]);
    }
    TriMesh::new(vertices, triangles)
}

/// Point-in-solid queries on a closed mesh by ray parity.
///
/// Three fixed, generic ray directions vote; each ray's triangle candidates
/// come from a 2D bucket grid over the triangles projected along that ray.
#[derive(Debug, Clone)]
pub struct Solid {
    mesh: TriMesh,
    casters: Vec<RayCaster>,
}

#[derive(Debug, Clone)]
struct RayCaster {
    dir: Vec3,
    e1: Vec3,
    e2: Vec3,
    origin: [f64; 2],
    cell: [f64; 2],
    res: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

impl Solid {
    pub fn new(mesh: TriMesh) -> Result<Self> {
        if mesh.triangles().is_empty() {
            return Err(Error::NotWatertight { edges: 0 });
        }
        let open = mesh.boundary_edge_count();
        if open > 0 {
            return Err(Error::NotWatertight { edges: open });
        }
        let dirs = [
            Vec3::new(0.5773, 0.6137, 0.5385),
            Vec3::new(-0.3697, 0.8224, -0.4323),
            Vec3::new(0.7093, -0.2413, -0.6646),
        ];
        let casters = dirs.iter().map(|d| RayCaster::build(&mesh, d.normalize())).collect();
        Ok(Self { mesh, casters })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn contains(&self, p: &Point3) -> bool {
        let votes = self.casters.iter().filter(|c| c.crossings(&self.mesh, p) % 2 == 1).count();
        votes >= 2
    }
}

impl RayCaster {
    fn build(mesh: &TriMesh, dir: Vec3) -> Self {
        let helper = if dir.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = dir.cross(&helper).normalize();
        let e2 = dir.cross(&e1);
        let proj: Vec<[f64; 2]> = mesh.vertices().iter().map(|v| [v.coords.dot(&e1), v.coords.dot(&e2)]).collect();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for q in &proj {
            for a in 0..2 {
                lo[a] = lo[a].min(q[a]);
                hi[a] = hi[a].max(q[a]);
            }
        }
        let side = ((mesh.triangles().len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let res = [side, side];
        let cell = [0, 1].map(|a| ((hi[a] - lo[a]) / side as f64).max(1e-12));
        let mut buckets = vec![Vec::new(); side * side];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let mut tlo = [f64::INFINITY; 2];
            let mut thi = [f64::NEG_INFINITY; 2];
            for &v in tri {
                for a in 0..2 {
                    tlo[a] = tlo[a].min(proj[v][a]);
                    thi[a] = thi[a].max(proj[v][a]);
                }
            }
            let c0 = [0, 1].map(|a| (((tlo[a] - lo[a]) / cell[a]).floor().max(0.0) as usize).min(res[a] - 1));
            let c1 = [0, 1].map(|a| (((thi[a] - lo[a]) / cell[a]).floor().max(0.0) as usize).min(res[a] - 1));
            for j in c0[1]..=c1[1] {
                for i in c0[0]..=c1[0] {
                    buckets[j * res[0] + i].push(t as u32);
                }
            }
        }
        Self { dir, e1, e2, origin: lo, cell, res, buckets }
    }

    fn crossings(&self, mesh: &TriMesh, p: &Point3) -> usize {
        let q = [p.coords.dot(&self.e1), p.coords.dot(&self.e2)];
        let mut idx = [0usize; 2];
        for a in 0..2 {
            let f = (q[a] - self.origin[a]) / self.cell[a];
            if f < 0.0 || f > self.res[a] as f64 {
                return 0;
            }
            idx[a] = (f.floor() as usize).min(self.res[a] - 1);
        }
        self.buckets[idx[1] * self.res[0] + idx[0]]
            .iter()
            .filter(|&&t| {
                let [a, b, c] = mesh.corners(t as usize);
                ray_hits_triangle(p, &self.dir, &a, &b, &c)
            })
            .count()
    }
}

/// Möller–Trumbore test for a hit at strictly positive ray parameter.
fn ray_hits_triangle(origin: &Point3, dir: &Vec3, a: &Point3, b: &Point3, c: &Point3) -> bool {
    let e1 = b - a;
    let e2 = c - a;
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-300 {
        return false;
    }
    let inv = 1.0 / det;
    let s = origin - a;
    let u = s.dot(&h) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    e2.dot(&q) * inv > 0.0
}

/// Axis-aligned box as a closed 12-triangle mesh with outward winding.
pub fn box_mesh(min: Point3, max: Point3) -> Result<TriMesh> {
    let v = |x: bool, y: bool, z: bool| {
        Point3::new(if x { max.x } else { min.x }, if y { max.y } else { min.y }, if z { max.z } else { min.z })
    };
    let vertices = vec![
        v(false, false, false),
        v(true, false, false),
        v(true, true, false),
        v(false, true, false),
        v(false, false, true),
        v(true, false, true),
        v(true, true, true),
        v(false, true, true),
    ];
    let triangles = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [3, 7, 6],
        [3, 6, 2],
        [0, 4, 7],
        [0, 7, 3],
        [1, 2, 6],
        [1, 6, 5],
    ];
    TriMesh::new(vertices, triangles)
}
