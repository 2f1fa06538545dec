//! Deterministic synthetic eyebrows for round-trip testing.
//!
//! A case is a curved brow band (triangle mesh with a masked root region), a
//! perspective camera jittered around a frontal pose, roots spread over the
//! band with a minimum pixel separation, an analytic orientation field sampled
//! into a voxel grid, per-root length levels drawn from an empirical
//! multinomial, and the fibers grown from all of that.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64`, with one derived stream
//! per purpose so that changing, say, the root count does not move the camera.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{axis_rotation, Camera, Projection};
use crate::density::DensityMap;
use crate::error::{Error, Result};
use crate::field::{ArcField, ConstantField, OrientationField, SwirlField, VoxelGridField};
use crate::geom::{segment_segment_distance, Aabb, Fiber, FiberSet, Point2, Point3, RootSet, Vec3};
use crate::growth::{grow_all, length_table_ender, GrowthConfig};
use crate::io::{self, FormatError};
use crate::mesh::{tube_mesh, TriMesh};
use crate::rootfinder::{density_from_roots, DensityGenConfig};

/// Fiber counts per length level (1 through 11, then 12 and above) of the
/// reference eyebrow collection.
pub const LENGTH_LEVEL_COUNTS: [f64; 12] =
    [881.0, 4921.0, 39884.0, 143449.0, 68229.0, 50680.0, 37236.0, 22976.0, 11159.0, 5035.0, 2341.0, 2656.0];

pub const MAX_AZIMUTH_DEG: f64 = 10.0;
pub const MAX_POLAR_DEG: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldStyle {
    Constant,
    ArcTangent,
    Swirl,
}

impl FromStr for FieldStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Self::Constant),
            "arc-tangent" => Ok(Self::ArcTangent),
            "swirl" => Ok(Self::Swirl),
            other => Err(Error::ConfigInvalid(format!("unknown field style {other:?} (constant | arc-tangent | swirl)"))),
        }
    }
}

impl fmt::Display for FieldStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::ArcTangent => "arc-tangent",
            Self::Swirl => "swirl",
        })
    }
}

/// Brow band surface over `s ∈ [-1, 1]`, `t ∈ [0, 1]`:
/// `x = half_width·s`, `y = y0 + thickness·t + bend·(1 − s²)`, `z = z0 − depth·s²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub half_width: f64,
    pub thickness: f64,
    pub bend: f64,
    pub depth: f64,
    pub y0: f64,
    pub z0: f64,
    /// Quads along `s`.
    pub res_s: usize,
    /// Quads along `t` inside the region.
    pub res_t: usize,
    /// Extra unmasked quad rows above and below the region.
    pub margin_rows: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self { half_width: 0.6, thickness: 0.24, bend: 0.05, depth: 0.1, y0: 0.25, z0: 0.0, res_s: 120, res_t: 16, margin_rows: 2 }
    }
}

impl BandConfig {
    pub fn point(&self, s: f64, t: f64) -> Point3 {
        Point3::new(self.half_width * s, self.y0 + self.thickness * t + self.bend * (1.0 - s * s), self.z0 - self.depth * s * s)
    }

    pub fn center(&self) -> Point3 {
        self.point(0.0, 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub root_count: usize,
    pub seed: u64,
    pub field_style: FieldStyle,
    pub band: BandConfig,
    /// Relative frequency of length levels 1, 2, ..., 12.
    pub length_weights: Vec<f64>,
    pub image_width: u32,
    pub image_height: u32,
    pub focal: f64,
    /// Camera-to-band-center distance.
    pub camera_distance: f64,
    pub azimuth_jitter_deg: f64,
    pub polar_jitter_deg: f64,
    /// Minimum pixel distance between projected roots.
    pub min_root_separation: f64,
    /// Minimum pixel distance between projected roots and the image border.
    pub border_margin: f64,
    /// Upper bound on the tube radius of the mesh-cut hull.
    pub hull_radius: f64,
    pub hull_sides: usize,
    pub field_dims: [usize; 3],
    pub step: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            root_count: 50,
            seed: 0,
            field_style: FieldStyle::ArcTangent,
            band: BandConfig::default(),
            length_weights: LENGTH_LEVEL_COUNTS.to_vec(),
            image_width: 1500,
            image_height: 600,
            focal: 2800.0,
            camera_distance: 3.0,
            azimuth_jitter_deg: MAX_AZIMUTH_DEG,
            polar_jitter_deg: MAX_POLAR_DEG,
            min_root_separation: 45.0,
            border_margin: 32.0,
            hull_radius: 0.006,
            hull_sides: 12,
            field_dims: [64, 32, 32],
            step: crate::DEFAULT_STEP,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.root_count < 1 {
            return bad("root_count must be >= 1".into());
        }
        if !(0.0..=MAX_AZIMUTH_DEG).contains(&self.azimuth_jitter_deg) || !(0.0..=MAX_POLAR_DEG).contains(&self.polar_jitter_deg) {
            return bad(format!(
                "jitter ranges must lie within ±{MAX_AZIMUTH_DEG}° azimuth and ±{MAX_POLAR_DEG}° polar, got {} and {}",
                self.azimuth_jitter_deg, self.polar_jitter_deg
            ));
        }
        if self.length_weights.is_empty()
            || self.length_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0))
            || self.length_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("length_weights must be non-negative, finite and not all zero".into());
        }
        let b = &self.band;
        if !(b.half_width > 0.0 && b.thickness > 0.0 && b.res_s >= 1 && b.res_t >= 1) || ![b.bend, b.depth, b.y0, b.z0].iter().all(|v| v.is_finite()) {
            return bad("band needs positive size and resolution".into());
        }
        if self.image_width == 0 || self.image_height == 0 || !(self.focal > 0.0) || !(self.camera_distance > 0.0) {
            return bad("image size, focal length and camera distance must be positive".into());
        }
        if !(self.min_root_separation >= 0.0 && self.border_margin >= 0.0) {
            return bad("separation and margin must be >= 0".into());
        }
        if !(self.hull_radius > 0.0) || self.hull_sides < 3 {
            return bad("hull needs radius > 0 and >= 3 sides".into());
        }
        if self.field_dims.iter().any(|&d| d < 2) {
            return bad("field grid needs >= 2 nodes per axis".into());
        }
        if !(self.step > 0.0) {
            return bad("step must be > 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCase {
    pub config: SynthConfig,
    /// Brow band with its root region mask.
    pub mesh: TriMesh,
    /// Closed tubes around the fibers; growing inside it with a mesh-cut ender
    /// reproduces the ground-truth lengths.
    pub hull: TriMesh,
    pub camera: Camera,
    pub gt_roots: RootSet,
    /// Projections of `gt_roots`.
    pub gt_roots_2d: Vec<Point2>,
    /// Fibers as grown, `gt_levels[i] + 1` points each.
    pub grown: FiberSet,
    /// `grown` resampled to the standard point count.
    pub gt_fibers: FiberSet,
    pub gt_levels: Vec<usize>,
    pub field: VoxelGridField,
    pub gt_density: DensityMap,
}

fn stream(seed: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose);
    rng
}

/// Band mesh: `res_s × (res_t + 2·margin_rows)` quads, region = rows with `t ∈ [0, 1]`.
pub fn band_mesh(b: &BandConfig) -> Result<TriMesh> {
    let rows = b.res_t + 2 * b.margin_rows;
    let cols = b.res_s;
    let mut vertices = Vec::with_capacity((rows + 1) * (cols + 1));
    let mut region = Vec::with_capacity((rows + 1) * (cols + 1));
    for r in 0..=rows {
        let k = r as i64 - b.margin_rows as i64;
        let t = k as f64 / b.res_t as f64;
        for c in 0..=cols {
            let s = -1.0 + 2.0 * c as f64 / cols as f64;
            vertices.push(b.point(s, t));
            region.push((0..=b.res_t as i64).contains(&k));
        }
    }
    let idx = |r: usize, c: usize| r * (cols + 1) + c;
    let mut triangles = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            triangles.push([idx(r, c), idx(r, c + 1), idx(r + 1, c + 1)]);
            triangles.push([idx(r, c), idx(r + 1, c + 1), idx(r + 1, c)]);
        }
    }
    TriMesh::with_region(vertices, triangles, region).map(|(m, _)| m)
}

/// The analytic field of a style, laid out around the band.
pub fn analytic_field(style: FieldStyle, b: &BandConfig) -> Result<Box<dyn OrientationField>> {
    Ok(match style {
        FieldStyle::Constant => Box::new(ConstantField::new(Vec3::new(1.0, 0.35, 0.3))?),
        FieldStyle::ArcTangent => Box::new(ArcField::new(Point3::new(0.0, b.y0 - 0.7, b.z0), Vec3::z(), 0.3)?),
        FieldStyle::Swirl => Box::new(SwirlField::new(b.center(), Vec3::z(), Vec3::new(1.0, 0.3, 0.35), 0.8)?),
    })
}

/// Frontal camera looking down `-z` at `target` from `distance`.
pub fn base_camera(cfg: &SynthConfig, target: Point3) -> Result<Camera> {
    let proj = Projection::Perspective {
        fx: cfg.focal,
        fy: cfg.focal,
        cx: cfg.image_width as f64 / 2.0,
        cy: cfg.image_height as f64 / 2.0,
    };
    Camera::look_at(target + Vec3::new(0.0, 0.0, cfg.camera_distance), target, Vec3::y(), proj, cfg.image_width, cfg.image_height)
}

/// Moves the camera on the sphere around `target` by `azimuth` (about world
/// `+y`) and `polar` (about the camera's right axis) radians, then re-aims it
/// at `target`. The distance to `target` is preserved.
pub fn orbit_camera(base: &Camera, target: Point3, azimuth: f64, polar: f64) -> Result<Camera> {
    let offset = base.eye() - target;
    let right = base.rotation().row(0).transpose();
    let rotated = axis_rotation(&Vec3::y(), azimuth) * (axis_rotation(&right, polar) * offset);
    base.reaimed(target + rotated, target)
}

/// Uniform azimuth in `±10°` and polar angle in `±15°` around `target`.
pub fn jitter_camera(base: &Camera, target: Point3, seed: u64) -> Result<Camera> {
    jitter_camera_within(base, target, seed, MAX_AZIMUTH_DEG, MAX_POLAR_DEG)
}

pub fn jitter_camera_within(base: &Camera, target: Point3, seed: u64, azimuth_deg: f64, polar_deg: f64) -> Result<Camera> {
    let (az, pol) = jitter_angles(seed, azimuth_deg, polar_deg);
    orbit_camera(base, target, az, pol)
}

/// The `(azimuth, polar)` pair, in radians, that [`jitter_camera_within`] applies for `seed`.
pub fn jitter_angles(seed: u64, azimuth_deg: f64, polar_deg: f64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.random::<f64>() * 2.0 - 1.0;
    let p = rng.random::<f64>() * 2.0 - 1.0;
    ((a * azimuth_deg).to_radians(), (p * polar_deg).to_radians())
}

/// Draws `count` levels (1-based) with probabilities proportional to `weights`.
pub fn draw_levels(weights: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    (0..count)
        .map(|_| {
            let mut x = rng.random::<f64>() * total;
            for (k, &w) in weights.iter().enumerate() {
                if x < w {
                    return k + 1;
                }
                x -= w;
            }
            weights.iter().rposition(|&w| w > 0.0).unwrap_or(0) + 1
        })
        .collect()
}

/// Picks region surface points whose projections keep `min_sep` pixels apart and
/// `margin` pixels from the image border, in random order.
fn place_roots(cfg: &SynthConfig, mesh: &TriMesh, camera: &Camera) -> Result<(Vec<Point3>, Vec<Point2>)> {
    let candidates = mesh.sample_surface(200_000.max(cfg.root_count * 2000), true, cfg.seed ^ 0x526f_6f74)?;
    let mut roots = Vec::with_capacity(cfg.root_count);
    let mut pixels: Vec<Point2> = Vec::with_capacity(cfg.root_count);
    let (w, h) = (camera.width() as f64, camera.height() as f64);
    for c in candidates {
        if !camera.sees(&c) {
            continue;
        }
        let Ok(uv) = camera.project(&c) else { continue };
        let m = cfg.border_margin;
        if uv.x < m || uv.y < m || uv.x > w - m || uv.y > h - m {
            continue;
        }
        if pixels.iter().any(|q| (q - uv).norm() < cfg.min_root_separation) {
            continue;
        }
        roots.push(c);
        pixels.push(uv);
        if roots.len() == cfg.root_count {
            return Ok((roots, pixels));
        }
    }
    Err(Error::ConfigInvalid(format!(
        "only {} of {} roots fit on the band with {} px separation",
        roots.len(),
        cfg.root_count,
        cfg.min_root_separation
    )))
}

/// Polyline the hull tube of a fiber follows: half a step before the root,
/// the fiber up to its second-to-last point, half a step past that.
fn hull_path(fiber: &Fiber, step: f64) -> Vec<Point3> {
    let p = fiber.points();
    let n = p.len();
    let d0 = (p[1] - p[0]).normalize();
    let dl = (p[n - 1] - p[n - 2]).normalize();
    let mut path = Vec::with_capacity(n + 1);
    path.push(p[0] - d0 * (0.5 * step));
    path.extend_from_slice(&p[..n - 1]);
    path.push(p[n - 2] + dl * (0.5 * step));
    path
}

fn min_path_distance(paths: &[Vec<Point3>]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in paths.iter().enumerate() {
        let ba = Aabb::from_points(a).expect("non-empty path");
        for b in &paths[i + 1..] {
            let bb = Aabb::from_points(b).expect("non-empty path");
            let gap = (0..3).map(|k| (bb.min[k] - ba.max[k]).max(ba.min[k] - bb.max[k]).max(0.0)).fold(0.0, f64::max);
            if gap >= best {
                continue;
            }
            for sa in a.windows(2) {
                for sb in b.windows(2) {
                    best = best.min(segment_segment_distance(&sa[0], &sa[1], &sb[0], &sb[1]));
                }
            }
        }
    }
    best
}

/// Disjoint closed tubes around every fiber. Returns the hull and the tube radius.
pub fn fiber_hull(fibers: &FiberSet, max_radius: f64, sides: usize) -> Result<(TriMesh, f64)> {
    if fibers.fibers.iter().any(|f| f.len() < 2) {
        return Err(Error::TooShort { points: 1 });
    }
    let paths: Vec<Vec<Point3>> = fibers.fibers.iter().map(|f| hull_path(f, fibers.step)).collect();
    let radius = max_radius.min(0.45 * min_path_distance(&paths));
    if !(radius > 0.0) {
        return Err(Error::InvalidGeometry("fibers touch; no disjoint hull exists".into()));
    }
    let tubes = paths.iter().map(|p| tube_mesh(p, radius, sides)).collect::<Result<Vec<_>>>()?;
    Ok((TriMesh::merge(&tubes), radius))
}

pub fn gen_case(cfg: &SynthConfig) -> Result<SynthCase> {
    cfg.validate()?;
    let mesh = band_mesh(&cfg.band)?;
    let target = cfg.band.center();
    let camera = jitter_camera_within(
        &base_camera(cfg, target)?,
        target,
        cfg.seed ^ 0x4361_6d65,
        cfg.azimuth_jitter_deg,
        cfg.polar_jitter_deg,
    )?;

    let (roots, roots_2d) = place_roots(cfg, &mesh, &camera)?;
    let gt_roots = RootSet::new(roots);
    let gt_levels = draw_levels(&cfg.length_weights, cfg.root_count, &mut stream(cfg.seed, 1));

    let analytic = analytic_field(cfg.field_style, &cfg.band)?;
    let bounds = mesh.bounds().expect("band has vertices").expanded(0.3);
    let f32s = |p: Point3| [p.x as f32, p.y as f32, p.z as f32];
    let field = VoxelGridField::sample(analytic.as_ref(), cfg.field_dims, f32s(bounds.min), f32s(bounds.max))?;

    let growth = GrowthConfig { step: cfg.step, ..Default::default() };
    let outcome = grow_all(&gt_roots, &field, &length_table_ender(gt_levels.clone()), &growth)?;
    if let Some((i, e)) = outcome.failures.first() {
        return Err(Error::InvalidGeometry(format!("root {i} failed to grow: {e}")));
    }
    let grown = outcome.fibers;
    for (i, (f, &l)) in grown.fibers.iter().zip(&gt_levels).enumerate() {
        if f.len() != l + 1 {
            return Err(Error::InvalidGeometry(format!("fiber {i} left the field after {} of {l} steps", f.len() - 1)));
        }
    }
    let gt_fibers = FiberSet::new(
        grown.fibers.iter().map(|f| f.resample(crate::FIBER_POINT_COUNT)).collect::<Result<Vec<_>>>()?,
        cfg.step,
    );
    let (hull, _) = fiber_hull(&grown, cfg.hull_radius, cfg.hull_sides)?;
    let gt_density = density_from_roots(
        &roots_2d,
        cfg.image_width as usize,
        cfg.image_height as usize,
        &DensityGenConfig::default(),
    )?;

    Ok(SynthCase { config: cfg.clone(), mesh, hull, camera, gt_roots, gt_roots_2d: roots_2d, grown, gt_fibers, gt_levels, field, gt_density })
}

/// Prefix labels for an ending classifier: every proper prefix is `1`
/// (continue), the full fiber is `0` (stop). Entries are `(prefix length, label)`.
pub fn label_subsequences(f: &Fiber) -> Result<Vec<(usize, u8)>> {
    if f.len() < 2 {
        return Err(Error::TooShort { points: f.len() });
    }
    let n = f.len();
    Ok((1..=n).map(|k| (k, u8::from(k < n))).collect())
}

/// Per-pixel 2D unit directions, `None` where no fiber passes.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationMap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Option<[f32; 2]>>,
}

impl OrientationMap {
    pub fn get(&self, x: usize, y: usize) -> Option<[f32; 2]> {
        self.pixels[y * self.width + x]
    }
}

/// Paints every projected fiber segment with its 2D direction; later fibers
/// overwrite earlier ones.
pub fn rasterize_orientation_map(fs: &FiberSet, camera: &Camera, width: usize, height: usize) -> OrientationMap {
    let mut pixels = vec![None; width * height];
    for f in &fs.fibers {
        for seg in f.points().windows(2) {
            let (Ok(a), Ok(b)) = (camera.project(&seg[0]), camera.project(&seg[1])) else { continue };
            if !(camera.sees(&seg[0]) && camera.sees(&seg[1])) {
                continue;
            }
            let d = b - a;
            let len = d.norm();
            if !(len > 0.0) || !len.is_finite() {
                continue;
            }
            let dir = [(d.x / len) as f32, (d.y / len) as f32];
            let n = (len * 2.0).ceil() as usize + 1;
            for k in 0..=n {
                let p = a + d * (k as f64 / n as f64);
                if p.x >= 0.0 && p.y >= 0.0 && p.x < width as f64 && p.y < height as f64 {
                    pixels[p.y as usize * width + p.x as usize] = Some(dir);
                }
            }
        }
    }
    OrientationMap { width, height, pixels }
}

/// Writes every artifact of a case into `dir` (created if needed).
pub fn write_case_dir(case: &SynthCase, dir: &Path) -> std::result::Result<(), FormatError> {
    std::fs::create_dir_all(dir).map_err(|e| FormatError::Io { path: dir.to_path_buf(), message: e.to_string() })?;
    io::save_obj(&dir.join("mesh.obj"), &case.mesh, true)?;
    io::save_obj(&dir.join("hull.obj"), &case.hull, false)?;
    io::write_camera(&dir.join("camera.json"), &case.camera)?;
    io::write_roots(&dir.join("roots.fib"), &case.gt_roots)?;
    io::write_fibers(&dir.join("fibers.fib"), &case.gt_fibers)?;
    io::write_ofld(&dir.join("field.ofld"), &case.field)?;
    io::write_dmap(&dir.join("density.dmap"), &case.gt_density)?;
    let levels: String = case.gt_levels.iter().map(|l| format!("{l}\n")).collect();
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| FormatError::Io { path: p, message: e.to_string() })
    };
    write("levels.txt", &levels)?;
    write("config.json", &(serde_json::to_string_pretty(&case.config).expect("config serializes") + "\n"))?;
    Ok(())
}

/// Parses a `levels.txt` document: one non-negative integer per line.
pub fn parse_levels(text: &str) -> std::result::Result<Vec<usize>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| FormatError::SchemaError { location: format!("line {}", i + 1), message: format!("expected a step count, found {l:?}") })
        })
        .collect()
}
