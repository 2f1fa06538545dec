//! Subcommands of the `browfiber` binary, callable in-process.
//!
//! Every command writes its artifacts to the paths it is given and reports on
//! the supplied `err` stream: free-form header lines plus one machine-readable
//! line starting with `SUMMARY `.
//!
//! Exit codes: 0 success, 2 unreadable input or bad flags, 3 empty result,
//! 4 invalid ending policy, 5 empty metric input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use browfiber::field::VoxelGridField;
use browfiber::geom::{FiberSet, Point2};
use browfiber::growth::{self, EndingPolicy, GrowthConfig};
use browfiber::io::{self, FormatError};
use browfiber::metrics::{self, EvalConfig};
use browfiber::rootfinder::{self, CenterMode, DensityGenConfig, ExtractConfig};
use browfiber::synthgen::{self, FieldStyle, SynthConfig};
use browfiber::{Error, TriMesh};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_POLICY: i32 = 4;
pub const EXIT_EMPTY_METRIC: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        Self::new(EXIT_INPUT, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn input_err(e: Error) -> CliError {
    CliError::new(EXIT_INPUT, e.to_string())
}

fn out_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(EXIT_INPUT, format!("{}: {e}", path.display()))
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        _ => Err(format!("expected a number in (0, 1], got {s:?}")),
    }
}

fn angle(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 180.0 => Ok(v),
        _ => Err(format!("expected an angle in (0, 180) degrees, got {s:?}")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "browfiber", version, about = "Fiber-level eyebrow reconstruction toolkit")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub threads: Option<u64>,
    /// Seed for every random choice [default: 0; synth: the config's seed]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density map + camera + mesh -> 3D roots
    ExtractRoots(ExtractArgs),
    /// Roots + orientation field -> fibers
    Grow(GrowArgs),
    /// Compare predicted fibers with ground truth
    Evaluate(EvaluateArgs),
    /// Write a synthetic case directory
    Synth(SynthArgs),
    /// Sweep fibers into an OBJ tube mesh
    ExportObj(ExportArgs),
    /// Projected roots -> ground-truth density map
    DensityFromRoots(DensityArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub density: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    /// Head mesh (OBJ); `<stem>.mask` next to it is used unless --mask is given
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Candidate threshold relative to the map maximum
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub tau: f64,
    /// DBSCAN radius in pixels
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    pub eps: f64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_pts: u64,
    /// Surface samples used for lifting
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..=50_000_000))]
    pub samples: u64,
    /// K-Means restarts; the lowest objective wins
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=1000))]
    pub restarts: u64,
    /// Place centers per DBSCAN cluster instead of one global K-Means
    #[arg(long)]
    pub per_cluster: bool,
    /// Weight K-Means candidates by density
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GrowArgs {
    #[arg(long)]
    pub roots: PathBuf,
    #[arg(long)]
    pub field: PathBuf,
    /// mean-length[:LEN] | mesh:PATH | max-steps:N | table:PATH
    #[arg(long, default_value = "mean-length")]
    pub ender: String,
    #[arg(long, default_value_t = browfiber::DEFAULT_STEP, value_parser = positive)]
    pub step: f64,
    /// Smoothing threshold in degrees
    #[arg(long, default_value_t = 30.0, value_parser = angle)]
    pub theta: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..=100_000))]
    pub max_steps: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.04,0.02,0.01", value_parser = positive)]
    pub phi: Vec<f64>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..=10_000))]
    pub fdo_n: u64,
    #[arg(long, default_value_t = metrics::DEFAULT_RADIUS, value_parser = positive)]
    pub radius: f64,
    /// Voxels per unit length
    #[arg(long, default_value_t = metrics::DEFAULT_GRID_RES, value_parser = positive)]
    pub grid_res: f64,
    /// Growth step used to quantize lengths
    #[arg(long, default_value_t = browfiber::DEFAULT_STEP, value_parser = positive)]
    pub step: f64,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// JSON config; inline flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10_000))]
    pub root_count: Option<u64>,
    /// constant | arc-tangent | swirl
    #[arg(long)]
    pub field_style: Option<FieldStyle>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub fibers: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = metrics::DEFAULT_RADIUS, value_parser = positive)]
    pub radius: f64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(3..=256))]
    pub sides: u64,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub roots: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=65_536))]
    pub w: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=65_536))]
    pub h: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub knn_k: u64,
    #[arg(long, default_value_t = 0.3, value_parser = positive)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub sigma_max: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs a parsed command line, honoring `--threads`.
pub fn run(cli: &Cli, err: &mut (dyn Write + Send)) -> CliResult<()> {
    let seed = cli.seed.unwrap_or(0);
    let go = |err: &mut dyn Write| match &cli.command {
        Command::ExtractRoots(a) => cmd_extract_roots(a, seed, err).map(|_| ()),
        Command::Grow(a) => cmd_grow(a, err).map(|_| ()),
        Command::Evaluate(a) => cmd_evaluate(a, err).map(|_| ()),
        Command::Synth(a) => cmd_synth(a, cli.seed, err),
        Command::ExportObj(a) => cmd_export_obj(a, err),
        Command::DensityFromRoots(a) => cmd_density_from_roots(a, err),
    };
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n as usize)
                .build()
                .map_err(|e| CliError::new(EXIT_INPUT, format!("cannot start {n} threads: {e}")))?;
            pool.install(|| go(&mut *err))
        }
        None => go(&mut *err),
    }
}

fn summary(err: &mut dyn Write, line: &str) {
    // diagnostics are best-effort; a closed stderr must not fail the command
    let _ = writeln!(err, "SUMMARY {line}");
}

fn note(err: &mut dyn Write, line: &str) {
    let _ = writeln!(err, "{line}");
}

fn load_mesh(mesh: &Path, mask: Option<&Path>) -> CliResult<TriMesh> {
    let loaded = match mask {
        None => io::load_obj(mesh)?,
        Some(m) => {
            let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", p.display())));
            io::parse_obj(&read(mesh)?, Some(&read(m)?)).map_err(|e| e.in_file(mesh))?
        }
    };
    Ok(loaded.mesh)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOutcome {
    pub roots: browfiber::RootSet,
    pub roots_2d: Vec<Point2>,
    pub cluster_count: usize,
}

pub fn cmd_extract_roots(a: &ExtractArgs, seed: u64, err: &mut dyn Write) -> CliResult<ExtractOutcome> {
    let map = io::read_dmap(&a.density)?;
    let camera = io::read_camera(&a.camera)?;
    let mesh = load_mesh(&a.mesh, a.mask.as_deref())?;
    let cfg = ExtractConfig {
        tau_rel: a.tau,
        eps: a.eps,
        min_pts: a.min_pts as usize,
        seed,
        restarts: a.restarts as usize,
        mode: if a.per_cluster { CenterMode::PerCluster } else { CenterMode::GlobalKMeans },
        weighted: a.weighted,
        ..Default::default()
    };
    note(err, &format!("extract-roots: tau={} eps={} min_pts={} samples={} restarts={} seed={seed}", a.tau, a.eps, a.min_pts, a.samples, a.restarts));
    let ext = rootfinder::extract_roots_2d(&map, &cfg).map_err(input_err)?;
    if ext.roots.is_empty() {
        summary(err, &format!("extract-roots clusters=0 roots=0 candidates={}", ext.candidate_count));
        return Err(CliError::new(EXIT_EMPTY, "no clusters"));
    }
    let roots = rootfinder::lift_roots(&ext.roots, &camera, &mesh, a.samples as usize, seed).map_err(input_err)?;
    io::write_roots(&a.out, &roots)?;
    summary(
        err,
        &format!(
            "extract-roots clusters={} roots={} candidates={} noise={}",
            ext.cluster_count,
            roots.len(),
            ext.candidate_count,
            ext.noise_count
        ),
    );
    Ok(ExtractOutcome { roots, roots_2d: ext.roots, cluster_count: ext.cluster_count })
}

/// Parses an `--ender` spec into a policy.
pub fn parse_ender(spec: &str) -> CliResult<Box<dyn EndingPolicy>> {
    let bad = |m: String| CliError::new(EXIT_POLICY, m);
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("mean-length", None) => Ok(Box::new(growth::mean_length_ender(growth::MEAN_FIBER_LENGTH).expect("default is valid"))),
        ("mean-length", Some(v)) => {
            let len = positive(v).map_err(|e| bad(format!("mean-length: {e}")))?;
            Ok(Box::new(growth::mean_length_ender(len).map_err(|e| bad(e.to_string()))?))
        }
        ("max-steps", Some(v)) => {
            let n = v.parse::<usize>().map_err(|_| bad(format!("max-steps: expected a step count, got {v:?}")))?;
            Ok(Box::new(growth::MaxSteps { n }))
        }
        ("mesh", Some(p)) if !p.is_empty() => {
            let mesh = io::load_obj(Path::new(p)).map_err(|e| bad(format!("mesh ender: {e}")))?.mesh;
            Ok(Box::new(growth::mesh_cut_ender(mesh).map_err(|e| bad(format!("mesh ender: {e}")))?))
        }
        ("table", Some(p)) if !p.is_empty() => {
            let text = std::fs::read_to_string(p).map_err(|e| bad(format!("table ender: {p}: {e}")))?;
            let steps = synthgen::parse_levels(&text).map_err(|e| bad(format!("table ender: {p}: {e}")))?;
            Ok(Box::new(growth::length_table_ender(steps)))
        }
        _ => Err(bad(format!("invalid ender spec {spec:?}; expected mean-length[:LEN], mesh:PATH, max-steps:N or table:PATH"))),
    }
}

pub fn cmd_grow(a: &GrowArgs, err: &mut dyn Write) -> CliResult<FiberSet> {
    let roots = io::read_roots(&a.roots)?;
    let field: VoxelGridField = io::read_ofld(&a.field)?;
    let ender = parse_ender(&a.ender)?;
    let cfg = GrowthConfig { step: a.step, theta_deg: a.theta, max_steps: a.max_steps as usize };
    note(err, &format!("grow: step={} theta={} max_steps={} ender={}", cfg.step, cfg.theta_deg, cfg.max_steps, a.ender));
    let out = growth::grow_all(&roots, &field, &ender, &cfg).map_err(|e| match e {
        Error::MissingRoot { .. } => CliError::new(EXIT_POLICY, e.to_string()),
        Error::EmptyRoots => CliError::new(EXIT_EMPTY, e.to_string()),
        other => CliError::new(EXIT_EMPTY, format!("no fiber could be grown: {other}")),
    })?;
    for (i, e) in &out.failures {
        note(err, &format!("warning: root {i} skipped: {e}"));
    }
    io::write_fibers(&a.out, &out.fibers)?;
    let points: usize = out.fibers.fibers.iter().map(|f| f.len()).sum();
    summary(err, &format!("grow fibers={} failed={} points={points}", out.fibers.len(), out.failures.len()));
    Ok(out.fibers)
}

pub fn cmd_evaluate(a: &EvaluateArgs, err: &mut dyn Write) -> CliResult<metrics::MetricsReport> {
    let pred = io::read_fibers(&a.pred, a.step)?;
    let gt = io::read_fibers(&a.gt, a.step)?;
    if pred.is_empty() || gt.is_empty() {
        return Err(CliError::new(EXIT_EMPTY_METRIC, format!("empty fiber set: pred has {}, gt has {}", pred.len(), gt.len())));
    }
    let cfg = EvalConfig { phis: a.phi.clone(), fdo_n: a.fdo_n as usize, radius: a.radius, grid_res: a.grid_res };
    let report = metrics::evaluate(&pred, &gt, &cfg).map_err(|e| match e {
        Error::EmptySet { .. } | Error::BothEmpty | Error::TooShort { .. } => CliError::new(EXIT_EMPTY_METRIC, e.to_string()),
        other => input_err(other),
    })?;
    std::fs::write(&a.report, io::report_to_json(&report)).map_err(|e| out_err(&a.report, e))?;
    let roots: String = report.root_metrics.iter().map(|(phi, n, d)| format!(" nde@{phi}={n} dcd@{phi}={d}")).collect();
    summary(err, &format!("evaluate{roots} mle={} fdo={} iou={}", report.mle, report.fdo, report.iou));
    Ok(report)
}

fn synth_config(a: &SynthArgs, seed: Option<u64>) -> CliResult<SynthConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", p.display())))?
        }
        None => SynthConfig::default(),
    };
    if let Some(n) = a.root_count {
        cfg.root_count = n as usize;
    }
    if let Some(s) = a.field_style {
        cfg.field_style = s;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

pub fn cmd_synth(a: &SynthArgs, seed: Option<u64>, err: &mut dyn Write) -> CliResult<()> {
    let cfg = synth_config(a, seed)?;
    let case = synthgen::gen_case(&cfg).map_err(input_err)?;
    synthgen::write_case_dir(&case, &a.out)?;
    summary(err, &format!("synth roots={} style={} seed={} out={}", case.gt_roots.len(), cfg.field_style, cfg.seed, a.out.display()));
    Ok(())
}

pub fn cmd_export_obj(a: &ExportArgs, err: &mut dyn Write) -> CliResult<()> {
    let fibers = io::read_fibers(&a.fibers, browfiber::DEFAULT_STEP)?;
    if fibers.is_empty() {
        return Err(CliError::new(EXIT_EMPTY_METRIC, "empty fiber set"));
    }
    let mut tubes = Vec::with_capacity(fibers.len());
    let mut skipped = 0;
    for f in &fibers.fibers {
        match browfiber::mesh::tube_mesh(f.points(), a.radius, a.sides as usize) {
            Ok(t) => tubes.push(t),
            Err(_) => skipped += 1,
        }
    }
    let mesh = TriMesh::merge(&tubes);
    io::save_obj(&a.out, &mesh, false)?;
    summary(err, &format!("export-obj tubes={} skipped={skipped} vertices={}", tubes.len(), mesh.vertices().len()));
    Ok(())
}

pub fn cmd_density_from_roots(a: &DensityArgs, err: &mut dyn Write) -> CliResult<()> {
    let roots = io::read_roots(&a.roots)?;
    let camera = io::read_camera(&a.camera)?;
    let cfg = DensityGenConfig {
        knn_k: a.knn_k as usize,
        beta: a.beta,
        sigma_min: a.sigma_min,
        sigma_max: a.sigma_max,
        ..Default::default()
    };
    note(
        err,
        &format!("density-from-roots: knn_k={} beta={} sigma=[{}, {}] size={}x{}", cfg.knn_k, cfg.beta, cfg.sigma_min, cfg.sigma_max, a.w, a.h),
    );
    let mut uv = Vec::with_capacity(roots.len());
    for (i, r) in roots.iter().enumerate() {
        if !camera.sees(r) {
            return Err(CliError::new(EXIT_INPUT, format!("root {i} lies behind the camera")));
        }
        uv.push(camera.project(r).map_err(|e| CliError::new(EXIT_INPUT, format!("root {i}: {e}")))?);
    }
    let map = rootfinder::density_from_roots(&uv, a.w as usize, a.h as usize, &cfg).map_err(input_err)?;
    io::write_dmap(&a.out, &map)?;
    summary(err, &format!("density-from-roots roots={} mass={:.6} max={}", roots.len(), map.total(), map.max()));
    Ok(())
}
