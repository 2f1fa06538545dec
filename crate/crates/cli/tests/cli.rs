use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use browfiber::geom::Point3;
use browfiber::{io, metrics, DensityMap};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_browfiber"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, roots: usize, seed: u64) -> PathBuf {
    let out = dir.join(format!("case{seed}"));
    let o = run(&["--seed", &seed.to_string(), "synth", "--root-count", &roots.to_string(), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn grow(case: &Path, ender: &str, out: &Path, extra: &[&str]) -> Output {
    let (roots, field) = (case.join("roots.fib"), case.join("field.ofld"));
    let mut args: Vec<&str> = extra.to_vec();
    args.extend(["grow", "--roots", s(&roots), "--field", s(&field), "--ender", ender, "--out", s(out)]);
    run(&args)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn missing_file_is_input_error_naming_path() {
    let tmp = tempfile::tempdir().unwrap();
    let ghost = tmp.path().join("nope.dmap");
    let o = run(&["extract-roots", "--density", s(&ghost), "--camera", "c.json", "--mesh", "m.obj", "--out", "r.fib"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nope.dmap"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_and_out_of_range_values_are_rejected() {
    assert_eq!(code(&run(&["grow", "--bogus"])), 2);
    assert_eq!(code(&run(&["--threads", "0", "synth", "--out", "x"])), 2);
    assert_eq!(code(&run(&["evaluate", "--pred", "a", "--gt", "b", "--report", "r", "--radius", "-1"])), 2);
}

#[test]
fn all_zero_density_reports_no_clusters() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 5, 1);
    let zero = DensityMap::new(1500, 600, vec![0.0; 1500 * 600]).unwrap();
    io::write_dmap(&case.join("density.dmap"), &zero).unwrap();
    let o = run(&[
        "extract-roots",
        "--density",
        s(&case.join("density.dmap")),
        "--camera",
        s(&case.join("camera.json")),
        "--mesh",
        s(&case.join("mesh.obj")),
        "--out",
        s(&tmp.path().join("r.fib")),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("no clusters"));
    assert!(stderr(&o).contains("SUMMARY extract-roots clusters=0"));
}

#[test]
fn extract_recovers_synthetic_roots() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 20, 4);
    let out = tmp.path().join("r.fib");
    let o = run(&[
        "extract-roots",
        "--density",
        s(&case.join("density.dmap")),
        "--camera",
        s(&case.join("camera.json")),
        "--mesh",
        s(&case.join("mesh.obj")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let got = io::read_roots(&out).unwrap();
    let gt = io::read_roots(&case.join("roots.fib")).unwrap();
    assert_eq!(got.len(), gt.len());
    assert!(metrics::dcd(&got.roots, &gt.roots, 0.02).unwrap() <= 0.01);
    assert!(stderr(&o).contains("SUMMARY extract-roots clusters=20 roots=20"), "{}", stderr(&o));
}

#[test]
fn bad_ender_specs_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 6, 2);
    let out = tmp.path().join("f.fib");
    for spec in ["sometimes", "max-steps:many", "mean-length:-1", "mesh:", "table:/definitely/missing.txt"] {
        assert_eq!(code(&grow(&case, spec, &out, &[])), 4, "{spec}");
    }
    let short = tmp.path().join("short.txt");
    fs::write(&short, "3\n4\n").unwrap();
    let o = grow(&case, &format!("table:{}", s(&short)), &out, &[]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn grow_header_echoes_defaults_and_output_is_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 12, 3);
    let (a, b, c) = (tmp.path().join("a.fib"), tmp.path().join("b.fib"), tmp.path().join("c.fib"));
    let o = grow(&case, "mean-length", &a, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("step=0.014 theta=30"), "{}", stderr(&o));
    assert!(stderr(&o).contains("SUMMARY grow"), "{}", stderr(&o));
    assert_eq!(code(&grow(&case, "mean-length", &b, &["--threads", "1"])), 0);
    assert_eq!(code(&grow(&case, "mean-length", &c, &["--threads", "4"])), 0);
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert_eq!(bytes, fs::read(&c).unwrap());
    assert_eq!(io::read_fibers(&a, 0.014).unwrap().len(), 12);
}

#[test]
fn table_ender_reproduces_gt_lengths() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 15, 5);
    let out = tmp.path().join("t.fib");
    let o = grow(&case, &format!("table:{}", s(&case.join("levels.txt"))), &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let levels = browfiber::synthgen::parse_levels(&fs::read_to_string(case.join("levels.txt")).unwrap()).unwrap();
    let fibers = io::read_fibers(&out, 0.014).unwrap();
    for (f, l) in fibers.fibers.iter().zip(levels) {
        assert!(f.len() <= l + 1);
    }
}

#[test]
fn evaluate_identity_symmetry_and_library_agreement() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 10, 6);
    let gt = case.join("fibers.fib");
    let pred = tmp.path().join("p.fib");
    assert_eq!(code(&grow(&case, "mean-length", &pred, &[])), 0);

    let report = |p: &Path, g: &Path, name: &str| -> serde_json::Value {
        let out = tmp.path().join(name);
        let o = run(&["evaluate", "--pred", s(p), "--gt", s(g), "--report", s(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap()
    };
    let same = report(&gt, &gt, "same.json");
    assert_eq!(same["iou"], 1.0);
    for key in ["nde_004", "nde_002", "nde_001", "dcd_004", "dcd_002", "dcd_001", "mle", "fdo"] {
        assert_eq!(same[key], 0.0, "{key}");
    }
    assert_eq!(same["params"]["fdo_n"], 20);

    let fwd = report(&pred, &gt, "fwd.json");
    let bwd = report(&gt, &pred, "bwd.json");
    for key in ["nde_004", "nde_002", "nde_001", "dcd_004", "dcd_002", "dcd_001", "fdo"] {
        assert_eq!(fwd[key], bwd[key], "{key}");
    }

    let lib = metrics::evaluate(&io::read_fibers(&pred, 0.014).unwrap(), &io::read_fibers(&gt, 0.014).unwrap(), &metrics::EvalConfig::default()).unwrap();
    assert_eq!(fs::read_to_string(tmp.path().join("fwd.json")).unwrap(), io::report_to_json(&lib));
}

#[test]
fn empty_fiber_sets_exit_5() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.fib");
    fs::write(&empty, io::format_fib(&[])).unwrap();
    let one = tmp.path().join("one.fib");
    let line = [Point3::new(0.0, 0.0, 0.0), Point3::new(0.014, 0.0, 0.0)];
    fs::write(&one, io::format_fib(&[&line])).unwrap();
    let o = run(&["evaluate", "--pred", s(&empty), "--gt", s(&one), "--report", s(&tmp.path().join("r.json"))]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    let o = run(&["export-obj", "--fibers", s(&empty), "--out", s(&tmp.path().join("e.obj"))]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
}

#[test]
fn synth_reruns_are_byte_identical_and_respect_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = run(&["--seed", "11", "synth", "--root-count", "9", "--field-style", "swirl", "--out", s(d)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(dir_bytes(&a), dir_bytes(&b));
    assert_eq!(io::read_roots(&a.join("roots.fib")).unwrap().len(), 9);
    assert_eq!(code(&run(&["synth", "--field-style", "spiral", "--out", s(&tmp.path().join("c"))])), 2);

    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"root_count": 4, "seed": 3}"#).unwrap();
    let c = tmp.path().join("c");
    assert_eq!(code(&run(&["synth", "--config", s(&cfg), "--out", s(&c)])), 0);
    assert_eq!(io::read_roots(&c.join("roots.fib")).unwrap().len(), 4);
    fs::write(&cfg, r#"{"root_count": 4, "colour": "red"}"#).unwrap();
    assert_eq!(code(&run(&["synth", "--config", s(&cfg), "--out", s(&tmp.path().join("d"))])), 2);
}

#[test]
fn export_obj_vertex_pattern_and_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let fib = tmp.path().join("f.fib");
    let line: Vec<Point3> = (0..5).map(|j| Point3::new(0.014 * j as f64, 0.0, 0.0)).collect();
    fs::write(&fib, io::format_fib(&[&line])).unwrap();
    let out = tmp.path().join("t.obj");
    let o = run(&["export-obj", "--fibers", s(&fib), "--out", s(&out), "--sides", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mesh = io::load_obj(&out).unwrap().mesh;
    let rings = mesh.vertices().len() - mesh.vertices().len() % 6;
    assert_eq!(rings / 6, 5, "{} vertices", mesh.vertices().len());
    assert!(mesh.is_watertight());
}

#[test]
fn density_from_roots_empty_and_single() {
    let tmp = tempfile::tempdir().unwrap();
    let case = synth(tmp.path(), 3, 7);
    let empty = tmp.path().join("empty.fib");
    fs::write(&empty, io::format_fib(&[])).unwrap();
    let out = tmp.path().join("d.dmap");
    let cam = case.join("camera.json");
    let o = run(&["density-from-roots", "--roots", s(&empty), "--camera", s(&cam), "--w", "64", "--h", "32", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("knn_k=3"), "{}", stderr(&o));
    let m = io::read_dmap(&out).unwrap();
    assert_eq!((m.width(), m.height()), (64, 32));
    assert_eq!(m.max(), 0.0);

    let camera = io::read_camera(&cam).unwrap();
    let root = io::read_roots(&case.join("roots.fib")).unwrap().roots[0];
    let one = tmp.path().join("one.fib");
    fs::write(&one, io::format_fib(&[&[root]])).unwrap();
    let o = run(&["density-from-roots", "--roots", s(&one), "--camera", s(&cam), "--w", "1500", "--h", "600", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = io::read_dmap(&out).unwrap();
    let uv = camera.project(&root).unwrap();
    let (mut best, mut at) = (f32::MIN, (0, 0));
    for y in 0..m.height() {
        for x in 0..m.width() {
            if m.get(x, y) > best {
                best = m.get(x, y);
                at = (x, y);
            }
        }
    }
    assert_eq!(at, (uv.x.floor() as usize, uv.y.floor() as usize));
}
