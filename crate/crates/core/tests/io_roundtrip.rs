use browfiber::field::VoxelGridField;
use browfiber::geom::Point3;
use browfiber::io;
use browfiber::mesh::box_mesh;
use browfiber::{Camera, DensityMap, Projection};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(-0.0), Just(1e-300), Just(f64::MAX)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dmap_round_trips_bit_exactly(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let values: Vec<f32> = (0..w * h).map(|i| ((seed.wrapping_mul(i as u64 + 1) >> 40) as f32) * 1e-3).collect();
        let m = DensityMap::new(w, h, values).unwrap();
        let back = io::decode_dmap(&io::encode_dmap(&m)).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn fib_round_trips(fibers in prop::collection::vec(prop::collection::vec((finite(), finite(), finite()), 1..8), 0..6)) {
        let pts: Vec<Vec<Point3>> = fibers.iter().map(|f| f.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect()).collect();
        let refs: Vec<&[Point3]> = pts.iter().map(|f| f.as_slice()).collect();
        let text = io::format_fib(&refs);
        let back = io::parse_fib(&text).unwrap();
        prop_assert_eq!(back.len(), pts.len());
        for (a, b) in back.iter().zip(&pts) {
            for (p, q) in a.iter().zip(b) {
                // eight fractional digits in scientific notation
                prop_assert!((p - q).amax() <= 1e-8 * q.coords.amax().max(1e-300));
            }
        }
        let again: Vec<&[Point3]> = back.iter().map(|f| f.as_slice()).collect();
        prop_assert_eq!(io::format_fib(&again), text);
    }

    #[test]
    fn ofld_round_trips(nx in 2usize..5, ny in 2usize..5, nz in 2usize..5, s in any::<u32>()) {
        let n = nx * ny * nz;
        let vectors: Vec<[f32; 3]> = (0..n).map(|i| {
            let a = (s as f32 + i as f32) * 0.37;
            [a.cos(), a.sin(), 0.0]
        }).collect();
        let f = VoxelGridField::new([nx, ny, nz], [-1.0, -0.5, 0.0], [1.0, 0.5, 0.25], vectors).unwrap();
        prop_assert_eq!(io::decode_ofld(&io::encode_ofld(&f)).unwrap(), f);
    }

    #[test]
    fn camera_round_trips(ex in -3.0..3.0f64, ey in -3.0..3.0f64, ez in 1.0..5.0f64, f in 100.0..5000.0f64) {
        let proj = Projection::Perspective { fx: f, fy: f, cx: 320.0, cy: 240.0 };
        let cam = Camera::look_at(Point3::new(ex, ey, ez), Point3::new(0.0, 0.0, 0.0), browfiber::Vec3::y(), proj, 640, 480).unwrap();
        prop_assert_eq!(io::camera_from_json(&io::camera_to_json(&cam)).unwrap(), cam);
    }

    #[test]
    fn obj_and_mask_round_trip(x in 0.1..5.0f64, y in 0.1..5.0f64, z in 0.1..5.0f64) {
        let mesh = box_mesh(Point3::new(0.0, 0.0, 0.0), Point3::new(x, y, z)).unwrap();
        let back = io::parse_obj(&io::format_obj(&mesh), Some(&io::format_mask(&mesh))).unwrap();
        prop_assert_eq!(back.mesh, mesh);
        prop_assert_eq!(back.dropped_degenerate, 0);
    }
}

#[test]
fn files_round_trip_through_disk() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = box_mesh(Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 2.0, 3.0)).unwrap();
    let path = tmp.path().join("box.obj");
    io::save_obj(&path, &mesh, true).unwrap();
    assert!(tmp.path().join("box.mask").exists());
    assert_eq!(io::load_obj(&path).unwrap().mesh, mesh);

    let m = DensityMap::new(3, 2, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.5]).unwrap();
    let path = tmp.path().join("d.dmap");
    io::write_dmap(&path, &m).unwrap();
    assert_eq!(io::read_dmap(&path).unwrap(), m);
}

#[test]
fn missing_file_error_names_path() {
    let e = io::read_dmap(std::path::Path::new("/no/such/dir/map.dmap")).unwrap_err();
    assert!(e.to_string().contains("/no/such/dir/map.dmap"), "{e}");
}
