use browfiber::geom::Point3;
use browfiber::mesh::box_mesh;
use browfiber::TriMesh;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_squared_p(mesh: &TriMesh, count: usize, seed: u64, region_only: bool) -> f64 {
    let samples = mesh.sample_surface_with_triangles(count, region_only, seed).unwrap();
    let tris: Vec<usize> = (0..mesh.triangles().len()).filter(|&t| !region_only || mesh.in_region(t)).collect();
    let total: f64 = tris.iter().map(|&t| mesh.triangle_area(t)).sum();
    let mut observed = vec![0usize; mesh.triangles().len()];
    for (_, t) in &samples {
        observed[*t] += 1;
    }
    let chi2: f64 = tris
        .iter()
        .map(|&t| {
            let e = mesh.triangle_area(t) / total * count as f64;
            (observed[t] as f64 - e).powi(2) / e
        })
        .sum();
    1.0 - ChiSquared::new((tris.len() - 1) as f64).unwrap().cdf(chi2)
}

#[test]
fn samples_follow_triangle_areas() {
    // faces of very different areas
    let mesh = box_mesh(Point3::new(0.0, 0.0, 0.0), Point3::new(4.0, 1.0, 0.25)).unwrap();
    for seed in 0..5 {
        let p = chi_squared_p(&mesh, 20_000, seed, false);
        assert!(p > 0.001, "seed {seed}: p = {p}");
    }
}

#[test]
fn region_samples_stay_in_region_and_follow_areas() {
    let b = box_mesh(Point3::new(0.0, 0.0, 0.0), Point3::new(2.0, 1.0, 0.5)).unwrap();
    let region: Vec<bool> = b.vertices().iter().map(|v| v.z > 0.25).collect();
    let (mesh, _) = TriMesh::with_region(b.vertices().to_vec(), b.triangles().to_vec(), region).unwrap();
    let samples = mesh.sample_surface_with_triangles(10_000, true, 7).unwrap();
    assert!(samples.iter().all(|(p, t)| mesh.in_region(*t) && (p.z - 0.5).abs() < 1e-12));
    assert!(chi_squared_p(&mesh, 10_000, 8, true) > 0.001);
}
