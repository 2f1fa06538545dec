use std::f64::consts::PI;

use crate::geom::Point3;

/// Frequency encoding of a 3D point.
///
/// Output layout: `[x, y, z]` followed, for each octave `k` in `0..num_frequencies`
/// and each axis in `x, y, z` order, by the pair `sin(2^k π c), cos(2^k π c)`.
/// Length is always `3 + 6 * num_frequencies`.
pub fn positional_encoding(p: &Point3, num_frequencies: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 + 6 * num_frequencies);
    out.extend_from_slice(&[p.x, p.y, p.z]);
    for k in 0..num_frequencies {
        let scale = 2f64.powi(k as i32) * PI;
        for c in [p.x, p.y, p.z] {
            let (s, co) = (scale * c).sin_cos();
            out.push(s);
            out.push(co);
        }
    }
    out
}
