use std::path::Path;

use super::{read_bytes, write_all, ByteReader, FormatError, FormatResult};
use crate::field::VoxelGridField;

pub const OFLD_MAGIC: &str = "OFLD";
pub const OFLD_VERSION: u16 = 1;
const HEADER_LEN: usize = 42;

pub fn encode_ofld(field: &VoxelGridField) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 12 * field.vectors().len());
    out.extend_from_slice(OFLD_MAGIC.as_bytes());
    out.extend_from_slice(&OFLD_VERSION.to_le_bytes());
    for d in field.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for c in field.min().iter().chain(&field.max()) {
        out.extend_from_slice(&c.to_le_bytes());
    }
    for v in field.vectors().iter().flatten() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_ofld(data: &[u8]) -> FormatResult<VoxelGridField> {
    let mut r = ByteReader::new(data);
    r.magic(OFLD_MAGIC)?;
    let version = r.u16("version")?;
    if version != OFLD_VERSION {
        return Err(FormatError::UnsupportedVersion { version });
    }
    let mut dims = [0usize; 3];
    for (a, d) in dims.iter_mut().enumerate() {
        let at = r.pos();
        *d = r.u32("grid dims")? as usize;
        if *d < 2 {
            return Err(FormatError::schema(format!("byte {at}"), format!("axis {a} has {d} nodes, at least 2 required")));
        }
    }
    let mut bbox = [0f32; 6];
    for c in &mut bbox {
        let at = r.pos();
        *c = r.f32("bounding box")?;
        if !c.is_finite() {
            return Err(FormatError::NonFinite { location: format!("byte {at} (bounding box)") });
        }
    }
    let (min, max) = ([bbox[0], bbox[1], bbox[2]], [bbox[3], bbox[4], bbox[5]]);
    for a in 0..3 {
        if min[a] >= max[a] {
            return Err(FormatError::schema("byte 18", format!("bounding box axis {a} is empty: [{}, {}]", min[a], max[a])));
        }
    }
    let nodes = dims.iter().map(|&d| d as u128).product::<u128>();
    r.expect_payload(nodes * 12, "field vectors")?;
    let mut vectors = Vec::with_capacity(nodes as usize);
    for i in 0..nodes as usize {
        let mut v = [0f32; 3];
        for c in &mut v {
            *c = r.f32("field vector")?;
        }
        if !v.iter().all(|c| c.is_finite()) {
            return Err(FormatError::NonFinite { location: format!("byte {} (node {i})", HEADER_LEN + 12 * i) });
        }
        vectors.push(v);
    }
    VoxelGridField::new(dims, min, max, vectors).map_err(|e| FormatError::schema("payload", e.to_string()))
}

pub fn read_ofld(path: &Path) -> FormatResult<VoxelGridField> {
    decode_ofld(&read_bytes(path)?).map_err(|e| e.in_file(path))
}

pub fn write_ofld(path: &Path, field: &VoxelGridField) -> FormatResult<()> {
    write_all(path, &encode_ofld(field))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VoxelGridField {
        let vectors = (0..12).map(|i| [i as f32 * 0.5, 1.0, -0.25 * i as f32]).collect();
        VoxelGridField::new([2, 3, 2], [-1.0, -0.5, 0.0], [1.0, 0.5, 0.25], vectors).unwrap()
    }

    #[test]
    fn round_trip() {
        let f = sample();
        let b = encode_ofld(&f);
        assert_eq!(b.len(), 42 + 12 * 12);
        assert_eq!(&b[6..10], &[2, 0, 0, 0]);
        assert_eq!(decode_ofld(&b).unwrap(), f);
    }

    #[test]
    fn rejects_malformed() {
        let good = encode_ofld(&sample());
        assert!(matches!(decode_ofld(b"DLFO"), Err(FormatError::MagicMismatch { .. })));
        assert!(matches!(decode_ofld(&good[..30]), Err(FormatError::TruncatedPayload { .. })));
        assert!(matches!(decode_ofld(&good[..good.len() - 4]), Err(FormatError::TruncatedPayload { .. })));
        let mut one = good.clone();
        one[6] = 1;
        assert!(matches!(decode_ofld(&one), Err(FormatError::SchemaError { .. })));
        let mut inf = good.clone();
        inf[18..22].copy_from_slice(&f32::INFINITY.to_le_bytes());
        assert!(matches!(decode_ofld(&inf), Err(FormatError::NonFinite { .. })));
        let mut flat = good.clone();
        flat[30..34].copy_from_slice(&(-1.0f32).to_le_bytes());
        assert!(matches!(decode_ofld(&flat), Err(FormatError::SchemaError { .. })));
        let mut nan = good;
        nan[42..46].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode_ofld(&nan), Err(FormatError::NonFinite { .. })));
    }
}
