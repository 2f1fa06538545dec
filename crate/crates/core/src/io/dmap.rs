use std::path::Path;

use super::{read_bytes, write_all, ByteReader, FormatError, FormatResult};
use crate::density::DensityMap;

pub const DMAP_MAGIC: &str = "DMAP";
pub const DMAP_VERSION: u16 = 1;
const HEADER_LEN: usize = 14;

pub fn encode_dmap(map: &DensityMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * map.values().len());
    out.extend_from_slice(DMAP_MAGIC.as_bytes());
    out.extend_from_slice(&DMAP_VERSION.to_le_bytes());
    out.extend_from_slice(&(map.width() as u32).to_le_bytes());
    out.extend_from_slice(&(map.height() as u32).to_le_bytes());
    for v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_dmap(data: &[u8]) -> FormatResult<DensityMap> {
    let mut r = ByteReader::new(data);
    r.magic(DMAP_MAGIC)?;
    let version = r.u16("version")?;
    if version != DMAP_VERSION {
        return Err(FormatError::UnsupportedVersion { version });
    }
    let w = r.u32("width")?;
    let h = r.u32("height")?;
    if w == 0 || h == 0 {
        return Err(FormatError::schema("byte 6", format!("image size {w}x{h} must be positive")));
    }
    r.expect_payload(4 * w as u128 * h as u128, "density values")?;
    let n = w as usize * h as usize;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let v = r.f32("density value")?;
        if !v.is_finite() || v < 0.0 {
            return Err(FormatError::NonFinite { location: format!("byte {} (pixel {i})", HEADER_LEN + 4 * i) });
        }
        values.push(v);
    }
    DensityMap::new(w as usize, h as usize, values).map_err(|e| FormatError::schema("payload", e.to_string()))
}

pub fn read_dmap(path: &Path) -> FormatResult<DensityMap> {
    decode_dmap(&read_bytes(path)?).map_err(|e| e.in_file(path))
}

pub fn write_dmap(path: &Path, map: &DensityMap) -> FormatResult<()> {
    write_all(path, &encode_dmap(map))
}
