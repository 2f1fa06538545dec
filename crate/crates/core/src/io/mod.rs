//! Readers and writers for every on-disk artifact.
//!
//! | extension | content | encoding |
//! |-----------|---------|----------|
//! | `.dmap` | [`DensityMap`] | binary, little-endian |
//! | `.ofld` | [`VoxelGridField`] | binary, little-endian |
//! | `.fib` | fibers; roots are 1-point fibers | text |
//! | `.json` | [`Camera`], metrics report | JSON |
//! | `.obj` (+ `.mask`) | [`TriMesh`] | Wavefront subset |
//!
//! Parsers take bytes or text and never trust declared sizes before checking
//! them against the input length. Byte layouts are documented in `docs/formats.md`.

mod camera;
mod dmap;
mod fib;
mod obj;
mod ofld;
mod report;

pub use camera::{camera_from_json, camera_to_json, read_camera, write_camera};
pub use dmap::{decode_dmap, encode_dmap, read_dmap, write_dmap, DMAP_MAGIC, DMAP_VERSION};
pub use fib::{format_fib, parse_fib, read_fibers, read_roots, write_fibers, write_roots};
pub use obj::{format_mask, format_obj, load_obj, parse_obj, save_obj, ObjMesh};
pub use ofld::{decode_ofld, encode_ofld, read_ofld, write_ofld, OFLD_MAGIC, OFLD_VERSION};
pub use report::report_to_json;

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("bad magic at byte 0: expected {expected:?}, found {found:?}")]
    MagicMismatch { expected: &'static str, found: Vec<u8> },
    #[error("unsupported version {version} at byte 4")]
    UnsupportedVersion { version: u16 },
    #[error("truncated input at byte {offset}: {what} needs {needed} bytes, {available} available")]
    TruncatedPayload { offset: usize, what: &'static str, needed: u64, available: u64 },
    #[error("{location}: expected {expected} {what}, found {found}")]
    CountMismatch { location: String, what: &'static str, expected: String, found: String },
    #[error("{location}: non-finite or out-of-range value")]
    NonFinite { location: String },
    #[error("{location}: {message}")]
    SchemaError { location: String, message: String },
    #[error("line {line}: unsupported directive {directive:?}")]
    UnsupportedDirective { line: usize, directive: String },
    #[error("line {line}: vertex index {index} out of range (1..={count} or negative)")]
    IndexOutOfRange { line: usize, index: i64, count: usize },
    #[error("{path}: {source}")]
    Geometry { path: String, source: crate::Error },
}

impl FormatError {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::SchemaError { location: location.into(), message: message.into() }
    }

    /// Prefixes the error's location with a file path, where the variant has one.
    pub fn in_file(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            Self::CountMismatch { location, what, expected, found } => {
                Self::CountMismatch { location: format!("{p}: {location}"), what, expected, found }
            }
            Self::NonFinite { location } => Self::NonFinite { location: format!("{p}: {location}") },
            Self::SchemaError { location, message } => Self::SchemaError { location: format!("{p}: {location}"), message },
            Self::Geometry { source, .. } => Self::Geometry { path: p.to_string(), source },
            other => other,
        }
    }
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

pub(crate) fn read_bytes(path: &Path) -> FormatResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| FormatError::Io { path: path.to_path_buf(), message: e.to_string() })
}

pub(crate) fn read_text(path: &Path) -> FormatResult<String> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|e| FormatError::schema(path.display().to_string(), format!("not UTF-8: {e}")))
}

pub(crate) fn write_all(path: &Path, data: &[u8]) -> FormatResult<()> {
    std::fs::write(path, data).map_err(|e| FormatError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Little-endian cursor over a byte slice that reports offsets in its errors.
pub(crate) struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize, what: &'static str) -> FormatResult<&'a [u8]> {
        if self.remaining() < n {
            return Err(FormatError::TruncatedPayload {
                offset: self.pos,
                what,
                needed: n as u64,
                available: self.remaining() as u64,
            });
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn magic(&mut self, expected: &'static str) -> FormatResult<()> {
        let got = self.take(4, "magic")?;
        if got != expected.as_bytes() {
            return Err(FormatError::MagicMismatch { expected, found: got.to_vec() });
        }
        Ok(())
    }

    pub(crate) fn u16(&mut self, what: &'static str) -> FormatResult<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    pub(crate) fn u32(&mut self, what: &'static str) -> FormatResult<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn f32(&mut self, what: &'static str) -> FormatResult<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    /// Checks that exactly `needed` bytes remain for a payload.
    pub(crate) fn expect_payload(&self, needed: u128, what: &'static str) -> FormatResult<()> {
        let available = self.remaining() as u128;
        let needed_u64 = u64::try_from(needed).unwrap_or(u64::MAX);
        if available < needed {
            return Err(FormatError::TruncatedPayload { offset: self.pos, what, needed: needed_u64, available: available as u64 });
        }
        if available > needed {
            return Err(FormatError::CountMismatch {
                location: format!("byte {}", self.pos),
                what: "payload bytes",
                expected: needed.to_string(),
                found: available.to_string(),
            });
        }
        Ok(())
    }
}
