//! Wavefront OBJ subset: `v`, `vn`, `vt`, `f` and comments. Normals and
//! texture coordinates are accepted and ignored; faces with more than three
//! corners are fan-triangulated around their first corner.
//!
//! The brow-bone region travels in a companion `<stem>.mask` file holding one
//! `0`/`1` line per vertex.

use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_all, FormatError, FormatResult};
use crate::geom::Point3;
use crate::mesh::TriMesh;

#[derive(Debug, Clone, PartialEq)]
pub struct ObjMesh {
    pub mesh: TriMesh,
    /// Zero-area triangles removed while loading.
    pub dropped_degenerate: usize,
}

fn resolve(line: usize, tok: &str, count: usize) -> FormatResult<usize> {
    let head = tok.split('/').next().unwrap_or("");
    let idx: i64 = head
        .parse()
        .map_err(|_| FormatError::schema(format!("line {line}"), format!("bad face index {tok:?}")))?;
    let resolved = if idx > 0 {
        (idx as u64 <= count as u64).then(|| idx as usize - 1)
    } else if idx < 0 {
        idx.checked_neg().and_then(|k| (k as u64 <= count as u64).then(|| count - k as usize))
    } else {
        None
    };
    resolved.ok_or(FormatError::IndexOutOfRange { line, index: idx, count })
}

/// Parses OBJ text with an optional mask document.
pub fn parse_obj(text: &str, mask: Option<&str>) -> FormatResult<ObjMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = body.split_whitespace();
        let Some(directive) = tokens.next() else { continue };
        match directive {
            "v" => {
                let coords: Vec<&str> = tokens.collect();
                if !(3..=4).contains(&coords.len()) {
                    return Err(FormatError::schema(format!("line {line}"), format!("vertex needs 3 coordinates, found {}", coords.len())));
                }
                let mut c = [0.0; 3];
                for (slot, tok) in c.iter_mut().zip(&coords) {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| FormatError::schema(format!("line {line}"), format!("coordinate {tok:?} is not a number")))?;
                    if !v.is_finite() {
                        return Err(FormatError::NonFinite { location: format!("line {line}") });
                    }
                    *slot = v;
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            "vn" | "vt" => {}
            "f" => {
                let corners = tokens.map(|t| resolve(line, t, vertices.len())).collect::<FormatResult<Vec<_>>>()?;
                if corners.len() < 3 {
                    return Err(FormatError::schema(format!("line {line}"), format!("face has {} corners", corners.len())));
                }
                for k in 1..corners.len() - 1 {
                    triangles.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            other => return Err(FormatError::UnsupportedDirective { line, directive: other.chars().take(32).collect() }),
        }
    }
    let region = match mask {
        Some(m) => parse_mask(m, vertices.len())?,
        None => vec![true; vertices.len()],
    };
    let (mesh, dropped_degenerate) =
        TriMesh::with_region(vertices, triangles, region).map_err(|e| FormatError::Geometry { path: "obj".into(), source: e })?;
    Ok(ObjMesh { mesh, dropped_degenerate })
}

fn parse_mask(text: &str, vertex_count: usize) -> FormatResult<Vec<bool>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        match raw.trim() {
            "" => continue,
            "0" => out.push(false),
            "1" => out.push(true),
            other => {
                return Err(FormatError::schema(format!("mask line {}", i + 1), format!("expected 0 or 1, found {:?}", other.chars().take(32).collect::<String>())))
            }
        }
        if out.len() > vertex_count {
            break;
        }
    }
    if out.len() != vertex_count {
        return Err(FormatError::CountMismatch {
            location: "mask".into(),
            what: "mask entries",
            expected: vertex_count.to_string(),
            found: if out.len() > vertex_count { "more".into() } else { out.len().to_string() },
        });
    }
    Ok(out)
}

pub fn format_obj(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for v in mesh.vertices() {
        writeln!(s, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    s
}

pub fn format_mask(mesh: &TriMesh) -> String {
    mesh.region().iter().map(|&r| if r { "1\n" } else { "0\n" }).collect()
}

/// Loads `path`, plus `<stem>.mask` next to it when that file exists.
pub fn load_obj(path: &Path) -> FormatResult<ObjMesh> {
    let text = read_text(path)?;
    let mask_path = path.with_extension("mask");
    let mask = if mask_path.is_file() { Some(read_text(&mask_path)?) } else { None };
    parse_obj(&text, mask.as_deref()).map_err(|e| e.in_file(path))
}

/// Writes the mesh, and its mask next to it when `with_mask` is set.
pub fn save_obj(path: &Path, mesh: &TriMesh, with_mask: bool) -> FormatResult<()> {
    write_all(path, format_obj(mesh).as_bytes())?;
    if with_mask {
        write_all(&path.with_extension("mask"), format_mask(mesh).as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE: &str = "# unit cube\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n";

    #[test]
    fn quad_is_two_triangles() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n", None).unwrap();
        assert_eq!(m.mesh.vertices().len(), 4);
        assert_eq!(m.mesh.triangles(), &[[0, 1, 2], [0, 2, 3]]);
        assert!(m.mesh.region().iter().all(|&r| r));
    }

    #[test]
    fn cube_loads_closed() {
        let m = parse_obj(CUBE, None).unwrap();
        assert_eq!(m.mesh.vertices().len(), 8);
        assert_eq!(m.mesh.triangles().len(), 12);
        assert!(m.mesh.is_watertight());
    }

    #[test]
    fn index_forms() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nvt 0 0\nvn 0 0 1\nv 0 1 0\nf 1/1/1 2//1 -1/1\n", None).unwrap();
        assert_eq!(m.mesh.triangles(), &[[0, 1, 2]]);
        assert!(matches!(parse_obj("v 0 0 0\nf 0 1 1\n", None), Err(FormatError::IndexOutOfRange { index: 0, .. })));
        assert!(matches!(parse_obj("v 0 0 0\nf 1 2 1\n", None), Err(FormatError::IndexOutOfRange { index: 2, .. })));
        assert!(matches!(parse_obj("v 0 0 0\nf -2 1 1\n", None), Err(FormatError::IndexOutOfRange { .. })));
    }

    #[test]
    fn unsupported_and_malformed() {
        assert_eq!(
            parse_obj("v 0 0 0\ng head\n", None),
            Err(FormatError::UnsupportedDirective { line: 2, directive: "g".into() })
        );
        assert!(matches!(parse_obj("v 0 0\n", None), Err(FormatError::SchemaError { .. })));
        assert!(matches!(parse_obj("v 0 inf 0\n", None), Err(FormatError::NonFinite { .. })));
        assert!(matches!(parse_obj("v 0 0 0\nv 1 0 0\nf 1 2\n", None), Err(FormatError::SchemaError { .. })));
    }

    #[test]
    fn degenerate_faces_dropped() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 4\n", None).unwrap();
        assert_eq!(m.dropped_degenerate, 1);
        assert_eq!(m.mesh.triangles().len(), 1);
    }

    #[test]
    fn mask_round_trip() {
        let m = parse_obj(CUBE, Some("1\n1\n0\n0\n1\n1\n0\n0\n")).unwrap();
        assert_eq!(format_mask(&m.mesh), "1\n1\n0\n0\n1\n1\n0\n0\n");
        let again = parse_obj(&format_obj(&m.mesh), Some(&format_mask(&m.mesh))).unwrap();
        assert_eq!(again.mesh, m.mesh);
        assert!(matches!(parse_obj(CUBE, Some("1\n0\n")), Err(FormatError::CountMismatch { .. })));
        assert!(matches!(parse_obj(CUBE, Some("2\n")), Err(FormatError::SchemaError { .. })));
    }
}
