//! Text fiber files.
//!
//! ```text
//! 2                 number of fibers
//! 3                 points in fiber 0
//! x y z             one line per point, 9 significant digits
//! x y z
//! x y z
//! 1                 points in fiber 1
//! x y z
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_all, FormatError, FormatResult};
use crate::geom::{Fiber, FiberSet, Point3, RootSet};

/// Serializes polylines with `{:.8e}` coordinates.
pub fn format_fib(fibers: &[&[Point3]]) -> String {
    let mut s = String::new();
    writeln!(s, "{}", fibers.len()).unwrap();
    for f in fibers {
        writeln!(s, "{}", f.len()).unwrap();
        for p in f.iter() {
            writeln!(s, "{:.8e} {:.8e} {:.8e}", p.x, p.y, p.z).unwrap();
        }
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        let (i, l) = self.inner.next()?;
        self.last = i + 1;
        Some((i + 1, l.trim()))
    }
}

fn parse_count(line: usize, text: &str, what: &str) -> FormatResult<usize> {
    text.parse::<usize>().map_err(|_| FormatError::schema(format!("line {line}"), format!("expected a {what} count, found {text:?}")))
}

/// Parses a FIB document into raw polylines (each with at least one point).
pub fn parse_fib(text: &str) -> FormatResult<Vec<Vec<Point3>>> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let Some((l0, header)) = lines.next() else {
        return Err(FormatError::schema("line 1", "empty file"));
    };
    let declared = parse_count(l0, header, "fiber")?;
    let mut fibers = Vec::new();
    for f in 0..declared {
        let Some((lc, count_line)) = lines.next() else {
            return Err(FormatError::CountMismatch {
                location: format!("line {} (end of file)", lines.last + 1),
                what: "fibers",
                expected: declared.to_string(),
                found: f.to_string(),
            });
        };
        let count = parse_count(lc, count_line, "point")?;
        if count == 0 {
            return Err(FormatError::schema(format!("line {lc}"), format!("fiber {f} has no points")));
        }
        let mut points = Vec::new();
        for k in 0..count {
            let Some((lp, pl)) = lines.next() else {
                return Err(FormatError::CountMismatch {
                    location: format!("line {} (end of file, fiber {f} declared at line {lc})", lines.last + 1),
                    what: "points",
                    expected: count.to_string(),
                    found: k.to_string(),
                });
            };
            points.push(parse_point(lp, pl)?);
        }
        fibers.push(points);
    }
    if let Some((l, _)) = std::iter::from_fn(|| lines.next()).find(|(_, t)| !t.is_empty()) {
        return Err(FormatError::CountMismatch {
            location: format!("line {l}"),
            what: "fibers",
            expected: declared.to_string(),
            found: "more content".into(),
        });
    }
    Ok(fibers)
}

fn parse_point(line: usize, text: &str) -> FormatResult<Point3> {
    let mut c = [0.0; 3];
    let mut tokens = text.split_whitespace();
    for (a, slot) in c.iter_mut().enumerate() {
        let tok = tokens
            .next()
            .ok_or_else(|| FormatError::schema(format!("line {line}"), format!("expected 3 coordinates, found {a}")))?;
        let v: f64 = tok
            .parse()
            .map_err(|_| FormatError::schema(format!("line {line}"), format!("coordinate {tok:?} is not a number")))?;
        if !v.is_finite() {
            return Err(FormatError::NonFinite { location: format!("line {line}") });
        }
        *slot = v;
    }
    if tokens.next().is_some() {
        return Err(FormatError::schema(format!("line {line}"), "more than 3 coordinates"));
    }
    Ok(Point3::new(c[0], c[1], c[2]))
}

pub fn read_fibers(path: &Path, step: f64) -> FormatResult<FiberSet> {
    let raw = parse_fib(&read_text(path)?).map_err(|e| e.in_file(path))?;
    let fibers = raw
        .into_iter()
        .map(Fiber::new)
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| FormatError::Geometry { path: path.display().to_string(), source: e })?;
    Ok(FiberSet::new(fibers, step))
}

pub fn write_fibers(path: &Path, fs: &FiberSet) -> FormatResult<()> {
    let refs: Vec<&[Point3]> = fs.fibers.iter().map(Fiber::points).collect();
    write_all(path, format_fib(&refs).as_bytes())
}

/// Reads roots: every entry must be a single-point fiber.
pub fn read_roots(path: &Path) -> FormatResult<RootSet> {
    let raw = parse_fib(&read_text(path)?).map_err(|e| e.in_file(path))?;
    let mut roots = Vec::with_capacity(raw.len());
    for (i, f) in raw.into_iter().enumerate() {
        if f.len() != 1 {
            return Err(FormatError::schema(path.display().to_string(), format!("root entry {i} has {} points, expected 1", f.len())));
        }
        roots.push(f[0]);
    }
    Ok(RootSet::new(roots))
}

pub fn write_roots(path: &Path, roots: &RootSet) -> FormatResult<()> {
    let refs: Vec<&[Point3]> = roots.roots.iter().map(std::slice::from_ref).collect();
    write_all(path, format_fib(&refs).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        let a = [Point3::new(0.0, 1.0 / 3.0, -2.5e-7), Point3::new(123456.789, 1e-300, 0.014)];
        let b = [Point3::new(1.0, 2.0, 3.0)];
        let text = format_fib(&[&a, &b]);
        assert!(text.starts_with("2\n2\n0.00000000e0 3.33333333e-1 -2.50000000e-7\n"));
        let back = parse_fib(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1], b.to_vec());
        let again: Vec<&[Point3]> = back.iter().map(|f| f.as_slice()).collect();
        assert_eq!(format_fib(&again), text);
    }

    #[test]
    fn missing_fiber_is_count_mismatch_with_line() {
        let err = parse_fib("2\n1\n0 0 0\n").unwrap_err();
        match err {
            FormatError::CountMismatch { location, what, .. } => {
                assert_eq!(what, "fibers");
                assert!(location.contains("line 4"), "{location}");
            }
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse_fib("1\n3\n0 0 0\n1 1 1\n"), Err(FormatError::CountMismatch { what: "points", .. })));
        assert!(matches!(parse_fib("1\n1\n0 0 0\n5\n"), Err(FormatError::CountMismatch { .. })));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_fib(""), Err(FormatError::SchemaError { .. })));
        assert!(matches!(parse_fib("x\n"), Err(FormatError::SchemaError { .. })));
        assert!(matches!(parse_fib("1\n0\n"), Err(FormatError::SchemaError { .. })));
        assert!(matches!(parse_fib("1\n1\n0 0\n"), Err(FormatError::SchemaError { .. })));
        assert!(matches!(parse_fib("1\n1\n0 0 0 0\n"), Err(FormatError::SchemaError { .. })));
        assert!(matches!(parse_fib("1\n1\n0 nan 0\n"), Err(FormatError::NonFinite { .. })));
        assert!(matches!(parse_fib("1\n1\n0 1e999 0\n"), Err(FormatError::NonFinite { .. })));
        assert_eq!(parse_fib("0\n").unwrap(), Vec::<Vec<Point3>>::new());
        assert_eq!(parse_fib("1\r\n1\r\n1 2 3\r\n\n").unwrap(), vec![vec![Point3::new(1.0, 2.0, 3.0)]]);
    }

    #[test]
    fn huge_declared_counts_do_not_allocate() {
        assert!(matches!(parse_fib("18446744073709551615\n"), Err(FormatError::CountMismatch { .. })));
        assert!(matches!(parse_fib("1\n18446744073709551615\n0 0 0\n"), Err(FormatError::CountMismatch { .. })));
    }
}
