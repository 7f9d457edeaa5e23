//! Plain-text mesh format.
//!
//! ```text
//! vertices N / triangles M / bedges K
//! x y            (N rows)
//! i j k          (M rows, zero-based)
//! a b tag        (K rows, tag 0 = outer, j + 1 = hole j)
//! ```
//! Coordinates use the shortest decimal representation that round-trips.

use super::TriMesh;
use crate::error::{Error, Result};
use crate::geometry::BoundaryTag;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

pub fn to_string(mesh: &TriMesh) -> String {
    let mut s = String::with_capacity(40 * (mesh.vertices.len() + mesh.triangles.len()));
    let _ = writeln!(s, "vertices {} / triangles {} / bedges {}", mesh.vertices.len(), mesh.triangles.len(), mesh.boundary_edges.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {}", v[0], v[1]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    for &([a, b], tag) in &mesh.boundary_edges {
        let _ = writeln!(s, "{a} {b} {}", tag.code());
    }
    s
}

pub fn write(mesh: &TriMesh, mut w: impl Write) -> Result<()> {
    w.write_all(to_string(mesh).as_bytes())?;
    Ok(())
}

pub fn read(r: impl BufRead) -> Result<TriMesh> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let header = header?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let counts = match words.as_slice() {
        ["vertices", n, "/", "triangles", m, "/", "bedges", k] => (n.parse::<usize>(), m.parse::<usize>(), k.parse::<usize>()),
        _ => return Err(Error::Parse(format!("line 1: bad header '{header}'"))),
    };
    let (n, m, k) = match counts {
        (Ok(n), Ok(m), Ok(k)) => (n, m, k),
        _ => return Err(Error::Parse(format!("line 1: bad counts in '{header}'"))),
    };
    let mut next_row = |want: usize| -> Result<(usize, Vec<String>)> {
        let (i, line) = lines.next().ok_or_else(|| Error::Parse("unexpected end of mesh file".into()))?;
        let line = line?;
        let fields: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if fields.len() != want {
            return Err(Error::Parse(format!("line {}: expected {want} fields, got {}", i + 1, fields.len())));
        }
        Ok((i + 1, fields))
    };
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, f) = next_row(2)?;
        let x: f64 = f[0].parse().map_err(|_| Error::Parse(format!("line {ln}: bad coordinate '{}'", f[0])))?;
        let y: f64 = f[1].parse().map_err(|_| Error::Parse(format!("line {ln}: bad coordinate '{}'", f[1])))?;
        vertices.push([x, y]);
    }
    let index = |ln: usize, s: &str| -> Result<usize> {
        let i: usize = s.parse().map_err(|_| Error::Parse(format!("line {ln}: bad index '{s}'")))?;
        if i >= n {
            return Err(Error::Parse(format!("line {ln}: vertex index {i} out of range")));
        }
        Ok(i)
    };
    let mut triangles = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, f) = next_row(3)?;
        triangles.push([index(ln, &f[0])?, index(ln, &f[1])?, index(ln, &f[2])?]);
    }
    let mut edges = Vec::with_capacity(k);
    for _ in 0..k {
        let (ln, f) = next_row(3)?;
        let tag: usize = f[2].parse().map_err(|_| Error::Parse(format!("line {ln}: bad tag '{}'", f[2])))?;
        edges.push(([index(ln, &f[0])?, index(ln, &f[1])?], BoundaryTag::from_code(tag)));
    }
    Ok(TriMesh::from_parts(vertices, triangles, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;
    use crate::mesh::triangulate;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = triangulate(&presets::annulus(0.5, None), 0.1).unwrap();
        let text = to_string(&m);
        let back = read(text.as_bytes()).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.boundary_edges, m.boundary_edges);
        assert_eq!(to_string(&back), text);
    }

    #[test]
    fn malformed_input_is_reported() {
        assert!(read("vertices 1 / triangles 0 / bedges 0\n0.0\n".as_bytes()).is_err());
        assert!(read("vertices 1 / triangles 1 / bedges 0\n0 0\n0 0 3\n".as_bytes()).is_err());
    }
}
