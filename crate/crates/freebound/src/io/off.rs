//! ASCII OFF reader and writer.
//!
//! Only the plain `OFF` header with triangular faces is accepted. Vertex
//! coordinates are written with Rust's shortest round-trip float formatting,
//! so save/load reproduces coordinates bit for bit.

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::vec3::vec3;
use std::fmt::Write as _;

/// Iterator over non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

pub fn parse(text: &str) -> Result<TriangleMesh> {
    let mut lines = content_lines(text);
    let (lno, header) = lines.next().ok_or_else(|| Error::parse(0, "empty file"))?;

    // Counts may share the header line ("OFF 3 1 0") or follow on their own.
    let mut counts_tokens: Vec<&str>;
    if let Some(rest) = header.strip_prefix("OFF") {
        counts_tokens = rest.split_whitespace().collect();
    } else {
        return Err(Error::parse(lno, "expected OFF header"));
    }
    let counts_line = if counts_tokens.is_empty() {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(lno, "missing count line"))?;
        counts_tokens = line.split_whitespace().collect();
        lno
    } else {
        lno
    };
    if counts_tokens.len() < 2 {
        return Err(Error::parse(counts_line, "expected vertex and face counts"));
    }
    let nv: usize = counts_tokens[0]
        .parse()
        .map_err(|_| Error::parse(counts_line, "bad vertex count"))?;
    let nf: usize = counts_tokens[1]
        .parse()
        .map_err(|_| Error::parse(counts_line, "bad face count"))?;
    if nv > 50_000_000 || nf > 100_000_000 {
        return Err(Error::parse(counts_line, "counts exceed sanity limits"));
    }

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(counts_line, "unexpected end of vertex list"))?;
        let mut it = line.split_whitespace();
        let mut coord = [0.0f64; 3];
        for c in coord.iter_mut() {
            *c = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(lno, "bad vertex line"))?;
        }
        let v = vec3(coord[0], coord[1], coord[2]);
        if !v.is_finite() {
            return Err(Error::parse(lno, "non-finite vertex"));
        }
        vertices.push(v);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(counts_line, "unexpected end of face list"))?;
        let mut it = line.split_whitespace();
        let arity: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(lno, "bad face line"))?;
        if arity != 3 {
            return Err(Error::parse(lno, format!("only triangles supported, got {arity}-gon")));
        }
        let mut f = [0usize; 3];
        for v in f.iter_mut() {
            *v = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(lno, "bad face index"))?;
        }
        faces.push(f);
    }

    TriangleMesh::new(vertices, faces)
}

pub fn to_string(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OFF");
    let _ = writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.face_count());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_triangle() {
        let text = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let mesh = parse(text).unwrap();
        assert_eq!(mesh.face_count(), 1);
        assert_eq!(mesh.boundary_loops().len(), 1);
        assert_eq!(mesh.boundary_loops()[0].len(), 3);
    }

    #[test]
    fn counts_on_header_line() {
        let text = "OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# a comment\nOFF\n\n3 1 0\n0 0 0 # inline\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn non_manifold_rejected() {
        let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        assert!(parse(text).is_err());
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let mesh = crate::shapes::flat_disk(8).unwrap();
        let text = to_string(&mesh);
        let back = parse(&text).unwrap();
        assert_eq!(mesh.vertices(), back.vertices());
        assert_eq!(mesh.faces(), back.faces());
    }

    #[test]
    fn malformed_inputs_error_cleanly() {
        for text in ["", "OFF", "OFF\n2 1 0\n0 0 0\n", "PLY\n", "OFF\n1 1 0\n0 0 0\n3 0 0 0\n"] {
            assert!(parse(text).is_err(), "expected error for {text:?}");
        }
    }
}
