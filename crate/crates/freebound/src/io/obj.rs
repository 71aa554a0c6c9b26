//! Minimal Wavefront OBJ reader (ingestion only; OFF is the canonical
//! output format). Supports `v` and `f` records; polygonal faces are
//! fan-triangulated; texture/normal indices after `/` are ignored.

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::vec3::{vec3, Vec3};

pub fn parse(text: &str) -> Result<TriangleMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in coord.iter_mut() {
                    *c = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::parse(lno, "bad vertex record"))?;
                }
                let v = vec3(coord[0], coord[1], coord[2]);
                if !v.is_finite() {
                    return Err(Error::parse(lno, "non-finite vertex"));
                }
                vertices.push(v);
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in it {
                    let first = tok.split('/').next().unwrap_or("");
                    let signed: i64 = first
                        .parse()
                        .map_err(|_| Error::parse(lno, "bad face index"))?;
                    let resolved = if signed > 0 {
                        (signed - 1) as usize
                    } else if signed < 0 {
                        let back = (-signed) as usize;
                        vertices
                            .len()
                            .checked_sub(back)
                            .ok_or_else(|| Error::parse(lno, "negative index out of range"))?
                    } else {
                        return Err(Error::parse(lno, "face index 0 is invalid"));
                    };
                    idx.push(resolved);
                }
                if idx.len() < 3 {
                    return Err(Error::parse(lno, "face needs at least 3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            // Ignore normals, texcoords, groups, materials.
            Some(_) => {}
            None => {}
        }
    }
    if vertices.is_empty() || faces.is_empty() {
        return Err(Error::parse(0, "no geometry found"));
    }
    TriangleMesh::new(vertices, faces)
}
