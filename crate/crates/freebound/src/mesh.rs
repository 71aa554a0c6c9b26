//! Triangle mesh container with boundary extraction and topology checks.
//!
//! A mesh is immutable after construction. Construction validates that every
//! edge is shared by at most two faces, that shared edges are traversed in
//! opposite directions by their two faces (consistent orientation), that no
//! face has zero area, and that the boundary edges close up into loops.

use crate::error::{Error, Result};
use crate::vec3::{Mat3, Vec3};
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    boundary_loops: Vec<Vec<usize>>,
    is_boundary_vertex: Vec<bool>,
    face_normals: Vec<Vec3>,
    face_areas: Vec<f64>,
    total_area: f64,
    median_edge: f64,
}

impl TriangleMesh {
    /// Build a mesh from raw vertex and face lists, validating topology.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<TriangleMesh> {
        let nv = vertices.len();
        for v in &vertices {
            if !v.is_finite() {
                return Err(Error::invalid("non-finite vertex coordinate"));
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            for &i in f {
                if i >= nv {
                    return Err(Error::invalid(format!(
                        "face {fi} references vertex {i} out of range (nv = {nv})"
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::DegenerateFace { face: fi, area: 0.0 });
            }
        }

        let mut face_normals = Vec::with_capacity(faces.len());
        let mut face_areas = Vec::with_capacity(faces.len());
        let mut total_area = 0.0;
        let mut edge_lengths = Vec::with_capacity(faces.len() * 3 / 2);
        for (fi, f) in faces.iter().enumerate() {
            let [a, b, c] = [vertices[f[0]], vertices[f[1]], vertices[f[2]]];
            let n = (b - a).cross(c - a);
            let area = 0.5 * n.norm();
            let scale = (b - a).norm().max((c - a).norm()).max(1e-300);
            if area <= 1e-14 * scale * scale {
                return Err(Error::DegenerateFace { face: fi, area });
            }
            face_normals.push(n / (2.0 * area));
            face_areas.push(area);
            total_area += area;
        }

        // Directed edge map: (a, b) -> face. A consistent orientation means
        // every directed edge occurs at most once and its reverse at most once.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if directed.insert((a, b), fi).is_some() {
                    // Either a doubled face or a neighbor traversing the edge
                    // the same way; both mean the orientation is inconsistent
                    // unless more than two faces meet, which is non-manifold.
                    let count = 2 + directed.contains_key(&(b, a)) as usize;
                    if count > 2 {
                        return Err(Error::NonManifoldEdge { a, b, count });
                    }
                    return Err(Error::InconsistentOrientation { a, b });
                }
            }
        }
        // Boundary edges are directed edges whose reverse is absent.
        let mut next_boundary: HashMap<usize, usize> = HashMap::new();
        let mut is_boundary_vertex = vec![false; nv];
        for (&(a, b), _) in directed.iter() {
            if !directed.contains_key(&(b, a)) {
                if next_boundary.insert(a, b).is_some() {
                    // Two boundary edges leave the same vertex: pinched vertex.
                    return Err(Error::NonManifoldEdge { a, b, count: 3 });
                }
                is_boundary_vertex[a] = true;
                is_boundary_vertex[b] = true;
            }
        }

        let mut boundary_loops = Vec::new();
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut starts: Vec<usize> = next_boundary.keys().copied().collect();
        starts.sort_unstable();
        for &start in &starts {
            if visited.get(&start).copied().unwrap_or(false) {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start, true);
            let mut cur = next_boundary[&start];
            while cur != start {
                if visited.get(&cur).copied().unwrap_or(false) {
                    return Err(Error::OpenBoundary { vertex: cur });
                }
                visited.insert(cur, true);
                cycle.push(cur);
                cur = *next_boundary.get(&cur).ok_or(Error::OpenBoundary { vertex: cur })?;
            }
            boundary_loops.push(cycle);
        }

        let mut seen = std::collections::HashSet::new();
        for f in &faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if seen.insert(key) {
                    edge_lengths.push(vertices[a].dist(vertices[b]));
                }
            }
        }
        edge_lengths.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let median_edge = if edge_lengths.is_empty() {
            0.0
        } else {
            edge_lengths[edge_lengths.len() / 2]
        };

        Ok(TriangleMesh {
            vertices,
            faces,
            boundary_loops,
            is_boundary_vertex,
            face_normals,
            face_areas,
            total_area,
            median_edge,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Ordered boundary vertex loops, one per boundary component.
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.is_boundary_vertex[v]
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary_loops.is_empty()
    }

    pub fn face_normal(&self, f: usize) -> Vec3 {
        self.face_normals[f]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.face_areas[f]
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    pub fn median_edge_length(&self) -> f64 {
        self.median_edge
    }

    pub fn face_points(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.face_points(f);
        (a + b + c) / 3.0
    }

    /// Barycentric vertex areas: one third of each incident triangle.
    /// They partition the total area exactly.
    pub fn vertex_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            let third = self.face_areas[fi] / 3.0;
            for &v in f {
                areas[v] += third;
            }
        }
        areas
    }

    /// Area-weighted vertex normals (unit).
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut normals = vec![Vec3::ZERO; self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            let w = self.face_areas[fi];
            for &v in f {
                normals[v] += self.face_normals[fi] * w;
            }
        }
        for n in normals.iter_mut() {
            *n = n.normalized().unwrap_or(Vec3::EZ);
        }
        normals
    }

    /// Concatenation of two meshes as disjoint sheets. Multiplicity along
    /// geometric overlaps comes from the two sheets independently.
    pub fn disjoint_union(&self, other: &TriangleMesh) -> Result<TriangleMesh> {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]));
        TriangleMesh::new(vertices, faces)
    }

    /// Apply `x -> rot * (scale * x) + shift` to every vertex.
    pub fn transformed(&self, rot: Mat3, scale: f64, shift: Vec3) -> Result<TriangleMesh> {
        let vertices = self
            .vertices
            .iter()
            .map(|&v| rot.apply(v * scale) + shift)
            .collect();
        TriangleMesh::new(vertices, self.faces.clone())
    }

    /// Maximal distance from any vertex to `x0`.
    pub fn max_vertex_distance(&self, x0: Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dist(x0))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::vec3;

    #[test]
    fn single_triangle_has_one_loop() {
        let mesh = TriangleMesh::new(
            vec![vec3(0.0, 0.0, 0.0), vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(mesh.face_count(), 1);
        assert_eq!(mesh.boundary_loops().len(), 1);
        assert_eq!(mesh.boundary_loops()[0].len(), 3);
        assert!((mesh.total_area() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_manifold_edge_rejected() {
        // Three faces share the edge (0, 1).
        let verts = vec![
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(0.0, -1.0, 0.0),
            vec3(0.0, 0.0, 1.0),
        ];
        let err = TriangleMesh::new(verts, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap_err();
        match err {
            Error::NonManifoldEdge { .. } | Error::InconsistentOrientation { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let verts = vec![
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(1.0, 1.0, 0.0),
        ];
        // Second face traverses shared edge (1, 2) in the same direction.
        let err = TriangleMesh::new(verts, vec![[0, 1, 2], [1, 2, 3]]).unwrap_err();
        assert!(matches!(err, Error::InconsistentOrientation { .. }));
    }

    #[test]
    fn degenerate_face_rejected() {
        let verts = vec![vec3(0.0, 0.0, 0.0), vec3(1.0, 0.0, 0.0), vec3(2.0, 0.0, 0.0)];
        let err = TriangleMesh::new(verts, vec![[0, 1, 2]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateFace { .. }));
    }

    #[test]
    fn vertex_areas_partition_total() {
        let mesh = TriangleMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(1.0, 1.0, 0.0),
                vec3(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let sum: f64 = mesh.vertex_areas().iter().sum();
        assert!((sum - mesh.total_area()).abs() < 1e-15);
    }
}
