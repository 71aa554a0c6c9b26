//! Closed polylines with derived unit tangents.

use crate::error::{Error, Result};
use crate::vec3::{Mat3, Vec3};

/// A closed polygonal curve. Vertex `i` connects to vertex `(i + 1) % n`.
///
/// Tangents are the normalized sums of the two adjacent unit edge vectors,
/// second-order accurate on smooth curves.
#[derive(Debug, Clone)]
pub struct ClosedPolyline {
    vertices: Vec<Vec3>,
    tangents: Vec<Vec3>,
    /// Dual edge length at each vertex: half the sum of incident segments.
    vertex_weights: Vec<f64>,
    length: f64,
}

impl ClosedPolyline {
    pub fn new(vertices: Vec<Vec3>) -> Result<ClosedPolyline> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::invalid(format!("closed polyline needs >= 3 vertices, got {n}")));
        }
        for v in &vertices {
            if !v.is_finite() {
                return Err(Error::invalid("non-finite curve vertex"));
            }
        }
        let mut edge_lens = Vec::with_capacity(n);
        let mut units = Vec::with_capacity(n);
        for i in 0..n {
            let e = vertices[(i + 1) % n] - vertices[i];
            let len = e.norm();
            if len < 1e-300 {
                return Err(Error::invalid(format!("repeated consecutive vertices at index {i}")));
            }
            edge_lens.push(len);
            units.push(e / len);
        }
        let length = edge_lens.iter().sum();
        let mut tangents = Vec::with_capacity(n);
        let mut vertex_weights = Vec::with_capacity(n);
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let t = (units[prev] + units[i])
                .normalized()
                .ok_or_else(|| Error::invalid(format!("cusp at vertex {i}: adjacent edges cancel")))?;
            tangents.push(t);
            vertex_weights.push(0.5 * (edge_lens[prev] + edge_lens[i]));
        }
        Ok(ClosedPolyline { vertices, tangents, vertex_weights, length })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn tangents(&self) -> &[Vec3] {
        &self.tangents
    }

    /// Arc-length weight carried by each vertex; the weights sum to the length.
    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Turning angle at each vertex (angle between incident edges).
    pub fn turning_angles(&self) -> Vec<f64> {
        let n = self.len();
        let mut angles = Vec::with_capacity(n);
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let u = (self.vertices[i] - self.vertices[prev]).normalized().unwrap();
            let v = (self.vertices[(i + 1) % n] - self.vertices[i]).normalized().unwrap();
            angles.push(u.cross(v).norm().atan2(u.dot(v)));
        }
        angles
    }

    pub fn transformed(&self, rot: Mat3, scale: f64, shift: Vec3) -> Result<ClosedPolyline> {
        ClosedPolyline::new(
            self.vertices
                .iter()
                .map(|&v| rot.apply(v * scale) + shift)
                .collect(),
        )
    }

    /// Resample to `n` vertices at uniform arc length by linear interpolation.
    pub fn resampled_uniform(&self, n: usize) -> Result<ClosedPolyline> {
        if n < 3 {
            return Err(Error::invalid("resampling needs >= 3 vertices"));
        }
        let m = self.len();
        let mut cumulative = Vec::with_capacity(m + 1);
        cumulative.push(0.0);
        for i in 0..m {
            let step = self.vertices[(i + 1) % m].dist(self.vertices[i]);
            cumulative.push(cumulative[i] + step);
        }
        let total = cumulative[m];
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for k in 0..n {
            let s = total * k as f64 / n as f64;
            while seg + 1 < m && cumulative[seg + 1] < s {
                seg += 1;
            }
            let s0 = cumulative[seg];
            let s1 = cumulative[seg + 1];
            let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
            let a = self.vertices[seg];
            let b = self.vertices[(seg + 1) % m];
            out.push(a + (b - a) * t);
        }
        ClosedPolyline::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::vec3;
    use std::f64::consts::PI;

    fn regular_polygon(n: usize, r: f64) -> ClosedPolyline {
        let verts = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec3(r * t.cos(), r * t.sin(), 0.0)
            })
            .collect();
        ClosedPolyline::new(verts).unwrap()
    }

    #[test]
    fn polygon_length_approaches_circumference() {
        let n = 256;
        let poly = regular_polygon(n, 1.0);
        let defect = 2.0 * PI - poly.length();
        assert!(defect > 0.0);
        // Inscribed polygon: length = 2 pi (1 - pi^2 / (6 n^2) + ...).
        assert!(defect < 2.0 * PI * (PI * PI) / (6.0 * (n * n) as f64) * 1.1);
    }

    #[test]
    fn tangents_are_unit_and_tangent() {
        let poly = regular_polygon(64, 2.0);
        for (i, t) in poly.tangents().iter().enumerate() {
            assert!((t.norm() - 1.0).abs() < 1e-14);
            // Exact circle tangent by symmetry of the regular polygon.
            let v = poly.vertices()[i];
            assert!(t.dot(v).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_vertices_rejected() {
        let err = ClosedPolyline::new(vec![
            vec3(0.0, 0.0, 0.0),
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn resample_preserves_length() {
        let poly = regular_polygon(100, 1.5);
        let re = poly.resampled_uniform(100).unwrap();
        assert!((re.length() - poly.length()).abs() < 0.005 * poly.length());
        let weights: f64 = re.vertex_weights().iter().sum();
        assert!((weights - re.length()).abs() < 1e-12);
    }
}
