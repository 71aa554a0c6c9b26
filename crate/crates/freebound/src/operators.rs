//! Discrete curvature and boundary operators.
//!
//! The mean curvature vector is the cotangent Laplacian of the position
//! divided by the barycentric vertex area, oriented by the first variation
//! convention: on a round sphere it points toward the center. Since the
//! cotangent stencil at boundary vertices misses links, boundary vertices
//! carry the averaged value of their interior neighbors instead; energy
//! quadrature over vertices uses interior vertices only and the skipped
//! boundary strip is reported as an uncertainty bound.

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::vec3::{Mat3, Vec3};

/// Per-vertex vector field (mean curvature and friends).
#[derive(Debug, Clone)]
pub struct VertexField {
    pub values: Vec<Vec3>,
}

/// Mean curvature data derived from a mesh.
#[derive(Debug, Clone)]
pub struct MeanCurvatureField {
    /// Per-vertex curvature vectors. Normal-projected unless requested raw;
    /// boundary vertices carry the interior-limit value.
    pub field: VertexField,
    /// Largest |tangential part| / |H| seen before projection (interior).
    pub max_tangential_fraction: f64,
    /// Upper bound for the |H|^2 mass carried by the excluded boundary
    /// strip, estimated from interior-limit values.
    pub boundary_strip_h2_bound: f64,
}

/// Outward unit conormal and length weights along the boundary.
#[derive(Debug, Clone)]
pub struct BoundaryField {
    /// Mesh vertex index of each boundary sample.
    pub vertex_indices: Vec<usize>,
    /// Unit outward conormal at each boundary sample.
    pub conormals: Vec<Vec3>,
    /// Dual length weights; they sum to the total boundary length.
    pub weights: Vec<f64>,
    /// Unit discrete boundary tangents.
    pub tangents: Vec<Vec3>,
}

impl BoundaryField {
    pub fn total_length(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The free boundary Willmore boundary term, sum of (x . eta) dsigma.
    pub fn position_conormal_integral(&self, mesh: &TriangleMesh) -> f64 {
        self.vertex_indices
            .iter()
            .zip(&self.conormals)
            .zip(&self.weights)
            .map(|((&v, eta), w)| mesh.vertices()[v].dot(*eta) * w)
            .sum()
    }

    /// Integrate an arbitrary per-sample function against the length weights.
    pub fn integrate(&self, mesh: &TriangleMesh, f: impl Fn(usize, Vec3, Vec3) -> f64) -> f64 {
        self.vertex_indices
            .iter()
            .zip(&self.conormals)
            .zip(&self.weights)
            .map(|((&v, eta), w)| f(v, mesh.vertices()[v], *eta) * w)
            .sum()
    }
}

fn vertex_adjacency(mesh: &TriangleMesh) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.vertex_count()];
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if !adj[a].contains(&b) {
                adj[a].push(b);
            }
            if !adj[b].contains(&a) {
                adj[b].push(a);
            }
        }
    }
    adj
}

/// Cotangent mean curvature with default normal projection.
pub fn mean_curvature(mesh: &TriangleMesh) -> Result<MeanCurvatureField> {
    mean_curvature_with(mesh, true)
}

pub fn mean_curvature_with(mesh: &TriangleMesh, project_to_normal: bool) -> Result<MeanCurvatureField> {
    let nv = mesh.vertex_count();
    let mut laplacian = vec![Vec3::ZERO; nv];
    for (fi, f) in mesh.faces().iter().enumerate() {
        let ps = mesh.face_points(fi);
        for corner in 0..3 {
            let (ia, ib) = (f[(corner + 1) % 3], f[(corner + 2) % 3]);
            let (pc, pa, pb) = (ps[corner], ps[(corner + 1) % 3], ps[(corner + 2) % 3]);
            let (u, v) = (pa - pc, pb - pc);
            let cross = u.cross(v).norm();
            if cross < 1e-300 {
                return Err(Error::DegenerateFace { face: fi, area: 0.5 * cross });
            }
            let cot = u.dot(v) / cross;
            let w = 0.5 * cot;
            laplacian[ia] += (ps[(corner + 2) % 3] - ps[(corner + 1) % 3]) * w;
            laplacian[ib] += (ps[(corner + 1) % 3] - ps[(corner + 2) % 3]) * w;
        }
    }

    let areas = mesh.vertex_areas();
    let normals = mesh.vertex_normals();
    let mut values = vec![Vec3::ZERO; nv];
    let mut max_tangential = 0.0f64;
    for i in 0..nv {
        if mesh.is_boundary_vertex(i) {
            continue;
        }
        let h = laplacian[i] / areas[i];
        let h_norm = h.dot(normals[i]);
        let projected = normals[i] * h_norm;
        let tangential = (h - projected).norm();
        if h.norm() > 1e-12 {
            max_tangential = max_tangential.max(tangential / h.norm());
        }
        values[i] = if project_to_normal { projected } else { h };
    }

    // Interior-limit values at the boundary.
    let adj = vertex_adjacency(mesh);
    let mut strip_bound = 0.0;
    for i in 0..nv {
        if !mesh.is_boundary_vertex(i) {
            continue;
        }
        let mut acc = Vec3::ZERO;
        let mut count = 0usize;
        for &j in &adj[i] {
            if !mesh.is_boundary_vertex(j) {
                acc += values[j];
                count += 1;
            }
        }
        if count > 0 {
            values[i] = acc / count as f64;
        }
        strip_bound += values[i].norm_sq() * areas[i];
    }

    Ok(MeanCurvatureField {
        field: VertexField { values },
        max_tangential_fraction: max_tangential,
        boundary_strip_h2_bound: strip_bound,
    })
}

/// Vertex-lumped |H|^2 integral over interior vertices.
pub fn h2_integral_interior(mesh: &TriangleMesh, h: &MeanCurvatureField) -> f64 {
    let areas = mesh.vertex_areas();
    (0..mesh.vertex_count())
        .filter(|&i| !mesh.is_boundary_vertex(i))
        .map(|i| h.field.values[i].norm_sq() * areas[i])
        .sum()
}

/// Vertex-lumped integral of H . x over all vertices.
pub fn h_dot_position_integral(mesh: &TriangleMesh, h: &MeanCurvatureField) -> f64 {
    let areas = mesh.vertex_areas();
    (0..mesh.vertex_count())
        .map(|i| h.field.values[i].dot(mesh.vertices()[i]) * areas[i])
        .sum()
}

/// Outward unit conormal along the boundary: the length-weighted average of
/// the in-plane outward normals of the incident boundary edges.
pub fn conormal(mesh: &TriangleMesh) -> Result<BoundaryField> {
    if !mesh.has_boundary() {
        return Err(Error::NoBoundary);
    }
    // Directed boundary edge -> owning face.
    let mut edge_face = std::collections::HashMap::new();
    let mut directed = std::collections::HashSet::new();
    for f in mesh.faces() {
        for k in 0..3 {
            directed.insert((f[k], f[(k + 1) % 3]));
        }
    }
    for (fi, f) in mesh.faces().iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if !directed.contains(&(b, a)) {
                edge_face.insert((a, b), fi);
            }
        }
    }

    let mut vertex_indices = Vec::new();
    let mut conormals = Vec::new();
    let mut weights = Vec::new();
    let mut tangents = Vec::new();
    for chain in mesh.boundary_loops() {
        let n = chain.len();
        for k in 0..n {
            let prev = chain[(k + n - 1) % n];
            let cur = chain[k];
            let next = chain[(k + 1) % n];
            let (p_prev, p_cur, p_next) =
                (mesh.vertices()[prev], mesh.vertices()[cur], mesh.vertices()[next]);

            let mut eta = Vec3::ZERO;
            for (a, b) in [(prev, cur), (cur, next)] {
                let face = edge_face[&(a, b)];
                let edge = mesh.vertices()[b] - mesh.vertices()[a];
                let out = edge.cross(mesh.face_normal(face));
                // |out| = |edge| since the face normal is unit, so this is
                // already the length-weighted in-plane outward direction.
                eta += out;
            }
            let eta = eta
                .normalized()
                .ok_or_else(|| Error::Inadmissible(format!("degenerate conormal at vertex {cur}")))?;
            vertex_indices.push(cur);
            conormals.push(eta);
            weights.push(0.5 * (p_cur.dist(p_prev) + p_next.dist(p_cur)));
            tangents.push((p_next - p_prev).normalized().unwrap_or(Vec3::EX));
        }
    }
    Ok(BoundaryField { vertex_indices, conormals, weights, tangents })
}

/// A continuously differentiable ambient vector field with analytic Jacobian.
pub trait TestVectorField {
    fn value(&self, x: Vec3) -> Vec3;
    fn jacobian(&self, x: Vec3) -> Mat3;
}

pub struct ConstantField(pub Vec3);

impl TestVectorField for ConstantField {
    fn value(&self, _x: Vec3) -> Vec3 {
        self.0
    }
    fn jacobian(&self, _x: Vec3) -> Mat3 {
        Mat3::ZERO
    }
}

/// The position field X(x) = x.
pub struct PositionField;

impl TestVectorField for PositionField {
    fn value(&self, x: Vec3) -> Vec3 {
        x
    }
    fn jacobian(&self, _x: Vec3) -> Mat3 {
        Mat3::identity()
    }
}

/// X(x) = |x|^2 v.
pub struct RadialQuadraticField(pub Vec3);

impl TestVectorField for RadialQuadraticField {
    fn value(&self, x: Vec3) -> Vec3 {
        self.0 * x.norm_sq()
    }
    fn jacobian(&self, x: Vec3) -> Mat3 {
        Mat3::outer(self.0, x * 2.0)
    }
}

/// X(x) = (a . x) x.
pub struct ScaledPositionField(pub Vec3);

impl TestVectorField for ScaledPositionField {
    fn value(&self, x: Vec3) -> Vec3 {
        x * self.0.dot(x)
    }
    fn jacobian(&self, x: Vec3) -> Mat3 {
        Mat3::identity() * self.0.dot(x) + Mat3::outer(x, self.0)
    }
}

/// Tangential divergence of `field` integrated over the mesh: per face,
/// the analytic Jacobian is projected onto the face plane and sampled with
/// the three-midpoint rule (exact for quadratic fields).
pub fn surface_divergence_integral(mesh: &TriangleMesh, field: &dyn TestVectorField) -> f64 {
    let mut total = 0.0;
    for fi in 0..mesh.face_count() {
        let [a, b, c] = mesh.face_points(fi);
        let normal = mesh.face_normal(fi);
        let area = mesh.face_area(fi);
        let mids = [(a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0];
        let mut acc = 0.0;
        for m in mids {
            let j = field.jacobian(m);
            let jn = j.apply(normal);
            acc += j.trace() - normal.dot(jn);
        }
        total += acc * area / 3.0;
    }
    total
}

/// First-variation residual
/// | div-integral + sum H . X dmu - boundary term |.
pub fn first_variation_residual(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    boundary: &BoundaryField,
    field: &dyn TestVectorField,
) -> f64 {
    let div = surface_divergence_integral(mesh, field);
    let areas = mesh.vertex_areas();
    let h_term: f64 = (0..mesh.vertex_count())
        .map(|i| h.field.values[i].dot(field.value(mesh.vertices()[i])) * areas[i])
        .sum();
    let boundary_term = boundary.integrate(mesh, |_, x, eta| field.value(x).dot(eta));
    (div + h_term - boundary_term).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    #[test]
    fn flat_disk_is_minimal() {
        let mesh = shapes::flat_disk(16).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        for (i, v) in h.field.values.iter().enumerate() {
            assert!(v.norm() < 1e-10, "vertex {i} has |H| = {}", v.norm());
        }
    }

    #[test]
    fn sphere_curvature_calibration() {
        // |H| -> 2/R in the area-weighted L2 sense; pointwise the cotangent
        // stencil does not converge at the twelve valence-5 corners, so the
        // sup norm stalls there while the energy norm keeps halving.
        let mut l2 = Vec::new();
        for level in [3usize, 4, 5] {
            let mesh = shapes::closed_sphere(1.0, level).unwrap();
            let h = mean_curvature(&mesh).unwrap();
            let areas = mesh.vertex_areas();
            let mut total = Vec3::ZERO;
            let mut mse = 0.0;
            for i in 0..mesh.vertex_count() {
                let hi = h.field.values[i];
                // Inward orientation (first variation convention).
                assert!(hi.dot(mesh.vertices()[i]) < 0.0);
                mse += (hi.norm() - 2.0).powi(2) * areas[i];
                total += hi * areas[i];
            }
            // Translation invariance of the closed surface.
            assert!(total.norm() < 1e-2 * mesh.total_area());
            l2.push((mse / mesh.total_area()).sqrt());
        }
        assert!(l2[1] < 0.6 * l2[0] && l2[2] < 0.6 * l2[1], "L2 errors {l2:?}");
        assert!(l2[2] < 1e-2);
    }

    #[test]
    fn cap_curvature_refines() {
        // Ring seams carry O(1) pointwise outliers of vanishing area, so
        // convergence is measured in the area-weighted L2 norm.
        let r = 2.0;
        let mut errs = Vec::new();
        for res in [24usize, 48, 96] {
            let mesh = shapes::spherical_cap(r, res).unwrap();
            let h = mean_curvature(&mesh).unwrap();
            let areas = mesh.vertex_areas();
            let mut mse = 0.0;
            let mut area = 0.0;
            for i in 0..mesh.vertex_count() {
                if mesh.is_boundary_vertex(i) {
                    continue;
                }
                mse += (h.field.values[i].norm() - 2.0 / r).powi(2) * areas[i];
                area += areas[i];
            }
            errs.push((mse / area).sqrt());
        }
        assert!(errs[1] < 0.85 * errs[0] && errs[2] < 0.85 * errs[1], "L2 errors {errs:?}");
        assert!(errs[2] < 0.05 * (2.0 / r), "L2 errors {errs:?}");
    }

    #[test]
    fn disk_conormal_is_radial() {
        let mesh = shapes::flat_disk(24).unwrap();
        let b = conormal(&mesh).unwrap();
        for (k, &v) in b.vertex_indices.iter().enumerate() {
            let x = mesh.vertices()[v];
            let eta = b.conormals[k];
            assert!((eta.norm() - 1.0).abs() < 1e-14);
            assert!((eta - x).norm() < 1e-3, "conormal deviates from radial");
            assert!(eta.dot(b.tangents[k]).abs() < 1e-10);
        }
        assert!((b.total_length() - 2.0 * PI).abs() < 1e-2);
    }

    #[test]
    fn cap_position_conormal_tends_to_one() {
        for &r in &[0.5, 1.0, 2.0] {
            let mut defects = Vec::new();
            for res in [24usize, 48] {
                let mesh = shapes::spherical_cap(r, res).unwrap();
                let b = conormal(&mesh).unwrap();
                let worst = b
                    .vertex_indices
                    .iter()
                    .zip(&b.conormals)
                    .map(|(&v, eta)| (mesh.vertices()[v].dot(*eta) - 1.0).abs())
                    .fold(0.0, f64::max);
                defects.push(worst);
            }
            assert!(defects[1] < defects[0]);
            assert!(defects[1] < 5e-3, "cap r={r}: x.eta defect {defects:?}");
        }
    }

    #[test]
    fn boundaryless_mesh_has_no_conormal() {
        let mesh = shapes::closed_sphere(1.0, 2).unwrap();
        assert!(matches!(conormal(&mesh), Err(Error::NoBoundary)));
    }

    #[test]
    fn position_field_identity_on_disk() {
        let mesh = shapes::flat_disk(32).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        // 2 Area = boundary length for the flat unit disk, both near 2 pi.
        let res = first_variation_residual(&mesh, &h, &b, &PositionField);
        assert!(res < 5e-3, "residual {res}");
    }

    #[test]
    fn residuals_decrease_under_refinement() {
        let fields: Vec<Box<dyn TestVectorField>> = vec![
            Box::new(ConstantField(Vec3::EX)),
            Box::new(PositionField),
            Box::new(RadialQuadraticField(Vec3::EZ)),
            Box::new(ScaledPositionField(Vec3::EY)),
        ];
        for make in [
            (|res| shapes::flat_disk(res)) as fn(usize) -> crate::error::Result<TriangleMesh>,
            |res| shapes::spherical_cap(1.0, res),
        ] {
            let coarse = make(24).unwrap();
            let fine = make(48).unwrap();
            for field in &fields {
                let rc = {
                    let h = mean_curvature(&coarse).unwrap();
                    let b = conormal(&coarse).unwrap();
                    first_variation_residual(&coarse, &h, &b, field.as_ref())
                };
                let rf = {
                    let h = mean_curvature(&fine).unwrap();
                    let b = conormal(&fine).unwrap();
                    first_variation_residual(&fine, &h, &b, field.as_ref())
                };
                assert!(rf < rc.max(1e-12), "no decay: {rc:.3e} -> {rf:.3e}");
            }
        }
    }

    #[test]
    fn cap_first_variation_components() {
        // For X = x: 2 Area + sum H.x - boundary term = 0, with the three
        // components near their closed-form values for the r = 1 cap.
        let mesh = shapes::spherical_cap(1.0, 64).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let two_area = 2.0 * mesh.total_area();
        let h_x = h_dot_position_integral(&mesh, &h);
        let bterm = b.position_conormal_integral(&mesh);
        assert!((two_area - 3.68061).abs() / 3.68061 < 0.01, "2A = {two_area}");
        assert!((h_x - 0.76227).abs() / 0.76227 < 0.01, "H.x = {h_x}");
        assert!((bterm - 4.44288).abs() / 4.44288 < 0.01, "bterm = {bterm}");
        assert!((two_area + h_x - bterm).abs() < 1e-2);
    }
}
