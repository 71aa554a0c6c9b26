//! Quadrature over mesh-ball intersections.
//!
//! Triangles are classified against the ball by vertex distances (inside,
//! by convexity) and by exact point-triangle distance (outside). Straddling
//! triangles subdivide four ways until fragments resolve or fall below the
//! area tolerance; residual fragments are cut against the barycentrically
//! linearized sphere boundary, so the clipped area is accurate to far better
//! than the fragment size itself.

use crate::mesh::TriangleMesh;
use crate::vec3::Vec3;

/// Relative area tolerance for the recursive clip.
pub const CLIP_RELATIVE_TOLERANCE: f64 = 1e-9;

/// One quadrature node produced by the clip.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub position: Vec3,
    pub weight: f64,
    pub face: usize,
    /// Barycentric coordinates with respect to the owning face.
    pub bary: [f64; 3],
}

/// Distance from a point to a (solid) triangle.
pub fn point_triangle_distance(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (ap - ab * v).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (ap - ac * w).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp + (c - b) * w).norm();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm()
}

fn triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    0.5 * (b - a).cross(c - a).norm()
}

struct ClipJob<'a> {
    center: Vec3,
    radius: f64,
    /// Fragments below this area are cut against the linearized sphere
    /// boundary instead of recursing. Chosen so the linearization error
    /// (sagitta, about s^3 / 8R for fragment size s) stays below the area
    /// tolerance, which lets straddling fragments stop several levels early.
    leaf_area: f64,
    face: usize,
    visit: &'a mut dyn FnMut(&QuadPoint),
}

fn leaf_area_for(tau: f64, radius: f64) -> f64 {
    let s_max = (0.8 * radius * tau).cbrt();
    (0.5 * s_max * s_max).max(tau)
}

fn bary_mid(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

impl ClipJob<'_> {
    fn emit(&mut self, position: Vec3, weight: f64, bary: [f64; 3]) {
        (self.visit)(&QuadPoint { position, weight, face: self.face, bary });
    }

    /// Emit the three-midpoint rule for a fully interior fragment
    /// (exact for quadratic integrands).
    fn emit_inside(&mut self, p: [Vec3; 3], bary: [[f64; 3]; 3]) {
        let area = triangle_area(p[0], p[1], p[2]);
        if area <= 0.0 {
            return;
        }
        let w = area / 3.0;
        for k in 0..3 {
            let l = (k + 1) % 3;
            self.emit((p[k] + p[l]) / 2.0, w, bary_mid(bary[k], bary[l]));
        }
    }

    /// Cut the fragment against the linearized sphere boundary and emit
    /// centroid nodes for the interior part.
    fn emit_linear_cut(&mut self, p: [Vec3; 3], bary: [[f64; 3]; 3], dists: [f64; 3]) {
        // Signed level: negative inside the ball.
        let level: Vec<f64> = dists.iter().map(|d| d - self.radius).collect();
        let mut poly_p: Vec<Vec3> = Vec::with_capacity(4);
        let mut poly_b: Vec<[f64; 3]> = Vec::with_capacity(4);
        for k in 0..3 {
            let l = (k + 1) % 3;
            if level[k] <= 0.0 {
                poly_p.push(p[k]);
                poly_b.push(bary[k]);
            }
            if (level[k] <= 0.0) != (level[l] <= 0.0) {
                let t = level[k] / (level[k] - level[l]);
                poly_p.push(p[k] + (p[l] - p[k]) * t);
                let mut bm = [0.0; 3];
                for (m, b) in bm.iter_mut().enumerate() {
                    *b = bary[k][m] + (bary[l][m] - bary[k][m]) * t;
                }
                poly_b.push(bm);
            }
        }
        if poly_p.len() < 3 {
            return;
        }
        for k in 1..poly_p.len() - 1 {
            let (a, b, c) = (poly_p[0], poly_p[k], poly_p[k + 1]);
            let area = triangle_area(a, b, c);
            if area <= 0.0 {
                continue;
            }
            let centroid = (a + b + c) / 3.0;
            let mut bc = [0.0; 3];
            for (m, v) in bc.iter_mut().enumerate() {
                *v = (poly_b[0][m] + poly_b[k][m] + poly_b[k + 1][m]) / 3.0;
            }
            self.emit(centroid, area, bc);
        }
    }

    fn clip(&mut self, p: [Vec3; 3], bary: [[f64; 3]; 3]) {
        let dists = [
            p[0].dist(self.center),
            p[1].dist(self.center),
            p[2].dist(self.center),
        ];
        if dists.iter().all(|&d| d <= self.radius) {
            self.emit_inside(p, bary);
            return;
        }
        if point_triangle_distance(self.center, p[0], p[1], p[2]) >= self.radius {
            return;
        }
        let area = triangle_area(p[0], p[1], p[2]);
        if area < self.leaf_area {
            self.emit_linear_cut(p, bary, dists);
            return;
        }
        let m01 = (p[0] + p[1]) / 2.0;
        let m12 = (p[1] + p[2]) / 2.0;
        let m20 = (p[2] + p[0]) / 2.0;
        let b01 = bary_mid(bary[0], bary[1]);
        let b12 = bary_mid(bary[1], bary[2]);
        let b20 = bary_mid(bary[2], bary[0]);
        self.clip([p[0], m01, m20], [bary[0], b01, b20]);
        self.clip([m01, p[1], m12], [b01, bary[1], b12]);
        self.clip([m20, m12, p[2]], [b20, b12, bary[2]]);
        self.clip([m01, m12, m20], [b01, b12, b20]);
    }
}

/// Uniform grid over face bounding boxes for local ball queries.
#[derive(Debug, Clone)]
pub struct FaceGrid {
    cell: f64,
    origin: Vec3,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl FaceGrid {
    pub fn build(mesh: &TriangleMesh) -> FaceGrid {
        let mut lo = Vec3::splat(f64::INFINITY);
        let mut hi = Vec3::splat(f64::NEG_INFINITY);
        for v in mesh.vertices() {
            lo = Vec3::min_components(lo, *v);
            hi = Vec3::max_components(hi, *v);
        }
        let cell = (4.0 * mesh.median_edge_length()).max(1e-9);
        let span = hi - lo;
        let dims = [
            (span.x / cell).ceil() as usize + 1,
            (span.y / cell).ceil() as usize + 1,
            (span.z / cell).ceil() as usize + 1,
        ];
        let mut cells = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        for fi in 0..mesh.face_count() {
            let ps = mesh.face_points(fi);
            let mut flo = ps[0];
            let mut fhi = ps[0];
            for p in &ps[1..] {
                flo = Vec3::min_components(flo, *p);
                fhi = Vec3::max_components(fhi, *p);
            }
            let (i0, j0, k0) = Self::cell_of(flo, lo, cell, dims);
            let (i1, j1, k1) = Self::cell_of(fhi, lo, cell, dims);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    for k in k0..=k1 {
                        cells[(i * dims[1] + j) * dims[2] + k].push(fi as u32);
                    }
                }
            }
        }
        FaceGrid { cell, origin: lo, dims, cells }
    }

    fn cell_of(p: Vec3, origin: Vec3, cell: f64, dims: [usize; 3]) -> (usize, usize, usize) {
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        (
            clamp((p.x - origin.x) / cell, dims[0]),
            clamp((p.y - origin.y) / cell, dims[1]),
            clamp((p.z - origin.z) / cell, dims[2]),
        )
    }

    /// Faces whose bounding cells intersect the ball's bounding box.
    pub fn candidates(&self, center: Vec3, radius: f64, out: &mut Vec<u32>, seen: &mut Vec<u32>, stamp: u32) {
        out.clear();
        let r = Vec3::splat(radius);
        let (i0, j0, k0) = Self::cell_of(center - r, self.origin, self.cell, self.dims);
        let (i1, j1, k1) = Self::cell_of(center + r, self.origin, self.cell, self.dims);
        for i in i0..=i1 {
            for j in j0..=j1 {
                for k in k0..=k1 {
                    for &f in &self.cells[(i * self.dims[1] + j) * self.dims[2] + k] {
                        if seen[f as usize] != stamp {
                            seen[f as usize] = stamp;
                            out.push(f);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

/// Visit quadrature nodes covering `mesh` intersected with the open ball.
pub fn ball_quadrature(
    mesh: &TriangleMesh,
    center: Vec3,
    radius: f64,
    mut visit: impl FnMut(&QuadPoint),
) {
    let tau = CLIP_RELATIVE_TOLERANCE * mesh.total_area().max(1e-300);
    let mut job = ClipJob {
        center,
        radius,
        leaf_area: leaf_area_for(tau, radius),
        face: 0,
        visit: &mut visit,
    };
    for fi in 0..mesh.face_count() {
        job.face = fi;
        let p = mesh.face_points(fi);
        job.clip(
            p,
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        );
    }
}

/// Like [`ball_quadrature`] but restricted to a candidate face list.
pub fn ball_quadrature_faces(
    mesh: &TriangleMesh,
    faces: &[u32],
    center: Vec3,
    radius: f64,
    visit: impl FnMut(&QuadPoint),
) {
    let tau = CLIP_RELATIVE_TOLERANCE * mesh.total_area().max(1e-300);
    ball_quadrature_faces_tol(mesh, faces, center, radius, tau, visit)
}

/// Candidate-list quadrature with an explicit area tolerance; coarse passes
/// that only rank candidates use a loose one.
pub fn ball_quadrature_faces_tol(
    mesh: &TriangleMesh,
    faces: &[u32],
    center: Vec3,
    radius: f64,
    tau: f64,
    mut visit: impl FnMut(&QuadPoint),
) {
    let mut job = ClipJob {
        center,
        radius,
        leaf_area: leaf_area_for(tau, radius),
        face: 0,
        visit: &mut visit,
    };
    for &fi in faces {
        job.face = fi as usize;
        let p = mesh.face_points(fi as usize);
        job.clip(
            p,
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        );
    }
}

/// Area of the mesh inside the ball.
pub fn ball_mass(mesh: &TriangleMesh, center: Vec3, radius: f64) -> f64 {
    let mut area = 0.0;
    ball_quadrature(mesh, center, radius, |q| area += q.weight);
    area
}
