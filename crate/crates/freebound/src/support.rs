//! Ball curvatures of a support surface, the boundary-curvature identity,
//! and the support inequality.
//!
//! The kernel Z(x, y) = 2 (x - y) . normal(x) / |x - y|^2 is the curvature
//! of the ball tangent to the surface at x that passes through y. Suprema
//! and infima over a sample set give the interior and exterior ball
//! curvatures; the diagonal limit y -> x is the normal curvature, supplied
//! analytically when a descriptor is available.

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::monotonicity;
use crate::operators::{BoundaryField, MeanCurvatureField};
use crate::vec3::{vec3, Vec3};
use serde::Serialize;
use std::f64::consts::PI;

/// Analytic description of a support surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceDescriptor {
    Sphere { center: Vec3, radius: f64 },
    /// Axis-aligned ellipsoid centered at the origin.
    Ellipsoid { a: f64, b: f64, c: f64 },
    Plane { point: Vec3, normal: Vec3 },
}

impl SurfaceDescriptor {
    /// Level function vanishing on the surface (sign: negative inside).
    pub fn level(&self, p: Vec3) -> f64 {
        match *self {
            SurfaceDescriptor::Sphere { center, radius } => {
                (p - center).norm_sq() / (radius * radius) - 1.0
            }
            SurfaceDescriptor::Ellipsoid { a, b, c } => {
                p.x * p.x / (a * a) + p.y * p.y / (b * b) + p.z * p.z / (c * c) - 1.0
            }
            SurfaceDescriptor::Plane { point, normal } => (p - point).dot(normal),
        }
    }

    /// Outward unit normal at a surface point.
    pub fn normal_at(&self, p: Vec3) -> Vec3 {
        match *self {
            SurfaceDescriptor::Sphere { center, .. } => {
                (p - center).normalized().unwrap_or(Vec3::EZ)
            }
            SurfaceDescriptor::Ellipsoid { a, b, c } => {
                vec3(p.x / (a * a), p.y / (b * b), p.z / (c * c))
                    .normalized()
                    .unwrap_or(Vec3::EZ)
            }
            SurfaceDescriptor::Plane { normal, .. } => normal.normalized().unwrap_or(Vec3::EZ),
        }
    }

    /// Project a nearby point onto the surface.
    pub fn project(&self, p: Vec3) -> Vec3 {
        match *self {
            SurfaceDescriptor::Sphere { center, radius } => {
                center + (p - center).normalized().unwrap_or(Vec3::EZ) * radius
            }
            SurfaceDescriptor::Ellipsoid { a, b, c } => {
                // Newton steps along the level gradient.
                let mut q = p;
                for _ in 0..8 {
                    let f = self.level(q);
                    if f.abs() < 1e-14 {
                        break;
                    }
                    let g = vec3(
                        2.0 * q.x / (a * a),
                        2.0 * q.y / (b * b),
                        2.0 * q.z / (c * c),
                    );
                    q -= g * (f / g.norm_sq());
                }
                q
            }
            SurfaceDescriptor::Plane { point, normal } => {
                let n = normal.normalized().unwrap_or(Vec3::EZ);
                p - n * (p - point).dot(n)
            }
        }
    }

    /// Normal curvature in the (tangent) direction `dir` at a surface point
    /// with respect to the outward normal.
    pub fn normal_curvature(&self, p: Vec3, dir: Vec3) -> f64 {
        match *self {
            SurfaceDescriptor::Sphere { radius, .. } => 1.0 / radius,
            SurfaceDescriptor::Ellipsoid { a, b, c } => {
                let n = self.normal_at(p);
                let t = dir.reject_unit(n).normalized().unwrap_or(Vec3::EX);
                let g = vec3(p.x / (a * a), p.y / (b * b), p.z / (c * c)).norm();
                let dt = vec3(t.x / (a * a), t.y / (b * b), t.z / (c * c));
                t.dot(dt) / g
            }
            SurfaceDescriptor::Plane { .. } => 0.0,
        }
    }

    /// Largest normal curvature at a surface point.
    pub fn max_principal(&self, p: Vec3) -> f64 {
        match *self {
            SurfaceDescriptor::Sphere { radius, .. } => 1.0 / radius,
            SurfaceDescriptor::Plane { .. } => 0.0,
            SurfaceDescriptor::Ellipsoid { a, b, c } => {
                let n = self.normal_at(p);
                let t1 = orthonormal_to(n);
                let t2 = n.cross(t1);
                let g = vec3(p.x / (a * a), p.y / (b * b), p.z / (c * c)).norm();
                let d = |v: Vec3| vec3(v.x / (a * a), v.y / (b * b), v.z / (c * c));
                let (m11, m12, m22) = (t1.dot(d(t1)) / g, t1.dot(d(t2)) / g, t2.dot(d(t2)) / g);
                let mean = 0.5 * (m11 + m22);
                let disc = (0.25 * (m11 - m22).powi(2) + m12 * m12).sqrt();
                mean + disc
            }
        }
    }

    /// Maximal principal curvature over a dense parameter grid.
    pub fn max_principal_dense(&self, samples: usize) -> f64 {
        match *self {
            SurfaceDescriptor::Sphere { radius, .. } => 1.0 / radius,
            SurfaceDescriptor::Plane { .. } => 0.0,
            SurfaceDescriptor::Ellipsoid { .. } => fibonacci_directions(samples)
                .map(|u| {
                    let p = self.direction_point(u);
                    self.max_principal(p)
                })
                .fold(0.0, f64::max),
        }
    }

    fn direction_point(&self, u: Vec3) -> Vec3 {
        match *self {
            SurfaceDescriptor::Sphere { center, radius } => center + u * radius,
            SurfaceDescriptor::Ellipsoid { a, b, c } => vec3(a * u.x, b * u.y, c * u.z),
            SurfaceDescriptor::Plane { point, .. } => point,
        }
    }
}

fn orthonormal_to(n: Vec3) -> Vec3 {
    let cand = if n.x.abs() < 0.9 { Vec3::EX } else { Vec3::EY };
    cand.reject_unit(n).normalized().unwrap_or(Vec3::EY)
}

fn fibonacci_directions(n: usize) -> impl Iterator<Item = Vec3> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..n).map(move |i| {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let phi = 2.0 * PI * (i as f64 / golden).fract();
        vec3(rho * phi.cos(), rho * phi.sin(), z)
    })
}

/// Sampled, oriented support surface.
#[derive(Debug, Clone)]
pub struct SupportSurface {
    pub samples: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub descriptor: Option<SurfaceDescriptor>,
    /// Median nearest-neighbor spacing; exclusion scale for point clouds.
    pub sample_spacing: f64,
}

impl SupportSurface {
    pub fn from_point_cloud(samples: Vec<Vec3>, normals: Vec<Vec3>) -> Result<SupportSurface> {
        Self::build(samples, normals, None)
    }

    pub fn from_descriptor(desc: SurfaceDescriptor, count: usize) -> Result<SupportSurface> {
        if count < 2 {
            return Err(Error::invalid("support surface needs at least 2 samples"));
        }
        if let SurfaceDescriptor::Plane { .. } = desc {
            return Err(Error::invalid(
                "plane sampling needs an explicit patch; supply a point cloud",
            ));
        }
        let samples: Vec<Vec3> = fibonacci_directions(count)
            .map(|u| desc.direction_point(u))
            .collect();
        let normals = samples.iter().map(|&p| desc.normal_at(p)).collect();
        Self::build(samples, normals, Some(desc))
    }

    fn build(
        samples: Vec<Vec3>,
        normals: Vec<Vec3>,
        descriptor: Option<SurfaceDescriptor>,
    ) -> Result<SupportSurface> {
        if samples.len() != normals.len() {
            return Err(Error::invalid("samples and normals differ in length"));
        }
        if samples.len() < 2 {
            return Err(Error::invalid("support surface needs at least 2 samples"));
        }
        for (i, n) in normals.iter().enumerate() {
            if (n.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::invalid(format!("normal {i} is not unit")));
            }
            if let Some(d) = &descriptor {
                if d.level(samples[i]).abs() > 1e-10 {
                    return Err(Error::invalid(format!(
                        "sample {i} violates the descriptor level set"
                    )));
                }
            }
        }
        // Median nearest-neighbor distance from a subsample.
        let step = (samples.len() / 256).max(1);
        let mut nn: Vec<f64> = samples
            .iter()
            .step_by(step)
            .map(|&p| {
                samples
                    .iter()
                    .map(|&q| p.dist(q))
                    .filter(|&d| d > 0.0)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        nn.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let sample_spacing = nn.get(nn.len() / 2).copied().unwrap_or(0.0);
        Ok(SupportSurface { samples, normals, descriptor, sample_spacing })
    }
}

/// Curvature of the ball tangent at `x` (with outward normal `gx`) through
/// `y`.
pub fn z_kernel(x: Vec3, gx: Vec3, y: Vec3) -> Result<f64> {
    let d2 = (x - y).norm_sq();
    if d2 < 1e-300 {
        return Err(Error::invalid("z kernel needs distinct points"));
    }
    Ok(2.0 * (x - y).dot(gx) / d2)
}

/// Per-sample ball curvatures over a subset.
#[derive(Debug, Clone, Serialize)]
pub struct BallCurvatureReport {
    /// Indices (into the surface samples) forming the subset A.
    pub subset: Vec<usize>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub ball: Vec<f64>,
    pub sup_upper: f64,
    pub inf_lower: f64,
    pub sup_ball: f64,
    pub argmax_pair: (usize, usize),
    /// Present for point clouds without a descriptor: radius below which
    /// pairs were skipped (diagonal limit unavailable).
    pub exclusion_radius: Option<f64>,
}

/// Interior/exterior ball curvatures of every subset sample against the
/// subset. With a descriptor, the diagonal limit (normal curvatures) joins
/// the supremum and the best pair is polished by projected ascent.
pub fn ball_curvatures(
    surface: &SupportSurface,
    subset: Option<&[usize]>,
) -> Result<BallCurvatureReport> {
    let subset: Vec<usize> = match subset {
        Some(s) => s.to_vec(),
        None => (0..surface.samples.len()).collect(),
    };
    if subset.len() < 2 {
        return Err(Error::invalid("ball curvatures need at least 2 samples"));
    }
    for &i in &subset {
        if i >= surface.samples.len() {
            return Err(Error::invalid(format!("subset index {i} out of range")));
        }
    }
    let exclusion = if surface.descriptor.is_some() {
        0.0
    } else {
        2.0 * surface.sample_spacing
    };

    let mut upper = Vec::with_capacity(subset.len());
    let mut lower = Vec::with_capacity(subset.len());
    let mut ball = Vec::with_capacity(subset.len());
    let mut sup_upper = f64::NEG_INFINITY;
    let mut argmax_pair = (subset[0], subset[1]);
    let mut inf_lower = f64::INFINITY;

    for (slot, &i) in subset.iter().enumerate() {
        let x = surface.samples[i];
        let gx = surface.normals[i];
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        let mut best_y = None;
        for &j in &subset {
            if j == i {
                continue;
            }
            let y = surface.samples[j];
            if (x - y).norm() <= exclusion {
                continue;
            }
            let z = z_kernel(x, gx, y)?;
            if z > hi {
                hi = z;
                best_y = Some(j);
            }
            lo = lo.min(z);
        }
        if let Some(desc) = &surface.descriptor {
            // Diagonal limit: the normal curvatures at x.
            hi = hi.max(desc.max_principal(x));
            // Polish the best far pair on the analytic surface.
            if let Some(j) = best_y {
                let polished = polish_pair(desc, x, gx, surface.samples[j]);
                hi = hi.max(polished);
            }
        }
        if !hi.is_finite() || !lo.is_finite() {
            return Err(Error::invalid(format!(
                "sample {i} has no admissible partners (exclusion too large)"
            )));
        }
        if hi > sup_upper {
            sup_upper = hi;
            argmax_pair = (i, best_y.unwrap_or(i));
        }
        inf_lower = inf_lower.min(lo);
        upper.push(hi);
        lower.push(lo);
        ball.push(hi.max(-lo).max(0.0));
        let _ = slot;
    }
    let sup_ball = ball.iter().copied().fold(0.0, f64::max);
    Ok(BallCurvatureReport {
        subset,
        upper,
        lower,
        ball,
        sup_upper,
        inf_lower,
        sup_ball,
        argmax_pair,
        exclusion_radius: (exclusion > 0.0).then_some(exclusion),
    })
}

/// Projected gradient ascent of y -> Z(x, y) on the descriptor surface,
/// started from the best sampled partner.
fn polish_pair(desc: &SurfaceDescriptor, x: Vec3, gx: Vec3, y0: Vec3) -> f64 {
    // The diagonal limit is supplied analytically, so the polish only
    // refines far maxima: candidates closer to x than half the starting
    // distance are rejected (Z is numerically ill-conditioned near x).
    let min_dist = 0.5 * (x - y0).norm();
    let mut y = y0;
    let mut best = z_kernel(x, gx, y).unwrap_or(f64::NEG_INFINITY);
    let mut step = 0.25 * (x - y0).norm().max(1e-9);
    for _ in 0..20 {
        let d = x - y;
        let d2 = d.norm_sq();
        // grad_y Z = -2 gx / |d|^2 + 4 (d . gx) d / |d|^4.
        let grad = gx * (-2.0 / d2) + d * (4.0 * d.dot(gx) / (d2 * d2));
        let ny = desc.normal_at(y);
        let tangent = grad.reject_unit(ny);
        if tangent.norm() * step < 1e-12 * best.abs().max(1.0) {
            break;
        }
        let candidate = desc.project(y + tangent.normalized().unwrap() * step);
        let z = z_kernel(x, gx, candidate).unwrap_or(f64::NEG_INFINITY);
        if (x - candidate).norm() >= min_dist && z > best + 1e-13 * best.abs().max(1.0) {
            best = z;
            y = candidate;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    best
}

/// Both sides of the boundary-curvature identity at a boundary point:
/// 2 theta^2 + (2/pi) defect-integral against
/// h2/(8 pi) + (1/2 pi) boundary integral of Z(., x0).
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryIdentityReport {
    pub center: [f64; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub theta_squared: f64,
    pub defect_term: f64,
}

pub fn boundary_curvature_identity(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    boundary: &BoundaryField,
    surface: &SupportSurface,
    x0: Vec3,
) -> Result<BoundaryIdentityReport> {
    // x0 must be a boundary sample.
    let tol = 0.5 * mesh.median_edge_length();
    let slot = boundary
        .vertex_indices
        .iter()
        .position(|&v| mesh.vertices()[v].dist(x0) <= tol)
        .ok_or_else(|| Error::invalid("center is not on the boundary support"))?;
    let x0 = mesh.vertices()[boundary.vertex_indices[slot]];

    // Plain density (no reflected term: a general support surface has no
    // inversion structure).
    let mut engine = monotonicity::BallMassEngine::new(mesh);
    let hm = mesh.median_edge_length().max(1e-12);
    let ladder = [5.0 * hm, 6.5 * hm, 8.45 * hm];
    let samples: Vec<f64> = ladder
        .iter()
        .map(|&r| engine.mass(x0, r) / (PI * r * r))
        .collect();
    let theta = extrapolate_r2(&ladder, &samples).max(0.0);

    let defect = monotonicity::equality_defect_l2(mesh, h, x0).powi(2);
    let lhs = 2.0 * theta + 2.0 / PI * defect;

    let h2 = monotonicity::full_h2_integral(mesh, h);
    let mut boundary_integral = 0.0;
    for (k, &v) in boundary.vertex_indices.iter().enumerate() {
        let x = mesh.vertices()[v];
        let w = boundary.weights[k];
        if k == slot {
            // Diagonal closure: normal curvature along the boundary tangent.
            if let Some(desc) = &surface.descriptor {
                boundary_integral += w * desc.normal_curvature(x, boundary.tangents[k]);
            }
            continue;
        }
        let gamma = match &surface.descriptor {
            Some(desc) => desc.normal_at(x),
            None => boundary.conormals[k],
        };
        boundary_integral += w * z_kernel(x, gamma, x0)?;
    }
    let rhs = h2 / (8.0 * PI) + boundary_integral / (2.0 * PI);
    Ok(BoundaryIdentityReport {
        center: x0.to_array(),
        lhs,
        rhs,
        residual: lhs - rhs,
        theta_squared: theta,
        defect_term: 2.0 / PI * defect,
    })
}

fn extrapolate_r2(radii: &[f64], values: &[f64]) -> f64 {
    let n = radii.len() as f64;
    let sx: f64 = radii.iter().map(|r| r * r).sum();
    let sxx: f64 = radii.iter().map(|r| r.powi(4)).sum();
    let sy: f64 = values.iter().sum();
    let sxy: f64 = radii.iter().zip(values).map(|(r, d)| r * r * d).sum();
    let det = n * sxx - sx * sx;
    if det.abs() > 1e-300 {
        (sy * sxx - sx * sxy) / det
    } else {
        sy / n
    }
}

/// Verdict of the support inequality 2 pi <= quarter-h2 + boundary integral
/// of the interior ball curvature.
#[derive(Debug, Clone, Serialize)]
pub struct SupportInequalityVerdict {
    pub quarter_h2: f64,
    pub kappa_integral: f64,
    pub rhs: f64,
    pub margin: f64,
    pub equality_defect: f64,
    pub pass: bool,
    /// With a convex descriptor: (curvature bound k, k * boundary length,
    /// pass of the weaker bound).
    pub convex_bound: Option<(f64, f64, bool)>,
    /// Worst angle (degrees) between the conormal and the support normal.
    pub meeting_angle_deg: f64,
}

/// Measure how orthogonally the mesh meets the support surface: worst angle
/// between the boundary conormal and the support normal, and worst level-set
/// violation of boundary vertices.
pub fn support_admissibility(
    mesh: &TriangleMesh,
    boundary: &BoundaryField,
    surface: &SupportSurface,
) -> (f64, f64) {
    let mut angle = 0.0f64;
    let mut level = 0.0f64;
    for (k, &v) in boundary.vertex_indices.iter().enumerate() {
        let x = mesh.vertices()[v];
        let gamma = match &surface.descriptor {
            Some(desc) => {
                level = level.max(desc.level(x).abs());
                desc.normal_at(x)
            }
            None => {
                // Nearest sample's normal.
                let mut best = (f64::INFINITY, Vec3::EZ);
                for (s, n) in surface.samples.iter().zip(&surface.normals) {
                    let d = s.dist(x);
                    if d < best.0 {
                        best = (d, *n);
                    }
                }
                level = level.max(best.0);
                best.1
            }
        };
        let cosine = boundary.conormals[k].dot(gamma).clamp(-1.0, 1.0);
        angle = angle.max(cosine.acos());
    }
    (angle.to_degrees(), level)
}

pub fn support_inequality_check(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    boundary: &BoundaryField,
    surface: &SupportSurface,
    tol: f64,
) -> Result<SupportInequalityVerdict> {
    let quarter_h2 = crate::operators::h2_integral_interior(mesh, h) / 4.0;

    // kappa-bar over the boundary support: sup of Z over the boundary
    // samples, joined with the diagonal limit along the boundary direction.
    let nb = boundary.vertex_indices.len();
    if nb < 2 {
        return Err(Error::invalid("boundary sample set too small"));
    }
    let mut kappa_integral = 0.0;
    for k in 0..nb {
        let xk = mesh.vertices()[boundary.vertex_indices[k]];
        let gamma = match &surface.descriptor {
            Some(desc) => desc.normal_at(xk),
            None => boundary.conormals[k],
        };
        let mut kappa = f64::NEG_INFINITY;
        for l in 0..nb {
            if l == k {
                continue;
            }
            let y = mesh.vertices()[boundary.vertex_indices[l]];
            if (xk - y).norm_sq() < 1e-24 {
                continue;
            }
            kappa = kappa.max(z_kernel(xk, gamma, y)?);
        }
        if let Some(desc) = &surface.descriptor {
            kappa = kappa.max(desc.normal_curvature(xk, boundary.tangents[k]));
        }
        kappa_integral += boundary.weights[k] * kappa;
    }

    let rhs = quarter_h2 + kappa_integral;
    let margin = rhs - 2.0 * PI;
    let (angle_deg, _) = support_admissibility(mesh, boundary, surface);
    let convex_bound = surface.descriptor.map(|desc| {
        let k = desc.max_principal_dense(10_000);
        let weaker = quarter_h2 + k * boundary.total_length();
        (k, k * boundary.total_length(), 2.0 * PI <= weaker + tol)
    });
    Ok(SupportInequalityVerdict {
        quarter_h2,
        kappa_integral,
        rhs,
        margin,
        equality_defect: margin.abs(),
        pass: 2.0 * PI <= rhs + tol,
        convex_bound,
        meeting_angle_deg: angle_deg,
    })
}
