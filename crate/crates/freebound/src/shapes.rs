//! Generators for the canonical fixtures: free boundary disks and spherical
//! caps in the unit ball, closed curves, and calibration meshes.
//!
//! All generators are deterministic given their parameters (and seed, where
//! one applies). Boundary vertices of free boundary fixtures are placed on
//! the unit sphere exactly, up to floating point rounding.

use crate::curve::ClosedPolyline;
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::vec3::{vec3, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Kind and parameters of a generated fixture.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    FlatDisk { resolution: usize },
    SphericalCap { radius: f64, resolution: usize },
    PerturbedCap { radius: f64, resolution: usize, amplitude: f64, mode: u32, seed: u64 },
    Circle { radius: f64, resolution: usize },
    Ellipse { a: f64, b: f64, resolution: usize },
    Trefoil { resolution: usize },
    FourierRandom { seed: u64, resolution: usize },
}

/// Output of [`generate`]: either a surface or a curve.
#[derive(Debug, Clone)]
pub enum Generated {
    Mesh(TriangleMesh),
    Curve(ClosedPolyline),
}

pub fn generate(spec: &ShapeSpec) -> Result<Generated> {
    match *spec {
        ShapeSpec::FlatDisk { resolution } => Ok(Generated::Mesh(flat_disk(resolution)?)),
        ShapeSpec::SphericalCap { radius, resolution } => {
            Ok(Generated::Mesh(spherical_cap(radius, resolution)?))
        }
        ShapeSpec::PerturbedCap { radius, resolution, amplitude, mode, seed } => Ok(
            Generated::Mesh(perturbed_cap(radius, resolution, amplitude, mode, seed)?),
        ),
        ShapeSpec::Circle { radius, resolution } => {
            Ok(Generated::Curve(circle(radius, resolution)?))
        }
        ShapeSpec::Ellipse { a, b, resolution } => Ok(Generated::Curve(ellipse(a, b, resolution)?)),
        ShapeSpec::Trefoil { resolution } => Ok(Generated::Curve(trefoil(resolution)?)),
        ShapeSpec::FourierRandom { seed, resolution } => {
            Ok(Generated::Curve(fourier_random(seed, resolution)?))
        }
    }
}

const MIN_MESH_RESOLUTION: usize = 2;
const MIN_CURVE_RESOLUTION: usize = 8;

fn check_mesh_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_MESH_RESOLUTION {
        return Err(Error::invalid(format!(
            "resolution must be >= {MIN_MESH_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(())
}

fn check_curve_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_CURVE_RESOLUTION {
        return Err(Error::invalid(format!(
            "resolution must be >= {MIN_CURVE_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(())
}

/// Stitch two concentric vertex rings into an annulus of `p + q` triangles.
///
/// Ring vertex `k` of a ring with `count` vertices sits at azimuth
/// `2 pi k / count`; indices are `base + k`. Orientation follows increasing
/// azimuth seen from the `lo` side.
fn stitch_rings(
    faces: &mut Vec<[usize; 3]>,
    lo_base: usize,
    lo_count: usize,
    hi_base: usize,
    hi_count: usize,
) {
    let (p, q) = (lo_count, hi_count);
    let (mut i, mut j) = (0usize, 0usize);
    while i < p || j < q {
        let advance_lo = if i == p {
            false
        } else if j == q {
            true
        } else {
            (i + 1) * q <= (j + 1) * p
        };
        if advance_lo {
            faces.push([lo_base + i % p, hi_base + j % q, lo_base + (i + 1) % p]);
            i += 1;
        } else {
            faces.push([lo_base + i % p, hi_base + j % q, hi_base + (j + 1) % q]);
            j += 1;
        }
    }
}

/// Unit disk in the plane z = 0 with its boundary on the unit sphere.
///
/// Polar triangulation: ring `j` of `resolution` has radius `j / resolution`
/// and `6 j` vertices, so triangles have near-uniform aspect throughout.
pub fn flat_disk(resolution: usize) -> Result<TriangleMesh> {
    check_mesh_resolution(resolution)?;
    let m = resolution;
    let mut vertices = vec![Vec3::ZERO];
    let mut ring_base = vec![0usize; m + 1];
    for j in 1..=m {
        ring_base[j] = vertices.len();
        let count = 6 * j;
        let radius = j as f64 / m as f64;
        for k in 0..count {
            let t = 2.0 * PI * k as f64 / count as f64;
            vertices.push(vec3(radius * t.cos(), radius * t.sin(), 0.0));
        }
    }
    let mut faces = Vec::new();
    for k in 0..6 {
        faces.push([0, ring_base[1] + k, ring_base[1] + (k + 1) % 6]);
    }
    for j in 1..m {
        stitch_rings(&mut faces, ring_base[j], 6 * j, ring_base[j + 1], 6 * (j + 1));
    }
    TriangleMesh::new(vertices, faces)
}

/// Center of the sphere carrying the free boundary cap of radius `r`:
/// at distance `sqrt(1 + r^2)` the spheres intersect orthogonally.
pub fn cap_center(radius: f64) -> Vec3 {
    vec3(0.0, 0.0, (1.0 + radius * radius).sqrt())
}

/// Point of the cap closest to the origin.
pub fn cap_apex(radius: f64) -> Vec3 {
    vec3(0.0, 0.0, (1.0 + radius * radius).sqrt() - radius)
}

/// Exact area of the free boundary spherical cap of radius `r`.
pub fn cap_area(radius: f64) -> f64 {
    2.0 * PI * radius * radius * (1.0 - radius / (1.0 + radius * radius).sqrt())
}

/// Exact length of the cap's boundary circle (which lies on the unit sphere).
pub fn cap_boundary_length(radius: f64) -> f64 {
    2.0 * PI * radius / (1.0 + radius * radius).sqrt()
}

/// Polar angle (from the apex direction) subtended by the cap.
fn cap_alpha_max(radius: f64) -> f64 {
    (1.0 / radius).atan()
}

fn cap_rings(radius: f64, resolution: usize) -> (Vec<f64>, Vec<usize>) {
    let m = resolution;
    let alpha_max = cap_alpha_max(radius);
    let d_alpha = alpha_max / m as f64;
    let mut alphas = Vec::with_capacity(m);
    let mut counts = Vec::with_capacity(m);
    for j in 1..=m {
        let alpha = alpha_max * j as f64 / m as f64;
        alphas.push(alpha);
        counts.push((2.0 * PI * alpha.sin() / d_alpha).round().max(6.0) as usize);
    }
    (alphas, counts)
}

/// Spherical cap of radius `r` meeting the unit sphere orthogonally,
/// clipped to the closed unit ball. The boundary ring is placed on the
/// unit sphere exactly.
pub fn spherical_cap(radius: f64, resolution: usize) -> Result<TriangleMesh> {
    perturbed_cap_displaced(radius, resolution, |_, _| 0.0)
}

/// Spherical cap with interior vertices displaced along the sphere normal by
/// `amplitude * taper(alpha) * sin(mode * phi + phase)`. The taper vanishes
/// to second order at the boundary ring, so boundary vertices stay on the
/// unit sphere and the conormal defect stays small; the residual violation is
/// measured by the admissibility report rather than corrected.
pub fn perturbed_cap(
    radius: f64,
    resolution: usize,
    amplitude: f64,
    mode: u32,
    seed: u64,
) -> Result<TriangleMesh> {
    if amplitude < 0.0 {
        return Err(Error::invalid("perturbation amplitude must be >= 0"));
    }
    if mode == 0 {
        return Err(Error::invalid("perturbation mode must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random_range(0.0..2.0 * PI);
    let amp = amplitude * (0.85 + 0.3 * rng.random_range(0.0..1.0));
    let alpha_max = cap_alpha_max(radius);
    perturbed_cap_displaced(radius, resolution, move |alpha, phi| {
        let taper = (PI * alpha / (2.0 * alpha_max)).cos().powi(2);
        amp * taper * (mode as f64 * phi + phase).sin()
    })
}

fn perturbed_cap_displaced(
    radius: f64,
    resolution: usize,
    displacement: impl Fn(f64, f64) -> f64,
) -> Result<TriangleMesh> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("cap radius must be > 0, got {radius}")));
    }
    check_mesh_resolution(resolution)?;
    let m = resolution;
    let center = cap_center(radius);
    let (alphas, counts) = cap_rings(radius, m);

    // The displacement is ambiguous in phi at the apex; keep the apex fixed.
    let mut vertices = vec![cap_apex(radius)];
    let mut ring_base = vec![0usize; m + 1];
    let s = 1.0 / (1.0 + radius * radius).sqrt();
    let boundary_rho = radius * s;
    for j in 1..=m {
        ring_base[j] = vertices.len();
        let (alpha, count) = (alphas[j - 1], counts[j - 1]);
        for k in 0..count {
            let phi = 2.0 * PI * k as f64 / count as f64;
            let v = if j == m {
                // Boundary ring straight onto the unit sphere.
                vec3(boundary_rho * phi.cos(), boundary_rho * phi.sin(), s)
            } else {
                let nu = vec3(
                    alpha.sin() * phi.cos(),
                    alpha.sin() * phi.sin(),
                    -alpha.cos(),
                );
                let base = center + nu * radius;
                base + nu * displacement(alpha, phi)
            };
            vertices.push(v);
        }
    }
    let mut faces = Vec::new();
    for k in 0..counts[0] {
        faces.push([0, ring_base[1] + k, ring_base[1] + (k + 1) % counts[0]]);
    }
    for j in 1..m {
        stitch_rings(&mut faces, ring_base[j], counts[j - 1], ring_base[j + 1], counts[j]);
    }
    TriangleMesh::new(vertices, faces)
}

/// Sphere cap meeting the spheroid `x^2/a^2 + (y^2 + z^2)/b^2 = 1`
/// orthogonally along the circle at `x = x_plane`. Used as a free boundary
/// fixture for general support surfaces; an optional normal perturbation
/// (tapered to the pinned boundary) breaks the equality configuration.
pub fn spheroid_cap(
    a: f64,
    b: f64,
    x_plane: f64,
    resolution: usize,
    perturbation: Option<(f64, u32, u64)>,
) -> Result<TriangleMesh> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::invalid("spheroid semi-axes must be positive"));
    }
    if !(x_plane > 0.0 && x_plane < a) {
        return Err(Error::invalid("boundary plane must cut the spheroid at 0 < x < a"));
    }
    check_mesh_resolution(resolution)?;
    let m = resolution;
    let rho_p = b * (1.0 - x_plane * x_plane / (a * a)).sqrt();
    // Orthogonality fixes the cap sphere: center on the axis at a^2 / x_plane.
    let x_c = a * a / x_plane;
    let r_c = ((x_plane - x_c) * (x_plane - x_c) + rho_p * rho_p).sqrt();
    let beta_max = ((x_c - x_plane) / r_c).acos();
    let d_beta = beta_max / m as f64;

    let (amp, mode, phase) = match perturbation {
        Some((amplitude, mode, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (amplitude, mode, rng.random_range(0.0..2.0 * PI))
        }
        None => (0.0, 1, 0.0),
    };

    let mut vertices = vec![vec3(x_c - r_c, 0.0, 0.0)];
    let mut ring_base = vec![0usize; m + 1];
    let mut counts = vec![0usize; m + 1];
    for j in 1..=m {
        ring_base[j] = vertices.len();
        let beta = beta_max * j as f64 / m as f64;
        let count = (2.0 * PI * beta.sin() / d_beta).round().max(6.0) as usize;
        counts[j] = count;
        for k in 0..count {
            let phi = 2.0 * PI * k as f64 / count as f64;
            let v = if j == m {
                vec3(x_plane, rho_p * phi.cos(), rho_p * phi.sin())
            } else {
                let nu = vec3(-beta.cos(), beta.sin() * phi.cos(), beta.sin() * phi.sin());
                let taper = (PI * beta / (2.0 * beta_max)).cos().powi(2);
                let h = amp * taper * (mode as f64 * phi + phase).sin();
                vec3(x_c, 0.0, 0.0) + nu * (r_c + h)
            };
            vertices.push(v);
        }
    }
    let mut faces = Vec::new();
    for k in 0..counts[1] {
        faces.push([0, ring_base[1] + k, ring_base[1] + (k + 1) % counts[1]]);
    }
    for j in 1..m {
        stitch_rings(&mut faces, ring_base[j], counts[j], ring_base[j + 1], counts[j + 1]);
    }
    TriangleMesh::new(vertices, faces)
}

/// Closed icosphere of the given radius about the origin: an icosahedron
/// subdivided `level` times with vertices projected to the sphere.
/// Calibration fixture for curvature operators; not a free boundary surface.
pub fn closed_sphere(radius: f64, level: usize) -> Result<TriangleMesh> {
    if !(radius > 0.0) {
        return Err(Error::invalid("sphere radius must be > 0"));
    }
    if level > 7 {
        return Err(Error::invalid("icosphere level capped at 7"));
    }
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| vec3(x, y, z).normalized().unwrap() * radius)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mids[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vertices[a] + vertices[b]) / 2.0).normalized().unwrap() * radius;
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next_faces.push([f[0], mids[0], mids[2]]);
            next_faces.push([mids[0], f[1], mids[1]]);
            next_faces.push([mids[2], mids[1], f[2]]);
            next_faces.push([mids[0], mids[1], mids[2]]);
        }
        faces = next_faces;
    }
    TriangleMesh::new(vertices, faces)
}

/// Regular n-gon inscribed in the circle of the given radius (plane z = 0).
pub fn circle(radius: f64, resolution: usize) -> Result<ClosedPolyline> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("circle radius must be > 0, got {radius}")));
    }
    check_curve_resolution(resolution)?;
    ClosedPolyline::new(
        (0..resolution)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / resolution as f64;
                vec3(radius * t.cos(), radius * t.sin(), 0.0)
            })
            .collect(),
    )
}

/// Ellipse with semi-axes `a`, `b`, sampled at uniform parameter.
pub fn ellipse(a: f64, b: f64, resolution: usize) -> Result<ClosedPolyline> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::invalid("ellipse semi-axes must be positive"));
    }
    check_curve_resolution(resolution)?;
    ClosedPolyline::new(
        (0..resolution)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / resolution as f64;
                vec3(a * t.cos(), b * t.sin(), 0.0)
            })
            .collect(),
    )
}

/// Standard (2, 3) torus knot on the torus of radii (2, 1).
pub fn trefoil(resolution: usize) -> Result<ClosedPolyline> {
    check_curve_resolution(resolution)?;
    ClosedPolyline::new(
        (0..resolution)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / resolution as f64;
                let w = 2.0 + (3.0 * t).cos();
                vec3(w * (2.0 * t).cos(), w * (2.0 * t).sin(), (3.0 * t).sin())
            })
            .collect(),
    )
}

/// Seeded random closed curve: a unit circle plus a truncated trigonometric
/// series with coefficients decaying like 1/k^2 in every coordinate.
pub fn fourier_random(seed: u64, resolution: usize) -> Result<ClosedPolyline> {
    check_curve_resolution(resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_mode = 6usize;
    // coeffs[c][k] = (cos amplitude, sin amplitude) for coordinate c, mode k.
    let mut coeffs = [[(0.0f64, 0.0f64); 7]; 3];
    for coord in coeffs.iter_mut() {
        for (k, c) in coord.iter_mut().enumerate().skip(2) {
            let s = 0.18 / (k * k) as f64;
            *c = (rng.random_range(-s..s), rng.random_range(-s..s));
        }
    }
    ClosedPolyline::new(
        (0..resolution)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / resolution as f64;
                let mut p = vec3(t.cos(), t.sin(), 0.0);
                for (ci, coord) in coeffs.iter().enumerate() {
                    let mut acc = 0.0;
                    for (k, &(a, b)) in coord.iter().enumerate().take(max_mode + 1).skip(2) {
                        let kt = k as f64 * t;
                        acc += a * kt.cos() + b * kt.sin();
                    }
                    match ci {
                        0 => p.x += acc,
                        1 => p.y += acc,
                        _ => p.z += acc,
                    }
                }
                p
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_boundary_on_unit_sphere() {
        let mesh = flat_disk(16).unwrap();
        assert_eq!(mesh.boundary_loops().len(), 1);
        for &v in mesh.boundary_loops()[0].iter() {
            let p = mesh.vertices()[v];
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        for p in mesh.vertices() {
            assert_eq!(p.z, 0.0);
        }
    }

    #[test]
    fn disk_area_converges_to_pi() {
        let coarse = flat_disk(16).unwrap();
        let fine = flat_disk(32).unwrap();
        let err_c = (coarse.total_area() - PI).abs();
        let err_f = (fine.total_area() - PI).abs();
        assert!(err_f < err_c);
        assert!(err_f < 5e-3);
    }

    #[test]
    fn cap_geometry_matches_closed_form() {
        for &r in &[0.5, 1.0, 2.0] {
            let mesh = spherical_cap(r, 48).unwrap();
            let center = cap_center(r);
            // Boundary on the unit sphere and on the carrying sphere.
            for &v in mesh.boundary_loops()[0].iter() {
                let p = mesh.vertices()[v];
                assert!((p.norm() - 1.0).abs() < 1e-12, "boundary off unit sphere");
                assert!((p.dist(center) - r).abs() < 1e-12, "boundary off cap sphere");
            }
            // All vertices on the carrying sphere.
            for p in mesh.vertices() {
                assert!((p.dist(center) - r).abs() < 1e-10);
            }
            let rel = (mesh.total_area() - cap_area(r)).abs() / cap_area(r);
            assert!(rel < 4e-3, "cap r={r} area off by {rel:.2e}");
        }
    }

    #[test]
    fn cap_area_refines() {
        let r = 1.0;
        let coarse = spherical_cap(r, 32).unwrap();
        let fine = spherical_cap(r, 64).unwrap();
        let err_c = (coarse.total_area() - cap_area(r)).abs();
        let err_f = (fine.total_area() - cap_area(r)).abs();
        assert!(err_f < 0.35 * err_c, "expected ~4x decay, got {err_c:.3e} -> {err_f:.3e}");
    }

    #[test]
    fn perturbed_cap_keeps_boundary_pinned() {
        let mesh = perturbed_cap(1.0, 24, 0.05, 3, 7).unwrap();
        for &v in mesh.boundary_loops()[0].iter() {
            assert!((mesh.vertices()[v].norm() - 1.0).abs() < 1e-12);
        }
        // Interior must actually move.
        let smooth = spherical_cap(1.0, 24).unwrap();
        let moved = mesh
            .vertices()
            .iter()
            .zip(smooth.vertices())
            .map(|(a, b)| a.dist(*b))
            .fold(0.0, f64::max);
        assert!(moved > 0.01);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = perturbed_cap(1.0, 12, 0.1, 3, 42).unwrap();
        let b = perturbed_cap(1.0, 12, 0.1, 3, 42).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let c = fourier_random(5, 64).unwrap();
        let d = fourier_random(5, 64).unwrap();
        assert_eq!(c.vertices(), d.vertices());
    }

    #[test]
    fn circle_length_error_is_second_order() {
        // Inscribed n-gon: 2 pi - length = 2 pi (pi^2 / 6) / n^2 + O(n^-4).
        let n = 256;
        let poly = circle(1.0, n).unwrap();
        let defect = 2.0 * PI - poly.length();
        let expected = 2.0 * PI * PI * PI / (6.0 * (n * n) as f64);
        assert!(defect > 0.0 && defect < 1.05 * expected);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(spherical_cap(0.0, 16).is_err());
        assert!(spherical_cap(-1.0, 16).is_err());
        assert!(circle(1.0, 4).is_err());
        assert!(flat_disk(1).is_err());
        assert!(spheroid_cap(2.0, 1.0, 2.5, 16, None).is_err());
    }

    #[test]
    fn closed_sphere_has_no_boundary() {
        let mesh = closed_sphere(1.0, 3).unwrap();
        assert!(!mesh.has_boundary());
        let area = mesh.total_area();
        assert!((area - 4.0 * PI).abs() / (4.0 * PI) < 2e-2);
    }

    #[test]
    fn spheroid_cap_boundary_on_spheroid() {
        let mesh = spheroid_cap(2.0, 1.0, 1.0, 24, None).unwrap();
        for &v in mesh.boundary_loops()[0].iter() {
            let p = mesh.vertices()[v];
            let level = p.x * p.x / 4.0 + p.y * p.y + p.z * p.z;
            assert!((level - 1.0).abs() < 1e-12);
        }
    }
}
