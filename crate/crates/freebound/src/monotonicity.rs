//! Radius profiles of the monotone quantity, annulus identity checks,
//! and small-radius densities.
//!
//! For a center x0 and radius r, the profile combines the area ratio of the
//! mesh inside B_r(x0), curvature integrals, and (for x0 != 0) correction
//! terms over the reflected ball around the inverted center xi(x0) with
//! radius r/|x0|. Consecutive differences of the profile sum are compared
//! against the annulus integral of the defect field |H/4 + v_perp/|v|^2|^2,
//! which the continuum identity makes exactly equal.
//!
//! All integrands are evaluated on the same clipped quadrature nodes with
//! the same face-projected, piecewise-linear curvature field, so the
//! discrete residual measures discretization quality, not bookkeeping.

use crate::clip::{self, FaceGrid, QuadPoint};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::operators::{BoundaryField, MeanCurvatureField};
use crate::vec3::{sphere_inversion, Vec3};
use serde::Serialize;
use std::f64::consts::PI;

/// Center treated as the origin below this norm.
const ORIGIN_EPS: f64 = 1e-12;

/// Sampled profile of g, g-hat and the annulus identity data.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub center: [f64; 3],
    pub radii: Vec<f64>,
    pub g: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub sum: Vec<f64>,
    /// Annulus defect integral over (r[k-1], r[k]]; zero at k = 0.
    pub annulus_lhs: Vec<f64>,
    /// sum[k] - sum[k-1]; zero at k = 0.
    pub delta_rhs: Vec<f64>,
}

impl RadialProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,g,g_hat,sum,lhs_residual,rhs_diff\n");
        for k in 0..self.radii.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.radii[k], self.g[k], self.g_hat[k], self.sum[k], self.annulus_lhs[k],
                self.delta_rhs[k]
            ));
        }
        out
    }
}

/// Verdict of [`monotonicity_check`].
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityVerdict {
    pub min_increment: f64,
    pub max_identity_residual: f64,
    pub tol: f64,
    pub monotone_pass: bool,
    pub identity_pass: bool,
}

impl MonotonicityVerdict {
    pub fn pass(&self) -> bool {
        self.monotone_pass && self.identity_pass
    }
}

/// Small-radius density estimate at a center.
#[derive(Debug, Clone, Serialize)]
pub struct DensityEstimate {
    pub center: [f64; 3],
    pub estimate: f64,
    pub radii: Vec<f64>,
    pub confidence_width: f64,
}

/// Area of the mesh inside the open ball.
pub fn ball_mass(mesh: &TriangleMesh, center: Vec3, radius: f64) -> f64 {
    clip::ball_mass(mesh, center, radius)
}

/// Interpolate the curvature field at a quadrature point and project it
/// onto the face normal so the pointwise square identity holds exactly.
#[inline]
fn h_at(mesh: &TriangleMesh, hvals: &[Vec3], q: &QuadPoint) -> Vec3 {
    let f = mesh.faces()[q.face];
    let h = hvals[f[0]] * q.bary[0] + hvals[f[1]] * q.bary[1] + hvals[f[2]] * q.bary[2];
    let n = mesh.face_normal(q.face);
    n * h.dot(n)
}

#[derive(Debug, Clone, Copy, Default)]
struct BallIntegrals {
    mass: f64,
    h2: f64,
    /// H . (x - c)
    h_rel: f64,
    /// |x - c|^2 + P_x(x - c) . x
    quad_term: f64,
    /// H . (|x - c|^2 x)
    h_cubic: f64,
    /// H . x
    h_pos: f64,
    /// |H/4 + (x - c)^perp / |x - c|^2|^2 (excluded near the center)
    defect: f64,
}

fn ball_integrals(
    mesh: &TriangleMesh,
    hvals: &[Vec3],
    center: Vec3,
    radius: f64,
    exclusion: f64,
) -> BallIntegrals {
    let mut acc = BallIntegrals::default();
    clip::ball_quadrature(mesh, center, radius, |q| {
        accumulate(mesh, hvals, center, exclusion, q, &mut acc);
    });
    acc
}

#[inline]
fn accumulate(
    mesh: &TriangleMesh,
    hvals: &[Vec3],
    center: Vec3,
    exclusion: f64,
    q: &QuadPoint,
    acc: &mut BallIntegrals,
) {
    let w = q.weight;
    let x = q.position;
    let h = h_at(mesh, hvals, q);
    let n = mesh.face_normal(q.face);
    let rel = x - center;
    acc.mass += w;
    acc.h2 += w * h.norm_sq();
    acc.h_rel += w * h.dot(rel);
    let rel_n = rel.dot(n);
    acc.quad_term += w * (rel.norm_sq() + (rel.dot(x) - rel_n * n.dot(x)));
    acc.h_cubic += w * h.dot(x) * rel.norm_sq();
    acc.h_pos += w * h.dot(x);
    let d2 = rel.norm_sq();
    if d2 > exclusion * exclusion {
        // (x - c)^perp w.r.t. the face plane; the umbilic smooth limit of
        // the excluded disk contributes zero.
        let defect_vec = h / 4.0 + n * (rel_n / d2);
        acc.defect += w * defect_vec.norm_sq();
    }
}

/// Nudge radii off the set of exact vertex distances.
fn nudged_radii(mesh: &TriangleMesh, center: Vec3, radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() {
        return Err(Error::invalid("radius grid is empty"));
    }
    let mut out = Vec::with_capacity(radii.len());
    let mut prev = 0.0;
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("radii must be positive, got {r}")));
        }
        if r <= prev {
            return Err(Error::invalid("radii must be strictly increasing"));
        }
        let mut r_adj = r;
        for _ in 0..3 {
            let eps = 1e-7 * r_adj;
            let hit = mesh
                .vertices()
                .iter()
                .any(|v| (v.dist(center) - r_adj).abs() < eps);
            if !hit {
                break;
            }
            r_adj *= 1.0 + 1e-7;
        }
        out.push(r_adj);
        prev = r;
    }
    Ok(out)
}

/// Profile of g, g-hat, their sum, and per-annulus identity data.
pub fn g_profile(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    boundary: &BoundaryField,
    x0: Vec3,
    radii: &[f64],
) -> Result<RadialProfile> {
    let radii = nudged_radii(mesh, x0, radii)?;
    let hvals = &h.field.values;
    let exclusion = 2.0 * mesh.median_edge_length();
    let at_origin = x0.norm() < ORIGIN_EPS;
    let boundary_term = boundary.position_conormal_integral(mesh);

    let mut g = Vec::with_capacity(radii.len());
    let mut g_hat = Vec::with_capacity(radii.len());
    let mut sum = Vec::with_capacity(radii.len());
    let mut defects = Vec::with_capacity(radii.len());

    let xi = if at_origin { Vec3::ZERO } else { sphere_inversion(x0) };
    let inv_norm = if at_origin { 0.0 } else { 1.0 / x0.norm() };

    for &r in &radii {
        let main = ball_integrals(mesh, hvals, x0, r, exclusion);
        let g_r = main.mass / (PI * r * r) + main.h2 / (16.0 * PI)
            + main.h_rel / (2.0 * PI * r * r);
        let (g_hat_r, defect_total) = if at_origin {
            let gh = -r.powi(-2).min(1.0) / (2.0 * PI) * boundary_term;
            (gh, main.defect / PI)
        } else {
            let s = r * inv_norm;
            let hat = ball_integrals(mesh, hvals, xi, s, exclusion);
            let g_at_xi = hat.mass / (PI * s * s) + hat.h2 / (16.0 * PI)
                + hat.h_rel / (2.0 * PI * s * s);
            let gh = g_at_xi - hat.quad_term / (PI * s * s) - hat.h_cubic / (2.0 * PI * s * s)
                + hat.h_pos / (2.0 * PI)
                + hat.mass / PI;
            (gh, (main.defect + hat.defect) / PI)
        };
        g.push(g_r);
        g_hat.push(g_hat_r);
        sum.push(g_r + g_hat_r);
        defects.push(defect_total);
    }

    let mut annulus_lhs = vec![0.0; radii.len()];
    let mut delta_rhs = vec![0.0; radii.len()];
    for k in 1..radii.len() {
        annulus_lhs[k] = defects[k] - defects[k - 1];
        delta_rhs[k] = sum[k] - sum[k - 1];
    }

    Ok(RadialProfile {
        center: x0.to_array(),
        radii,
        g,
        g_hat,
        sum,
        annulus_lhs,
        delta_rhs,
    })
}

/// Check that the profile sum is non-decreasing and that the annulus defect
/// integrals match the profile increments, both within `tol`.
pub fn monotonicity_check(profile: &RadialProfile, tol: f64) -> Result<MonotonicityVerdict> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if profile.radii.len() < 2 {
        return Err(Error::invalid("profile needs at least two radii"));
    }
    for w in profile.radii.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("profile radii must be strictly increasing"));
        }
    }
    let mut min_increment = f64::INFINITY;
    let mut max_residual: f64 = 0.0;
    for k in 1..profile.radii.len() {
        min_increment = min_increment.min(profile.delta_rhs[k]);
        max_residual = max_residual.max((profile.annulus_lhs[k] - profile.delta_rhs[k]).abs());
    }
    Ok(MonotonicityVerdict {
        min_increment,
        max_identity_residual: max_residual,
        tol,
        monotone_pass: min_increment >= -tol,
        identity_pass: max_residual <= tol,
    })
}

/// Reusable engine for many small-ball mass queries against one mesh.
/// The face grid can be shared across engines (and threads).
pub struct BallMassEngine<'m> {
    mesh: &'m TriangleMesh,
    grid: std::borrow::Cow<'m, FaceGrid>,
    seen: Vec<u32>,
    stamp: u32,
    buf: Vec<u32>,
    /// Absolute area tolerance; `None` means the default clip tolerance.
    tau: Option<f64>,
}

impl<'m> BallMassEngine<'m> {
    pub fn new(mesh: &'m TriangleMesh) -> BallMassEngine<'m> {
        Self::from_parts(mesh, std::borrow::Cow::Owned(FaceGrid::build(mesh)), None)
    }

    pub fn with_grid(mesh: &'m TriangleMesh, grid: &'m FaceGrid) -> BallMassEngine<'m> {
        Self::from_parts(mesh, std::borrow::Cow::Borrowed(grid), None)
    }

    fn from_parts(
        mesh: &'m TriangleMesh,
        grid: std::borrow::Cow<'m, FaceGrid>,
        tau: Option<f64>,
    ) -> BallMassEngine<'m> {
        BallMassEngine { mesh, grid, seen: vec![0u32; mesh.face_count()], stamp: 0, buf: Vec::new(), tau }
    }

    /// Loosen the clip tolerance; used by ranking passes that do not need
    /// final accuracy.
    pub fn set_relative_tolerance(&mut self, rel: f64) {
        self.tau = Some(rel * self.mesh.total_area().max(1e-300));
    }

    pub fn mesh(&self) -> &'m TriangleMesh {
        self.mesh
    }

    pub fn mass(&mut self, center: Vec3, radius: f64) -> f64 {
        // Balls centered far outside the mesh resolve to an empty candidate
        // list; the clamped cell range still covers any overlap region.
        let mut area = 0.0;
        self.stamp += 1;
        self.grid
            .candidates(center, radius, &mut self.buf, &mut self.seen, self.stamp);
        let faces = std::mem::take(&mut self.buf);
        let tau = self
            .tau
            .unwrap_or(clip::CLIP_RELATIVE_TOLERANCE * self.mesh.total_area().max(1e-300));
        clip::ball_quadrature_faces_tol(self.mesh, &faces, center, radius, tau, |q| {
            area += q.weight;
        });
        self.buf = faces;
        area
    }

    /// Tilde density sample at one radius: plain ratio plus (for centers off
    /// the origin) the reflected-ball ratio.
    pub fn density_sample(&mut self, x0: Vec3, radius: f64) -> f64 {
        let mut d = self.mass(x0, radius) / (PI * radius * radius);
        let n = x0.norm();
        if n >= ORIGIN_EPS {
            let s = radius / n;
            d += self.mass(sphere_inversion(x0), s) / (PI * s * s);
        }
        d
    }
}

/// Extrapolated small-radius density: samples on a short ladder of radii
/// above the mesh resolution scale, fit linearly in r^2 and read at r = 0.
/// The confidence width is the maximal pairwise spread of the raw samples.
pub fn tilde_density(mesh: &TriangleMesh, x0: Vec3) -> DensityEstimate {
    let mut engine = BallMassEngine::new(mesh);
    tilde_density_with(&mut engine, x0)
}

pub fn tilde_density_with(engine: &mut BallMassEngine<'_>, x0: Vec3) -> DensityEstimate {
    let h = engine.mesh.median_edge_length().max(1e-12);
    let radii = [5.0 * h, 6.5 * h, 8.45 * h];
    let samples: Vec<f64> = radii.iter().map(|&r| engine.density_sample(x0, r)).collect();

    // Least squares for d(r) = theta + c r^2.
    let n = radii.len() as f64;
    let sx: f64 = radii.iter().map(|r| r * r).sum();
    let sxx: f64 = radii.iter().map(|r| r.powi(4)).sum();
    let sy: f64 = samples.iter().sum();
    let sxy: f64 = radii.iter().zip(&samples).map(|(r, d)| r * r * d).sum();
    let det = n * sxx - sx * sx;
    let theta = if det.abs() > 1e-300 { (sy * sxx - sx * sxy) / det } else { sy / n };

    let mut width: f64 = 0.0;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            width = width.max((samples[i] - samples[j]).abs());
        }
    }
    DensityEstimate {
        center: x0.to_array(),
        estimate: theta.max(0.0),
        radii: radii.to_vec(),
        confidence_width: width,
    }
}

/// Densities at every vertex with a single coarse radius. Used to shortlist
/// candidates for the maximal density search. Parallel over vertices with a
/// deterministic output order.
pub fn vertex_density_scan(mesh: &TriangleMesh, radius: f64) -> Vec<f64> {
    use rayon::prelude::*;
    let grid = FaceGrid::build(mesh);
    (0..mesh.vertex_count())
        .into_par_iter()
        .map_init(
            || {
                let mut e = BallMassEngine::with_grid(mesh, &grid);
                e.set_relative_tolerance(1e-6);
                e
            },
            |engine, i| engine.density_sample(mesh.vertices()[i], radius),
        )
        .collect()
}

/// Maximal tilde density over the mesh: coarse scan at every vertex, ladder
/// refinement on the top decile (at least 32 candidates). Ties resolve to
/// the lowest vertex index, keeping the result deterministic.
pub fn max_tilde_density(mesh: &TriangleMesh) -> (f64, usize, DensityEstimate) {
    use rayon::prelude::*;
    let coarse_r = 8.0 * mesh.median_edge_length();
    let coarse = vertex_density_scan(mesh, coarse_r);
    let mut order: Vec<usize> = (0..coarse.len()).collect();
    order.sort_by(|&a, &b| coarse[b].partial_cmp(&coarse[a]).unwrap().then(a.cmp(&b)));
    let count = (coarse.len() / 10).max(32).min(coarse.len());
    let grid = FaceGrid::build(mesh);
    let refined: Vec<(usize, DensityEstimate)> = order[..count]
        .par_iter()
        .map_init(
            || BallMassEngine::with_grid(mesh, &grid),
            |engine, &v| (v, tilde_density_with(engine, mesh.vertices()[v])),
        )
        .collect();
    let mut best: Option<(usize, DensityEstimate)> = None;
    for (v, est) in refined {
        let better = match &best {
            None => true,
            Some((bv, b)) => {
                est.estimate > b.estimate || (est.estimate == b.estimate && v < *bv)
            }
        };
        if better {
            best = Some((v, est));
        }
    }
    let (vertex, est) = best.expect("at least one candidate");
    (est.estimate, vertex, est)
}

/// Both sides of the global identity linking the full defect integrals,
/// the density at the center, the curvature energy and the boundary term.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub center: [f64; 3],
    pub defect_main: f64,
    pub defect_hat: f64,
    pub tilde_density: f64,
    pub h2_term: f64,
    pub boundary_term: f64,
    pub residual: f64,
}

/// Quadrature over the whole mesh (three-midpoint rule per face).
fn full_integrals(
    mesh: &TriangleMesh,
    hvals: &[Vec3],
    center: Vec3,
    exclusion: f64,
) -> BallIntegrals {
    let mut acc = BallIntegrals::default();
    for fi in 0..mesh.face_count() {
        let p = mesh.face_points(fi);
        let w = mesh.face_area(fi) / 3.0;
        let barys = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
        for bary in barys {
            let pos = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
            let q = QuadPoint { position: pos, weight: w, face: fi, bary };
            accumulate(mesh, hvals, center, exclusion, &q, &mut acc);
        }
    }
    acc
}

/// L2 norm of the defect field H/4 + (x - x0)^perp / |x - x0|^2 over the
/// whole mesh, with the usual exclusion disk around a center on the mesh.
pub fn equality_defect_l2(mesh: &TriangleMesh, h: &MeanCurvatureField, x0: Vec3) -> f64 {
    let exclusion = 2.0 * mesh.median_edge_length();
    full_integrals(mesh, &h.field.values, x0, exclusion).defect.sqrt()
}

/// Curvature energy over the whole mesh by piecewise-linear face quadrature
/// (consistent with the defect integrals above).
pub fn full_h2_integral(mesh: &TriangleMesh, h: &MeanCurvatureField) -> f64 {
    full_integrals(mesh, &h.field.values, Vec3::ZERO, 0.0).h2
}

/// Evaluate the global integral identity at a center; the residual tends to
/// zero under refinement.
pub fn integral_identity(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    boundary: &BoundaryField,
    x0: Vec3,
) -> IdentityReport {
    let hvals = &h.field.values;
    let exclusion = 2.0 * mesh.median_edge_length();
    let at_origin = x0.norm() < ORIGIN_EPS;
    let boundary_term = boundary.position_conormal_integral(mesh);
    let density = tilde_density(mesh, x0);

    let main = full_integrals(mesh, hvals, x0, exclusion);
    let (defect_hat, h2_coeff) = if at_origin {
        (0.0, 1.0 / (16.0 * PI))
    } else {
        let hat = full_integrals(mesh, hvals, sphere_inversion(x0), exclusion);
        (hat.defect / PI, 1.0 / (8.0 * PI))
    };
    let defect_main = main.defect / PI;
    let h2_term = h2_coeff * main.h2;
    let bd = boundary_term / (2.0 * PI);
    let residual = defect_main + defect_hat + density.estimate - h2_term - bd;
    IdentityReport {
        center: x0.to_array(),
        defect_main,
        defect_hat,
        tilde_density: density.estimate,
        h2_term,
        boundary_term: bd,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{conormal, mean_curvature};
    use crate::shapes;
    use crate::vec3::vec3;

    fn default_radii() -> Vec<f64> {
        (0..24).map(|k| 0.18 + 0.1 * k as f64).collect()
    }

    #[test]
    fn disk_profile_at_origin() {
        let mesh = shapes::flat_disk(32).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let profile = g_profile(&mesh, &h, &b, Vec3::ZERO, &default_radii()).unwrap();
        for (k, &r) in profile.radii.iter().enumerate() {
            let expected_g = r.powi(-2).min(1.0);
            assert!(
                (profile.g[k] - expected_g).abs() < 6e-3,
                "g({r}) = {}, expected {expected_g}",
                profile.g[k]
            );
            assert!((profile.sum[k]).abs() < 6e-3, "sum({r}) = {}", profile.sum[k]);
            assert!(profile.annulus_lhs[k].abs() < 1e-10);
        }
        let verdict = monotonicity_check(&profile, 10.0 * mesh.median_edge_length()).unwrap();
        assert!(verdict.pass(), "{verdict:?}");
    }

    #[test]
    fn disk_profile_at_boundary_point() {
        let mesh = shapes::flat_disk(48).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let profile = g_profile(&mesh, &h, &b, Vec3::EX, &default_radii()).unwrap();
        let verdict = monotonicity_check(&profile, 10.0 * mesh.median_edge_length()).unwrap();
        assert!(verdict.pass(), "{verdict:?}");
        // The small-radius limit of the sum is the tilde density (doubled
        // plain density on the boundary sphere).
        let d = tilde_density(&mesh, Vec3::EX);
        assert!((d.estimate - 1.0).abs() < 0.05, "density {d:?}");
    }

    #[test]
    fn cap_profile_at_apex_is_constant() {
        // Any point of the cap lies on the carrying sphere, and so does its
        // inversion (the sphere meets the unit sphere orthogonally, hence is
        // preserved by the inversion). Both defect fields vanish identically
        // and the profile sum is constant in r: the equality configuration.
        let mesh = shapes::spherical_cap(1.0, 48).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let apex = shapes::cap_apex(1.0);
        let radii: Vec<f64> = (0..24).map(|k| 0.15 + 0.08 * k as f64).collect();
        let profile = g_profile(&mesh, &h, &b, apex, &radii).unwrap();
        let verdict = monotonicity_check(&profile, 10.0 * mesh.median_edge_length()).unwrap();
        assert!(verdict.pass(), "{verdict:?}");
        for k in 1..profile.radii.len() {
            assert!(
                profile.delta_rhs[k].abs() < 5e-3,
                "expected near-constant sum, jump {} at r = {}",
                profile.delta_rhs[k],
                profile.radii[k]
            );
        }
    }

    #[test]
    fn cap_profile_at_origin_strictly_increases() {
        // The origin is off the carrying sphere, so the defect integrand is
        // strictly positive on the cap and the sum rises across every
        // annulus meeting the surface (which spans |x| in [sqrt(2)-1, 1]).
        let mesh = shapes::spherical_cap(1.0, 48).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let radii: Vec<f64> = (0..24).map(|k| 0.15 + 0.08 * k as f64).collect();
        let profile = g_profile(&mesh, &h, &b, Vec3::ZERO, &radii).unwrap();
        let verdict = monotonicity_check(&profile, 10.0 * mesh.median_edge_length()).unwrap();
        assert!(verdict.pass(), "{verdict:?}");
        for k in 1..profile.radii.len() {
            let (lo, hi) = (profile.radii[k - 1], profile.radii[k]);
            if lo > 0.45 && hi < 0.95 {
                assert!(
                    profile.delta_rhs[k] > 1e-4,
                    "expected strict increase on ({lo}, {hi}], got {}",
                    profile.delta_rhs[k]
                );
            }
        }
    }

    #[test]
    fn invalid_radius_grids_rejected() {
        let mesh = shapes::flat_disk(8).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        assert!(g_profile(&mesh, &h, &b, Vec3::ZERO, &[0.5, 0.4]).is_err());
        assert!(g_profile(&mesh, &h, &b, Vec3::ZERO, &[-0.1, 0.4]).is_err());
        assert!(g_profile(&mesh, &h, &b, Vec3::ZERO, &[]).is_err());
    }

    #[test]
    fn densities_on_disk() {
        let mesh = shapes::flat_disk(32).unwrap();
        let interior = tilde_density(&mesh, vec3(0.3, 0.0, 0.0));
        assert!((interior.estimate - 1.0).abs() < 2e-2, "{interior:?}");
        let origin = tilde_density(&mesh, Vec3::ZERO);
        assert!((origin.estimate - 1.0).abs() < 1e-3, "{origin:?}");
        let off = tilde_density(&mesh, vec3(0.0, 0.0, 2.0));
        assert!(off.estimate == 0.0);
    }

    #[test]
    fn density_doubles_on_two_sheets() {
        let a = shapes::flat_disk(48).unwrap();
        let rot = crate::vec3::Mat3::rotation(Vec3::EY, std::f64::consts::FRAC_PI_2);
        let b = a.transformed(rot, 1.0, Vec3::ZERO).unwrap();
        let union = a.disjoint_union(&b).unwrap();
        // The sheets intersect along the y-axis; a vertex there sees both.
        let d = tilde_density(&union, vec3(0.0, 0.5, 0.0));
        assert!((d.estimate - 2.0).abs() < 0.05, "{d:?}");
        let (max_d, _, _) = max_tilde_density(&union);
        assert!((max_d - 2.0).abs() < 0.1, "max density {max_d}");
    }

    #[test]
    fn integral_identity_on_disk_at_origin() {
        // 0 = 0 + 1 - 1: defect vanishes, density 1, boundary term 2 pi.
        let mesh = shapes::flat_disk(48).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let report = integral_identity(&mesh, &h, &b, Vec3::ZERO);
        assert!(report.defect_main.abs() < 1e-10);
        assert!((report.tilde_density - 1.0).abs() < 1e-3);
        assert!((report.boundary_term - 1.0).abs() < 1e-3);
        assert!(report.residual.abs() < 1e-2, "{report:?}");
    }

    #[test]
    fn integral_identity_on_cap() {
        // At the apex both defect fields vanish identically (the carrying
        // sphere osculates at every point, including the inverted apex),
        // leaving 1 = h2/(8 pi) + boundary/(2 pi).
        let mesh = shapes::spherical_cap(1.0, 48).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let apex = shapes::cap_apex(1.0);
        let report = integral_identity(&mesh, &h, &b, apex);
        assert!(report.defect_main < 5e-3, "{report:?}");
        assert!(report.defect_hat < 5e-3, "{report:?}");
        assert!((report.tilde_density - 1.0).abs() < 2e-2, "{report:?}");
        assert!(report.residual.abs() < 2e-2, "{report:?}");
    }

    #[test]
    fn identity_residual_decreases_under_refinement() {
        let mut residuals = Vec::new();
        for res in [24usize, 48] {
            let mesh = shapes::spherical_cap(1.0, res).unwrap();
            let h = mean_curvature(&mesh).unwrap();
            let b = conormal(&mesh).unwrap();
            let report = integral_identity(&mesh, &h, &b, shapes::cap_apex(1.0));
            residuals.push(report.residual.abs());
        }
        assert!(residuals[1] < residuals[0], "{residuals:?}");
    }

    /// The pointwise square expansion used to rearrange the annulus
    /// integrals holds exactly when H is normal to the plane defining the
    /// tangential projection.
    #[test]
    fn complete_square_identity_pointwise() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        fn rv(rng: &mut rand_chacha::ChaCha8Rng) -> Vec3 {
            vec3(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        }
        for _ in 0..200 {
            let n = match rv(&mut rng).normalized() {
                Some(n) => n,
                None => continue,
            };
            let h = n * rng.random_range(-3.0..3.0);
            let v = rv(&mut rng);
            let v_perp = n * v.dot(n);
            let lhs = 2.0 * (h / 4.0 + v_perp).norm_sq();
            let rhs = h.norm_sq() / 8.0 + 2.0 * v_perp.norm_sq() + h.dot(v);
            assert!((lhs - rhs).abs() < 1e-12, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn profile_rejects_bad_monotonicity_input() {
        let profile = RadialProfile {
            center: [0.0; 3],
            radii: vec![0.5, 0.4],
            g: vec![0.0; 2],
            g_hat: vec![0.0; 2],
            sum: vec![0.0; 2],
            annulus_lhs: vec![0.0; 2],
            delta_rhs: vec![0.0; 2],
        };
        assert!(monotonicity_check(&profile, 1e-3).is_err());
    }
}
