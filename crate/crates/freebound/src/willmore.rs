//! Willmore energy with the free boundary term, the sharp lower bound and
//! multiplicity estimate, and equality-case diagnostics.
//!
//! For a surface meeting the unit sphere, the energy is one quarter of the
//! curvature integral plus the boundary integral of x . eta (the geodesic
//! curvature of a free boundary reduces to exactly that product). The sharp
//! bound states 2 pi times the maximal tilde density never exceeds the
//! energy; equality pins the surface to a round cap or a flat unit disk,
//! which the defect field H/4 + (x - x0)^perp / |x - x0|^2 detects.

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::monotonicity::{self, DensityEstimate};
use crate::operators::{h2_integral_interior, BoundaryField, MeanCurvatureField};
use crate::vec3::Vec3;
use serde::Serialize;
use std::f64::consts::PI;

/// Willmore data for one mesh.
#[derive(Debug, Clone, Serialize)]
pub struct WillmoreReport {
    pub quarter_h2: f64,
    pub boundary_term: f64,
    pub willmore: f64,
    pub max_tilde_density: f64,
    pub li_yau_lhs: f64,
    pub embedded_flag_threshold: bool,
    pub equality_defect: f64,
    /// Vertex realizing the maximal tilde density; the equality defect is
    /// evaluated there.
    pub density_argmax_vertex: usize,
    pub density_confidence_width: f64,
    /// Admissibility diagnostics: worst | |v| - 1 | over boundary vertices
    /// and worst angle (degrees) between the conormal and the radial
    /// direction.
    pub boundary_radius_defect: f64,
    pub conormal_angle_deg: f64,
    /// Quadrature uncertainty from the skipped boundary strip of the
    /// curvature energy.
    pub quarter_h2_strip_uncertainty: f64,
    /// Largest tangential fraction of the raw cotangent curvature.
    pub h_tangential_fraction: f64,
}

/// Measured deviation from the free boundary configuration w.r.t. the unit
/// sphere: how far boundary vertices sit from the sphere, and how far the
/// conormal tilts from the radial direction.
pub fn unit_ball_admissibility(mesh: &TriangleMesh, boundary: &BoundaryField) -> (f64, f64) {
    let mut radius_defect = 0.0f64;
    let mut angle = 0.0f64;
    for (k, &v) in boundary.vertex_indices.iter().enumerate() {
        let x = mesh.vertices()[v];
        radius_defect = radius_defect.max((x.norm() - 1.0).abs());
        if let Some(radial) = x.normalized() {
            let cosine = boundary.conormals[k].dot(radial).clamp(-1.0, 1.0);
            angle = angle.max(cosine.acos());
        }
    }
    (radius_defect, angle.to_degrees())
}

/// Willmore energy report with density search and equality diagnostics.
pub fn willmore_energy(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    boundary: &BoundaryField,
) -> Result<WillmoreReport> {
    if !mesh.has_boundary() {
        return Err(Error::NoBoundary);
    }
    let quarter_h2 = h2_integral_interior(mesh, h) / 4.0;
    let boundary_term = boundary.position_conormal_integral(mesh);
    let willmore = quarter_h2 + boundary_term;
    let (max_density, argmax, est) = monotonicity::max_tilde_density(mesh);
    let equality_defect = equality_diagnostics(mesh, h, mesh.vertices()[argmax])?;
    let (radius_defect, angle_deg) = unit_ball_admissibility(mesh, boundary);
    Ok(WillmoreReport {
        quarter_h2,
        boundary_term,
        willmore,
        max_tilde_density: max_density,
        li_yau_lhs: 2.0 * PI * max_density,
        embedded_flag_threshold: willmore < 4.0 * PI,
        equality_defect,
        density_argmax_vertex: argmax,
        density_confidence_width: est.confidence_width,
        boundary_radius_defect: radius_defect,
        conormal_angle_deg: angle_deg,
        quarter_h2_strip_uncertainty: h.boundary_strip_h2_bound / 4.0,
        h_tangential_fraction: h.max_tangential_fraction,
    })
}

/// Verdict of the multiplicity bound 2 pi max-density <= energy.
#[derive(Debug, Clone, Serialize)]
pub struct LiYauVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
    pub embedded_flag_threshold: bool,
}

pub fn li_yau_check(report: &WillmoreReport, tol: f64) -> LiYauVerdict {
    LiYauVerdict {
        lhs: report.li_yau_lhs,
        rhs: report.willmore,
        tol,
        pass: report.li_yau_lhs <= report.willmore + tol,
        embedded_flag_threshold: report.embedded_flag_threshold,
    }
}

/// L2 norm (against the area measure) of H/4 + (x - x0)^perp / |x - x0|^2.
/// Near zero exactly on round caps through the osculating sphere at x0 and
/// on flat disks through x0.
pub fn equality_diagnostics(
    mesh: &TriangleMesh,
    h: &MeanCurvatureField,
    x0: Vec3,
) -> Result<f64> {
    if !x0.is_finite() {
        return Err(Error::invalid("diagnostics center must be finite"));
    }
    Ok(monotonicity::equality_defect_l2(mesh, h, x0))
}

/// Density estimate at a single point, re-exported for report assembly.
pub fn density_at(mesh: &TriangleMesh, x0: Vec3) -> DensityEstimate {
    monotonicity::tilde_density(mesh, x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{conormal, mean_curvature};
    use crate::shapes;
    use crate::vec3::{vec3, Mat3};

    fn report_for(mesh: &TriangleMesh) -> WillmoreReport {
        let h = mean_curvature(mesh).unwrap();
        let b = conormal(mesh).unwrap();
        willmore_energy(mesh, &h, &b).unwrap()
    }

    #[test]
    fn flat_disk_energy_is_two_pi() {
        let mesh = shapes::flat_disk(48).unwrap();
        let r = report_for(&mesh);
        assert!(r.quarter_h2 < 1e-10, "quarter_h2 {}", r.quarter_h2);
        assert!((r.boundary_term - 2.0 * PI).abs() < 1e-3);
        assert!((r.willmore - 2.0 * PI).abs() < 1e-3);
        assert!(r.willmore == r.quarter_h2 + r.boundary_term);
        assert!(r.embedded_flag_threshold);
        assert!((r.max_tilde_density - 1.0).abs() < 2e-2);
        assert!(r.equality_defect < 1e-5, "defect {}", r.equality_defect);
        assert!(r.boundary_radius_defect < 1e-12);
        let verdict = li_yau_check(&r, 0.05);
        assert!(verdict.pass);
    }

    #[test]
    fn cap_energies_are_two_pi() {
        for &radius in &[0.5, 1.0, 2.0] {
            let mesh = shapes::spherical_cap(radius, 48).unwrap();
            let r = report_for(&mesh);
            let rel = (r.willmore - 2.0 * PI).abs() / (2.0 * PI);
            assert!(rel < 1.2e-2, "cap r={radius}: rel error {rel}");
            assert!(r.equality_defect < 0.05, "cap r={radius}: defect {}", r.equality_defect);
            // The discrete conormal tilts O(h) along the meridian; it must
            // clear the 2-degree admissibility gate with room to spare.
            assert!(r.conormal_angle_deg < 1.0, "angle {}", r.conormal_angle_deg);
        }
    }

    #[test]
    fn perturbed_cap_has_strict_margin_and_defect() {
        let mesh = shapes::perturbed_cap(1.0, 48, 0.12, 3, 11).unwrap();
        let r = report_for(&mesh);
        assert!(r.willmore > 2.0 * PI + 0.05, "W = {}", r.willmore);
        let smooth = report_for(&shapes::spherical_cap(1.0, 48).unwrap());
        assert!(
            r.equality_defect > 5.0 * smooth.equality_defect.max(1e-4),
            "perturbed defect {} vs smooth {}",
            r.equality_defect,
            smooth.equality_defect
        );
        // The multiplicity bound must still hold.
        assert!(li_yau_check(&r, 1e-3).pass);
    }

    #[test]
    fn two_disjoint_disks_reach_density_two() {
        // Fine enough that the density ladder stays below the distance from
        // the intersection line to either boundary circle.
        let a = shapes::flat_disk(48).unwrap();
        let rot = Mat3::rotation(Vec3::EY, std::f64::consts::FRAC_PI_2);
        let b = a.transformed(rot, 1.0, Vec3::ZERO).unwrap();
        let union = a.disjoint_union(&b).unwrap();
        let r = report_for(&union);
        assert!((r.max_tilde_density - 2.0).abs() < 0.1, "density {}", r.max_tilde_density);
        assert!((r.willmore - 4.0 * PI).abs() / (4.0 * PI) < 1e-2);
        // W sits numerically at the 4 pi threshold here, so the embedded
        // flag is not asserted either way. The density argmax lands on
        // crossing vertices near a boundary circle, where the ladder
        // extrapolation carries a ~2% artifact; the bound must hold within
        // that resolution limit.
        assert!(li_yau_check(&r, 2.0 * PI * 2.0 * 0.025).pass);
    }

    #[test]
    fn stronger_bound_when_surface_passes_through_origin() {
        // 2 pi theta^2(0) + (1/8) integral |H|^2 <= W; the flat disk through
        // the origin realizes equality.
        let mesh = shapes::flat_disk(32).unwrap();
        let h = mean_curvature(&mesh).unwrap();
        let b = conormal(&mesh).unwrap();
        let theta0 = monotonicity::tilde_density(&mesh, Vec3::ZERO).estimate;
        let h2 = crate::operators::h2_integral_interior(&mesh, &h);
        let lhs = 2.0 * PI * theta0 + h2 / 8.0;
        let w = willmore_energy(&mesh, &h, &b).unwrap().willmore;
        assert!(lhs <= w + 0.05, "lhs {lhs} vs W {w}");
        assert!((lhs - w).abs() < 0.05);
    }

    #[test]
    fn equality_diagnostics_separates_cap_from_perturbed() {
        let mut defects = Vec::new();
        for res in [24usize, 48] {
            let cap = shapes::spherical_cap(1.0, res).unwrap();
            let h = mean_curvature(&cap).unwrap();
            let apex = shapes::cap_apex(1.0);
            defects.push(equality_diagnostics(&cap, &h, apex).unwrap());
        }
        assert!(defects[1] < defects[0], "{defects:?}");

        let perturbed = shapes::perturbed_cap(1.0, 48, 0.12, 3, 5).unwrap();
        let h = mean_curvature(&perturbed).unwrap();
        let d = equality_diagnostics(&perturbed, &h, shapes::cap_apex(1.0)).unwrap();
        assert!(d > 10.0 * defects[1], "perturbed {d} vs cap {}", defects[1]);
    }

    #[test]
    fn willmore_is_rotation_invariant() {
        let mesh = shapes::spherical_cap(1.0, 24).unwrap();
        let rot = Mat3::rotation(vec3(1.0, -0.3, 0.7), 1.1);
        let rotated = mesh.transformed(rot, 1.0, Vec3::ZERO).unwrap();
        let (h1, b1) = (mean_curvature(&mesh).unwrap(), conormal(&mesh).unwrap());
        let (h2, b2) = (mean_curvature(&rotated).unwrap(), conormal(&rotated).unwrap());
        let w1 = h2_integral_interior(&mesh, &h1) / 4.0 + b1.position_conormal_integral(&mesh);
        let w2 = h2_integral_interior(&rotated, &h2) / 4.0
            + b2.position_conormal_integral(&rotated);
        assert!((w1 - w2).abs() < 1e-10 * w1.abs(), "{w1} vs {w2}");
    }

    #[test]
    fn boundaryless_mesh_rejected() {
        let sphere = shapes::closed_sphere(1.0, 2).unwrap();
        let h = mean_curvature(&sphere).unwrap();
        let disk = shapes::flat_disk(8).unwrap();
        let b = conormal(&disk).unwrap();
        assert!(willmore_energy(&sphere, &h, &b).is_err());
    }
}
