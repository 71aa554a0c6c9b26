use freebound::{operators, shapes};

fn main() {
    // Sphere calibration with icosphere.
    for level in [3usize, 4, 5] {
        let mesh = shapes::closed_sphere(1.0, level).unwrap();
        let h = operators::mean_curvature(&mesh).unwrap();
        let mut worst = 0.0f64;
        let mut mse = 0.0;
        let areas = mesh.vertex_areas();
        for i in 0..mesh.vertex_count() {
            let e = (h.field.values[i].norm() - 2.0).abs();
            worst = worst.max(e);
            mse += e * e * areas[i];
        }
        println!("icosphere level {level}: V={} worst |H|-2 err {:.3e}, L2 {:.3e}", mesh.vertex_count(), worst, (mse / mesh.total_area()).sqrt());
    }
    // Cap curvature pointwise + Willmore split.
    for r in [0.5f64, 1.0, 2.0] {
        for res in [48usize, 96, 128] {
            let mesh = shapes::spherical_cap(r, res).unwrap();
            let h = operators::mean_curvature(&mesh).unwrap();
            let b = operators::conormal(&mesh).unwrap();
            let areas = mesh.vertex_areas();
            let mut worst = 0.0f64;
            let mut mse = 0.0;
            let mut interior_area = 0.0;
            for i in 0..mesh.vertex_count() {
                if mesh.is_boundary_vertex(i) { continue; }
                let e = (h.field.values[i].norm() - 2.0 / r).abs();
                worst = worst.max(e);
                mse += e * e * areas[i];
                interior_area += areas[i];
            }
            let q = operators::h2_integral_interior(&mesh, &h) / 4.0;
            let bt = b.position_conormal_integral(&mesh);
            let w = q + bt;
            let two_pi = std::f64::consts::TAU;
            println!(
                "cap r={r} res={res}: worst dH {:.3e} L2 {:.3e} | q={:.5} (exact {:.5}) bt={:.5} (exact {:.5}) W-2pi={:+.5} rel {:.3e} | strip bound {:.4}",
                worst, (mse / interior_area).sqrt(),
                q, 2.0 * std::f64::consts::PI * (1.0 - r / (1.0 + r * r).sqrt()),
                bt, shapes::cap_boundary_length(r),
                w - two_pi, (w - two_pi).abs() / two_pi,
                h.boundary_strip_h2_bound / 4.0,
            );
        }
    }
}
