use freebound::{monotonicity, operators, shapes, vec3::Vec3};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let mesh = shapes::spherical_cap(1.0, 48).unwrap();
    let h = operators::mean_curvature(&mesh).unwrap();
    let b = operators::conormal(&mesh).unwrap();
    println!("setup {:?} (V={} F={})", t0.elapsed(), mesh.vertex_count(), mesh.face_count());
    let t = Instant::now();
    let radii: Vec<f64> = (0..24).map(|k| 0.15 + 0.08 * k as f64).collect();
    let p = monotonicity::g_profile(&mesh, &h, &b, Vec3::ZERO, &radii).unwrap();
    println!("profile at 0: {:?}", t.elapsed());
    let t = Instant::now();
    let p2 = monotonicity::g_profile(&mesh, &h, &b, shapes::cap_apex(1.0), &radii).unwrap();
    println!("profile at apex: {:?}", t.elapsed());
    let t = Instant::now();
    let d = monotonicity::tilde_density(&mesh, shapes::cap_apex(1.0));
    println!("tilde density: {:?} -> {}", t.elapsed(), d.estimate);
    let t = Instant::now();
    let (md, _, _) = monotonicity::max_tilde_density(&mesh);
    println!("max density: {:?} -> {}", t.elapsed(), md);
    let _ = (p, p2);
}
