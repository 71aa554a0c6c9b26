use freebound::{operators, shapes, willmore, vec3::Vec3, vec3::Mat3};
fn main() {
    let a = shapes::flat_disk(48).unwrap();
    let rot = Mat3::rotation(Vec3::EY, std::f64::consts::FRAC_PI_2);
    let b = a.transformed(rot, 1.0, Vec3::ZERO).unwrap();
    let union = a.disjoint_union(&b).unwrap();
    let h = operators::mean_curvature(&union).unwrap();
    let bd = operators::conormal(&union).unwrap();
    let r = willmore::willmore_energy(&union, &h, &bd).unwrap();
    println!("W = {} (4pi = {})", r.willmore, 4.0 * std::f64::consts::PI);
    println!("max density = {} at vertex {} (conf {})", r.max_tilde_density, r.density_argmax_vertex, r.density_confidence_width);
    println!("li_yau lhs = {} rhs = {}", r.li_yau_lhs, r.willmore);
    let v = union.vertices()[r.density_argmax_vertex];
    println!("argmax vertex at {:?} |v|={}", v, v.norm());
}
