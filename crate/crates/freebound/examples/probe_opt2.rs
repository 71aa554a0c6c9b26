use freebound::{optimizer, shapes, curve::ClosedPolyline, vec3::vec3};
use std::f64::consts::PI;
use std::time::Instant;

fn perturbed_circle(n: usize, amp: f64, mode: u32) -> ClosedPolyline {
    ClosedPolyline::new((0..n).map(|k| {
        let t = 2.0 * PI * k as f64 / n as f64;
        let r = 1.0 + amp * (mode as f64 * t).sin();
        vec3(r * t.cos(), r * t.sin(), 0.0)
    }).collect()).unwrap()
}

fn main() {
    let c = shapes::ellipse(2.0, 1.0, 96).unwrap();
    let t0 = Instant::now();
    let cfg = optimizer::OptimizerConfig { max_iters: 8000, ..Default::default() };
    let trace = optimizer::minimize(&c, &cfg).unwrap();
    let last = trace.entries.last().unwrap();
    println!("elapsed {:?} iters {} final {} (target {}) converged {} ls_fail {}",
        t0.elapsed(), last.iter, last.objective, 2.0 * PI * 1.01, trace.converged, trace.line_search_failed);
    // waypoints
    for e in trace.entries.iter().step_by(800) {
        println!("  iter {:4}  obj {:.6}  |g| {:.4}  step {:.5}", e.iter, e.objective, e.grad_norm, e.step);
    }
}
