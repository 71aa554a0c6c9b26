use freebound::{optimizer, shapes};
fn main() {
    let c = shapes::ellipse(2.0, 1.0, 96).unwrap();
    let cfg = optimizer::OptimizerConfig { max_iters: 600, ..Default::default() };
    let trace = optimizer::minimize(&c, &cfg).unwrap();
    println!("converged {} ls_failed {} entries {}", trace.converged, trace.line_search_failed, trace.entries.len());
    for e in trace.entries.iter().take(3) { println!("{:?}", e); }
    for e in trace.entries.iter().rev().take(6).collect::<Vec<_>>().iter().rev() { println!("{:?}", e); }
}
