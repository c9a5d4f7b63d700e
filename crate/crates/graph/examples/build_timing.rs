//! Wall-clock of the accelerated builder on a few desk-scale instances.
//! `cargo run --release -p wdrcm-graph --example build_timing`

use std::time::Instant;

use wdrcm_core::{sample_poisson_points, BoxGeometry, SeedSpec};
use wdrcm_graph::{build_accelerated, build_augmented};
use wdrcm_kernels::{Family, KernelSpec};

fn main() {
    let cases = [
        ("min g=0.75 d=1.5", KernelSpec::new(Family::MinEnvelope, 0.75, 1.5), 100_000.0),
        ("min g=0.9 d=1.1", KernelSpec::new(Family::MinEnvelope, 0.9, 1.1), 100_000.0),
        ("min g=0.4 d=2", KernelSpec::new(Family::MinEnvelope, 0.4, 2.0), 200_000.0),
        ("pa g=0.75 d=1.5", KernelSpec::new(Family::PaEnvelope, 0.75, 1.5), 100_000.0),
        ("soft g=0.5 d=2", KernelSpec::new(Family::SoftBooleanSum, 0.5, 2.0), 100_000.0),
    ];
    for (name, spec, n) in cases {
        let g = BoxGeometry::torus(2, f64::sqrt(n)).unwrap();
        let seed = SeedSpec::new(1);
        let p = sample_poisson_points(&g, 1.0, &seed).unwrap();
        let t0 = Instant::now();
        let gr = build_accelerated(&p, &spec, &seed).unwrap();
        let t1 = t0.elapsed();
        let aug = build_augmented(&gr, &p, &spec).unwrap();
        println!(
            "{name:>18}: n={} edges={} mean_deg={:.2} build={:.2?} augmented_edges={} aug={:.2?}",
            p.len(),
            gr.edge_count(),
            2.0 * gr.edge_count() as f64 / p.len() as f64,
            t1,
            aug.edge_count(),
            t0.elapsed() - t1
        );
    }
}
