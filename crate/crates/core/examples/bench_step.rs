// Micro-benchmark of the simulation hot loop.
use heavytail::construct::{speed_function, ProcessSpec};
use heavytail::density::{make_density, DensityModel};
use heavytail::rng::{NormalMethod, Stream};
use heavytail::sde::{simulate_visit, StepPolicy};
use std::ops::ControlFlow;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
    let sf = Arc::new(speed_function(&d, 1.0, 1.0).unwrap());

    // Raw normal draws.
    let mut s = Stream::new(1, 0, NormalMethod::InverseCdf);
    let t0 = Instant::now();
    let mut acc = 0.0;
    for _ in 0..10_000_000 {
        acc += s.standard_normal();
    }
    println!("normal draw: {:.1} ns  (acc {acc:.3})", t0.elapsed().as_nanos() as f64 / 1e7);

    // Langevin steps.
    let spec = ProcessSpec::langevin(Arc::clone(&d));
    let policy = StepPolicy::uniform(1e-3).unwrap();
    let mut stream = Stream::new(2, 0, NormalMethod::InverseCdf);
    let t0 = Instant::now();
    let mut v = |_t: f64, _x: f64, _p: f64| ControlFlow::<()>::Continue(());
    let summary = simulate_visit(&spec, 5.0, 5000.0, &policy, &mut stream, &[], &mut v).unwrap();
    println!(
        "langevin step: {:.1} ns ({} steps)",
        t0.elapsed().as_nanos() as f64 / summary.steps as f64,
        summary.steps
    );

    // Accelerated steps.
    let spec = ProcessSpec::accelerated(Arc::clone(&sf));
    let policy = StepPolicy::adaptive_speed(2e-3, 2e-3).unwrap();
    let mut stream = Stream::new(3, 0, NormalMethod::InverseCdf);
    let t0 = Instant::now();
    let mut v = |_t: f64, _x: f64, _p: f64| ControlFlow::<()>::Continue(());
    let summary = simulate_visit(&spec, 50.0, 10.0, &policy, &mut stream, &[], &mut v).unwrap();
    println!(
        "accelerated step: {:.1} ns ({} steps)",
        t0.elapsed().as_nanos() as f64 / summary.steps as f64,
        summary.steps
    );
}
