// Localize the binned-TV discretization bias: stationary start, one checkpoint.
use heavytail::construct::{speed_function, ProcessSpec};
use heavytail::density::{make_density, DensityModel};
use heavytail::diagnostics::*;
use heavytail::sde::StepPolicy;
use std::sync::Arc;

fn main() {
    let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
    let sf = Arc::new(speed_function(&d, 1.0, 1.0).unwrap());
    let hist = PiHistogram::new(&d, 64, 0.999).unwrap();
    let n = 40_000usize;

    for (label, spec, policy) in [
        ("langevin h=1e-3", ProcessSpec::langevin(Arc::clone(&d)), StepPolicy::uniform(1e-3).unwrap()),
        ("langevin h=4e-3", ProcessSpec::langevin(Arc::clone(&d)), StepPolicy::uniform(4e-3).unwrap()),
        ("accel k=5e-3", ProcessSpec::accelerated(Arc::clone(&sf)), StepPolicy::adaptive_speed(5e-3, 5e-3).unwrap()),
        ("accel k=5e-3 hmax=2e-4", ProcessSpec::accelerated(Arc::clone(&sf)), StepPolicy::adaptive_speed(2e-4, 5e-3).unwrap()),
    ] {
        let states = ensemble_checkpoint_states(
            &spec, X0Policy::Stationary, &[1.0], n, &policy, Seeding::new(77)).unwrap();
        let mut counts = vec![0u32; hist.bins()];
        for &x in &states[0] { counts[hist.bin_index(x)] += 1; }
        let tv = hist.tv_from_counts(&counts, n);
        print!("{label}: TV={tv:.4}  rel bin errors:");
        for b in [0usize, 1, 2, 5, 10, 20, 40, 63, 64] {
            let p_hat = counts[b] as f64 / n as f64;
            print!(" b{b}:{:+.2}", (p_hat - hist.masses[b]) / hist.masses[b]);
        }
        println!();
    }
    println!("edges: {:?}", &hist.edges[..8]);
    println!("floor(65,4e4) = {:.4}", tv_noise_floor(65, n));
}
