// Which density does the simulated accelerated process equilibrate to:
// pi, or the speed measure pi/f^2 (normalized)?
use heavytail::construct::{speed_function, ProcessSpec};
use heavytail::density::{make_density, DensityModel};
use heavytail::diagnostics::*;
use heavytail::numerics::quad;
use heavytail::sde::StepPolicy;
use std::sync::Arc;

fn main() {
    let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
    let sf = Arc::new(speed_function(&d, 1.0, 1.0).unwrap());
    let hist = PiHistogram::new(&d, 64, 0.999).unwrap();
    let n = 40_000usize;

    // Candidate: speed measure rho = pi/f^2 normalized; masses per bin.
    let rho_un = |x: f64| d.pi(x) / sf.f2(x);
    let z_rho = quad::integrate_to_infinity(|x| rho_un(x), 0.0, 1e-10, 0.0).unwrap().value;
    let mut rho_m = Vec::new();
    for w in hist.edges.windows(2) {
        rho_m.push(quad::integrate(|x| rho_un(x), w[0], w[1], 1e-10, 0.0).unwrap().value / z_rho);
    }
    let tail = hist.edges.last().copied().unwrap();
    rho_m.push(quad::integrate_to_infinity(|x| rho_un(x), tail, 1e-10, 0.0).unwrap().value / z_rho);
    println!("Z_rho = {z_rho:.6}");

    let spec = ProcessSpec::accelerated(Arc::clone(&sf));
    for (t, kappa) in [(5.0, 5e-3), (5.0, 2e-3), (10.0, 5e-3)] {
        let policy = StepPolicy::adaptive_speed(kappa, kappa).unwrap();
        let states = ensemble_checkpoint_states(
            &spec, X0Policy::Stationary, &[t], n, &policy, Seeding::new(88)).unwrap();
        let mut counts = vec![0u32; hist.bins()];
        for &x in &states[0] { counts[hist.bin_index(x)] += 1; }
        let tv_pi = hist.tv_from_counts(&counts, n);
        let tv_rho: f64 = 0.5
            * counts
                .iter()
                .zip(rho_m.iter())
                .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
                .sum::<f64>();
        println!("t={t} kappa={kappa}: TV(emp, pi) = {tv_pi:.4}   TV(emp, rho) = {tv_rho:.4}   floor = {:.4}",
                 tv_noise_floor(hist.bins(), n));
    }
    // Analytic TV(pi, rho).
    let tvd = 0.5 * quad::integrate_to_infinity(|x| (d.pi(x) - rho_un(x)/z_rho).abs(), 0.0, 1e-8, 1e-12).unwrap().value;
    println!("analytic TV(pi, rho) = {tvd:.4}");
}
